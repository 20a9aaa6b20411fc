import json
import math
import subprocess
import sys

import pytest

from turyn import io as tio
from turyn.cli import main
from turyn.svgplot import PlotSpec, Series, nice_ticks, render_svg


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_poly_text(capsys):
    code, out, _ = run(capsys, "poly", "--p", "5", "--t", "0")
    assert code == 0
    assert out.splitlines()[0] == "coeffs 0 1 -1 -1 1"


def test_poly_json(capsys):
    code, out, _ = run(capsys, "poly", "--p", "101", "--t", "25", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "turyn.poly/v1"
    assert doc["l2"] == pytest.approx(10.0)
    assert len(doc["coeffs"]) == 101


def test_poly_companion_and_generalized(capsys):
    _, out, _ = run(capsys, "poly", "--p", "5", "--t", "1", "--companion", "+", "--json")
    assert json.loads(out)["coeffs"] == [1, -1, -1, 1, 1]
    _, out, _ = run(capsys, "poly", "--p", "5", "--d", "5", "--json")
    assert json.loads(out)["coeffs"] == [0, 1, -1, -1, 1, 0]


def test_poly_invalid_prime(capsys):
    code, _, err = run(capsys, "poly", "--p", "4", "--t", "0")
    assert code == 2
    assert "p must be an odd prime" in err


def test_measure_both(capsys):
    code, out, _ = run(capsys, "measure", "--p", "13", "--t", "3", "--method", "both", "--json")
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["delta"]) <= 1e-6
    assert doc["panels"]["normalized"] == pytest.approx(doc["panels"]["value"] / math.sqrt(13))


def test_measure_known(capsys):
    _, out, _ = run(capsys, "measure", "--lehmer")
    assert "M 1.17628" in out
    _, out, _ = run(capsys, "measure", "--fb", "--json")
    assert json.loads(out)["panels"]["normalized"] == pytest.approx(0.98636, abs=1e-5)


def test_kappa_examples(capsys):
    _, out, _ = run(capsys, "kappa", "--alpha", "0.25", "--J", "1")
    lines = out.splitlines()
    assert lines[0] == "alpha,q,J,method,value,std_err,samples,seed"
    assert lines[1].split(",")[4] == "0.95073546"
    _, out, _ = run(capsys, "kappa", "--alpha", "0", "--J", "4", "--json")
    doc = json.loads(out)
    assert doc["schema"] == "turyn.kappa/v1"
    assert round(doc["value"], 8) == 0.73584586


def test_kappa_mc_deterministic(capsys):
    args = ("kappa", "--alpha", "1/4", "--J", "6", "--mc", "--samples", "5000", "--seed", "7")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args, "--threads", "2")
    assert a == b
    assert a.splitlines()[1].split(",")[3] == "monte_carlo"


def test_kappa_cap_error(capsys):
    code, _, err = run(capsys, "kappa", "--alpha", "0.25", "--J", "20")
    assert code == 2
    assert "--mc" in err
    code, _, _ = run(capsys, "kappa", "--alpha", "0.25", "--J", "5", "--mc")
    assert code == 2


def test_kappa_table1(capsys):
    _, out, _ = run(capsys, "kappa", "--table1", "--jmax", "3")
    rows = [ln.split(",") for ln in out.splitlines()]
    assert rows[0] == ["J", "fekete", "quarter"]
    assert rows[1] == ["1", "0.72251765", "0.95073546"]
    assert rows[2] == ["2", "0.73134619", "0.95138014"]


def test_fit_fixture(capsys):
    code, out, _ = run(capsys, "fit", "--fixture", "table1:fekete", "--jmin", "7", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["r"] == pytest.approx(0.73990, abs=5e-4)
    assert doc["J_range"] == [7, 18]
    code, _, _ = run(capsys, "fit", "--fixture", "table1:half")
    assert code == 2


def test_sweep_plot_round_trip(tmp_path, capsys):
    csv_path, svg1, svg2 = tmp_path / "s.csv", tmp_path / "a.svg", tmp_path / "b.svg"
    code, _, _ = run(capsys, "sweep", "--J", "2", "3", "--step", "1/16", "--out", str(csv_path), "--svg", str(svg1))
    assert code == 0
    raw = csv_path.read_bytes()
    assert b"\r\n" not in raw
    rows = tio.read_rows(csv_path)
    assert len(rows) == 2 * 5
    assert list(rows[0]) == ["alpha", "J", "q", "method", "value", "std_err"]
    assert run(capsys, "plot", "--csv", str(csv_path), "--svg", str(svg2))[0] == 0
    assert svg1.read_bytes() == svg2.read_bytes()
    assert svg1.read_text().startswith("<svg")


def test_sweep_resume(tmp_path, capsys):
    out = tmp_path / "s.csv"
    run(capsys, "sweep", "--J", "2", "--alphas", "0", "1/8", "--out", str(out))
    first = out.read_text()
    run(capsys, "sweep", "--J", "2", "--alphas", "0", "1/8", "1/4", "--out", str(out), "--resume")
    lines = out.read_text().splitlines()
    assert len(lines) == 4
    assert first.splitlines()[1] == lines[1]


def test_sweep_gaps(tmp_path, capsys):
    out = tmp_path / "g.csv"
    code, _, _ = run(capsys, "sweep", "--gaps", "--pmin", "100", "--pmax", "115", "--out", str(out))
    assert code == 0
    rows = tio.read_rows(out)
    assert [int(r["p"]) for r in rows] == [101, 103, 107, 109, 113]
    assert all(abs(float(r[k])) < 0.05 for r in rows for k in r if k.startswith("gap"))


def test_sweep_empty_grid(tmp_path, capsys):
    code, _, _ = run(capsys, "sweep", "--J", "2", "--alpha-min", "0.3", "--alpha-max", "0.2", "--out", str(tmp_path / "x.csv"))
    assert code == 2


def test_output_file_and_threads_validation(tmp_path, capsys):
    out = tmp_path / "p.json"
    assert run(capsys, "poly", "--p", "7", "--json", "--output", str(out))[0] == 0
    assert json.loads(out.read_text())["p"] == 7
    assert run(capsys, "kappa", "--alpha", "0", "--J", "1", "--threads", "0")[0] == 2


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "turyn.cli", "poly", "--p", "3"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("coeffs 0 1 -1")


# -- io / svg helpers --------------------------------------------------------------


def test_json_document_schema():
    doc = json.loads(tio.json_document("thing", {"a": 1}))
    assert doc == {"schema": "turyn.thing/v1", "a": 1}


def test_row_appender_and_read_rows(tmp_path):
    path = tmp_path / "r.csv"
    with tio.RowAppender(path, ["a", "b"]) as w:
        w.write([1, 2])
    with tio.RowAppender(path, ["a", "b"]) as w:
        w.write([3, 4])
    assert tio.read_rows(path) == [{"a": "1", "b": "2"}, {"a": "3", "b": "4"}]


def test_svg_validation_and_determinism():
    spec = PlotSpec([Series("s", [0, 1, 2], [1.0, 0.5, 0.75], style="both")], xlabel="x <a>", ylabel="y")
    a, b = render_svg(spec), render_svg(spec)
    assert a == b and "x &lt;a&gt;" in a
    with pytest.raises(ValueError):
        render_svg(PlotSpec([Series("bad", [0, 1], [1.0, float("nan")])]))
    with pytest.raises(ValueError):
        render_svg(PlotSpec([Series("empty", [], [])]))
    with pytest.raises(ValueError):
        render_svg(PlotSpec([]))


def test_nice_ticks():
    assert nice_ticks(0, 1) == pytest.approx([0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert nice_ticks(0.72, 0.76)[0] >= 0.72
