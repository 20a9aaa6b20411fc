"""Command-line front end.

Subcommands: poly, measure, kappa, sweep, plot, fit.  Exit status is 0 on
success, 2 for usage or validation errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from functools import partial
from pathlib import Path

from . import io as tio
from .analysis import (
    CSV_FIELDS,
    SweepRow,
    SweepTable,
    convergence_table,
    estimate_kappa,
    extrapolate,
    fit_inverse_quadratic,
    format_row,
    sweep_alpha,
    table1_column,
)
from .circle_norms import (
    QuadratureConfig,
    mahler_measure_panels,
    mahler_measure_roots,
    measure_gap_companions,
    sup_norm,
)
from .number_theory import primes_in_range
from .parallel import map_blocks, resolve_workers
from .polynomials import (
    CirclePoly,
    TurynSpec,
    build_companion,
    build_generalized,
    build_turyn,
    l2_norm,
    l2k_norm_exact,
    merit_factor,
    nearest_shift,
)
from .quadrature import QuadratureError
from .rand_process import ENUMERATION_CAP, EnumerationCapExceeded
from .roots import RootFindingError
from .svgplot import PlotSpec, Series, render_svg

EXIT_USAGE = 2
EXIT_NUMERIC = 3

LEHMER = (1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1)
F_B = (1, -1, 1, -1, 1, 1, -1, -1, 1, 1, 1, 1, 1)
GAP_FIELDS = ("p", "t", "gap_plus", "gap_minus")


class UsageError(Exception):
    pass


def _fraction(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}") from None


def _out(args, text: str) -> None:
    if getattr(args, "output", None):
        tio.write_text(args.output, text)
    else:
        sys.stdout.write(text)


def _fmt(args, v: float) -> str:
    return f"{v:.{args.precision}f}"


def _qcfg(args) -> QuadratureConfig:
    return QuadratureConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol, max_depth=args.max_depth)


def _spec_poly(args) -> tuple[CirclePoly, dict]:
    if args.p is None:
        raise UsageError("--p is required")
    try:
        spec = TurynSpec(args.p, args.t, args.d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    meta = {"p": spec.p, "t": spec.t}
    if spec.d is not None:
        meta["d"] = spec.d
        if args.companion:
            raise UsageError("--companion cannot be combined with --d")
        return build_generalized(spec), meta
    if args.companion:
        meta["companion"] = args.companion
        return build_companion(spec, 1 if args.companion == "+" else -1), meta
    return build_turyn(spec), meta


# -- poly -------------------------------------------------------------------------


def cmd_poly(args) -> int:
    f, meta = _spec_poly(args)
    report = dict(meta)
    report["degree"] = f.degree
    report["coeffs"] = [int(c) for c in f.coeffs.tolist()]
    report["l2"] = l2_norm(f)
    for k in (2, 3, 4):
        report[f"l{2 * k}"] = l2k_norm_exact(f, k)
    try:
        report["merit_factor"] = merit_factor(f)
    except ZeroDivisionError:
        report["merit_factor"] = None
    report["sup_norm"] = sup_norm(f) if not f.is_zero() else 0.0
    if args.json:
        _out(args, tio.json_document("poly", report))
        return 0
    lines = ["coeffs " + " ".join(str(c) for c in report["coeffs"])]
    for key in ("l2", "l4", "l6", "l8", "merit_factor", "sup_norm"):
        v = report[key]
        lines.append(f"{key} " + ("undefined" if v is None else _fmt(args, v)))
    _out(args, "\n".join(lines) + "\n")
    return 0


# -- measure ----------------------------------------------------------------------


def cmd_measure(args) -> int:
    if args.lehmer or args.fb:
        f = CirclePoly(LEHMER if args.lehmer else F_B)
        meta = {"polynomial": "lehmer" if args.lehmer else "f_B"}
    else:
        f, meta = _spec_poly(args)
    cfg = _qcfg(args)
    results = {}
    if args.method in ("panels", "both"):
        results["panels"] = mahler_measure_panels(f, cfg)
    if args.method in ("roots", "both"):
        results["roots"] = mahler_measure_roots(f)
    # Turyn-type polynomials are normalized by sqrt(p), anything else by ||f||_2
    norm = math.sqrt(meta["p"]) if "p" in meta else l2_norm(f)
    report = dict(meta)
    for name, r in results.items():
        report[name] = {
            "value": r.value,
            "log_value": r.log_value,
            "normalized": r.value / norm,
            "err_estimate": r.err_estimate,
        }
    if len(results) == 2:
        report["delta"] = results["panels"].value - results["roots"].value
    if args.json:
        _out(args, tio.json_document("measure", report))
        return 0
    lines = []
    for name, r in results.items():
        lines.append(
            f"{name} M {_fmt(args, r.value)} normalized {_fmt(args, r.value / norm)} err {r.err_estimate:.2e}"
        )
    if "delta" in report:
        lines.append(f"delta {report['delta']:.3e}")
    _out(args, "\n".join(lines) + "\n")
    return 0


# -- kappa ------------------------------------------------------------------------


def cmd_kappa(args) -> int:
    workers = resolve_workers(args.threads)
    if args.table1:
        if args.jmax is None:
            raise UsageError("--table1 needs --jmax")
        if args.jmax > ENUMERATION_CAP:
            raise UsageError(f"--jmax must not exceed the enumeration cap {ENUMERATION_CAP}")
        table = convergence_table(args.jmax, workers=workers)
        rows = []
        for J in table.Js():
            vals = {r.alpha: r.value for r in table.rows if r.J == J}
            rows.append([str(J), _fmt(args, vals[0.0]), _fmt(args, vals[0.25])])
        if args.json:
            payload = {"columns": ["J", "fekete", "quarter"], "rows": [[int(r[0]), float(r[1]), float(r[2])] for r in rows]}
            _out(args, tio.json_document("table1", payload))
        else:
            _out(args, tio.csv_text(("J", "fekete", "quarter"), rows))
        return 0
    if args.alpha is None or args.J is None:
        raise UsageError("kappa needs --alpha and --J (or --table1)")
    if not 0 <= args.alpha <= 1:
        raise UsageError("--alpha must lie in [0, 1]")
    if args.J < 1:
        raise UsageError("--J must be >= 1")
    use_mc = args.mc or args.q > 0
    if use_mc and args.samples is None:
        raise UsageError("Monte-Carlo estimates need --samples")
    if not use_mc and args.J > ENUMERATION_CAP:
        raise UsageError(
            f"J = {args.J} exceeds the enumeration cap {ENUMERATION_CAP}; "
            "rerun with --mc --samples N --seed S for a Monte-Carlo estimate"
        )
    est = estimate_kappa(
        args.J,
        args.alpha,
        args.q,
        samples=args.samples if use_mc else None,
        seed=args.seed,
        workers=workers,
        cfg=_qcfg(args),
    )
    if args.json:
        _out(args, tio.json_document("kappa", est.to_dict()))
    else:
        _out(args, est.to_csv(args.precision))
    return 0


# -- sweep ------------------------------------------------------------------------


def _alpha_grid(args) -> list[float]:
    if args.alphas is not None:
        grid = args.alphas
    else:
        step = Fraction(args.step).limit_denominator(10**6)
        if step <= 0:
            raise UsageError("--step must be positive")
        lo = Fraction(args.alpha_min).limit_denominator(10**6)
        hi = Fraction(args.alpha_max).limit_denominator(10**6)
        grid = []
        a = lo
        while a <= hi:
            grid.append(float(a))
            a += step
    if not grid:
        raise UsageError("empty alpha grid")
    return grid


def _sweep_plot(table: SweepTable) -> PlotSpec:
    series = []
    for J in table.Js():
        x, y = table.series(J)
        if len(x):
            series.append(Series(f"J = {J}", x.tolist(), y.tolist(), style="line"))
    ylab = "kappa_0^J(alpha)" if table.q == 0 else f"kappa_{table.q:g}^J(alpha)"
    return PlotSpec(series, xlabel="alpha", ylabel=ylab)


def _gap_plot(rows: list[dict]) -> PlotSpec:
    ps = [float(r["p"]) for r in rows]
    return PlotSpec(
        [
            Series("F+ gap", ps, [float(r["gap_plus"]) for r in rows], style="marker", color="#000000"),
            Series("F- gap", ps, [float(r["gap_minus"]) for r in rows], style="marker", color="#c0392b"),
        ],
        xlabel="p",
        ylabel="(M(F±) - M(F)) / sqrt(p)",
        hline=0.0,
    )


def _gap_job(p, alpha, cfg):
    t = nearest_shift(p, alpha) % p or p
    gp, gm = measure_gap_companions(p, t, cfg)
    return p, t, gp, gm


def cmd_sweep(args) -> int:
    workers = resolve_workers(args.threads)
    out = Path(args.out)
    if args.gaps:
        return _sweep_gaps(args, out, workers)
    grid = _alpha_grid(args)
    if not args.J:
        raise UsageError("sweep needs at least one --J")
    samples = args.samples if (args.mc or args.q > 0) else None
    if samples is None and (args.mc or args.q > 0):
        raise UsageError("Monte-Carlo sweeps need --samples")
    if samples is None and max(args.J) > ENUMERATION_CAP:
        raise UsageError(f"J exceeds the enumeration cap {ENUMERATION_CAP}; use --mc --samples N")
    table = None
    if args.resume and out.exists() and out.stat().st_size:
        table = SweepTable.from_csv(out.read_text())
        # failed rows (nan) are retried
        table.rows = [r for r in table.rows if math.isfinite(r.value)]
    elif out.exists() and not args.resume:
        out.unlink()
    with tio.RowAppender(out, CSV_FIELDS) as app:
        for J in args.J:
            table = sweep_alpha(
                J,
                grid,
                args.q,
                samples=samples,
                seed=args.seed,
                workers=workers,
                table=table,
                on_row=lambda row: app.write(format_row(row, args.precision)),
            )
    # final rewrite in canonical (alpha, J) order
    tio.write_text(out, table.to_csv(args.precision))
    failed = [r for r in table.rows if r.error]
    for r in failed:
        print(f"warning: alpha={r.alpha} J={r.J}: {r.error}", file=sys.stderr)
    if args.svg:
        final = SweepTable.from_csv(out.read_text())
        tio.write_text(args.svg, render_svg(_sweep_plot(final)))
    return EXIT_NUMERIC if failed else 0


def _sweep_gaps(args, out: Path, workers: int) -> int:
    if args.pmax is None:
        raise UsageError("gap sweeps need --pmax")
    try:
        primes = primes_in_range(args.pmin, args.pmax)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    alpha = args.alpha if args.alpha is not None else 0.25
    done = {}
    if args.resume and out.exists() and out.stat().st_size:
        for r in tio.read_rows(out):
            done[int(r["p"])] = r
    elif out.exists() and not args.resume:
        out.unlink()
    todo = [p for p in primes if p not in done]
    cfg = _qcfg(args)
    job = partial(_gap_job, alpha=alpha, cfg=cfg)
    with tio.RowAppender(out, GAP_FIELDS) as app:
        step = max(1, workers)
        for i in range(0, len(todo), step):
            for p, t, gp, gm in map_blocks(job, todo[i : i + step], workers):
                row = [str(p), str(t), _fmt(args, gp), _fmt(args, gm)]
                app.write(row)
                done[p] = dict(zip(GAP_FIELDS, row))
    rows = [done[p] for p in sorted(done)]
    tio.write_text(out, tio.csv_text(GAP_FIELDS, [[r[k] for k in GAP_FIELDS] for r in rows]))
    if args.svg:
        tio.write_text(args.svg, render_svg(_gap_plot(tio.read_rows(out))))
    return 0


# -- plot -------------------------------------------------------------------------


def cmd_plot(args) -> int:
    rows = tio.read_rows(args.csv)
    if not rows:
        raise UsageError("input CSV has no rows")
    if set(GAP_FIELDS) <= set(rows[0]):
        spec = _gap_plot(rows)
    elif set(CSV_FIELDS) <= set(rows[0]):
        spec = _sweep_plot(SweepTable.from_csv(Path(args.csv).read_text()))
    elif {"J", "value"} <= set(rows[0]):
        pts = sorted((int(r["J"]), float(r["value"])) for r in rows)
        spec = PlotSpec([Series("value", [p[0] for p in pts], [p[1] for p in pts], style="both")], xlabel="J")
    else:
        raise UsageError("unrecognized CSV layout")
    if args.title:
        spec.title = args.title
    tio.write_text(args.svg, render_svg(spec))
    return 0


# -- fit --------------------------------------------------------------------------


def cmd_fit(args) -> int:
    if args.fixture:
        name = " ".join(args.fixture)
        src, _, col = name.partition(":")
        if src != "table1" or not col:
            raise UsageError("--fixture takes table1:<column>, e.g. table1:fekete")
        try:
            pts = table1_column(col)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    elif args.csv:
        pts = [(int(r["J"]), float(r["value"])) for r in tio.read_rows(args.csv)]
    else:
        raise UsageError("fit needs --fixture or --csv")
    pts = [(J, v) for J, v in pts if J >= args.jmin and (args.jmax is None or J <= args.jmax)]
    try:
        fit = fit_inverse_quadratic(pts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        payload = fit.to_dict()
        payload["limit"] = extrapolate(fit)
        _out(args, tio.json_document("fit", payload))
    else:
        lines = [
            f"r {_fmt(args, fit.r)}",
            f"s {_fmt(args, fit.s)}",
            f"t {_fmt(args, fit.t)}",
            f"residual_rms {fit.residual_rms:.3e}",
            f"points {fit.n_points} J {fit.J_range[0]}..{fit.J_range[1]}",
            f"limit {_fmt(args, extrapolate(fit))}",
        ]
        _out(args, "\n".join(lines) + "\n")
    return 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=8, help="decimals in printed values")
    common.add_argument("--json", action="store_true", help="emit one JSON object")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--threads", type=int, help="worker processes (default: $THREADS or 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--abs-tol", type=float, default=1e-9)
    common.add_argument("--rel-tol", type=float, default=1e-8)
    common.add_argument("--max-depth", type=int, default=30)

    spec = argparse.ArgumentParser(add_help=False)
    spec.add_argument("--p", type=int)
    spec.add_argument("--t", type=int, default=0)
    spec.add_argument("--d", type=int)
    spec.add_argument("--companion", choices=("+", "-"), help="fill the zero coefficient with +1 or -1")

    parser = argparse.ArgumentParser(prog="turyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", parents=[common, spec], help="coefficients and exact norms")
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("measure", parents=[common, spec], help="Mahler measure")
    p.add_argument("--method", choices=("panels", "roots", "both"), default="panels")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lehmer", action="store_true", help="Lehmer's degree-10 polynomial")
    g.add_argument("--fb", action="store_true", help="the degree-12 Littlewood polynomial f_B")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("kappa", parents=[common], help="kappa_q^J(alpha) estimates")
    p.add_argument("--alpha", type=_fraction)
    p.add_argument("--J", type=int)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--mc", action="store_true", help="Monte-Carlo instead of enumeration")
    p.add_argument("--samples", type=int)
    p.add_argument("--table1", action="store_true", help="alpha = 0 and 1/4 for J = 1..jmax")
    p.add_argument("--jmax", type=int)
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("sweep", parents=[common], help="alpha sweeps or companion gap sweeps")
    p.add_argument("--J", type=int, nargs="+", default=[])
    p.add_argument("--alphas", type=_fraction, nargs="*")
    p.add_argument("--step", type=_fraction, default=Fraction(1, 1600))
    p.add_argument("--alpha-min", type=_fraction, default=0.0)
    p.add_argument("--alpha-max", type=_fraction, default=0.25)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--mc", action="store_true")
    p.add_argument("--samples", type=int)
    p.add_argument("--gaps", action="store_true", help="companion measure gaps over primes")
    p.add_argument("--alpha", type=_fraction, help="relative shift for --gaps (default 1/4)")
    p.add_argument("--pmin", type=int, default=3)
    p.add_argument("--pmax", type=int)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--svg", help="also write an SVG plot")
    p.add_argument("--resume", action="store_true", help="keep rows already in --out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="SVG from a sweep, gap or (J, value) CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--svg", required=True)
    p.add_argument("--title", default="")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("fit", parents=[common], help="fit r + s/J + t/J^2")
    p.add_argument("--fixture", nargs="+", help="table1:fekete or table1:quarter")
    p.add_argument("--csv", help="CSV with J and value columns")
    p.add_argument("--jmin", type=int, default=1)
    p.add_argument("--jmax", type=int)
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "threads", None) is not None and args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except (UsageError, EnumerationCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, RootFindingError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("interrupted; completed rows are kept (rerun with --resume)", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
