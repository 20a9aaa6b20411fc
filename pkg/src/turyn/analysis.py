"""Fits, alpha sweeps and convergence tables for the kappa estimates."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable, Iterable, Sequence

import numpy as np

from .rand_process import ENUMERATION_CAP, kappa0_exact, kappa0_mc, kappaq_mc


# -- inverse-polynomial fit ---------------------------------------------------


@dataclass(frozen=True)
class FitCoefficients:
    """value(J) ~ r + s/J + t/J^2."""

    r: float
    s: float
    t: float
    residual_rms: float
    J_range: tuple[int, int]
    n_points: int

    def __call__(self, J):
        J = np.asarray(J, dtype=float)
        return self.r + self.s / J + self.t / J**2

    def to_dict(self) -> dict:
        return asdict(self)


def fit_inverse_quadratic(points: Iterable[tuple[int, float]]) -> FitCoefficients:
    """Absolute least-squares fit on the basis {1, 1/J, 1/J^2}.

    Points are sorted by J first, so the result does not depend on input
    order.  The 3x3 normal equations are column-equilibrated and solved by
    LU with partial pivoting.
    """
    pts = sorted((int(J), float(v)) for J, v in points)
    Js = np.array([J for J, _ in pts], dtype=float)
    vals = np.array([v for _, v in pts])
    if np.any(Js <= 0):
        raise ValueError("J values must be positive")
    if len(set(Js.tolist())) < 3:
        raise ValueError("rank deficient: need at least 3 distinct J values")
    X = np.column_stack([np.ones_like(Js), 1 / Js, 1 / Js**2])
    scale = np.sqrt((X * X).sum(axis=0))
    Xs = X / scale
    coef = np.linalg.solve(Xs.T @ Xs, Xs.T @ vals) / scale
    resid = vals - X @ coef
    rms = math.sqrt(math.fsum((resid * resid).tolist()) / len(vals))
    return FitCoefficients(
        float(coef[0]), float(coef[1]), float(coef[2]), rms, (int(Js[0]), int(Js[-1])), len(vals)
    )


def extrapolate(fit: FitCoefficients) -> float:
    """The J -> infinity limit of the fitted model."""
    return fit.r


# -- reference data -----------------------------------------------------------

TABLE1_COLUMNS = {"fekete": "fekete", "quarter": "quarter", "turyn": "quarter"}
TABLE1_ALPHA = {"fekete": 0.0, "quarter": 0.25}


def load_table1() -> dict[str, list[tuple[int, float]]]:
    """The shipped reference columns as {name: [(J, value), ...]}."""
    text = resources.files("turyn").joinpath("data/table1.csv").read_text()
    body = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = list(csv.DictReader(body))
    return {col: [(int(r["J"]), float(r[col])) for r in rows] for col in ("fekete", "quarter")}


def table1_column(name: str) -> list[tuple[int, float]]:
    """Look up a column by a loose name such as 'fekete', 'quarter' or 'turyn quarter'."""
    key = name.strip().lower().replace("-", " ").replace("_", " ").split()
    for word in reversed(key):
        if word in TABLE1_COLUMNS:
            return load_table1()[TABLE1_COLUMNS[word]]
    raise KeyError(f"unknown reference column {name!r}; use 'fekete' or 'quarter'")


# -- sweeps ---------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    J: int
    q: float
    method: str
    value: float
    std_err: float
    error: str = ""


CSV_FIELDS = ("alpha", "J", "q", "method", "value", "std_err")


@dataclass
class SweepTable:
    """Rows keyed by (alpha, J), kept sorted by alpha then J."""

    q: float = 0.0
    method: str = "enumeration"
    rows: list[SweepRow] = field(default_factory=list)

    def keys(self) -> set[tuple[float, int]]:
        return {(r.alpha, r.J) for r in self.rows}

    def add(self, row: SweepRow) -> None:
        if (row.alpha, row.J) in self.keys():
            raise ValueError(f"duplicate row for alpha={row.alpha}, J={row.J}")
        self.rows.append(row)
        self.rows.sort(key=lambda r: (r.alpha, r.J))

    def series(self, J: int) -> tuple[np.ndarray, np.ndarray]:
        sel = [r for r in self.rows if r.J == J and not r.error]
        return np.array([r.alpha for r in sel]), np.array([r.value for r in sel])

    def Js(self) -> list[int]:
        return sorted({r.J for r in self.rows})

    def to_csv(self, digits: int = 8) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.rows:
            w.writerow(format_row(r, digits))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        table = None
        for rec in csv.DictReader(io.StringIO(text)):
            row = SweepRow(
                float(rec["alpha"]),
                int(rec["J"]),
                float(rec["q"]),
                rec["method"],
                float(rec["value"]),
                float(rec["std_err"]),
            )
            if table is None:
                table = cls(q=row.q, method=row.method)
            table.add(row)
        return table or cls()

    def to_dict(self) -> dict:
        return {"q": self.q, "method": self.method, "rows": [asdict(r) for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def format_row(r: SweepRow, digits: int = 8) -> list[str]:
    fmt = f"{{:.{digits}f}}"
    return [repr(r.alpha), str(r.J), repr(r.q), r.method, fmt.format(r.value), fmt.format(r.std_err)]


def default_alpha_grid(denominator: int = 1600, stop: Fraction = Fraction(1, 4)) -> list[float]:
    """alpha = a / denominator for 0 <= a <= stop * denominator."""
    top = int(stop * denominator)
    return [a / denominator for a in range(top + 1)]


def estimate_kappa(J, alpha, q=0.0, *, samples=None, seed=0, cap=ENUMERATION_CAP, workers=None, cfg=None):
    """Enumeration when q = 0 and J is within the cap, Monte-Carlo otherwise."""
    if q == 0 and J <= cap and samples is None:
        return kappa0_exact(J, alpha, cap=cap, workers=workers)
    if samples is None:
        raise ValueError(f"J = {J} exceeds the enumeration cap {cap}; supply a sample count for Monte-Carlo")
    if q == 0:
        return kappa0_mc(J, alpha, samples, seed, workers=workers)
    return kappaq_mc(J, alpha, q, samples, seed, cfg, workers=workers)


def sweep_alpha(
    J: int,
    alphas: Sequence[float],
    q: float = 0.0,
    *,
    samples: int | None = None,
    seed: int = 0,
    workers: int | None = None,
    table: SweepTable | None = None,
    on_row: Callable[[SweepRow], None] | None = None,
) -> SweepTable:
    """kappa_q^J at each alpha.

    Rows already present in ``table`` are skipped, which is how interrupted
    sweeps resume.  A failing row is recorded with ``value = nan`` and the
    error text; the sweep carries on.  ``on_row`` sees every new row as soon
    as it is computed.
    """
    if len(alphas) == 0:
        raise ValueError("empty alpha grid")
    method = "enumeration" if (q == 0 and samples is None) else "monte_carlo"
    table = table if table is not None else SweepTable(q=float(q), method=method)
    done = table.keys()
    for alpha in sorted(set(float(a) for a in alphas)):
        if (alpha, int(J)) in done:
            continue
        try:
            est = estimate_kappa(int(J), alpha, q, samples=samples, seed=seed, workers=workers)
            row = SweepRow(alpha, int(J), float(q), est.method, est.value, est.std_err)
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            row = SweepRow(alpha, int(J), float(q), method, math.nan, math.nan, str(exc))
        table.add(row)
        if on_row is not None:
            on_row(row)
    return table


def convergence_table(J_max: int, alphas: Sequence[float] = (0.0, 0.25), *, workers: int | None = None) -> SweepTable:
    """kappa_0^J(alpha) for J = 1..J_max by exact enumeration."""
    if J_max > ENUMERATION_CAP:
        raise ValueError(f"J_max must not exceed the enumeration cap {ENUMERATION_CAP}")
    table = SweepTable(q=0.0, method="enumeration")
    for J in range(1, int(J_max) + 1):
        sweep_alpha(J, alphas, workers=workers, table=table)
    return table
