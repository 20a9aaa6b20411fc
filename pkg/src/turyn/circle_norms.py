"""Norms over the unit circle: Mahler measure, L_q, sup norm, and G_{p,t}(k, x).

The panel method splits the circle into ``P`` arcs ``[k/P, (k+1)/P]``.  For a
Turyn polynomial with ``P = p`` the integrand on arc ``k`` is
``log |G_{p,t}(k, x)| + log(p)/2`` since ``|F(zeta_p)| = sqrt(p)``, which is
how the Mahler measure reduces to an average over interpolation panels.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np
from scipy.optimize import minimize_scalar

from .number_theory import legendre_table, require_odd_prime
from .polynomials import (
    CirclePoly,
    TurynSpec,
    build_companion,
    build_generalized,
    build_turyn,
    dd_horner,
    evaluate,
    evaluate_at_roots,
    horner,
)
from .quadrature import QuadratureError, integrate_panels
from .roots import RootFindingError, aberth_roots, max_backward_error

__all__ = [
    "QuadratureConfig",
    "MeasureResult",
    "QuadratureError",
    "RootFindingError",
    "interp_G",
    "G_direct",
    "G_all_panels",
    "mahler_measure_panels",
    "mahler_measure_roots",
    "lq_norm",
    "sup_norm",
    "measure_gap_companions",
]

MAX_ROOT_DEGREE = 4096


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-8
    max_depth: int = 30
    base_rule_order: int = 15
    base_intervals: int = 4

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.base_rule_order not in (15, 21):
            raise ValueError("base_rule_order must be 15 or 21")
        if self.base_intervals < 1:
            raise ValueError("base_intervals must be >= 1")


@dataclass(frozen=True)
class MeasureResult:
    """A measure or norm.  ``err_estimate`` is an absolute error on ``log_value``."""

    log_value: float
    value: float
    err_estimate: float
    method: str
    p: int | None = None
    t: int | None = None
    q: float | None = None

    @classmethod
    def from_log(cls, log_value, err, method, **kw):
        return cls(float(log_value), math.exp(log_value), float(abs(err)), method, **kw)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


Target = Union[TurynSpec, CirclePoly]


def _resolve(target: Target) -> tuple[CirclePoly, dict]:
    if isinstance(target, TurynSpec):
        f = build_turyn(target) if target.d is None else build_generalized(target)
        return f, {"p": target.p, "t": target.t}
    if isinstance(target, CirclePoly):
        return target, {}
    raise TypeError("expected a TurynSpec or a CirclePoly")


# -- the interpolation function G_{p,t}(k, x) ------------------------------------


def interp_G(p: int, t: int, k: int, x):
    """G_{p,t}(k, x) from the interpolation sum over |j| < p/2.

    Vectorized over ``x``; every ``x`` must lie strictly inside (0, 1).
    """
    p = require_odd_prime(p)
    xs = np.asarray(x, dtype=float)
    if np.any((xs <= 0) | (xs >= 1)):
        raise ValueError("x must lie strictly between 0 and 1")
    h = (p - 1) // 2
    j = np.arange(-h, h + 1)
    leg = legendre_table(p)[(int(k) - j) % p]
    twist = np.exp(2j * np.pi * ((j * int(t)) % p) / p)
    x1 = np.atleast_1d(xs)
    denom = np.exp(2j * np.pi * (j[None, :] + x1[:, None]) / p) - 1
    s = (leg * twist / denom).sum(axis=1)
    out = (np.exp(2j * np.pi * x1) - 1) / p * s
    return complex(out[0]) if xs.ndim == 0 else out


def G_direct(p: int, t: int, k: int, x):
    """G_{p,t}(k, x) = zeta^{(k-1)t} F(zeta^{k+x}) / F(zeta), by direct evaluation."""
    spec = TurynSpec(p, t)
    f = build_turyn(spec)
    u = (int(k) + np.asarray(x, dtype=float)) / spec.p
    phase = np.exp(2j * np.pi * (((int(k) - 1) * spec.t) % spec.p) / spec.p)
    return phase * evaluate(f, u) / evaluate(f, 1.0 / spec.p)


def G_all_panels(p: int, t: int, x: float) -> np.ndarray:
    """G_{p,t}(k, x) for k = 0..p-1 at one x, via a single FFT."""
    spec = TurynSpec(p, t)
    f = build_turyn(spec)
    p = spec.p
    j = np.arange(p)
    vals = np.fft.ifft(f.coeffs * np.exp(2j * np.pi * j * float(x) / p)) * p
    k = np.arange(p)
    phase = np.exp(2j * np.pi * (((k - 1) * spec.t) % p) / p)
    return phase * vals / evaluate(f, 1.0 / p)


# -- panel quadrature -------------------------------------------------------------


def _panel_engine(f: CirclePoly, transform, cfg: QuadratureConfig, scale_hint):
    coeffs = f.trimmed().astype(float)
    n_panels = max(len(coeffs), 8)
    l1 = float(np.abs(coeffs).sum())

    def magnitude(k, x):
        u = (k + x) / n_panels
        z = np.exp(2j * np.pi * (u - np.floor(u)))
        m = np.abs(horner(coeffs, z))
        # plain Horner has absolute error ~ eps * l1; redo small values exactly
        low = m < 1e-10 * l1
        if low.any():
            m[low] = np.abs(dd_horner(coeffs, z[low]))
        return m

    jj = np.arange(len(coeffs))
    reps = -(-len(coeffs) // n_panels)

    def base_grid(x):
        tw = coeffs[:, None] * np.exp(2j * np.pi * np.outer(jj, x) / n_panels)
        pad = np.zeros((reps * n_panels, len(x)), dtype=complex)
        pad[: len(coeffs)] = tw
        folded = pad.reshape(reps, n_panels, len(x)).sum(axis=0)
        return np.abs(np.fft.ifft(folded, axis=0) * n_panels)

    # zeros of f at arc boundaries get a graded mesh on both neighbours
    edge_vals = np.abs(evaluate_at_roots(CirclePoly(f.trimmed()), n_panels))
    singular = []
    for k in np.nonzero(edge_vals <= 1e-9 * max(l1, 1.0))[0]:
        singular += [(int(k), 0), (int((k - 1) % n_panels), 1)]

    # the tolerance is per panel; the final average divides by n_panels
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(scale_hint(coeffs)))
    res = integrate_panels(
        magnitude,
        transform,
        n_panels,
        tol=tol,
        max_depth=cfg.max_depth,
        order=cfg.base_rule_order,
        base_intervals=cfg.base_intervals,
        base_grid=base_grid,
        singular=singular,
    )
    total = math.fsum(res.totals) / n_panels
    err = math.fsum(res.errors) / n_panels
    return total, err


def mahler_measure_panels(target: Target, cfg: QuadratureConfig | None = None) -> MeasureResult:
    """Mahler measure by adaptive quadrature of log|f| over arcs of the circle."""
    cfg = cfg or QuadratureConfig()
    f, meta = _resolve(target)
    if f.is_zero():
        raise ValueError("the zero polynomial has no Mahler measure")
    c = f.trimmed()
    if np.count_nonzero(c) == 1:
        return MeasureResult.from_log(math.log(abs(int(c[-1]))), 0.0, "panels", **meta)

    def hint(coeffs):
        # log of the L2 norm is within a constant of log M for these families
        return 0.5 * math.log(float(np.dot(coeffs, coeffs)))

    total, err = _panel_engine(f, np.log, cfg, hint)
    return MeasureResult.from_log(total, err, "panels", **meta)


def lq_norm(target: Target, q: float, cfg: QuadratureConfig | None = None) -> MeasureResult:
    """(integral of |f(e(u))|^q du)^(1/q) by adaptive panel quadrature."""
    q = float(q)
    if not q > 0:
        raise ValueError("q must be positive")
    cfg = cfg or QuadratureConfig()
    f, meta = _resolve(target)
    if f.is_zero():
        return MeasureResult(-math.inf, 0.0, 0.0, "panels", q=q, **meta)

    def hint(coeffs):
        return float(np.dot(coeffs, coeffs)) ** (q / 2)

    total, err = _panel_engine(f, lambda m: m**q, cfg, hint)
    return MeasureResult.from_log(math.log(total) / q, err / (q * total), "panels", q=q, **meta)


# -- roots ------------------------------------------------------------------------


def mahler_measure_roots(target: Target, *, max_iter: int = 2000) -> MeasureResult:
    """Mahler measure via Jensen's formula, |a_n| * prod max(1, |root|)."""
    f, meta = _resolve(target)
    c = f.trimmed()
    if f.is_zero():
        raise ValueError("the zero polynomial has no Mahler measure")
    c = c[np.nonzero(c)[0][0] :]  # factors of x do not change the measure
    n = len(c) - 1
    if n > MAX_ROOT_DEGREE:
        raise ValueError(f"degree {n} exceeds the root-finding bound {MAX_ROOT_DEGREE}")
    lead = abs(int(c[-1]))
    if n == 0:
        return MeasureResult.from_log(math.log(lead), 0.0, "roots", **meta)
    cf = c.astype(float)
    roots = aberth_roots(cf, max_iter=max_iter, residual=1e-12)
    mods = np.abs(roots)
    log_m = math.fsum([math.log(lead)] + [math.log(m) for m in mods if m > 1])
    # first-order sensitivity of the roots to the certified backward error
    err = n * max_backward_error(cf, roots)
    return MeasureResult.from_log(log_m, err, "roots", **meta)


# -- sup norm -------------------------------------------------------------------


def sup_norm(target: Target, grid_factor: int = 16, refine: bool = True, candidates: int = 8) -> float:
    """Lower bound on max |f| over the circle from a grid, refined locally.

    The grid has ``grid_factor * (degree + 1)`` points.  With ``refine`` the
    best few grid maxima are polished by bounded Brent (parabolic) search;
    every reported value is an actual evaluation, so the result never
    exceeds the true sup norm.
    """
    if int(grid_factor) < 4:
        raise ValueError("grid_factor must be >= 4")
    f, _ = _resolve(target)
    c = CirclePoly(f.trimmed())
    n = int(grid_factor) * (c.degree + 1)
    mags = np.abs(evaluate_at_roots(c, n))
    best = float(mags.max())
    if not refine or c.degree == 0:
        return best
    is_peak = (mags >= np.roll(mags, 1)) & (mags >= np.roll(mags, -1))
    peaks = np.nonzero(is_peak)[0]
    peaks = peaks[np.argsort(mags[peaks])[::-1][:candidates]]
    coeffs = c.coeffs.astype(float)

    def neg(u):
        return -abs(horner(coeffs, np.exp(2j * np.pi * u)))

    for k in peaks:
        r = minimize_scalar(
            neg,
            bounds=((k - 1) / n, (k + 1) / n),
            method="bounded",
            options={"xatol": 1e-14},
        )
        best = max(best, abs(evaluate(c, float(r.x))))
    return best


# -- companion gaps ---------------------------------------------------------------


def measure_gap_companions(p: int, t: int, cfg: QuadratureConfig | None = None) -> tuple[float, float]:
    """((M(F+) - M(F)) / sqrt p, (M(F-) - M(F)) / sqrt p) with t = p meaning Fekete."""
    p = require_odd_prime(p)
    if not 0 < int(t) <= p:
        raise ValueError("need 0 < t <= p")
    spec = TurynSpec(p, t)
    cfg = cfg or QuadratureConfig()
    base = mahler_measure_panels(spec, cfg).value
    plus = mahler_measure_panels(build_companion(spec, 1), cfg).value
    minus = mahler_measure_panels(build_companion(spec, -1), cfg).value
    root = math.sqrt(p)
    return (plus - base) / root, (minus - base) / root
