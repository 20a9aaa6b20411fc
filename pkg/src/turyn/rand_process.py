"""Estimators for the limit constants kappa_q(alpha) of the random sign process.

The truncated process is

    G^(J)(x) = sum_{|j| <= J} X_j e(alpha j) (e(x) - 1) / (2 pi i (j + x)),

with independent Rademacher signs X_j.  For q = 0 (geometric mean) pairing
the terms j and -j collapses the 2^(2J+1) sign patterns to 4^J polynomial
integrals, each a log-integral of a degree-2J complex polynomial over [0, 1],
which has a closed form in terms of the polynomial's roots.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from functools import lru_cache, partial

import numpy as np

from .parallel import block_ranges, map_blocks
from .quadrature import QuadratureError
from .roots import companion_roots

ENUMERATION_CAP = 12
BLOCK = 4096
_SNAP = 1e-13
_TRIM = 1e-12


class EnumerationCapExceeded(ValueError):
    """Exact enumeration requested beyond the configured cap."""


# -- beta sets ----------------------------------------------------------------


@dataclass(frozen=True)
class BetaSet:
    """The four linear forms beta(x) = A[c] + B[c] x for index j and shift alpha.

    Code ``c`` packs two bits: ``c & 1`` is the sign (1 = negated) and
    ``c >> 1`` the type (0: x cos - i j sin, 1: i x sin - j cos).
    """

    j: int
    alpha: float
    A: tuple[complex, complex, complex, complex]
    B: tuple[complex, complex, complex, complex]

    def __call__(self, code: int, x):
        return self.A[code] + self.B[code] * np.asarray(x)


def _snap(v: float) -> float:
    if abs(v) < _SNAP:
        return 0.0
    if abs(abs(v) - 1.0) < _SNAP:
        return math.copysign(1.0, v)
    return v


def _trig(j: int, alpha: float) -> tuple[float, float]:
    theta = 2 * math.pi * ((alpha * j) % 1.0)
    return _snap(math.cos(theta)), _snap(math.sin(theta))


def beta_set(j: int, alpha: float) -> BetaSet:
    j = int(j)
    if j < 1:
        raise ValueError("j must be >= 1")
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    c, s = _trig(j, alpha)
    a0, b0 = complex(0, -j * s), complex(c, 0)  # x cos - i j sin
    a1, b1 = complex(-j * c, 0), complex(0, s)  # i x sin - j cos
    return BetaSet(j, float(alpha), (a0, -a0, a1, -a1), (b0, -b0, b1, -b1))


# -- tuple encoding -----------------------------------------------------------


def encode_tuple(codes) -> int:
    """Pack per-index codes (c_1, ..., c_J), each in 0..3, into sum c_j 4^(j-1)."""
    out = 0
    for i, c in enumerate(codes):
        c = int(c)
        if not 0 <= c < 4:
            raise ValueError("codes must lie in 0..3")
        out |= c << (2 * i)
    return out


def decode_tuple(index: int, J: int) -> np.ndarray:
    index = int(index)
    if not 0 <= index < 4**J:
        raise ValueError("tuple index out of range")
    return np.array([(index >> (2 * i)) & 3 for i in range(J)], dtype=np.int64)


def decode_block(start: int, stop: int, J: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    shifts = 2 * np.arange(J, dtype=np.int64)
    return (idx[:, None] >> shifts[None, :]) & 3


# -- polynomial assembly ------------------------------------------------------


def _int_poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for k, y in enumerate(b):
            out[i + k] += x * y
    return out


@lru_cache(maxsize=64)
def _integer_pieces(J: int):
    """Exact integer coefficient vectors (low-order first) of length 2J+1.

    base = prod_l (x^2 - l^2);  xq[j] = x * prod_{l != j};  x2q[j] = x^2 * prod_{l != j}.
    """
    factors = [[-l * l, 0, 1] for l in range(1, J + 1)]
    base = [1]
    for f in factors:
        base = _int_poly_mul(base, f)
    xq, x2q = [], []
    for j in range(J):
        q = [1]
        for i, f in enumerate(factors):
            if i != j:
                q = _int_poly_mul(q, f)
        xq.append([0] + q + [0])
        x2q.append([0, 0] + q)
    as_float = lambda rows: np.array([[float(v) for v in r] for r in rows])
    return as_float([base])[0], as_float(xq), as_float(x2q)


def _beta_tables(J: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    A = np.empty((J, 4), dtype=complex)
    B = np.empty((J, 4), dtype=complex)
    for j in range(1, J + 1):
        bs = beta_set(j, alpha)
        A[j - 1] = bs.A
        B[j - 1] = bs.B
    return A, B


def assemble_batch(J: int, alpha: float, codes: np.ndarray) -> np.ndarray:
    """Coefficient rows (low-order first, length 2J+1) for a batch of code tuples."""
    base, xq, x2q = _integer_pieces(int(J))
    A, B = _beta_tables(J, alpha)
    rows = np.arange(J)
    a_sel = A[rows, codes]
    b_sel = B[rows, codes]
    return base + 2 * (a_sel @ xq + b_sel @ x2q)


def assemble_poly(J: int, alpha: float, choice) -> np.ndarray:
    """prod (x^2 - l^2) + 2x sum_j beta_j(x) prod_{l != j} (x^2 - l^2), low-order first.

    ``choice`` is either a sequence of J codes or a packed tuple index.
    """
    J = int(J)
    if J < 1:
        raise ValueError("J must be >= 1")
    codes = decode_tuple(choice, J) if np.ndim(choice) == 0 else np.asarray(choice, dtype=np.int64)
    if codes.shape != (J,):
        raise ValueError("need exactly J codes")
    return assemble_batch(J, alpha, codes[None, :])[0]


# -- closed-form log integral -------------------------------------------------


_SERIES = 1.0 / np.arange(1, 61)


def _root_terms(r: np.ndarray) -> np.ndarray:
    """Integral over [0, 1] of log|x - r|, elementwise.

    Near the unit interval this is Re[(1-r) log(1-r) + r log(-r)] - 1.  For
    |r| > 2 the two products nearly cancel, so we use the equivalent
    log|r| - 1 + Re[(1 - w) S(w)] with w = 1/r and S(w) = -log(1-w)/w.
    """
    r = np.asarray(r, dtype=complex)
    far = np.abs(r) > 2
    rn = np.where(far, 0.5, r)
    w = 1 - rn
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(w == 0, 0.0, (w * np.log(np.where(w == 0, 1, w))).real)
        t2 = np.where(rn == 0, 0.0, (rn * np.log(np.where(rn == 0, 1, -rn))).real)
    near = t1 + t2 - 1
    if not far.any():
        return near
    inv = 1 / np.where(far, r, 2.0)
    series = np.zeros_like(inv)
    for c in _SERIES[::-1]:  # Horner in w for sum w^k / (k+1)
        series = series * inv + c
    far_val = np.log(np.abs(np.where(far, r, 2.0))) - 1 + ((1 - inv) * series).real
    return np.where(far, far_val, near)


def _trim(c: np.ndarray, floor: float) -> np.ndarray:
    n = len(c)
    while n > 1 and abs(c[n - 1]) <= floor:
        n -= 1
    return c[:n]


def log_integral_roots(P, *, lead_floor: float | None = None) -> float:
    """Integral over [0, 1] of log|P(x)| for a complex polynomial (low-order first).

    Leading coefficients with modulus at most ``lead_floor`` are dropped as
    round-off zeros (default: 1e-14 of the largest coefficient).
    """
    c = np.asarray(P, dtype=complex)
    if c.size == 0 or not np.any(c):
        raise ValueError("P must not be identically zero")
    if lead_floor is None:
        lead_floor = 1e-14 * float(np.abs(c).max())
    c = _trim(c, lead_floor)
    lead = math.log(abs(c[-1]))
    if len(c) == 1:
        return lead
    roots = companion_roots(c)
    return math.fsum([lead, *_root_terms(roots).tolist()])


def _log_integrals(C: np.ndarray) -> np.ndarray:
    """Row-wise log integrals of assembled tuple polynomials.

    The leading coefficient is 1 + 2 sum_j B_j with |B_j| <= 1, so round-off
    zeros are judged against 2J + 1, not against the (huge) middle
    coefficients.  Such rows are handled one by one.
    """
    J = (C.shape[1] - 1) // 2
    floor = _TRIM * (2 * J + 1)
    lead = np.abs(C[:, -1])
    regular = lead > floor
    out = np.empty(C.shape[0])
    if regular.any():
        roots = companion_roots(C[regular])
        out[regular] = np.log(lead[regular]) + _root_terms(roots).sum(axis=1)
    for i in np.nonzero(~regular)[0]:
        out[i] = log_integral_roots(C[i], lead_floor=floor)
    return out


def normalization_constant(J: int) -> float:
    """Integral over [0, 1] of log x + sum_{j <= J} log(j^2 - x^2)."""
    J = int(J)
    if J < 1:
        raise ValueError("J must be >= 1")
    return J * math.log(J) + (J + 1) * math.log(J + 1) - 2 * J - 1


# -- estimates ----------------------------------------------------------------


@dataclass(frozen=True)
class KappaEstimate:
    alpha: float
    q: float
    J: int
    method: str  # "enumeration" or "monte_carlo"
    value: float
    std_err: float
    samples: int
    seed: int | None
    lam: float | None = None  # lambda_0^J on the log scale (q = 0 only)
    lam_std_err: float | None = None

    CSV_FIELDS = ("alpha", "q", "J", "method", "value", "std_err", "samples", "seed")

    def csv_row(self, digits: int = 8) -> list[str]:
        fmt = f"{{:.{digits}f}}"
        return [
            repr(float(self.alpha)),
            repr(float(self.q)),
            str(self.J),
            self.method,
            fmt.format(self.value),
            fmt.format(self.std_err),
            str(self.samples),
            "" if self.seed is None else str(self.seed),
        ]

    def to_csv(self, digits: int = 8, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(self.CSV_FIELDS)
        w.writerow(self.csv_row(digits))
        return buf.getvalue()

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _enum_block(bounds, J, alpha):
    start, stop = bounds
    vals = _log_integrals(assemble_batch(J, alpha, decode_block(start, stop, J)))
    return math.fsum(vals.tolist())


def lambda0_exact(J: int, alpha: float, *, cap: int = ENUMERATION_CAP, workers: int | None = None) -> float:
    """lambda_0^J(alpha) by enumerating all 4^J sign-pair tuples."""
    J = int(J)
    if J < 1:
        raise ValueError("J must be >= 1")
    if J > cap:
        raise EnumerationCapExceeded(
            f"J = {J} exceeds the enumeration cap {cap}; use the Monte-Carlo estimator"
        )
    total = 4**J
    parts = map_blocks(partial(_enum_block, J=J, alpha=float(alpha)), block_ranges(total, BLOCK), workers)
    return math.fsum(parts) / total - normalization_constant(J)


def kappa0_exact(J: int, alpha: float, **kw) -> KappaEstimate:
    lam = lambda0_exact(J, alpha, **kw)
    return KappaEstimate(
        float(alpha), 0.0, int(J), "enumeration", math.exp(lam) / (2 * math.pi), 0.0, 4 ** int(J), None, lam, 0.0
    )


def _block_rng(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, int(stream), int(block)]))


def _mc0_block(item, J, alpha, seed):
    b, start, stop = item
    codes = _block_rng(seed, b).integers(0, 4, size=(stop - start, J))
    vals = _log_integrals(assemble_batch(J, alpha, codes)) - normalization_constant(J)
    return math.fsum(vals.tolist()), math.fsum((vals * vals).tolist())


def _mean_and_se(parts, n):
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / n
    var = max(s2 - s1 * mean, 0.0) / (n - 1)
    return mean, math.sqrt(var / n)


def _blocks(samples: int):
    return [(b, s, e) for b, (s, e) in enumerate(block_ranges(samples, BLOCK))]


def kappa0_mc(J: int, alpha: float, samples: int, seed: int, *, workers: int | None = None) -> KappaEstimate:
    """Monte-Carlo lambda_0^J(alpha) from uniformly drawn tuples.

    Sample ``i`` comes from block ``i // 4096`` of a counter-based Philox
    stream keyed by ``seed``, so the sample set is fixed by (seed, samples).
    """
    J, samples = int(J), int(samples)
    if samples < 2:
        raise ValueError("need at least 2 samples")
    parts = map_blocks(partial(_mc0_block, J=J, alpha=float(alpha), seed=int(seed)), _blocks(samples), workers)
    lam, se = _mean_and_se(parts, samples)
    value = math.exp(lam) / (2 * math.pi)
    return KappaEstimate(float(alpha), 0.0, J, "monte_carlo", value, value * se, samples, int(seed), lam, se)


# -- q > 0 -------------------------------------------------------------------


def process_coefficients(J: int, alpha: float, x: np.ndarray) -> np.ndarray:
    """c_j(x) = e(alpha j)(e(x) - 1) / (2 pi i (j + x)) for j = -J..J, shape (2J+1, len(x))."""
    j = np.arange(-int(J), int(J) + 1)
    x = np.asarray(x, dtype=float)
    phase = np.exp(2j * np.pi * ((alpha * j) % 1.0))
    return phase[:, None] * (np.exp(2j * np.pi * x)[None, :] - 1) / (2j * np.pi * (j[:, None] + x[None, :]))


def second_moment_exact(J: int, alpha: float, x) -> np.ndarray | float:
    """E|G^(J)(x)|^2 = |e(x) - 1|^2 / (4 pi^2) * sum_{|j| <= J} (j + x)^-2; alpha drops out."""
    xs = np.asarray(x, dtype=float)
    if np.any((xs <= 0) | (xs >= 1)):
        raise ValueError("x must lie strictly between 0 and 1")
    j = np.arange(-int(J), int(J) + 1)
    s = (1.0 / (j[:, None] + np.atleast_1d(xs)[None, :]) ** 2).sum(axis=0)
    out = np.abs(np.exp(2j * np.pi * xs) - 1) ** 2 / (4 * math.pi**2) * s.reshape(xs.shape)
    return float(out) if xs.ndim == 0 else out


def _mcq_block(item, J, q, seed, coef, weights):
    b, start, stop = item
    signs = _block_rng(seed, b).integers(0, 2, size=(stop - start, 2 * J + 1)) * 2.0 - 1.0
    vals = (np.abs(signs @ coef) ** q) @ weights
    return math.fsum(vals.tolist()), math.fsum((vals * vals).tolist())


def _gl01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1), 0.5 * w


def kappaq_mc(
    J: int,
    alpha: float,
    q: float,
    samples: int,
    seed: int,
    cfg=None,
    *,
    workers: int | None = None,
) -> KappaEstimate:
    """Monte-Carlo (int_0^1 E|G^(J)(x)|^q dx)^(1/q).

    Each sample's integral uses a Gauss-Legendre rule whose size is fixed up
    front: starting at 16 nodes it doubles until a pilot batch of 256 sample
    paths agrees between n and 2n nodes to within the tolerances of ``cfg``.
    """
    from .circle_norms import QuadratureConfig

    cfg = cfg or QuadratureConfig()
    J, samples, q = int(J), int(samples), float(q)
    if not q > 0:
        raise ValueError("q must be positive")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    pilot = _block_rng(seed, 0, stream=1).integers(0, 2, size=(256, 2 * J + 1)) * 2.0 - 1.0
    n = 16
    while True:
        x1, w1 = _gl01(n)
        x2, w2 = _gl01(2 * n)
        a = (np.abs(pilot @ process_coefficients(J, alpha, x1)) ** q) @ w1
        b = (np.abs(pilot @ process_coefficients(J, alpha, x2)) ** q) @ w2
        if np.max(np.abs(a - b)) <= max(cfg.abs_tol, cfg.rel_tol * np.max(np.abs(b))):
            n *= 2
            break
        n *= 2
        if n > 4096:
            raise QuadratureError("Gauss-Legendre rule did not settle for the process integrals")
    xs, ws = _gl01(n)
    coef = process_coefficients(J, alpha, xs)
    fn = partial(_mcq_block, J=J, q=q, seed=int(seed), coef=coef, weights=ws)
    parts = map_blocks(fn, _blocks(samples), workers)
    mean, se = _mean_and_se(parts, samples)
    value = mean ** (1 / q)
    return KappaEstimate(float(alpha), q, J, "monte_carlo", value, value * se / (q * mean), samples, int(seed))
