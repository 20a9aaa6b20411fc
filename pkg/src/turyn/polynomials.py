"""Fekete, Turyn, companion Littlewood and generalized Turyn polynomials.

Coefficient vectors are stored low-order first, so ``coeffs[k]`` multiplies
``x**k``.  Norms on the unit circle use the phase convention
``e(u) = exp(2*pi*i*u)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .number_theory import legendre_table, require_odd_prime

_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitting constant
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class TurynSpec:
    """Parameters selecting F_{p,t} (or F_{p,t,d} when ``d`` is given).

    ``t`` is reduced mod ``p``; ``t = p`` therefore becomes 0, the Fekete case.
    """

    p: int
    t: int = 0
    d: int | None = None

    def __post_init__(self):
        p = require_odd_prime(self.p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "t", int(self.t) % p)
        if self.d is not None:
            if int(self.d) != self.d or self.d < 0:
                raise ValueError("d must be a nonnegative integer")
            object.__setattr__(self, "d", int(self.d))

    @property
    def alpha(self) -> float:
        return self.t / self.p


class CirclePoly:
    """Immutable integer polynomial, coefficients low-order first.

    The vector is kept exactly as given, trailing zeros included, so index and
    exponent agree for every member of a (p, t) family.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[int]):
        arr = np.array(list(coeffs), dtype=object)
        if arr.size == 0:
            arr = np.zeros(1, dtype=object)
        if any(int(c) != c for c in arr):
            raise ValueError("coefficients must be integers")
        coeffs64 = np.array([int(c) for c in arr], dtype=np.int64)
        coeffs64.setflags(write=False)
        self._coeffs = coeffs64

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    def trimmed(self) -> np.ndarray:
        """Coefficients with trailing zeros removed (true degree)."""
        nz = np.nonzero(self._coeffs)[0]
        return self._coeffs[: nz[-1] + 1] if nz.size else self._coeffs[:1]

    def is_zero(self) -> bool:
        return not self._coeffs.any()

    def __len__(self):
        return len(self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, CirclePoly):
            return NotImplemented
        return np.array_equal(self._coeffs, other._coeffs)

    def __hash__(self):
        return hash(tuple(self._coeffs.tolist()))

    def __repr__(self):
        head = ", ".join(str(c) for c in self._coeffs[:8].tolist())
        more = ", ..." if len(self._coeffs) > 8 else ""
        return f"CirclePoly([{head}{more}], degree={self.degree})"

    def __sub__(self, other: "CirclePoly") -> "CirclePoly":
        n = max(len(self), len(other))
        a = np.zeros(n, dtype=np.int64)
        a[: len(self)] += self._coeffs
        a[: len(other)] -= other._coeffs
        return CirclePoly(a.tolist())


def nearest_shift(p: int, alpha: float | Fraction) -> int:
    """Integer nearest ``alpha * p``; exact half-integers round down.

    ``alpha`` is taken as an exact rational (floats are converted exactly),
    so ``nearest_shift(p, 0.25)`` is the round(p/4) shift of the 1/4 family.
    """
    x = Fraction(alpha) * int(p)
    fl = math.floor(x)
    return fl if x - fl <= Fraction(1, 2) else fl + 1


def build_turyn(spec: TurynSpec) -> CirclePoly:
    """F_{p,t}: coefficient j is the Legendre symbol of j + t, j = 0..p-1."""
    if spec.d is not None:
        raise ValueError("build_turyn takes a spec without d; use build_generalized")
    table = legendre_table(spec.p)
    j = np.arange(spec.p)
    return CirclePoly(table[(j + spec.t) % spec.p].tolist())


def zero_slot(spec: TurynSpec) -> int:
    """Exponent of the single zero coefficient of F_{p,t}."""
    return (spec.p - spec.t) % spec.p


def build_companion(spec: TurynSpec, sign: int) -> CirclePoly:
    """Companion Littlewood polynomial F_{p,t} + sign * x**((p - t) mod p).

    The Fekete case may be given either as t = 0 or t = p (both reduce to 0);
    its zero coefficient sits at exponent 0.
    """
    if spec.d is not None:
        raise ValueError("companion polynomials are defined without d")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    table = legendre_table(spec.p)
    coeffs = table[(np.arange(spec.p) + spec.t) % spec.p].copy()
    coeffs[zero_slot(spec)] = sign
    return CirclePoly(coeffs.tolist())


def build_generalized(spec: TurynSpec) -> CirclePoly:
    """F_{p,t,d}: truncated (d < p) or periodically extended (d >= p) Turyn."""
    if spec.d is None:
        raise ValueError("build_generalized needs d")
    table = legendre_table(spec.p)
    j = np.arange(spec.d + 1)
    return CirclePoly(table[(j + spec.t) % spec.p].tolist())


# -- evaluation ------------------------------------------------------------


def _two_sum(a, b):
    s = a + b
    z = s - a
    return s, (a - (s - z)) + (b - z)


def _two_prod(a, b):
    p = a * b
    ca = _SPLIT * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLIT * b
    bh = cb - (cb - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_times(hi, lo, d):
    p, e = _two_prod(hi, d)
    return p, e + lo * d


def _dd_add(ahi, alo, bhi, blo):
    s, e = _two_sum(ahi, bhi)
    e = e + alo + blo
    return _two_sum(s, e)


def _circle_point(u):
    # Reduce the phase first so large arguments keep full accuracy.
    u = np.asarray(u, dtype=float)
    frac = u - np.floor(u)
    return np.exp(2j * np.pi * frac)


def dd_horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Compensated (double-double) Horner evaluation at complex points ``z``."""
    zr, zi = z.real.copy(), z.imag.copy()
    c = np.asarray(coeffs, dtype=float)
    rhi = np.full(zr.shape, c[-1])
    rlo = np.zeros_like(zr)
    ihi = np.zeros_like(zr)
    ilo = np.zeros_like(zr)
    for ck in c[-2::-1]:
        # (r + i*im) * (zr + i*zi) + ck
        a1h, a1l = _dd_times(rhi, rlo, zr)
        a2h, a2l = _dd_times(ihi, ilo, -zi)
        b1h, b1l = _dd_times(rhi, rlo, zi)
        b2h, b2l = _dd_times(ihi, ilo, zr)
        nrh, nrl = _dd_add(a1h, a1l, a2h, a2l)
        nrh, nrl = _dd_add(nrh, nrl, np.full_like(nrh, ck), 0.0)
        nih, nil = _dd_add(b1h, b1l, b2h, b2l)
        rhi, rlo, ihi, ilo = nrh, nrl, nih, nil
    return (rhi + rlo) + 1j * (ihi + ilo)


def evaluate(f: CirclePoly, u):
    """f(e(u)) by compensated (double-double) Horner evaluation.

    ``u`` may be a scalar or an array of phases.  The running value carries a
    second-order correction for both real and imaginary parts, so the result
    is accurate to a few ulps relative to the sum of |terms|, even near zeros.
    """
    scalar = np.ndim(u) == 0
    z = np.atleast_1d(_circle_point(u))
    out = dd_horner(f.coeffs.astype(float), z)
    return complex(out[0]) if scalar else out


def horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Plain vectorized Horner evaluation (low-order-first coefficients)."""
    out = np.full(np.shape(z), coeffs[-1], dtype=complex)
    for ck in coeffs[-2::-1]:
        out = out * z + ck
    return out


def evaluate_at_roots(f: CirclePoly, N: int) -> np.ndarray:
    """Values f(e(k/N)) for k = 0..N-1 via one length-N FFT."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    folded = np.zeros(N, dtype=complex)
    np.add.at(folded, np.arange(len(f)) % N, f.coeffs.astype(float))
    return np.fft.ifft(folded) * N


# -- exact coefficient-side norms -------------------------------------------


def l2_norm(f: CirclePoly) -> float:
    return math.sqrt(sum(int(c) * int(c) for c in f.coeffs.tolist()))


def autocorrelation(f: CirclePoly) -> np.ndarray:
    """Aperiodic autocorrelations c_u = sum_k a_k a_{k+u}, u = 0..n-1."""
    a = f.coeffs
    n = len(a)
    if n * int(np.abs(a).max(initial=0)) ** 2 < _INT64_SAFE:
        return np.correlate(a, a, mode="full")[n - 1 :].copy()
    ints = a.tolist()
    return np.array(
        [sum(ints[k] * ints[k + u] for k in range(n - u)) for u in range(n)],
        dtype=object,
    )


def _convolve_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    bound = int(np.abs(a).max(initial=0)) * int(np.abs(b).sum())
    if a.dtype != object and b.dtype != object and bound < _INT64_SAFE:
        return np.convolve(a, b)
    # Big-integer fallback; slow but exact.
    return np.convolve(a.astype(object), b.astype(object))


def l2k_power_exact(f: CirclePoly, k: int) -> int:
    """||f||_{2k}^{2k} as an exact integer: the sum of squared coefficients of f^k."""
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    power = f.coeffs
    for _ in range(int(k) - 1):
        power = _convolve_exact(power, f.coeffs)
    return sum(int(c) * int(c) for c in power.tolist())


def l2k_norm_exact(f: CirclePoly, k: int) -> float:
    """The L_{2k} norm over the unit circle, from exact integer arithmetic."""
    s = l2k_power_exact(f, k)
    if s == 0:
        return 0.0
    return math.exp(math.log(s) / (2 * int(k)))


def merit_factor(f: CirclePoly) -> float:
    """||f||_2^4 / (||f||_4^4 - ||f||_2^4), evaluated as an exact fraction."""
    n2 = l2k_power_exact(f, 1)
    n4 = l2k_power_exact(f, 2)
    if n4 == n2 * n2:
        raise ZeroDivisionError("merit factor undefined: ||f||_4^4 == ||f||_2^4")
    return float(Fraction(n2 * n2, n4 - n2 * n2))


# -- serialization ------------------------------------------------------------


def coeffs_to_csv(f: CirclePoly) -> str:
    return "".join(f"{int(c)}\n" for c in f.coeffs.tolist())


def coeffs_from_csv(text: str) -> CirclePoly:
    vals = [row[0] for row in csv.reader(io.StringIO(text)) if row and row[0].strip()]
    return CirclePoly(int(v) for v in vals)


def coeffs_to_json(f: CirclePoly) -> str:
    return json.dumps([int(c) for c in f.coeffs.tolist()])


def coeffs_from_json(text: str) -> CirclePoly:
    return CirclePoly(json.loads(text))
