"""Polynomial root finding.

Two engines live here:

* :func:`aberth_roots` - simultaneous Aberth-Ehrlich iteration, vectorized over
  a batch of polynomials of equal degree.  Used for Mahler measures of
  integer polynomials whose roots cluster around the unit circle.
* :func:`companion_roots` - batched eigenvalues of companion matrices.  Used
  for the small but badly scaled polynomials of the random-process sums,
  whose roots sit near +-1, +-2, ..., +-J (a Wilkinson-like configuration
  where simultaneous iteration loses accuracy).
"""

from __future__ import annotations

import numpy as np

_EPS = np.finfo(float).eps


class RootFindingError(ArithmeticError):
    """Raised when roots cannot be certified to the requested residual."""


def _newton_ratio(c: np.ndarray, z: np.ndarray):
    """Return p/p' at ``z`` plus a residual flag, per row of monic ``c``.

    Points with |z| > 1 are evaluated through the reversed polynomial so the
    powers never overflow.
    """
    n = c.shape[1] - 1
    absc = np.abs(c)
    big = np.abs(z) > 1
    w = np.where(big, 1 / np.where(z == 0, 1, z), z)
    aw = np.abs(w)
    # forward: p(z); backward: rev(w) = sum c_k w^(n-k)
    p = np.repeat(c[:, n, None], z.shape[1], axis=1).astype(complex)
    dp = np.zeros_like(z)
    q = np.repeat(c[:, 0, None], z.shape[1], axis=1).astype(complex)
    dq = np.zeros_like(z)
    s = np.repeat(absc[:, n, None], z.shape[1], axis=1)
    sr = np.repeat(absc[:, 0, None], z.shape[1], axis=1)
    for k in range(n - 1, -1, -1):
        dp = dp * z + p
        p = p * z + c[:, k, None]
        dq = dq * w + q
        q = q * w + c[:, n - k, None]
        s = s * aw + absc[:, k, None]
        sr = sr * aw + absc[:, n - k, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        small_ratio = p / dp
        big_ratio = z * q / (n * q - w * dq)
    ratio = np.where(big, big_ratio, small_ratio)
    # backward-error residual test, scaled by the absolute-value polynomial
    backward = np.where(big, np.abs(q) / np.maximum(sr, 1e-300), np.abs(p) / np.maximum(s, 1e-300))
    return ratio, backward


def aberth_roots(
    coeffs: np.ndarray,
    *,
    max_iter: int = 500,
    residual: float | None = None,
    polish: int = 2,
) -> np.ndarray:
    """Roots of each row of ``coeffs`` (low-order first, leading entry nonzero).

    Parameters
    ----------
    coeffs : array, shape (batch, n + 1) or (n + 1,)
    max_iter : int
        Iteration cap; rows that never certify raise :class:`RootFindingError`.
    residual : float, optional
        Backward-error threshold |p(z)| / sum |a_k||z|^k accepted for a root.
        Defaults to ``4 * n * eps``.
    polish : int
        Extra Aberth sweeps after certification.

    Returns
    -------
    roots : array, shape (batch, n) or (n,)
    """
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    single = np.ndim(coeffs) == 1
    if np.any(c[:, -1] == 0):
        raise ValueError("leading coefficient must be nonzero")
    c = c / c[:, -1:]
    batch, n1 = c.shape
    n = n1 - 1
    if n == 0:
        out = np.zeros((batch, 0), dtype=complex)
        return out[0] if single else out
    if residual is None:
        residual = 4 * n * _EPS

    # Start on a circle with the geometric-mean root modulus, rotated off the axes.
    radius = np.abs(c[:, 0]) ** (1.0 / n)
    radius = np.where(radius == 0, 1.0, radius)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius[:, None] * np.exp(1j * angles)[None, :]
    certified = np.zeros((batch, n), dtype=bool)
    extra = np.zeros(batch, dtype=int)

    for _ in range(max_iter):
        rows = np.nonzero(extra < polish)[0]
        if rows.size == 0:
            break
        zr = z[rows]
        ratio, backward = _newton_ratio(c[rows], zr)
        diff = zr[:, :, None] - zr[:, None, :]
        idx = np.arange(n)
        diff[:, idx, idx] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = ratio / (1 - ratio * (1 / diff).sum(axis=2))
        corr = np.where(np.isfinite(corr), corr, 0)
        z[rows] = zr - corr
        cert = certified[rows] | (backward <= residual)
        certified[rows] = cert
        done = cert.all(axis=1)
        extra[rows[done]] += 1
    if np.any(extra < polish):
        bad = int(np.sum(extra < polish))
        raise RootFindingError(f"Aberth iteration did not certify {bad} polynomial(s)")
    return z[0] if single else z


def companion_roots(coeffs: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Roots of each row of ``coeffs`` via batched companion-matrix eigenvalues."""
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    single = np.ndim(coeffs) == 1
    n = c.shape[1] - 1
    if n == 0:
        out = np.zeros((c.shape[0], 0), dtype=complex)
        return out[0] if single else out
    if np.any(c[:, -1] == 0):
        raise ValueError("leading coefficient must be nonzero")
    out = np.empty((c.shape[0], n), dtype=complex)
    sub = np.eye(n - 1, dtype=complex) if n > 1 else None
    for start in range(0, c.shape[0], chunk):
        block = c[start : start + chunk]
        monic = block / block[:, -1:]
        m = np.zeros((block.shape[0], n, n), dtype=complex)
        if sub is not None:
            m[:, 1:, :-1] = sub
        m[:, :, -1] = -monic[:, :-1]
        out[start : start + chunk] = np.linalg.eigvals(m)
    return out[0] if single else out


def max_backward_error(coeffs: np.ndarray, roots: np.ndarray) -> float:
    """Largest |p(z)| / sum |a_k||z|^k over the given roots (one polynomial)."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / c[-1]
    _, backward = _newton_ratio(c[None, :], np.asarray(roots, dtype=complex)[None, :])
    return float(backward.max(initial=0.0))
