"""Primality, Legendre symbols and the Gauss unit a(p)."""

from __future__ import annotations

import numpy as np

# Deterministic Miller-Rabin witnesses; correct for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = _MR_BASES


def is_prime(n: int) -> bool:
    """Return True iff ``n`` is prime (deterministic for 64-bit inputs)."""
    n = int(n)
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_odd_prime(p: int) -> int:
    """Validate ``p`` as an odd prime and return it as a plain int."""
    if isinstance(p, bool) or int(p) != p:
        raise ValueError("p must be an odd prime")
    p = int(p)
    if p < 3 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    return p


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) by the reciprocity ladder.

    ``a`` may be any integer; it is reduced mod ``p`` first.
    """
    p = require_odd_prime(p)
    a = int(a) % p
    if a == 0:
        return 0
    result = 1
    n = p
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre_table(p: int) -> np.ndarray:
    """Array ``L`` with ``L[j] = (j/p)`` for ``j = 0..p-1``.

    Built from the set of squares, so it costs O(p) instead of p symbol
    evaluations.
    """
    p = require_odd_prime(p)
    table = -np.ones(p, dtype=np.int64)
    squares = (np.arange(1, (p - 1) // 2 + 1, dtype=np.int64) ** 2) % p
    table[squares] = 1
    table[0] = 0
    return table


def gauss_unit(p: int) -> complex:
    """a(p): 1 when p = 1 mod 4, i when p = 3 mod 4."""
    p = require_odd_prime(p)
    return 1 + 0j if p % 4 == 1 else 1j


def primes_in_range(lo: int, hi: int) -> list[int]:
    """All odd primes in ``[lo, hi]`` in ascending order."""
    lo, hi = int(lo), int(hi)
    if lo < 3 or lo > hi:
        raise ValueError("need 3 <= lo <= hi")
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(hi**0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return [int(q) for q in np.nonzero(sieve)[0] if q >= lo and q % 2]
