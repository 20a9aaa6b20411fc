import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from turyn.number_theory import gauss_unit, legendre_symbol, primes_in_range
from turyn.polynomials import (
    CirclePoly,
    TurynSpec,
    autocorrelation,
    build_companion,
    build_generalized,
    build_turyn,
    coeffs_from_csv,
    coeffs_from_json,
    coeffs_to_csv,
    coeffs_to_json,
    evaluate,
    evaluate_at_roots,
    horner,
    l2_norm,
    l2k_norm_exact,
    l2k_power_exact,
    merit_factor,
    nearest_shift,
    zero_slot,
)


def coeffs(f):
    return tuple(f.coeffs.tolist())


# -- construction -----------------------------------------------------------


def test_turyn_examples():
    assert coeffs(build_turyn(TurynSpec(5, 0))) == (0, 1, -1, -1, 1)
    assert coeffs(build_turyn(TurynSpec(5, 1))) == (1, -1, -1, 1, 0)


def test_companion_examples():
    assert coeffs(build_companion(TurynSpec(5, 1), 1)) == (1, -1, -1, 1, 1)
    assert coeffs(build_companion(TurynSpec(5, 1), -1)) == (1, -1, -1, 1, -1)
    # t = p encodes the Fekete case: zero slot at exponent 0
    assert coeffs(build_companion(TurynSpec(5, 5), 1)) == (1, 1, -1, -1, 1)
    with pytest.raises(ValueError):
        build_companion(TurynSpec(5, 1), 0)


def test_generalized_examples():
    assert coeffs(build_generalized(TurynSpec(5, 0, 2))) == (0, 1, -1)
    assert coeffs(build_generalized(TurynSpec(5, 0, 5))) == (0, 1, -1, -1, 1, 0)


def test_invalid_specs():
    for bad in (4, 9, 2, 1):
        with pytest.raises(ValueError, match="odd prime"):
            TurynSpec(bad, 0)
    with pytest.raises(ValueError):
        TurynSpec(5, 0, -1)


def test_nearest_shift_rounding():
    assert nearest_shift(5, 0.25) == 1  # 1.25
    assert nearest_shift(7, 0.25) == 2  # 1.75
    assert nearest_shift(2, 0.25) == 0  # 0.5 rounds down
    assert nearest_shift(6, Fraction(1, 4)) == 1  # 1.5 rounds down
    assert nearest_shift(1999, 0.25) == 500


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 101])
def test_turyn_structure(p):
    for t in range(p):
        f = build_turyn(TurynSpec(p, t))
        c = f.coeffs
        assert len(c) == p
        assert np.count_nonzero(c == 0) == 1
        assert c[zero_slot(TurynSpec(p, t))] == 0
        assert all(c[j] == legendre_symbol(j + t, p) for j in range(p))
        for s in (1, -1):
            g = build_companion(TurynSpec(p, t), s)
            assert set(g.coeffs.tolist()) <= {1, -1}


def test_circlepoly_keeps_trailing_zeros():
    f = CirclePoly([1, 2, 0, 0])
    assert f.degree == 3
    assert f.trimmed().tolist() == [1, 2]
    with pytest.raises(ValueError):
        CirclePoly([1.5])
    with pytest.raises(ValueError):
        f.coeffs[0] = 3  # read-only


# -- evaluation ---------------------------------------------------------------


def test_evaluate_examples():
    assert abs(evaluate(CirclePoly([1, 1]), 0.5)) < 1e-15
    assert abs(evaluate(build_turyn(TurynSpec(5, 0)), 0.0)) < 1e-15
    assert abs(abs(evaluate(build_turyn(TurynSpec(7, 0)), 1 / 7)) - math.sqrt(7)) < 1e-13


def test_evaluate_at_roots_examples():
    np.testing.assert_allclose(evaluate_at_roots(CirclePoly([0, 1]), 4), [1, 1j, -1, -1j], atol=1e-15)
    np.testing.assert_allclose(evaluate_at_roots(CirclePoly([1]), 7), np.ones(7), atol=1e-15)
    vals = evaluate_at_roots(build_turyn(TurynSpec(11, 0)), 11)
    np.testing.assert_allclose(np.abs(vals[1:]), math.sqrt(11), rtol=1e-13)


def test_evaluate_matches_exact_rational_sum():
    # Oracle: mpmath-free exact-ish evaluation with math.fsum on real/imag parts.
    f = build_turyn(TurynSpec(997, 250))
    for u in (0.0123, 0.5, 0.7777, 1 / 997):
        terms = [int(c) * cmath.exp(2j * math.pi * ((j * u) % 1.0)) for j, c in enumerate(f.coeffs.tolist())]
        ref = complex(math.fsum(z.real for z in terms), math.fsum(z.imag for z in terms))
        assert abs(evaluate(f, u) - ref) < 1e-11


def test_horner_matches_evaluate():
    rng = np.random.default_rng(1)
    c = rng.integers(-3, 4, 50)
    z = np.exp(2j * np.pi * rng.random(20))
    np.testing.assert_allclose(horner(c.astype(float), z), evaluate(CirclePoly(c.tolist()), np.angle(z) / (2 * np.pi)), atol=1e-12)


GAUSS_PRIMES = primes_in_range(3, 499)


@pytest.mark.parametrize("p", GAUSS_PRIMES)
def test_gauss_identities(p):
    rng = np.random.default_rng(p)
    ts = {0, nearest_shift(p, 0.25)} | set(rng.integers(0, p, 3).tolist())
    k = np.arange(1, p)
    leg = np.array([legendre_symbol(int(x), p) for x in k])
    for t in ts:
        f = build_turyn(TurynSpec(p, t))
        vals = evaluate(f, k / p)
        zeta = cmath.exp(2j * math.pi / p)
        base = gauss_unit(p) * zeta ** (-t) * math.sqrt(p)
        assert abs(vals[0] - base) <= 1e-9 * math.sqrt(p)
        np.testing.assert_allclose(np.abs(vals), math.sqrt(p), rtol=1e-9)
        phase = np.exp(-2j * np.pi * (((k - 1) * t) % p) / p)
        np.testing.assert_allclose(vals, leg * phase * vals[0], rtol=0, atol=1e-9 * math.sqrt(p))


# -- norms ---------------------------------------------------------------------


def test_l2_examples():
    assert l2_norm(CirclePoly([1, -1, 1, 1])) == 2.0
    assert l2_norm(CirclePoly([0])) == 0.0
    assert l2_norm(build_turyn(TurynSpec(101, 25))) == pytest.approx(10.0, abs=0)


def test_autocorrelation_examples():
    assert autocorrelation(CirclePoly([1, 1])).tolist() == [2, 1]
    assert autocorrelation(CirclePoly([1, 1, -1])).tolist() == [3, 0, -1]


def test_l4_example_and_merit():
    assert l2k_power_exact(CirclePoly([1, 1]), 2) == 6
    assert merit_factor(CirclePoly([1, 1])) == 2.0
    with pytest.raises(ZeroDivisionError):
        merit_factor(CirclePoly([1]))
    with pytest.raises(ValueError):
        l2k_power_exact(CirclePoly([1]), 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=60))
def test_l4_autocorrelation_identity(cs):
    f = CirclePoly(cs)
    c = [int(v) for v in autocorrelation(f).tolist()]
    assert l2k_power_exact(f, 2) == c[0] ** 2 + 2 * sum(v * v for v in c[1:])
    assert c[0] == l2k_power_exact(f, 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=40), st.integers(2, 4))
def test_l2k_against_fft_mean(cs, k):
    # Oracle: mean of |f|^{2k} over enough roots of unity is exact.
    f = CirclePoly(cs)
    N = 2 * k * len(cs) + 1
    vals = evaluate_at_roots(f, N)
    assert l2k_power_exact(f, k) == pytest.approx(float(np.mean(np.abs(vals) ** (2 * k))), rel=1e-9, abs=1e-9)


def test_l2k_big_integer_promotion():
    f = CirclePoly([10**6] * 40)
    # (40 * 1e6)^... exact: f^3 coefficients exceed int64 sums of squares
    exact = sum(c * c for c in np.convolve(np.convolve([10**6] * 40, [10**6] * 40).astype(object), np.array([10**6] * 40, dtype=object)).tolist())
    assert l2k_power_exact(f, 3) == exact


@pytest.mark.parametrize("p", [7, 101, 499])
def test_parseval(p):
    f = build_turyn(TurynSpec(p, nearest_shift(p, 0.25)))
    vals = evaluate_at_roots(f, 2 * f.degree + 1)
    assert np.mean(np.abs(vals) ** 2) == pytest.approx(l2_norm(f) ** 2, rel=1e-10)


def test_golay_law_pairs():
    pairs = [(p, t) for p in (503, 1009, 1999) for t in (0, p // 8, nearest_shift(p, 0.25), p // 3)]
    for p, t in pairs:
        f = build_turyn(TurynSpec(p, t))
        law = 8 * (t / p - 0.25) ** 2 + 7 / 6
        assert abs(l2k_power_exact(f, 2) / p**2 - law) <= 0.05


def test_generalized_turyn_beats_golay():
    # Frozen instance: truncated/extended Turyn with d/p ~ 1.057, t/p ~ 0.215.
    f = build_generalized(TurynSpec(2011, 432, 2126))
    assert merit_factor(f) == pytest.approx(6.3430268, abs=1e-6)
    assert merit_factor(f) > 6.34
    assert l2k_norm_exact(f, 2) / l2_norm(f) < (7 / 6) ** 0.25


def test_serialization_round_trip():
    f = build_companion(TurynSpec(13, 3), -1)
    assert coeffs_from_csv(coeffs_to_csv(f)) == f
    assert coeffs_from_json(coeffs_to_json(f)) == f
    assert coeffs_to_csv(CirclePoly([1, 0, -1])) == "1\n0\n-1\n"
