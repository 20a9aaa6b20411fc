import json
import math

import numpy as np
import pytest

from turyn.circle_norms import (
    G_all_panels,
    G_direct,
    MeasureResult,
    QuadratureConfig,
    interp_G,
    lq_norm,
    mahler_measure_panels,
    mahler_measure_roots,
    measure_gap_companions,
    sup_norm,
)
from turyn.number_theory import primes_in_range
from turyn.polynomials import (
    CirclePoly,
    TurynSpec,
    build_companion,
    build_turyn,
    evaluate_at_roots,
    l2k_norm_exact,
    nearest_shift,
)

LEHMER = CirclePoly([1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])
F_B = CirclePoly([1, -1, 1, -1, 1, 1, -1, -1, 1, 1, 1, 1, 1])


# -- G_{p,t}(k, x) --------------------------------------------------------------


def test_interp_matches_direct_definition():
    rng = np.random.default_rng(2024)
    primes = primes_in_range(3, 199)
    for _ in range(100):
        p = int(rng.choice(primes))
        t = int(rng.integers(0, p))
        k = int(rng.integers(0, p))
        x = float(rng.uniform(1e-3, 1 - 1e-3))
        assert abs(interp_G(p, t, k, x) - G_direct(p, t, k, x)) <= 1e-9


def test_interp_vectorized_and_fft_panels():
    p, t = 101, 25
    xs = np.array([0.1, 0.5, 0.9])
    vals = interp_G(p, t, 7, xs)
    np.testing.assert_allclose(vals, [interp_G(p, t, 7, x) for x in xs], atol=1e-13)
    allk = G_all_panels(p, t, 0.3)
    np.testing.assert_allclose(allk[[0, 7, 50]], [interp_G(p, t, k, 0.3) for k in (0, 7, 50)], atol=1e-11)


@pytest.mark.parametrize("x", [0.0, 1.0, -0.2])
def test_interp_rejects_endpoints(x):
    with pytest.raises(ValueError):
        interp_G(11, 0, 1, x)


def test_G_endpoint_limit():
    for k in (1, 5, 9):
        assert abs(abs(interp_G(13, 3, k, 1e-9)) - 1) < 1e-6


@pytest.mark.parametrize("p", [101, 499, 997, 1999])
def test_mean_square_of_G(p):
    m = float(np.mean(np.abs(G_all_panels(p, nearest_shift(p, 0.25), 0.5)) ** 2))
    assert abs(m - 1) <= math.log(p) ** 2 / math.sqrt(p)


@pytest.mark.parametrize("p", [101, 499, 997])
def test_equicontinuity(p):
    rng = np.random.default_rng(p)
    t = nearest_shift(p, 0.25)
    worst = 0.0
    for _ in range(100):
        x, y = np.sort(rng.uniform(0.001, 0.999, 2))
        d = float(np.mean(np.abs(G_all_panels(p, t, x) - G_all_panels(p, t, y)) ** 2))
        worst = max(worst, d / (y - x) ** 1.5)
    print(f"p={p}: max ratio to (y-x)^(3/2) = {worst:.3f}")
    assert worst <= 10


# -- Mahler measure --------------------------------------------------------------


def test_roots_trivial_examples():
    assert mahler_measure_roots(CirclePoly([2, 1])).value == pytest.approx(2.0, rel=1e-14)
    assert mahler_measure_roots(CirclePoly([0, 0, 3])).value == pytest.approx(3.0)
    with pytest.raises(ValueError):
        mahler_measure_roots(CirclePoly([0]))


def test_known_measures():
    for method in (mahler_measure_roots, mahler_measure_panels):
        assert method(LEHMER).value == pytest.approx(1.17628082, abs=5e-8)
        assert method(F_B).value / math.sqrt(13) == pytest.approx(0.98636599, abs=5e-8)


@pytest.mark.parametrize("p", [5, 7, 11, 13, 31, 61, 101])
def test_panels_agree_with_roots(p):
    for t in (0, nearest_shift(p, 0.25)):
        spec = TurynSpec(p, t)
        a = mahler_measure_panels(spec)
        b = mahler_measure_roots(spec)
        assert a.value == pytest.approx(b.value, rel=1e-6)
        assert a.err_estimate < 1e-6


def test_measure_result_contract():
    r = mahler_measure_panels(TurynSpec(13, 3))
    assert r.value == pytest.approx(math.exp(r.log_value), rel=1e-15)
    assert r.err_estimate >= 0
    doc = json.loads(r.to_json())
    assert set(doc) == {"value", "log_value", "err_estimate", "method", "p", "t", "q"}
    assert doc["p"] == 13 and doc["t"] == 3 and doc["method"] == "panels"
    assert MeasureResult.from_log(0.0, -1e-3, "x").err_estimate == 1e-3


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_depth=0)


def test_mahler_of_monomial_and_cyclotomic():
    assert mahler_measure_panels(CirclePoly([0, 0, -5])).value == pytest.approx(5.0)
    # 1 + x + x^2 has all roots on the circle: M = 1
    assert mahler_measure_panels(CirclePoly([1, 1, 1])).value == pytest.approx(1.0, abs=1e-9)


# -- L_q norms ---------------------------------------------------------------------


def test_lq_parseval_littlewood():
    f = build_companion(TurynSpec(61, 15), 1)
    assert lq_norm(f, 2).value == pytest.approx(math.sqrt(61), rel=1e-9)


@pytest.mark.parametrize("p", [13, 101, 499])
def test_lq4_matches_exact(p):
    f = build_turyn(TurynSpec(p, nearest_shift(p, 0.25)))
    assert lq_norm(f, 4).value == pytest.approx(l2k_norm_exact(f, 2), rel=1e-8)


def test_lq_monotone_and_above_measure():
    for target in (F_B, TurynSpec(101, 25), TurynSpec(53, 0)):
        m = mahler_measure_panels(target).value
        norms = [lq_norm(target, q).value for q in (0.5, 1, 2, 4)]
        assert m <= norms[0] * (1 + 1e-9)
        assert all(a <= b * (1 + 1e-9) for a, b in zip(norms, norms[1:]))


def test_lq_small_q_tends_to_measure():
    m = mahler_measure_roots(F_B).value
    assert abs(lq_norm(F_B, 0.01).value / m - 1) < 0.01


def test_lq_rejects_bad_q():
    with pytest.raises(ValueError):
        lq_norm(F_B, 0)


# -- sup norm ---------------------------------------------------------------------------


def test_sup_examples():
    assert sup_norm(CirclePoly([1, 1])) == pytest.approx(2.0, rel=1e-15)
    assert sup_norm(CirclePoly([1] * 7)) == pytest.approx(7.0, rel=1e-15)
    with pytest.raises(ValueError):
        sup_norm(CirclePoly([1, 1]), grid_factor=2)


def test_sup_against_dense_grid():
    rng = np.random.default_rng(5)
    for n in (8, 20, 33, 65):
        f = CirclePoly(rng.choice([-1, 1], n).tolist())
        dense = float(np.abs(evaluate_at_roots(f, 1 << 22)).max())
        s = sup_norm(f)
        # the dense grid misses the peak by at most ~ (n h)^2 |f| / 8 with h = 2 pi / 2^22
        assert s <= dense * (1 + 1e-8)
        assert s >= dense * (1 - 1e-6)


def test_sup_upper_bound_and_monitored_lower_bound():
    # Upper bound with the empirical constant C = 2; the lower bound is only reported.
    for p in (101, 499, 997, 1999):
        for t in sorted({0, p // 7, nearest_shift(p, 0.25), p // 2}):
            s = sup_norm(TurynSpec(p, t))
            assert s / (math.sqrt(p) * math.log(p)) <= 2
            lower = (2 / math.pi) * math.sqrt(p) * math.log(math.log(p))
            print(f"p={p} t={t}: sup={s:.3f} lower-bound-form={lower:.3f} holds={s >= lower}")


# -- companion gaps --------------------------------------------------------------------


def test_companions_differ_in_one_coefficient():
    spec = TurynSpec(101, 25)
    f = build_turyn(spec)
    for s in (1, -1):
        assert np.count_nonzero((build_companion(spec, s) - f).coeffs) == 1


def test_gaps_small_and_validated():
    gp, gm = measure_gap_companions(157, nearest_shift(157, 0.25))
    assert abs(gp) < 0.05 and abs(gm) < 0.05
    with pytest.raises(ValueError):
        measure_gap_companions(11, 0)
    # t = p is the Fekete case
    assert all(math.isfinite(g) for g in measure_gap_companions(11, 11))
