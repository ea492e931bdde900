from fractions import Fraction

import pytest
from mpmath import mp

from cft.cm import (
    SUPPORTED_DISCRIMINANTS,
    CMContext,
    FmValue,
    JValue,
    Product,
    SiegelPower,
    WMatrix,
    act_on_index,
    cm_conjugates,
    enumerate_W,
    imag_quad,
    integrality_probe,
    normal_element_cm,
    ray_degree,
    recognize_alg_int,
    tower_denominators,
    verify_norm_tower,
    verify_trace_tower,
)
from cft.errors import (
    IndexLevelMismatch,
    RecognitionFailed,
    UnsupportedDiscriminant,
)
from cft.modfunc import FracIndex

F = Fraction


def kronecker(d, p):
    if d % p == 0:
        return 0
    return 1 if pow(d % p, (p - 1) // 2, p) == 1 else -1


# ---------------------------------------------------------------- field data


def test_imag_quad_examples():
    k7 = imag_quad(-7)
    assert (k7.B, k7.C) == (7, 14)
    k8 = imag_quad(-8)
    assert (k8.B, k8.C) == (8, 18)


@pytest.mark.parametrize("bad", [-3, -4, -15, -5, 5])
def test_imag_quad_rejects(bad):
    with pytest.raises(UnsupportedDiscriminant):
        imag_quad(bad)


def test_theta_satisfies_min_poly():
    for d_K in SUPPORTED_DISCRIMINANTS:
        K = imag_quad(d_K)
        with mp.workdps(70):
            theta = K.theta(60)
            assert mp.im(theta) > 0
            assert abs(theta ** 2 + K.B * theta + K.C) < mp.mpf(10) ** -55


# ---------------------------------------------------------------- matrix groups


def test_group_orders_examples():
    K = imag_quad(-7)
    assert enumerate_W(K, 3).order == 8
    assert enumerate_W(K, 3).quotient_order == 4
    assert enumerate_W(K, 7).order == 42
    assert enumerate_W(K, 11).order == 100


def test_group_order_matches_kronecker_for_small_primes():
    primes = [3, 5, 7, 11, 13, 17, 19, 23, 29]
    for d_K in SUPPORTED_DISCRIMINANTS:
        K = imag_quad(d_K)
        for p in primes:
            symbol = kronecker(d_K, p)
            expect = {1: (p - 1) ** 2, -1: p * p - 1, 0: p * p - p}[symbol]
            assert enumerate_W(K, p).order == expect, (d_K, p)


def test_ray_degree_scaling():
    for d_K in SUPPORTED_DISCRIMINANTS:
        K = imag_quad(d_K)
        for p in (3, 5):
            base = ray_degree(K, p)
            assert ray_degree(K, p * p) == p * p * base
            assert ray_degree(K, p ** 3) == p ** 4 * base


def test_quotient_at_level_two():
    # -I = I mod 2: the quotient must fall back to orbit classes
    K = imag_quad(-11)
    wg = enumerate_W(K, 2)
    assert wg.order == wg.quotient_order == 3
    assert ray_degree(K, 2) == 3


def test_quotient_structure_is_group():
    K = imag_quad(-7)
    wg = enumerate_W(K, 9)
    s = wg.quotient_structure()
    order = 1
    for _, n in s.basis:
        order *= n
    assert order == wg.quotient_order


# ---------------------------------------------------------------- index action


def test_act_on_index_examples():
    K = imag_quad(-7)
    idx = FracIndex(0, 1, 3)
    ident = WMatrix(3, 1, 0, K.B, K.C)
    assert act_on_index(ident, idx) == idx
    neg = WMatrix(3, -1, 0, K.B, K.C)
    assert act_on_index(neg, idx) == idx.neg()
    g = WMatrix(3, 1, 1, K.B, K.C)
    assert act_on_index(g, idx) == FracIndex(1, 1, 3)


def test_act_level_mismatch():
    K = imag_quad(-7)
    with pytest.raises(IndexLevelMismatch):
        act_on_index(WMatrix(3, 1, 0, K.B, K.C), FracIndex(0, 1, 9))


# ---------------------------------------------------------------- conjugates


def test_conjugates_trivial_subgroup():
    K = imag_quad(-7)
    expr = SiegelPower(FracIndex(0, 1, 3), 36)
    wg = enumerate_W(K, 3)
    single = cm_conjugates(expr, K, 3, subgroup=[wg.quotient[0]], prec=64)
    assert len(single) == 1


def test_conjugate_multiset_sign_invariant():
    K = imag_quad(-7)
    expr = SiegelPower(FracIndex(0, 1, 3), 36)
    wg = enumerate_W(K, 3)
    ctx = CMContext(K, 64)
    with mp.workdps(74):
        for gamma in wg.quotient:
            v_plus = expr.transformed(gamma).evaluate(ctx)
            v_minus = expr.transformed(gamma.neg()).evaluate(ctx)
            assert abs(v_plus - v_minus) < mp.mpf(10) ** -50 * abs(v_plus)


def test_full_orbit_size():
    K = imag_quad(-7)
    expr = SiegelPower(FracIndex(0, 1, 3), 36)
    values = cm_conjugates(expr, K, 3, prec=64)
    assert len(values) == ray_degree(K, 3) == 4


def test_j_value_fixed():
    K = imag_quad(-7)
    values = cm_conjugates(JValue(), K, 3, prec=64)
    with mp.workdps(70):
        assert max(abs(v - values[0]) for v in values) == 0


# ---------------------------------------------------------------- recognition


def test_recognize_singleton_j():
    with mp.workdps(90):
        coeffs = recognize_alg_int([mp.mpf(1728)], prec=80)
        assert coeffs == [-1728, 1]


def test_recognize_rejects_non_integer():
    with pytest.raises(RecognitionFailed):
        recognize_alg_int([mp.mpf("0.5")], prec=80)


def test_recognize_orbit_polynomial_pinned():
    # degree-4 orbit of the 36th Siegel power at level 3, d_K = -7;
    # coefficients frozen after a verified high-precision run, and the
    # constant term is the expected power of 3
    K = imag_quad(-7)
    expr = SiegelPower(FracIndex(0, 1, 3), 36)
    values = cm_conjugates(expr, K, 3, prec=128)
    coeffs = recognize_alg_int(values, prec=128)
    assert coeffs == [387420489, 68114261529, -47337615, 29889, 1]
    assert coeffs[0] == 3 ** 18


def test_residual_shrinks_with_precision():
    K = imag_quad(-7)
    expr = SiegelPower(FracIndex(0, 1, 3), 36)

    def residual(prec):
        values = cm_conjugates(expr, K, 3, prec=prec)
        with mp.workdps(prec + 20):
            poly = [mp.mpc(1)]
            for c in values:
                new = [mp.mpc(0)] * (len(poly) + 1)
                for i, a in enumerate(poly):
                    new[i + 1] += a
                    new[i] -= a * c
                poly = new
            return max(
                max(abs(mp.re(a) - mp.nint(mp.re(a))), abs(mp.im(a)))
                for a in poly
            )

    with mp.workdps(300):
        r_low = residual(80)
        r_high = residual(160)
        assert r_high < r_low * mp.mpf(10) ** -10


# ---------------------------------------------------------------- verifications


def test_tower_denominators():
    assert tower_denominators(3, 2) == [1, 4]
    assert tower_denominators(3, 3) == [1, 4, 13]


def test_trace_tower_base():
    report = verify_trace_tower(imag_quad(-7), 3, 2, 96)
    assert report["passed"]
    assert report["levels"]["2"]["conjugates"] == 9
    assert report["denominators"] == ["1", "4"]


def test_trace_tower_other_field():
    report = verify_trace_tower(imag_quad(-11), 3, 2, 96)
    assert report["passed"]


def test_norm_tower_cases():
    assert verify_norm_tower(imag_quad(-7), [3, 9], (1, 2), 96)["passed"]
    assert verify_norm_tower(imag_quad(-8), [2, 4], (1, 2), 96)["passed"]
    assert verify_norm_tower(imag_quad(-7), [3], (1, 2), 96)["passed"]


def test_norm_tower_validates_chain():
    with pytest.raises(ValueError):
        verify_norm_tower(imag_quad(-7), [3, 5], (1,), 64)


def test_fm_expr_matches_direct_evaluation():
    from cft.modfunc import fm_func

    K = imag_quad(-7)
    ctx = CMContext(K, 96)
    expr = FmValue.at_level(3, 2, 9)
    with mp.workdps(110):
        via_expr = expr.evaluate(ctx)
        direct = fm_func(3, 2, K.theta(96), 96)
        assert abs(via_expr - direct) < mp.mpf(10) ** -80 * abs(direct)


def test_normal_element_reports():
    rep = normal_element_cm(imag_quad(-7), 3, 96)
    assert rep["normal"] and rep["degree"] == 4
    rep = normal_element_cm(imag_quad(-8), 3, 96)
    assert rep["normal"] and rep["degree"] == 2
    rep = normal_element_cm(imag_quad(-7), 2, 96)
    assert rep["normal"] and rep["degree"] == 1


def test_normal_element_degree_guard():
    with pytest.raises(ValueError):
        normal_element_cm(imag_quad(-7), 5, 64, max_degree=4)


def test_probe_collects_failures_per_point():
    bad = Product((SiegelPower(FracIndex(0, 1, 3), 36),), F(1, 2))
    report = integrality_probe(lambda K: (bad, 3), [-7], 96)
    assert not report["passed"]
    assert not report["points"]["-7"]["integral"]


def test_probe_integral_scaled_inverse():
    # (N g^{-1})^{12N} at N = 3: integral by the unit structure
    expr = Product((SiegelPower(FracIndex(0, 1, 3), -36),), F(3) ** 36)
    report = integrality_probe(lambda K: (expr, 3), [-7, -8, -11], 128)
    assert report["passed"]
