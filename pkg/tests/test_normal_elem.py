import random
import warnings
from fractions import Fraction

import pytest

from cft.cyclotomic import CycElem, conjugate, galois_group
from cft.errors import NotAGenerator
from cft.normal_elem import (
    absolute_norm,
    build_normal_element,
    char_sum_S,
    char_table,
    is_normal,
    nonvanishing_exponents,
)

F = Fraction


def z(m, k=1):
    return CycElem.zeta(m, k)


def test_char_table_m3():
    t = char_table(3)
    assert t.d == 2 and t.value_conductor == 6
    assert t.value(0, 2) == 1
    assert t.value(1, 2) == -1


def test_char_table_m5_generator():
    t = char_table(5)
    # cyclic of order 4 on the generator 2; chi_2(2) = i = zeta_20^5
    assert t.value(1, 2) == CycElem.zeta(20, 5)
    assert t.value(1, 2) ** 2 == -1


def test_char_table_m8_klein_four():
    t = char_table(8)
    for i in range(t.d):
        for g in t.elements:
            assert t.value(i, g) in (CycElem.one(t.value_conductor),
                                     -CycElem.one(t.value_conductor))


@pytest.mark.parametrize("m", [3, 5, 8, 9, 12])
def test_orthogonality_exact(m):
    t = char_table(m)
    L = t.value_conductor
    for i in range(t.d):
        for j in range(t.d):
            total = CycElem.zero(L)
            for k, g in enumerate(t.elements):
                conj_val = t.values[j][t.inverse_position[k]]
                total = total + t.values[i][k] * conj_val
            assert total == (t.d if i == j else 0)


def test_char_sums_m3():
    t = char_table(3)
    a = z(3)
    assert char_sum_S(a, t, 0, 0) == 2
    assert char_sum_S(a, t, 1, 0).is_zero()
    assert char_sum_S(a, t, 0, 1) == -1
    s11 = char_sum_S(a, t, 1, 1)
    assert s11 == z(3) - z(3, 2)
    assert s11 * s11 == -3  # it is sqrt(-3)


def test_char_sum_trivial_character_power_zero():
    for m in (4, 5, 8):
        t = char_table(m)
        assert char_sum_S(z(m), t, 0, 0) == t.d


def test_char_sum_exponent_range():
    t = char_table(3)
    with pytest.raises(ValueError):
        char_sum_S(z(3), t, 0, 5)


def test_char_sum_requires_generator():
    t = char_table(5)
    with pytest.raises(NotAGenerator):
        char_sum_S(CycElem.one(5), t, 0, 1)


def test_absolute_norm():
    assert absolute_norm(CycElem.from_rational(2, 6)) == 4
    # sqrt(-3) times its conjugate -sqrt(-3) is +3
    assert absolute_norm(z(3) - z(3, 2)) == 3


def test_nonvanishing_examples():
    assert nonvanishing_exponents(z(3), 3) == {0: 0, 1: 1}
    prof5 = nonvanishing_exponents(z(5), 5)
    assert all(e <= 3 for e in prof5.values())
    prof4 = nonvanishing_exponents(z(4), 4)
    assert all(e <= 1 for e in prof4.values())


def test_is_normal_examples():
    assert is_normal(z(3), 3, cross_check=True)
    assert not is_normal(z(3) - z(3, 2), 3, cross_check=True)
    assert not is_normal(CycElem.one(3), 3, cross_check=True)


def test_is_normal_two_oracles_random():
    rng = random.Random(5522)
    for _ in range(200):
        m = rng.choice([3, 4, 5, 8, 12])
        deg = galois_group(m).order
        u = CycElem(m, tuple(F(rng.randint(-4, 4)) for _ in range(deg)))
        is_normal(u, m, cross_check=True)  # raises if the oracles disagree


def test_build_m3_pinned_values():
    cert = build_normal_element(z(3), 3)
    assert cert.n_table == ((4, 0), (1, 3))
    assert cert.m_table == ((5, 1), (6, 91))
    assert cert.beta == CycElem(3, (F(6, 5), F(97, 546)))
    assert cert.normal


@pytest.mark.parametrize("m", [4, 5, 8, 12])
def test_build_certificates(m):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cert = build_normal_element(z(m), m)
    assert cert.passed
    d = cert.d
    # pairwise coprimality and gcd(M, N) = 1 on nonzero entries
    import math

    flat_m = [cert.m_table[e][i] for e in range(d) for i in range(d)]
    flat_n = [cert.n_table[e][i] for e in range(d) for i in range(d)]
    for i in range(len(flat_m)):
        for j in range(i + 1, len(flat_m)):
            assert math.gcd(flat_m[i], flat_m[j]) == 1
    for m_val, n_val in zip(flat_m, flat_n):
        if n_val:
            assert math.gcd(m_val, n_val) == 1


def test_generator_conjugates_distinct():
    # Vandermonde nonvanishing: conjugates of a generator never repeat
    for m in (5, 8, 12):
        conj = [conjugate(z(m), a) for a in galois_group(m).elements]
        for i in range(len(conj)):
            for j in range(i + 1, len(conj)):
                assert conj[i] != conj[j]


def test_certificate_json():
    cert = build_normal_element(z(3), 3)
    data = cert.to_json()
    assert data["m_table"] == [["5", "1"], ["6", "91"]]
    assert data["beta"]["coeffs"] == ["6/5", "97/546"]
