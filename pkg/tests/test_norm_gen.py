from fractions import Fraction

import pytest

from cft.cyclotomic import CycElem, SubgroupData, rel_norm_between
from cft.errors import NotAGenerator, NotAlgebraicInteger
from cft.norm_gen import (
    TowerData,
    build_norm_element,
    power_stable,
    tower_from_generator_lists,
    towers_for_conductor,
)

F = Fraction


def z(m, k=1):
    return CycElem.zeta(m, k)


def tower5():
    return TowerData(
        5, (SubgroupData.full(5), SubgroupData(5, (1, 4)), SubgroupData.trivial(5))
    )


def test_power_stable_examples():
    triv3, full3 = SubgroupData.trivial(3), SubgroupData.full(3)
    b = power_stable(z(3), triv3, full3)
    assert b == 3 * z(3) + 1
    assert b * b == CycElem(3, (F(-8), F(-3)))

    triv5, full5 = SubgroupData.trivial(5), SubgroupData.full(5)
    power_stable(z(5), triv5, full5)  # n = 1..6 and -1 all checked inside

    sqrt5 = 2 * (z(5) + z(5, 4)) + 1
    H = SubgroupData(5, (1, 4))
    b = power_stable(sqrt5, H, full5)
    assert b * b == 46 + 6 * sqrt5


def test_power_stable_requires_integrality():
    with pytest.raises(NotAlgebraicInteger):
        power_stable(z(5) / 2, SubgroupData.trivial(5), SubgroupData.full(5))


def test_power_stable_requires_generator():
    with pytest.raises(NotAGenerator):
        power_stable(CycElem.one(5), SubgroupData.trivial(5), SubgroupData.full(5))


def test_tower_validation():
    full, triv = SubgroupData.full(5), SubgroupData.trivial(5)
    with pytest.raises(ValueError):
        TowerData(5, (full, full, triv))  # not strictly descending
    with pytest.raises(ValueError):
        TowerData(5, (full, SubgroupData(5, (1, 4))))  # does not end at {1}


def test_degrees():
    assert tower5().degrees() == [2, 2]


def test_build_m5_tower():
    cert = build_norm_element(tower5(), (1, 2, 3))
    assert cert.passed
    assert cert.telescoping_ok
    assert not cert.beta.is_zero()


def test_build_trivial_tower():
    t = TowerData(5, (SubgroupData.full(5), SubgroupData.trivial(5)))
    cert = build_norm_element(t, (1, 2))
    assert cert.passed
    assert cert.beta == cert.step_generators[0]


def test_telescoping_identity_exact():
    cert = build_norm_element(tower5(), (1,))
    chain = cert.tower.chain
    lhs = rel_norm_between(cert.beta, chain[2], chain[1])
    prefix = cert.step_generators[0]
    assert lhs == prefix ** cert.tower.degrees()[1]


def test_real_subfield_tower_m16():
    # Q < maximal real subfield < Q(zeta_16)
    m = 16
    real = SubgroupData(m, (1, 15))
    t = TowerData(m, (SubgroupData.full(m), real, SubgroupData.trivial(m)))
    cert = build_norm_element(t, (1, 2))
    assert cert.passed


def test_towers_for_conductor_shapes():
    towers = towers_for_conductor(13, (2, 3))
    lengths = sorted(t.t for t in towers)
    assert lengths == [2, 3]
    towers5 = towers_for_conductor(5, (2, 3))
    assert [t.t for t in towers5] == [2]


def test_tower_from_generator_lists():
    t = tower_from_generator_lists(5, [[2], [4], [1]])
    assert [H.elements for H in t.chain] == [(1, 2, 3, 4), (1, 4), (1,)]


def test_certificate_json():
    cert = build_norm_element(tower5(), (1, 2))
    data = cert.to_json()
    assert data["passed"] and data["telescoping_ok"]
    assert data["degrees"] == [2, 2]
