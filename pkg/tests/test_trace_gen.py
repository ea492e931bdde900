from fractions import Fraction

import pytest

from cft.cyclotomic import CycElem, SubgroupData, generates, rel_trace, rel_trace_between
from cft.errors import NotAGenerator
from cft.trace_gen import (
    build_trace_generator,
    default_subfield_generator,
    radical,
    trace_budget,
)

F = Fraction


def z(m, k=1):
    return CycElem.zeta(m, k)


def test_default_generator_examples():
    g = default_subfield_generator(SubgroupData(5, (1, 4)))
    assert g == z(5) + z(5, 4)
    assert default_subfield_generator(SubgroupData.trivial(5)) == z(5)
    g12 = default_subfield_generator(SubgroupData(12, (1, 11)))
    assert g12 == z(12) + z(12, 11)
    # zeta_12 + zeta_12^-1 = sqrt(3): its square is 3
    assert g12 * g12 == 3


def test_default_generator_handles_vanishing_period():
    # the plain period for H = {1,7} mod 12 is zeta + zeta^7 = 0
    H = SubgroupData(12, (1, 7))
    period = z(12) + z(12, 7)
    assert period.is_zero()
    g = default_subfield_generator(H)
    assert generates(g, H, SubgroupData.full(12))


def test_radical():
    assert radical(10000) == 10
    assert radical(1) == 1
    assert radical(12) == 6


def test_budget_examples():
    per = z(5) + z(5, 4)
    n, rad = trace_budget(5, [z(5), 2 * per + 1])
    assert (n, rad) == (10000, 10)
    n, rad = trace_budget(4, [z(4)])
    assert (n, rad) == (8, 2)
    n, rad = trace_budget(3, [z(3)])
    assert (n, rad) == (6, 6)


def test_budget_rejects_non_generator():
    with pytest.raises(NotAGenerator):
        trace_budget(5, [z(5), CycElem.one(5)])


def test_build_m5():
    cert = build_trace_generator(5)
    assert cert.denominators == (11, 111)
    assert cert.passed
    expected = cert.generators[0] / 11 + cert.generators[1] / 111
    assert cert.alpha == expected


def test_build_m12_all_fields():
    cert = build_trace_generator(12)
    assert len(cert.subgroups) == 4
    assert cert.passed


def test_build_m3_single_field():
    cert = build_trace_generator(3)
    assert len(cert.subgroups) == 1
    assert cert.alpha == z(3) / 7
    assert cert.passed


def test_budget_scaling_invariance():
    # outcome must not depend on which multiple of the radical is used
    base = build_trace_generator(5)
    rad = radical(base.budget_n)
    for mult in (1, 2, 5):
        cert = build_trace_generator(5, budget_override=rad * mult)
        assert cert.passed
    raw = build_trace_generator(5, use_radical=False)
    assert raw.passed
    assert raw.budget_used == base.budget_n


def test_budget_override_validation():
    with pytest.raises(ValueError):
        build_trace_generator(5, budget_override=7)  # not a multiple of 10


def test_trace_compatibility_through_chains():
    cert = build_trace_generator(16)
    full = SubgroupData.full(16)
    for H, direct in zip(cert.subgroups, cert.traces):
        # recompute through any chain H <= J < full
        for J in cert.subgroups:
            if H.is_subgroup_of(J) and H != J:
                via = rel_trace_between(rel_trace(cert.alpha, J), J, full)
                assert via == rel_trace(cert.alpha, full)
        assert rel_trace(cert.alpha, H) == direct


def test_certificate_json_shape():
    cert = build_trace_generator(5)
    data = cert.to_json()
    assert data["passed"] is True
    assert data["alpha"]["m"] == 5
    assert [f["denominator"] for f in data["fields"]] == ["11", "111"]
