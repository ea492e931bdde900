"""Release gate: one test per acceptance criterion, each printing its
pass/fail line (visible with pytest -s or in the captured output)."""

from cft import acceptance


def _check(result):
    print(result.line())
    assert result.passed, result.details
    return result


def test_criterion_01_trace_generators():
    result = _check(acceptance.criterion_1_trace_generators())
    assert len(result.details) == len(acceptance.TRACE_CONDUCTORS)


def test_criterion_02_coprime_properties():
    result = _check(acceptance.criterion_2_coprime_properties())
    assert result.details["trials"] == 1000


def test_criterion_03_norm_towers():
    result = _check(acceptance.criterion_3_norm_towers())
    assert set(result.details) == {"5", "13", "16"}
    # conductors 13 and 16 carry both a two-step and a three-step tower
    assert len(result.details["13"]) == 2
    assert len(result.details["16"]) == 2


def test_criterion_04_power_stability():
    result = _check(acceptance.criterion_4_power_stability())
    assert result.details["generators"] == 50


def test_criterion_05_normal_elements():
    result = _check(acceptance.criterion_5_normal_elements())
    assert result.details["pinned_m3"]["m_table"] == [5, 1, 6, 91]
    assert result.details["two_oracle_agreements"] == 200


def test_criterion_06_identity_residual():
    result = _check(acceptance.criterion_6_identity_residual())
    assert result.details["certified_normalization"] in ("classical", "paper")
    assert len(result.details["residuals"]) == 10


def test_criterion_07_cm_regression():
    result = _check(acceptance.criterion_7_cm_regression())
    assert set(result.details) == {"1728", "0", "287496"}


def test_criterion_08_ray_degrees():
    result = _check(acceptance.criterion_8_ray_degrees())
    assert len(result.details) == 7


def test_criterion_09_integrality():
    result = _check(acceptance.criterion_9_integrality())
    assert set(result.details) == {"-7", "-8", "-11"}


def test_criterion_10_trace_tower():
    result = _check(acceptance.criterion_10_trace_tower())
    assert result.details["conjugates"] == 9


def test_criterion_11_norm_tower_cm():
    result = _check(acceptance.criterion_11_norm_tower_cm())
    assert result.details["degrees"] == [4, 36]


def test_criterion_12_fm_agreement():
    result = _check(acceptance.criterion_12_fm_agreement())
    assert len(result.details) == 10
