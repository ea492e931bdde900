"""The acceptance suite: every release-gating check, one callable each.

Each criterion returns a CriterionResult with a pass flag and enough
detail to reconstruct what was measured.  The pytest acceptance module
and the CLI's verify-all subcommand both run exactly these functions, so
there is a single source of truth for what "passing" means.
"""

from __future__ import annotations

import math
import random
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp

from .coprime import coprime_seq
from .cyclotomic import CycElem, SubgroupData, galois_group, generates
from .cm import (
    SUPPORTED_DISCRIMINANTS,
    SiegelPower,
    imag_quad,
    integrality_probe,
    ray_degree,
    verify_norm_tower,
    verify_trace_tower,
)
from .modfunc import (
    FracIndex,
    check_ptog,
    check_ptog_both,
    eisenstein,
    fm_func,
    _fm_siegel_product,
)
from .norm_gen import build_norm_element, power_stable, towers_for_conductor
from .normal_elem import build_normal_element, is_normal, nonvanishing_exponents
from .trace_gen import build_trace_generator

TRACE_CONDUCTORS = (3, 4, 5, 7, 8, 9, 11, 12, 15, 16)
NORM_TOWER_CONDUCTORS = (5, 13, 16)
NORMAL_CONDUCTORS = (3, 4, 5, 8, 12)
ACCEPTANCE_DPS = 128


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    elapsed: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return "criterion %2d %-28s %s  (%.1fs)" % (
            self.number, self.name, status, self.elapsed
        )


def _timed(number, name, fn) -> CriterionResult:
    start = time.time()
    try:
        details = fn()
        passed = True
    except Exception as exc:  # a criterion must never crash the suite
        details = {"error": "%s: %s" % (type(exc).__name__, exc)}
        passed = False
    return CriterionResult(number, name, passed, time.time() - start, details)


def criterion_1_trace_generators() -> CriterionResult:
    def run():
        details = {}
        for m in TRACE_CONDUCTORS:
            cert = build_trace_generator(m)
            if not cert.passed:
                raise AssertionError("conductor %d failed" % m)
            details[str(m)] = {"fields": len(cert.subgroups), "passed": True}
        return details

    return _timed(1, "universal trace generators", run)


def criterion_2_coprime_properties() -> CriterionResult:
    def run():
        rng = random.Random(20_2101)
        for _ in range(1000):
            length = rng.randint(1, 8)
            n_list = [rng.randrange(10 ** 6) for _ in range(length)]
            seq = coprime_seq(n_list)  # all three properties assert inside
            for n, m_val in zip(seq.inputs, seq.outputs):
                assert m_val >= 1 + n
                assert math.gcd(m_val, n) == 1
            outs = seq.outputs
            for i in range(len(outs)):
                for j in range(i + 1, len(outs)):
                    assert math.gcd(outs[i], outs[j]) == 1
            if all(n > 0 for n in n_list):
                assert all(m_val >= 2 for m_val in seq.outputs)
        return {"trials": 1000}

    return _timed(2, "coprime denominator recursion", run)


def criterion_3_norm_towers() -> CriterionResult:
    def run():
        details = {}
        for m in NORM_TOWER_CONDUCTORS:
            towers = towers_for_conductor(m, (2, 3))
            if not towers:
                raise AssertionError("no towers found for conductor %d" % m)
            per = []
            for tower in towers:
                cert = build_norm_element(tower, (1, 2, 3))
                assert cert.passed and cert.telescoping_ok
                per.append({
                    "chain_sizes": [len(H.elements) for H in tower.chain],
                    "telescoping": cert.telescoping_ok,
                })
            details[str(m)] = per
        return details

    return _timed(3, "universal norm generators", run)


def criterion_4_power_stability() -> CriterionResult:
    def run():
        rng = random.Random(41_4141)
        conductors = [5, 7, 8, 9, 11, 12, 13, 16]
        accepted = 0
        attempts = 0
        while accepted < 50:
            attempts += 1
            if attempts > 500:
                raise AssertionError("could not sample 50 generators")
            m = rng.choice(conductors)
            group = galois_group(m)
            coeffs = [Fraction(rng.randint(-3, 3)) for _ in range(group.order)]
            alpha = CycElem(m, tuple(coeffs))
            trivial = SubgroupData.trivial(m)
            full = SubgroupData.full(m)
            if alpha.is_zero() or not generates(alpha, trivial, full):
                continue
            power_stable(alpha, trivial, full, (1, 2, 3, 4, 5, 6))
            accepted += 1
        return {"generators": accepted, "attempts": attempts}

    return _timed(4, "power-stable generators", run)


def criterion_5_normal_elements() -> CriterionResult:
    def run():
        details = {}
        for m in NORMAL_CONDUCTORS:
            profile = nonvanishing_exponents(CycElem.zeta(m), m)
            details["nonvanishing_%d" % m] = {str(k): v for k, v in profile.items()}
        rng = random.Random(55_0005)
        checked = 0
        while checked < 200:
            m = rng.choice(NORMAL_CONDUCTORS)
            order = galois_group(m).order
            coeffs = [Fraction(rng.randint(-4, 4)) for _ in range(order)]
            u = CycElem(m, tuple(coeffs))
            is_normal(u, m, cross_check=True)  # raises on oracle disagreement
            checked += 1
        details["two_oracle_agreements"] = checked
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for m in NORMAL_CONDUCTORS:
                cert = build_normal_element(CycElem.zeta(m), m)
                assert cert.passed, "certificate failed at conductor %d" % m
                details["certificate_%d" % m] = "normal"
        pinned = build_normal_element(CycElem.zeta(3), 3)
        flat_m = [v for row in pinned.m_table for v in row]
        assert flat_m == [5, 1, 6, 91], flat_m
        assert pinned.beta.coeffs == (Fraction(6, 5), Fraction(97, 546))
        details["pinned_m3"] = {"m_table": flat_m, "beta": "6/5 + 97/546 z"}
        return details

    return _timed(5, "normal element construction", run)


def criterion_6_identity_residual() -> CriterionResult:
    def run():
        rng = random.Random(66_1206)
        triples = []
        while len(triples) < 10:
            n1 = rng.choice([2, 3, 4, 5, 6])
            n2 = rng.choice([2, 3, 4, 5, 6])
            try:
                idx1 = FracIndex(rng.randrange(n1), rng.randrange(n1), n1)
                idx2 = FracIndex(rng.randrange(n2), rng.randrange(n2), n2)
            except ValueError:
                continue
            if idx1.congruent_up_to_sign(idx2):
                continue
            tau = mp.mpc(rng.randint(-8, 8), rng.randint(15, 32)) / 16
            triples.append((idx1, idx2, tau))
        both = check_ptog_both(*triples[0], prec=ACCEPTANCE_DPS)
        normalization = both["certified"]
        assert normalization is not None, "neither normalization satisfies the identity"
        threshold = mp.mpf(10) ** (-100)
        residuals = []
        for idx1, idx2, tau in triples:
            res = check_ptog(idx1, idx2, tau, ACCEPTANCE_DPS, normalization)
            assert res < threshold, "residual %s too large" % mp.nstr(res, 5)
            residuals.append(mp.nstr(res, 3))
        return {"certified_normalization": normalization, "residuals": residuals}

    return _timed(6, "wp/Siegel identity residual", run)


def criterion_7_cm_regression() -> CriterionResult:
    def run():
        with mp.workdps(ACCEPTANCE_DPS + 20):
            threshold = mp.mpf(10) ** (-100)
            cases = [
                (mp.mpc(0, 1), 1728),
                ((1 + mp.sqrt(-3)) / 2, 0),
                (mp.mpc(0, 2), 287496),
            ]
            out = {}
            for tau, expect in cases:
                j_val = eisenstein(tau, ACCEPTANCE_DPS).j
                err = abs(j_val - expect)
                assert err < threshold, "j regression failed at %s" % mp.nstr(tau, 8)
                out[str(expect)] = mp.nstr(err, 3)
        return out

    return _timed(7, "classical j-invariant values", run)


def criterion_8_ray_degrees() -> CriterionResult:
    def run():
        out = {}
        for d_K in SUPPORTED_DISCRIMINANTS:
            K = imag_quad(d_K)
            r3, r9 = ray_degree(K, 3), ray_degree(K, 9)
            r5, r25 = ray_degree(K, 5), ray_degree(K, 25)
            assert r9 == 9 * r3, (d_K, r3, r9)
            assert r25 == 25 * r5, (d_K, r5, r25)
            out[str(d_K)] = {"deg3": r3, "deg9": r9, "deg5": r5, "deg25": r25}
        return out

    return _timed(8, "ray class degree scaling", run)


def criterion_9_integrality() -> CriterionResult:
    def run():
        factory = lambda K: (SiegelPower(FracIndex(0, 1, 3), 36), 3)
        with mp.workdps(ACCEPTANCE_DPS + 20):
            report = integrality_probe(
                factory, [-7, -8, -11], ACCEPTANCE_DPS, tol=mp.mpf(10) ** (-20)
            )
        assert report["passed"], report
        return {
            d: point["polynomial"] for d, point in report["points"].items()
        }

    return _timed(9, "Siegel power integrality", run)


def criterion_10_trace_tower() -> CriterionResult:
    def run():
        report = verify_trace_tower(imag_quad(-7), 3, 2, ACCEPTANCE_DPS)
        assert report["passed"]
        level = report["levels"]["2"]
        assert level["conjugates"] == 9
        with mp.workdps(ACCEPTANCE_DPS):
            sep = mp.mpf(level["min_separation"])
            assert sep > mp.mpf(10) ** (-64), "separation too small: %s" % sep
        return {"conjugates": 9, "min_separation": level["min_separation"]}

    return _timed(10, "CM trace tower", run)


def criterion_11_norm_tower_cm() -> CriterionResult:
    def run():
        report = verify_norm_tower(imag_quad(-7), [3, 9], (1, 2), ACCEPTANCE_DPS)
        assert report["passed"]
        return {
            "degrees": report["degrees"],
            "steps": {
                k: {e: v["min_separation"] for e, v in step["exponents"].items()}
                for k, step in report["steps"].items()
            },
        }

    return _timed(11, "CM norm tower", run)


def criterion_12_fm_agreement() -> CriterionResult:
    def run():
        points = []
        for d_K in (-7, -8, -11, -19, -43):
            points.append(("theta %d" % d_K, imag_quad(d_K).theta(ACCEPTANCE_DPS)))
        with mp.workdps(ACCEPTANCE_DPS + 20):
            generic = [
                mp.mpc(1, 11) / 10,
                mp.mpc(-3, 9) / 10,
                mp.mpc(1, 6) / 4,
                mp.mpc(1, 4) / 2,
                mp.mpc(0, 17) / 16,
            ]
        points.extend(("generic %d" % i, tau) for i, tau in enumerate(generic))
        threshold = mp.mpf(10) ** (-100)
        out = {}
        for name, tau in points:
            with mp.workdps(ACCEPTANCE_DPS + 20):
                ratio = fm_func(3, 2, tau, ACCEPTANCE_DPS, cross_check=False)
                product = _fm_siegel_product(3, 2, tau, ACCEPTANCE_DPS)
                err = abs(ratio - product)
                assert err < threshold, "disagreement %s at %s" % (mp.nstr(err, 5), name)
                out[name] = mp.nstr(err, 3)
        return out

    return _timed(12, "tower ratio dual formulas", run)


ALL_CRITERIA = (
    criterion_1_trace_generators,
    criterion_2_coprime_properties,
    criterion_3_norm_towers,
    criterion_4_power_stability,
    criterion_5_normal_elements,
    criterion_6_identity_residual,
    criterion_7_cm_regression,
    criterion_8_ray_degrees,
    criterion_9_integrality,
    criterion_10_trace_tower,
    criterion_11_norm_tower_cm,
    criterion_12_fm_agreement,
)


def run_all(numbers=None, progress=None) -> list[CriterionResult]:
    results = []
    for k, fn in enumerate(ALL_CRITERIA, start=1):
        if numbers is not None and k not in numbers:
            continue
        result = fn()
        results.append(result)
        if progress is not None:
            progress(result.line())
    return results
