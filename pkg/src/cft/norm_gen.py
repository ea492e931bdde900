"""Universal norm generators along towers inside a cyclotomic field.

A tower Q = F_0 <= F_1 <= ... <= F_t = Q(zeta_m) is encoded by a strictly
descending chain of subgroups H_0 > H_1 > ... > H_t = {1}.  Each step gets
a power-stable generator beta_k = 3*gamma_k + 1 (any nonzero power of
which still generates), and the universal element is

    beta = beta_1 * prod_{s=2..t} beta_s^{d_s} / N_{F_s/F_{s-1}}(beta_s),

with d_s = [F_s : F_{s-1}].  The certificate verifies that the norm of
beta down to each F_k, raised to every exponent in the test set,
generates F_k over F_0, and that the telescoping identity
N_{F_t/F_{t-1}}(beta) = prefix^{d_t} holds exactly.

Power stability for *all* nonzero exponents cannot be tested; a finite
configurable set stands in for it and is recorded in the certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cyclotomic import (
    CycElem,
    SubgroupData,
    generates,
    is_algebraic_integer,
    rel_norm_between,
    subgroup_lattice,
)
from .errors import NotAGenerator, NotAlgebraicInteger, VerificationFailed
from .trace_gen import default_subfield_generator

DEFAULT_POWER_SET = (1, 2, 3, 4, 5, 6, -1)


@dataclass(frozen=True)
class TowerData:
    """Descending subgroup chain H_0 > H_1 > ... > H_t = {1}."""

    m: int
    chain: tuple[SubgroupData, ...]

    def __post_init__(self):
        if len(self.chain) < 2:
            raise ValueError("tower needs at least one step")
        for H in self.chain:
            if H.m != self.m:
                raise ValueError("chain subgroups must share the conductor")
        for above, below in zip(self.chain, self.chain[1:]):
            if not below.is_subgroup_of(above):
                raise ValueError("chain must be descending")
            if len(below.elements) == len(above.elements):
                raise ValueError("chain must be strictly descending")
        if self.chain[-1].elements != (1,):
            raise ValueError("chain must end at the trivial subgroup (the full field)")

    @property
    def t(self) -> int:
        return len(self.chain) - 1

    def degrees(self) -> list[int]:
        """d_k = [F_k : F_{k-1}] = [H_{k-1} : H_k] for k = 1..t."""
        return [
            len(above.elements) // len(below.elements)
            for above, below in zip(self.chain, self.chain[1:])
        ]


def power_stable(
    alpha: CycElem,
    H_low: SubgroupData,
    H_high: SubgroupData,
    n_set: tuple[int, ...] = DEFAULT_POWER_SET,
) -> CycElem:
    """Return 3*alpha + 1 and check its powers still generate Fix(H_low).

    alpha must be an algebraic integer generating Fix(H_low) over
    Fix(H_high); the returned element then generates for every nonzero
    power, which is spot-checked on n_set.
    """
    if not is_algebraic_integer(alpha):
        raise NotAlgebraicInteger("power-stable construction needs an algebraic integer")
    if not generates(alpha, H_low, H_high):
        raise NotAGenerator("element does not generate Fix(H_low) over Fix(H_high)")
    beta = 3 * alpha + 1
    powers = {1: beta}
    acc = beta
    for n in range(2, max((n for n in n_set if n > 0), default=1) + 1):
        acc = acc * beta
        powers[n] = acc
    for n in n_set:
        if n == 0:
            raise ValueError("power test set must not contain 0")
        val = powers[n] if n > 0 else powers[-n].inverse()
        if not generates(val, H_low, H_high):
            raise VerificationFailed(
                "(3a+1)^%d failed to generate; contradicts power stability" % n
            )
    return beta


@dataclass(frozen=True)
class NormGenCertificate:
    tower: TowerData
    step_generators: tuple[CycElem, ...]
    beta: CycElem
    n_set: tuple[int, ...]
    norms: tuple[CycElem, ...]  # N_{F_t/F_k}(beta) for k = 1..t
    flags: tuple[tuple[bool, ...], ...]  # flags[k-1][j] for exponent n_set[j]
    telescoping_ok: bool

    @property
    def passed(self) -> bool:
        return self.telescoping_ok and all(all(row) for row in self.flags)

    def to_json(self) -> dict:
        return {
            "conductor": self.tower.m,
            "chain": [list(H.elements) for H in self.tower.chain],
            "degrees": self.tower.degrees(),
            "step_generators": [b.to_json() for b in self.step_generators],
            "beta": self.beta.to_json(),
            "tested_exponents": list(self.n_set),
            "norms": [v.to_json() for v in self.norms],
            "flags": [list(map(bool, row)) for row in self.flags],
            "telescoping_ok": self.telescoping_ok,
            "passed": self.passed,
        }


def tower_from_generator_lists(m: int, gen_lists: list[list[int]]) -> TowerData:
    chain = []
    for gens in gen_lists:
        chain.append(SubgroupData.generated_by(m, gens))
    return TowerData(m, tuple(chain))


def full_tower(m: int, intermediate: list[SubgroupData]) -> TowerData:
    """Convenience: full group, then the given subgroups, then trivial."""
    chain = [SubgroupData.full(m)] + list(intermediate)
    if chain[-1].elements != (1,):
        chain.append(SubgroupData.trivial(m))
    return TowerData(m, tuple(chain))


def build_norm_element(
    tower: TowerData,
    n_set: tuple[int, ...] = DEFAULT_POWER_SET,
) -> NormGenCertificate:
    """Assemble the universal norm element for the tower and verify it."""
    m = tower.m
    chain = tower.chain
    t = tower.t
    degrees = tower.degrees()

    step_gens = []
    for k in range(1, t + 1):
        gamma = default_subfield_generator(chain[k])
        beta_k = power_stable(gamma, chain[k], chain[k - 1], n_set)
        step_gens.append(beta_k)

    beta = step_gens[0]
    prefix = step_gens[0]  # product up to index s-1, used for telescoping
    prev_prefix = None
    for s in range(2, t + 1):
        beta_s = step_gens[s - 1]
        nrm = rel_norm_between(beta_s, chain[s], chain[s - 1])
        if nrm.is_zero():
            raise AssertionError("relative norm of a nonzero element vanished")
        prev_prefix = prefix
        factor = (beta_s ** degrees[s - 1]) / nrm
        beta = beta * factor
        prefix = beta
    if beta.is_zero():
        raise AssertionError("universal norm element vanished")

    # Telescoping identity: N_{F_t/F_{t-1}}(beta) = (prefix through t-1)^{d_t}.
    if t == 1:
        telescoping_ok = True
    else:
        lhs = rel_norm_between(beta, chain[t], chain[t - 1])
        telescoping_ok = lhs == prev_prefix ** degrees[t - 1]

    norms = []
    flags = []
    for k in range(1, t + 1):
        nu = rel_norm_between(beta, chain[t], chain[k])
        norms.append(nu)
        row = []
        for n in n_set:
            val = nu ** n
            row.append(generates(val, chain[k], chain[0]))
        flags.append(tuple(row))

    cert = NormGenCertificate(
        tower=tower,
        step_generators=tuple(step_gens),
        beta=beta,
        n_set=tuple(n_set),
        norms=tuple(norms),
        flags=tuple(flags),
        telescoping_ok=telescoping_ok,
    )
    if not cert.passed:
        raise VerificationFailed(
            "norm generator verification failed for tower %s in Q(zeta_%d); "
            "this indicates a bug" % ([H.elements for H in chain], m)
        )
    return cert


def towers_for_conductor(m: int, t_values: tuple[int, ...] = (2, 3)) -> list[TowerData]:
    """Deterministic sample towers of the requested lengths inside Q(zeta_m)."""
    subgroups = subgroup_lattice(m)
    full = SubgroupData.full(m)
    towers = []
    proper_nontrivial = [H for H in subgroups if 1 < len(H.elements) < len(full.elements)]
    if 2 in t_values:
        for H in proper_nontrivial:
            towers.append(TowerData(m, (full, H, SubgroupData.trivial(m))))
            break  # one representative is enough per conductor
    if 3 in t_values:
        for H1 in sorted(proper_nontrivial, key=lambda H: -len(H.elements)):
            inner = [
                H2
                for H2 in proper_nontrivial
                if H2.is_subgroup_of(H1) and len(H2.elements) < len(H1.elements)
            ]
            if inner:
                towers.append(
                    TowerData(m, (full, H1, inner[0], SubgroupData.trivial(m)))
                )
                break
    return towers
