"""Universal trace generators over cyclotomic fields.

For U = Q(zeta_m) over Q with intermediate fields F_1..F_l (one per
proper subgroup of the Galois group, and F = U itself included), pick an
algebraic-integer generator alpha_i for each F_i, form the budget

    N = [U:Q] * prod |disc(alpha_i, F_i/Q)|,

build pairwise-coprime denominators M_i from it (the radical of N is an
allowed replacement and is the default, since the raw budget makes the
M_i astronomically large), and set alpha = sum alpha_i / M_i.  The
certificate then checks, field by field, that the relative trace of
alpha generates F_i over Q.  A failure here cannot be a property of the
construction; it is surfaced loudly as VerificationFailed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sympy import factorint

from .coprime import coprime_seq
from .cyclotomic import (
    CycElem,
    SubgroupData,
    coset_representatives,
    euler_phi,
    galois_group,
    generates,
    is_algebraic_integer,
    rel_discriminant,
    rel_trace,
    subgroup_lattice,
)
from .errors import GeneratorSearchExhausted, NotAGenerator, VerificationFailed

GENERATOR_RETRY_BUDGET = 64


def default_subfield_generator(H: SubgroupData) -> CycElem:
    """An algebraic-integer generator of the field fixed by H, over Q.

    The first candidate is the orbit sum of zeta_m over H (a Gaussian
    period).  Periods can fail for composite conductors (they may even
    vanish), so the fallbacks walk orbit sums of zeta^t over coset
    representatives t, then orbit sums of (zeta^a + c)^e for small c, e.
    Every candidate is validated with the stabilizer test before it is
    accepted; integrality is automatic because all candidates have
    integer power-basis coordinates.
    """
    m = H.m
    full = SubgroupData.full(m)
    if len(H.elements) == len(full.elements):
        raise ValueError("subgroup is the whole group; the fixed field is Q")
    low = H

    def orbit_sum(power_map):
        acc = CycElem.zero(m)
        for a in H.elements:
            acc = acc + power_map(a)
        return acc

    candidates = []
    candidates.append(lambda: orbit_sum(lambda a: CycElem.zeta(m, a)))
    for t in coset_representatives(H, full):
        if t == 1:
            continue
        candidates.append(lambda t=t: orbit_sum(lambda a: CycElem.zeta(m, (a * t) % m)))
    for e in (2, 3, 4):
        for c in (1, 2, 3):
            candidates.append(
                lambda e=e, c=c: orbit_sum(lambda a: (CycElem.zeta(m, a) + c) ** e)
            )

    tried = 0
    for make in candidates:
        if tried >= GENERATOR_RETRY_BUDGET:
            break
        tried += 1
        cand = make()
        if cand.is_zero():
            continue
        if not generates(cand, low, full):
            continue
        if not is_algebraic_integer(cand):
            continue
        return cand
    raise GeneratorSearchExhausted(
        "no generator found for the field fixed by H = %s mod %d within %d tries"
        % (H.elements, m, tried)
    )


def radical(n: int) -> int:
    """Product of the distinct prime factors of n."""
    if n < 1:
        raise ValueError("radical needs a positive integer")
    out = 1
    for p in factorint(n):
        out *= int(p)
    return out


def trace_budget(m: int, generators: list[CycElem]) -> tuple[int, int]:
    """Exact budget N = [U:Q] * prod |disc(alpha_i)|, plus its radical.

    The generators list must be aligned with subgroup_lattice(m); each is
    validated as an algebraic-integer generator of its field.
    """
    subgroups = subgroup_lattice(m)
    if len(generators) != len(subgroups):
        raise ValueError(
            "expected %d generators (one per intermediate field), got %d"
            % (len(subgroups), len(generators))
        )
    full = SubgroupData.full(m)
    n_val = euler_phi(m)
    for alpha_i, H in zip(generators, subgroups):
        if not is_algebraic_integer(alpha_i):
            raise NotAGenerator("generator for H=%s is not an algebraic integer" % (H.elements,))
        disc = rel_discriminant(alpha_i, H, full)  # raises NotAGenerator if needed
        num = disc.numerator
        if disc.denominator != 1:
            raise NotAGenerator("discriminant of an algebraic integer must be integral")
        n_val *= num
    return n_val, radical(n_val)


@dataclass(frozen=True)
class TraceGenCertificate:
    conductor: int
    subgroups: tuple[SubgroupData, ...]
    generators: tuple[CycElem, ...]
    budget_n: int
    budget_used: int
    use_radical: bool
    denominators: tuple[int, ...]
    alpha: CycElem
    traces: tuple[CycElem, ...]
    flags: tuple[bool, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(self.flags)

    def to_json(self) -> dict:
        return {
            "conductor": self.conductor,
            "fields": [
                {
                    "fixing_subgroup": list(H.elements),
                    "generator": g.to_json(),
                    "denominator": str(M),
                    "trace": t.to_json(),
                    "generates": bool(flag),
                }
                for H, g, M, t, flag in zip(
                    self.subgroups, self.generators, self.denominators,
                    self.traces, self.flags,
                )
            ],
            "budget": str(self.budget_n),
            "budget_used": str(self.budget_used),
            "use_radical": self.use_radical,
            "alpha": self.alpha.to_json(),
            "passed": self.passed,
        }


def build_trace_generator(
    m: int,
    use_radical: bool = True,
    budget_override: int | None = None,
) -> TraceGenCertificate:
    """Construct and verify the universal trace generator for Q(zeta_m)/Q.

    budget_override replaces the budget with any positive multiple of
    radical(N); the verification outcome must not depend on the choice.
    """
    galois_group(m)  # rejects degenerate conductors
    subgroups = subgroup_lattice(m)
    generators = [default_subfield_generator(H) for H in subgroups]
    n_val, rad = trace_budget(m, generators)
    if budget_override is not None:
        if budget_override <= 0 or budget_override % rad:
            raise ValueError("budget override must be a positive multiple of radical(N)")
        used = budget_override
    else:
        used = rad if use_radical else n_val
    seq = coprime_seq([used] * len(subgroups))
    denominators = seq.outputs

    alpha = CycElem.zero(m)
    for g, M in zip(generators, denominators):
        alpha = alpha + g / M

    full = SubgroupData.full(m)
    traces = []
    flags = []
    for H in subgroups:
        tr = rel_trace(alpha, H)
        traces.append(tr)
        flags.append(generates(tr, H, full))
    cert = TraceGenCertificate(
        conductor=m,
        subgroups=tuple(subgroups),
        generators=tuple(generators),
        budget_n=n_val,
        budget_used=used,
        use_radical=use_radical and budget_override is None,
        denominators=denominators,
        alpha=alpha,
        traces=tuple(traces),
        flags=tuple(flags),
    )
    if not cert.passed:
        bad = [H.elements for H, ok in zip(subgroups, flags) if not ok]
        raise VerificationFailed(
            "trace generator failed for conductor %d at subgroups %s; "
            "this contradicts the construction and indicates a bug" % (m, bad)
        )
    return cert
