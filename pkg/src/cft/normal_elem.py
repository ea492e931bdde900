"""Normal elements for Q(zeta_m)/Q via character power sums.

For a generator alpha with conjugates alpha_k = alpha^(g_k), the sums

    S(chi, e) = sum_k chi(g_k^-1) * alpha_k^e        (0 <= e <= d-1)

never vanish simultaneously along a character (Vandermonde), an element
u is normal exactly when sum_k chi(g_k^-1) u^(g_k) is nonzero for every
character, and

    beta = sum_e ( sum_i 1/M(chi_i, e) ) alpha^e

is normal when the M table comes from the coprime-denominator recursion
applied to N(chi_i, e) = |absolute norm of S(chi_i, e)| in row-major
order (exponent-major, character-minor).  Everything here is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .abelian import AbelianStructure
from .coprime import CoprimeSeq, coprime_seq
from .cyclotomic import (
    CycElem,
    SubgroupData,
    char_poly_over_q,
    conjugate,
    galois_group,
    generates,
    is_algebraic_integer,
)
from .errors import NotAGenerator, NotAlgebraicInteger, VerificationFailed


@dataclass(frozen=True)
class AbelianCharTable:
    """Full dual group of (Z/mZ)^*, values as exact roots of unity.

    values[i][k] is chi_i(g_k) in Q(zeta_d) embedded in Q(zeta_L),
    L = lcm(m, d); chi_1 (index 0) is trivial.  inverse_position[k] is
    the index of g_k^-1 in the element list.
    """

    m: int
    d: int
    value_conductor: int
    elements: tuple[int, ...]
    labels: tuple[tuple[int, ...], ...]
    values: tuple[tuple[CycElem, ...], ...]
    inverse_position: tuple[int, ...]

    def value(self, chi_index: int, g: int) -> CycElem:
        return self.values[chi_index][self.elements.index(g)]

    def conjugate_character_values(self, chi_index: int) -> tuple[CycElem, ...]:
        """Values of the complex-conjugate character, chi composed with inverse."""
        return tuple(
            self.values[chi_index][self.inverse_position[k]]
            for k in range(len(self.elements))
        )


def _root_of_unity(L: int, num: int, den: int) -> CycElem:
    if L % den:
        raise ValueError("root order does not divide the value conductor")
    return CycElem.zeta(L, (num * (L // den)) % L)


def char_table(m: int) -> AbelianCharTable:
    """Character table of (Z/mZ)^* from its invariant-factor decomposition."""
    group = galois_group(m)
    d = group.order
    L = math.lcm(m, d)
    mul = lambda a, b: (a * b) % m
    structure = AbelianStructure(list(group.elements), mul, 1)
    labels = tuple(structure.character_exponents())
    values = []
    for label in labels:
        row = []
        for g in group.elements:
            num, den = structure.character_phase(label, g)
            row.append(_root_of_unity(L, num, den))
        values.append(tuple(row))
    inverse_position = tuple(
        group.elements.index(pow(g, -1, m)) for g in group.elements
    )
    return AbelianCharTable(
        m=m,
        d=d,
        value_conductor=L,
        elements=group.elements,
        labels=labels,
        values=tuple(values),
        inverse_position=inverse_position,
    )


def _validated_generator(alpha: CycElem, m: int) -> CycElem:
    alpha = alpha.lift(m) if alpha.m != m else alpha
    if not generates(alpha, SubgroupData.trivial(m), SubgroupData.full(m)):
        raise NotAGenerator("element does not generate Q(zeta_m) over Q")
    if not is_algebraic_integer(alpha):
        raise NotAlgebraicInteger("normal-element pipeline needs an integral generator")
    return alpha


def char_sum_S(
    alpha: CycElem, table: AbelianCharTable, chi_index: int, m_exp: int,
    _conjugate_powers=None,
) -> CycElem:
    """S(chi, m_exp) = sum_k chi(g_k^-1) alpha_k^m_exp, exact in Q(zeta_L)."""
    if not 0 <= m_exp <= table.d - 1:
        raise ValueError("exponent must lie in [0, d-1]")
    m = table.m
    if _conjugate_powers is None:
        alpha = _validated_generator(alpha, m)
        conj = [conjugate(alpha, g) for g in table.elements]
        _conjugate_powers = {1: conj}
    powers = _conjugate_powers.get(m_exp)
    if powers is None:
        powers = [x ** m_exp for x in _conjugate_powers[1]]
        _conjugate_powers[m_exp] = powers
    L = table.value_conductor
    acc = CycElem.zero(L)
    for k in range(len(table.elements)):
        chi_val = table.values[chi_index][table.inverse_position[k]]
        acc = acc + chi_val * powers[k].lift(L)
    return acc


def absolute_norm(x: CycElem) -> Fraction:
    """Norm of x from Q(zeta_m) down to Q (product over the full unit group)."""
    if x.m < 3:
        return x.as_rational()
    acc = CycElem.one(x.m)
    for a in galois_group(x.m).elements:
        acc = acc * conjugate(x, a)
    return acc.as_rational()


def nonvanishing_exponents(alpha: CycElem, m: int) -> dict[int, int]:
    """Smallest exponent with S(chi, e) != 0, for every character index.

    A character with no nonvanishing sum would contradict the Vandermonde
    argument, so that case raises VerificationFailed.
    """
    table = char_table(m)
    alpha = _validated_generator(alpha, m)
    conj = [conjugate(alpha, g) for g in table.elements]
    cache = {1: conj, 0: [CycElem.one(m)] * len(conj)}
    out: dict[int, int] = {}
    for i in range(table.d):
        for e in range(table.d):
            s = char_sum_S(alpha, table, i, e, _conjugate_powers=cache)
            if not s.is_zero():
                out[i] = e
                break
        else:
            raise VerificationFailed(
                "all character power sums vanished for character %d; bug" % i
            )
    return out


def is_normal(u: CycElem, m: int, cross_check: bool = False) -> bool:
    """Character criterion for normality of u in Q(zeta_m)/Q.

    With cross_check the result is compared against the direct
    definition: the conjugates of u are linearly independent over Q,
    tested as full rank of the conjugate-coordinate matrix.
    """
    table = char_table(m)
    u = u.lift(m) if u.m != m else u
    conj = [conjugate(u, g) for g in table.elements]
    L = table.value_conductor
    lifted = [c.lift(L) for c in conj]
    verdict = True
    for i in range(table.d):
        acc = CycElem.zero(L)
        for k in range(len(table.elements)):
            acc = acc + table.values[i][table.inverse_position[k]] * lifted[k]
        if acc.is_zero():
            verdict = False
            break
    if cross_check:
        rank = _conjugate_matrix_rank(conj)
        if (rank == table.d) != verdict:
            raise VerificationFailed(
                "character criterion and rank criterion disagree; bug"
            )
    return verdict


def _conjugate_matrix_rank(conjugates: list[CycElem]) -> int:
    rows = [list(c.coeffs) for c in conjugates]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    rank = 0
    row = 0
    for col in range(n_cols):
        pivot = None
        for r in range(row, n_rows):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        rows[row], rows[pivot] = rows[pivot], rows[row]
        pv = rows[row][col]
        for r in range(row + 1, n_rows):
            if rows[r][col] != 0:
                factor = rows[r][col] / pv
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[row])]
        rank += 1
        row += 1
        if row == n_rows:
            break
    return rank


@dataclass(frozen=True)
class NormalElemCertificate:
    m: int
    d: int
    alpha: CycElem
    s_table: tuple[tuple[CycElem, ...], ...]  # [exponent][chi]
    n_table: tuple[tuple[int, ...], ...]
    m_table: tuple[tuple[int, ...], ...]
    seq: CoprimeSeq
    beta: CycElem
    nonvanishing: dict[int, int]
    normal: bool

    @property
    def passed(self) -> bool:
        return self.normal

    def to_json(self) -> dict:
        return {
            "conductor": self.m,
            "degree": self.d,
            "alpha": self.alpha.to_json(),
            "s_table": [[s.to_json() for s in row] for row in self.s_table],
            "n_table": [[str(n) for n in row] for row in self.n_table],
            "m_table": [[str(n) for n in row] for row in self.m_table],
            "beta": self.beta.to_json(),
            "first_nonvanishing_exponent": {
                str(i): e for i, e in sorted(self.nonvanishing.items())
            },
            "normal": self.normal,
            "passed": self.passed,
        }


def build_normal_element(alpha: CycElem, m: int) -> NormalElemCertificate:
    """Run the full exact pipeline and verify the resulting element is normal."""
    table = char_table(m)
    d = table.d
    alpha = _validated_generator(alpha, m)

    conj = [conjugate(alpha, g) for g in table.elements]
    # Vandermonde sanity: conjugates pairwise distinct for a generator.
    for i in range(len(conj)):
        for j in range(i + 1, len(conj)):
            if conj[i] == conj[j]:
                raise VerificationFailed("generator has repeated conjugates; bug")

    cache = {1: conj, 0: [CycElem.one(m)] * len(conj)}
    s_rows = []
    n_rows = []
    for e in range(d):
        s_row = []
        n_row = []
        for i in range(d):
            s = char_sum_S(alpha, table, i, e, _conjugate_powers=cache)
            _assert_integral_in(s)
            s_row.append(s)
            nrm = absolute_norm(s)
            if nrm.denominator != 1:
                raise NotAlgebraicInteger("norm of an integral sum must be an integer")
            n_row.append(abs(nrm.numerator))
        s_rows.append(tuple(s_row))
        n_rows.append(tuple(n_row))

    nonvanishing = {}
    for i in range(d):
        for e in range(d):
            if not s_rows[e][i].is_zero():
                nonvanishing[i] = e
                break
        else:
            raise VerificationFailed("character %d has no nonvanishing sum; bug" % i)

    flat = [n_rows[e][i] for e in range(d) for i in range(d)]
    seq = coprime_seq(flat)
    m_rows = tuple(
        tuple(seq.outputs[e * d + i] for i in range(d)) for e in range(d)
    )

    beta = CycElem.zero(m)
    alpha_power = CycElem.one(m)
    for e in range(d):
        coeff = sum(Fraction(1, m_rows[e][i]) for i in range(d))
        beta = beta + coeff * alpha_power
        if e < d - 1:
            alpha_power = alpha_power * alpha

    # Normality check on D*beta, which has integer coordinates: scaling by
    # a nonzero rational does not change normality and keeps the exact
    # arithmetic free of giant gcd reductions.
    scale = 1
    for v in seq.outputs:
        scale *= v
    normal = is_normal(beta * scale, m)

    cert = NormalElemCertificate(
        m=m,
        d=d,
        alpha=alpha,
        s_table=tuple(s_rows),
        n_table=tuple(n_rows),
        m_table=m_rows,
        seq=seq,
        beta=beta,
        nonvanishing=nonvanishing,
        normal=normal,
    )
    if not cert.passed:
        raise VerificationFailed(
            "constructed element is not normal for conductor %d; bug" % m
        )
    return cert


def _assert_integral_in(s: CycElem):
    # Power-basis coordinates of sums of root-of-unity products are
    # integral already; the characteristic polynomial confirms it.
    if not s.is_integral_vector():
        for c in char_poly_over_q(s):
            if c.denominator != 1:
                raise NotAlgebraicInteger("character power sum is not integral")
