"""Exact arithmetic in cyclotomic fields Q(zeta_m).

Elements are dense vectors of rationals in the power basis
1, zeta, ..., zeta^(phi(m)-1), reduced modulo the m-th cyclotomic
polynomial.  The Galois group (Z/mZ)^* acts by zeta -> zeta^a, and
subfields are only ever represented by the subgroup fixing them, so
relative traces, norms and discriminants reduce to orbit sums and
products over cosets.

All values are immutable after construction and every operation is a
pure function.  The per-conductor polynomial caches are filled once and
read-only afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    DegenerateExtension,
    NotAGenerator,
    NotAlgebraicInteger,
    NotInField,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


def euler_phi(m: int) -> int:
    if m < 1:
        raise ValueError("conductor must be positive")
    result = m
    n, p = m, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def _poly_mul_int(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _poly_div_exact_int(num: Sequence[int], den: Sequence[int]) -> list[int]:
    # Exact division of integer polynomials; remainder must vanish.
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    quot = [0] * (len(num) - dn)
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k]
        if c == 0:
            continue
        q, r = divmod(c, lead)
        if r:
            raise ArithmeticError("non-exact polynomial division")
        quot[k - dn] = q
        for j, dj in enumerate(den):
            num[k - dn + j] -= q * dj
    if any(num[: dn]):
        raise ArithmeticError("nonzero remainder in exact division")
    return quot


_CYC_CACHE: dict[int, tuple[int, ...]] = {}
_RED_CACHE: dict[int, list[tuple[Fraction, ...]]] = {}


def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Monic integer coefficients (low to high) of the m-th cyclotomic polynomial.

    Computed once per conductor by dividing X^m - 1 by the product of the
    lower-order cyclotomic polynomials over the proper divisors of m.
    """
    cached = _CYC_CACHE.get(m)
    if cached is not None:
        return cached
    if m == 1:
        poly = (-1, 1)
    else:
        num = [0] * (m + 1)
        num[0], num[m] = -1, 1
        den = [1]
        for d in range(1, m):
            if m % d == 0:
                den = _poly_mul_int(den, cyclotomic_polynomial(d))
        poly = tuple(_poly_div_exact_int(num, den))
    _CYC_CACHE[m] = poly
    return poly


def _reduction_table(m: int) -> list[tuple[Fraction, ...]]:
    """Rows r_j giving zeta^(deg+j) as a vector in the power basis, j < 2m."""
    cached = _RED_CACHE.get(m)
    if cached is not None:
        return cached
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    base = tuple(Fraction(-c) for c in phi[:deg])
    rows = [base]
    for _ in range(2 * m):
        prev = rows[-1]
        shifted = [_ZERO] + list(prev[: deg - 1])
        top = prev[deg - 1]
        if top:
            shifted = [s + top * b for s, b in zip(shifted, base)]
        rows.append(tuple(shifted))
    _RED_CACHE[m] = rows
    return rows


def _reduce_vector(m: int, raw: Sequence[Fraction]) -> tuple[Fraction, ...]:
    deg = euler_phi(m)
    out = list(raw[:deg]) + [_ZERO] * max(0, deg - len(raw))
    if len(raw) > deg:
        rows = _reduction_table(m)
        for k in range(deg, len(raw)):
            c = raw[k]
            if c:
                row = rows[k - deg]
                for i in range(deg):
                    if row[i]:
                        out[i] += c * row[i]
    return tuple(out)


@dataclass(frozen=True)
class CycElem:
    """Element of Q(zeta_m) as power-basis coordinates of length phi(m)."""

    m: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("conductor must be >= 1")
        if len(self.coeffs) != euler_phi(self.m):
            raise ValueError("coefficient vector has wrong length")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(m: int = 1) -> "CycElem":
        return CycElem(m, tuple([_ZERO] * euler_phi(m)))

    @staticmethod
    def one(m: int = 1) -> "CycElem":
        return CycElem.from_rational(Fraction(1), m)

    @staticmethod
    def from_rational(q, m: int = 1) -> "CycElem":
        coeffs = [_ZERO] * euler_phi(m)
        coeffs[0] = Fraction(q)
        return CycElem(m, tuple(coeffs))

    @staticmethod
    def zeta(m: int, power: int = 1) -> "CycElem":
        return cyc_reduce(m, {power: _ONE})

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational: %r" % (self,))
        return self.coeffs[0]

    def is_integral_vector(self) -> bool:
        """True when every power-basis coordinate is a rational integer."""
        return all(c.denominator == 1 for c in self.coeffs)

    def lift(self, target: int) -> "CycElem":
        """Rewrite in Q(zeta_target) for a conductor multiple of m."""
        if target == self.m:
            return self
        if target % self.m:
            raise ValueError("can only lift to a multiple of the conductor")
        step = target // self.m
        raw: dict[int, Fraction] = {}
        for k, c in enumerate(self.coeffs):
            if c:
                raw[k * step] = c
        return cyc_reduce(target, raw)

    # -- arithmetic ---------------------------------------------------

    def _binop(self, other) -> tuple["CycElem", "CycElem"]:
        if isinstance(other, (int, Fraction)):
            other = CycElem.from_rational(Fraction(other), 1)
        if not isinstance(other, CycElem):
            return NotImplemented, NotImplemented
        m = math.lcm(self.m, other.m)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        a, b = self._binop(other)
        if a is NotImplemented:
            return NotImplemented
        return CycElem(a.m, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycElem(self.m, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        a, b = self._binop(other)
        if a is NotImplemented:
            return NotImplemented
        return CycElem(a.m, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return CycElem(self.m, tuple(c * q for c in self.coeffs))
        a, b = self._binop(other)
        if a is NotImplemented:
            return NotImplemented
        conv = [_ZERO] * (2 * len(a.coeffs) - 1)
        for i, ai in enumerate(a.coeffs):
            if ai:
                for j, bj in enumerate(b.coeffs):
                    if bj:
                        conv[i + j] += ai * bj
        return CycElem(a.m, _reduce_vector(a.m, conv))

    __rmul__ = __mul__

    def inverse(self) -> "CycElem":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(zeta_m)")
        if self.is_rational():
            return CycElem.from_rational(1 / self.coeffs[0], self.m)
        phi = [Fraction(c) for c in cyclotomic_polynomial(self.m)]
        g, u = _poly_half_xgcd(list(self.coeffs), phi)
        # g is a nonzero constant because the modulus is irreducible.
        scale = 1 / g[0]
        inv = [c * scale for c in u]
        return CycElem(self.m, _reduce_vector(self.m, inv))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0:
                raise ZeroDivisionError("division by zero in Q(zeta_m)")
            return self * (1 / q)
        a, b = self._binop(other)
        if a is NotImplemented:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int) -> "CycElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = CycElem.one(self.m)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycElem.from_rational(Fraction(other), 1)
        if not isinstance(other, CycElem):
            return NotImplemented
        a, b = self._binop(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # cross-conductor equality is not hash-compatible

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                terms.append("%s*z%d^%d" % (c, self.m, k))
        return "CycElem(%s)" % (" + ".join(terms) or "0")

    def to_json(self) -> dict:
        return {"m": self.m, "coeffs": [str(c) for c in self.coeffs]}


def _poly_half_xgcd(f: list[Fraction], g: list[Fraction]):
    """Return (gcd, u) with u*f = gcd mod g, over Q[x]."""

    def strip(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    r0, r1 = strip(list(g)), strip(list(f))
    s0, s1 = [_ZERO], [_ONE]
    while r1:
        # divmod r0 by r1
        rem = list(r0)
        q = [_ZERO] * max(1, len(rem) - len(r1) + 1)
        inv_lead = 1 / r1[-1]
        for k in range(len(rem) - 1, len(r1) - 2, -1):
            c = rem[k]
            if c == 0:
                continue
            factor = c * inv_lead
            q[k - (len(r1) - 1)] = factor
            for j, dj in enumerate(r1):
                rem[k - (len(r1) - 1) + j] -= factor * dj
        rem = strip(rem)
        # s_next = s0 - q*s1
        qs1 = [_ZERO] * (len(q) + len(s1) - 1)
        for i, qi in enumerate(q):
            if qi:
                for j, sj in enumerate(s1):
                    qs1[i + j] += qi * sj
        s_next = [
            (s0[i] if i < len(s0) else _ZERO) - (qs1[i] if i < len(qs1) else _ZERO)
            for i in range(max(len(s0), len(qs1), 1))
        ]
        r0, r1 = r1, rem
        s0, s1 = s1, strip(s_next) or [_ZERO]
    return r0, s0


def cyc_reduce(m: int, raw: Mapping[int, object]) -> CycElem:
    """Canonical power-basis element from a sparse exponent -> rational map.

    Exponents may be arbitrary integers; they are reduced mod m and the
    result is reduced modulo the m-th cyclotomic polynomial.  Reduction of
    an already-canonical form is the identity.
    """
    if m < 1:
        raise ValueError("conductor must be >= 1")
    dense = [_ZERO] * m
    for k, c in raw.items():
        q = Fraction(c)
        if q:
            dense[k % m] += q
    return CycElem(m, _reduce_vector(m, dense))


def cyc_arith(x: CycElem, y: CycElem, op: str) -> CycElem:
    """Spec-surface dispatcher over {add, sub, mul, div}."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError("unknown operation %r" % op)


@dataclass(frozen=True)
class GaloisAut:
    """Automorphism zeta_m -> zeta_m^a of Q(zeta_m), gcd(a, m) = 1."""

    m: int
    a: int

    def __post_init__(self):
        if math.gcd(self.a, self.m) != 1:
            raise ValueError("exponent %d is not a unit mod %d" % (self.a, self.m))
        object.__setattr__(self, "a", self.a % self.m)


def apply_aut(sigma: GaloisAut, x: CycElem) -> CycElem:
    """Image of x under zeta -> zeta^a, re-reduced to the power basis.

    Mixed conductors are lifted to the lcm first; the exponent lifts
    along with them (it acts the same way on every root of unity whose
    order divides the lcm only when a is interpreted mod the lcm, so the
    caller's exponent is taken mod the target conductor).
    """
    m = math.lcm(sigma.m, x.m)
    if m != sigma.m:
        if math.gcd(sigma.a, m) != 1:
            raise ValueError("automorphism exponent does not lift to conductor %d" % m)
        sigma = GaloisAut(m, sigma.a)
    x = x.lift(m)
    raw: dict[int, Fraction] = {}
    for k, c in enumerate(x.coeffs):
        if c:
            e = (k * sigma.a) % m
            raw[e] = raw.get(e, _ZERO) + c
    return cyc_reduce(m, raw)


def conjugate(x: CycElem, a: int) -> CycElem:
    return apply_aut(GaloisAut(x.m, a), x)


@dataclass(frozen=True)
class SubgroupData:
    """Subgroup of (Z/mZ)^*, stored as the sorted tuple of its elements."""

    m: int
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(sorted(e % self.m for e in self.elements))
        object.__setattr__(self, "elements", elems)
        eset = set(elems)
        if len(eset) != len(elems):
            raise ValueError("repeated elements in subgroup")
        if 1 not in eset:
            raise ValueError("subgroup must contain 1")
        for a in elems:
            if math.gcd(a, self.m) != 1:
                raise ValueError("%d is not a unit mod %d" % (a, self.m))
            for b in elems:
                if (a * b) % self.m not in eset:
                    raise ValueError("element set not closed under multiplication")
        if euler_phi(self.m) % len(elems):
            raise ValueError("subgroup order does not divide the group order")

    @staticmethod
    def trivial(m: int) -> "SubgroupData":
        return SubgroupData(m, (1,))

    @staticmethod
    def full(m: int) -> "SubgroupData":
        return SubgroupData(m, tuple(a for a in range(1, m + 1) if math.gcd(a, m) == 1))

    @staticmethod
    def generated_by(m: int, gens: Iterable[int]) -> "SubgroupData":
        if m < 2:
            raise ValueError("conductor must be >= 2")
        elems = {1}
        for g in gens:
            g %= m
            if math.gcd(g, m) != 1:
                raise ValueError("generator %d is not a unit mod %d" % (g, m))
            new = {(g * e) % m for e in elems} - elems
            while new:
                elems |= new
                new = {(a * b) % m for a in elems for b in elems} - elems
        return SubgroupData(m, tuple(sorted(elems)))

    def __len__(self):
        return len(self.elements)

    def __contains__(self, a: int) -> bool:
        return a % self.m in set(self.elements)

    def is_subgroup_of(self, other: "SubgroupData") -> bool:
        return self.m == other.m and set(self.elements) <= set(other.elements)


@dataclass(frozen=True)
class AbelianGroupData:
    """(Z/mZ)^* with the identity listed first."""

    m: int
    elements: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def as_subgroup(self) -> SubgroupData:
        return SubgroupData(self.m, self.elements)

    def subgroups(self) -> "list[SubgroupData]":
        return subgroup_lattice(self.m)

    def characters(self):
        from .normal_elem import char_table

        return char_table(self.m)


def galois_group(m: int) -> AbelianGroupData:
    """The Galois group of Q(zeta_m)/Q as the unit group mod m.

    Conductors below 3 give the trivial group and are rejected.
    """
    if m < 3:
        raise DegenerateExtension("conductor %d gives a trivial extension" % m)
    units = [a for a in range(1, m) if math.gcd(a, m) == 1]
    return AbelianGroupData(m, tuple(units))


def subgroup_lattice(m: int) -> list[SubgroupData]:
    """All proper subgroups of (Z/mZ)^*, each one an intermediate field.

    Enumerated exhaustively (cyclic subgroups closed under pairwise join)
    and returned sorted by size then element list, so downstream
    constructions are reproducible.
    """
    group = galois_group(m)
    full = frozenset(group.elements)
    found: set[frozenset] = set()
    cyclic = []
    for g in group.elements:
        elems = {1}
        x = g
        while x != 1:
            elems.add(x)
            x = (x * g) % m
        fs = frozenset(elems)
        if fs not in found:
            found.add(fs)
            cyclic.append(fs)
    frontier = list(found)
    while frontier:
        new = []
        for h in frontier:
            for c in cyclic:
                join = _closure(m, h | c)
                if join not in found:
                    found.add(join)
                    new.append(join)
        frontier = new
    proper = [fs for fs in found if fs != full]
    subgroups = [SubgroupData(m, tuple(sorted(fs))) for fs in proper]
    subgroups.sort(key=lambda H: (len(H.elements), H.elements))
    return subgroups


def _closure(m: int, seed: frozenset) -> frozenset:
    elems = set(seed)
    frontier = list(elems)
    while frontier:
        a = frontier.pop()
        for b in list(elems):
            p = (a * b) % m
            if p not in elems:
                elems.add(p)
                frontier.append(p)
    return frozenset(elems)


def coset_representatives(sub: SubgroupData, sup: SubgroupData) -> list[int]:
    """Deterministic representatives of sup/sub (smallest member first)."""
    if not sub.is_subgroup_of(sup):
        raise ValueError("first argument must be a subgroup of the second")
    m = sub.m
    seen: set[int] = set()
    reps = []
    for a in sup.elements:
        if a in seen:
            continue
        reps.append(a)
        seen.update((a * h) % m for h in sub.elements)
    return reps


def _match_conductor(x: CycElem, H: SubgroupData) -> CycElem:
    if x.m == H.m:
        return x
    if H.m % x.m:
        raise ValueError("element conductor %d does not divide %d" % (x.m, H.m))
    return x.lift(H.m)


def rel_trace(x: CycElem, H: SubgroupData) -> CycElem:
    """Sum of x over the automorphisms indexed by H; fixed by each of them."""
    x = _match_conductor(x, H)
    acc = CycElem.zero(x.m)
    for a in H.elements:
        acc = acc + conjugate(x, a)
    _assert_fixed(acc, H)
    return acc


def rel_norm(x: CycElem, H: SubgroupData) -> CycElem:
    """Product of x over the automorphisms indexed by H."""
    x = _match_conductor(x, H)
    acc = CycElem.one(x.m)
    for a in H.elements:
        acc = acc * conjugate(x, a)
    _assert_fixed(acc, H)
    return acc


def rel_trace_between(x: CycElem, H_sub: SubgroupData, H_sup: SubgroupData) -> CycElem:
    """Trace from Fix(H_sub) down to Fix(H_sup); x must be fixed by H_sub."""
    _require_fixed(x, H_sub)
    acc = CycElem.zero(x.m)
    for a in coset_representatives(H_sub, H_sup):
        acc = acc + conjugate(x, a)
    return acc


def rel_norm_between(x: CycElem, H_sub: SubgroupData, H_sup: SubgroupData) -> CycElem:
    """Norm from Fix(H_sub) down to Fix(H_sup); x must be fixed by H_sub."""
    _require_fixed(x, H_sub)
    acc = CycElem.one(x.m)
    for a in coset_representatives(H_sub, H_sup):
        acc = acc * conjugate(x, a)
    return acc


def _assert_fixed(x: CycElem, H: SubgroupData):
    for a in H.elements:
        if conjugate(x, a) != x:
            raise AssertionError("orbit sum/product not fixed by its own subgroup")


def _require_fixed(x: CycElem, H: SubgroupData):
    for a in H.elements:
        if conjugate(x, a) != x:
            raise NotInField("element is not fixed by the subgroup")


def generates(x: CycElem, H_low: SubgroupData, H_high: SubgroupData) -> bool:
    """Does x generate Fix(H_low) over Fix(H_high)?

    True exactly when the stabilizer of x inside H_high/H_low is trivial:
    x^sigma_a = x with a in H_high forces a in H_low.
    """
    if not H_low.is_subgroup_of(H_high):
        raise ValueError("H_low must be contained in H_high")
    x = _match_conductor(x, H_low)
    _require_fixed(x, H_low)
    low = set(H_low.elements)
    for a in H_high.elements:
        if a in low:
            continue
        if conjugate(x, a) == x:
            return False
    return True


def rel_discriminant(x: CycElem, H_low: SubgroupData, H_high: SubgroupData) -> Fraction:
    """|absolute norm| of disc(x, Fix(H_low)/Fix(H_high)), a nonnegative rational.

    The discriminant is the squared Vandermonde product over the coset
    conjugates; the result is pushed down to Q through the remaining
    cosets and must come out rational.
    """
    if not generates(x, H_low, H_high):
        raise NotAGenerator("element does not generate its field; discriminant undefined")
    x = x.lift(H_low.m) if x.m != H_low.m else x
    reps = coset_representatives(H_low, H_high)
    conj = [conjugate(x, a) for a in reps]
    disc = CycElem.one(x.m)
    for i in range(len(conj)):
        for j in range(i + 1, len(conj)):
            d = conj[i] - conj[j]
            disc = disc * d * d
    full = SubgroupData.full(x.m)
    norm = CycElem.one(x.m)
    for a in coset_representatives(H_high, full):
        norm = norm * conjugate(disc, a)
    value = norm.as_rational()
    return abs(value)


def char_poly_over_q(x: CycElem) -> list[Fraction]:
    """Monic characteristic polynomial of x over Q (low to high coefficients).

    Product of (T - x^sigma) over the whole Galois group; the coefficients
    must come out rational.
    """
    group = galois_group(x.m) if x.m >= 3 else None
    if group is None:
        # Q(zeta_1) = Q(zeta_2) = Q
        return [-x.as_rational(), _ONE]
    poly: list[CycElem] = [CycElem.one(x.m)]
    for a in group.elements:
        root = conjugate(x, a)
        new = [CycElem.zero(x.m) for _ in range(len(poly) + 1)]
        for i, c in enumerate(poly):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] - c * root
        poly = new
    out = []
    for c in poly:
        out.append(c.as_rational())
    return out


def is_algebraic_integer(x: CycElem) -> bool:
    """Characteristic-polynomial test: all coefficients rational integers."""
    return all(c.denominator == 1 for c in char_poly_over_q(x))


def require_algebraic_integer(x: CycElem):
    if not is_algebraic_integer(x):
        raise NotAlgebraicInteger("characteristic polynomial is not integral: %r" % (x,))
