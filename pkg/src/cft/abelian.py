"""Structure of finite abelian groups given by explicit multiplication.

Used twice: for (Z/mZ)^* acting on cyclotomic fields, and for the
matrix groups acting on CM values.  The decomposition peels off a
cyclic factor of maximal order at each step, so the resulting orders
form the invariant-factor chain n_1, n_2, ... with n_{i+1} | n_i.
"""

from __future__ import annotations

from math import gcd
from typing import Callable, Hashable, Sequence


def _element_order(g, mul, identity):
    order = 1
    x = g
    while x != identity:
        x = mul(x, g)
        order += 1
    return order


def abelian_basis(
    elements: Sequence[Hashable],
    mul: Callable,
    identity: Hashable,
) -> list[tuple[Hashable, int]]:
    """Generators (g_1, n_1), ..., (g_r, n_r) with G = prod <g_i>, n_{i+1} | n_i.

    Elements must be hashable and the group abelian; sizes here are tiny
    (a few hundred at most) so the coset bookkeeping is done naively.
    """
    if len(elements) == 1:
        return []
    orders = {g: _element_order(g, mul, identity) for g in elements}
    exponent = max(orders.values())
    gen = min(g for g, o in orders.items() if o == exponent)

    powers = [identity]
    x = gen
    while x != identity:
        powers.append(x)
        x = mul(x, gen)
    power_index = {p: i for i, p in enumerate(powers)}

    if len(powers) == len(elements):
        return [(gen, exponent)]

    # Quotient G/<gen>: pick the smallest member of each coset as its label.
    coset_of = {}
    labels = []
    for g in sorted(elements):
        if g in coset_of:
            continue
        coset = sorted(mul(g, p) for p in powers)
        label = coset[0]
        labels.append(label)
        for c in coset:
            coset_of[c] = label

    def qmul(a, b):
        return coset_of[mul(a, b)]

    sub_basis = abelian_basis(labels, qmul, coset_of[identity])

    # Lift each quotient generator: adjust by a power of gen so that its
    # order in G equals its order in the quotient.
    basis = [(gen, exponent)]
    for qgen, qorder in sub_basis:
        lift = qgen
        h = lift
        for _ in range(qorder - 1):
            h = mul(h, lift)
        # h = lift^qorder lies in <gen>; maximality of gen makes qorder | k.
        k = power_index[h]
        if k:
            if k % qorder:
                raise AssertionError("abelian basis lift failed; group not abelian?")
            step = k // qorder
            lift = mul(lift, powers[(-step) % exponent])
        basis.append((lift, qorder))
    return basis


def discrete_logs(
    elements: Sequence[Hashable],
    mul: Callable,
    identity: Hashable,
    basis: list[tuple[Hashable, int]],
) -> dict:
    """Map each group element to its exponent tuple over the basis."""
    logs = {identity: tuple(0 for _ in basis)}
    if not basis:
        return logs
    # enumerate all products of basis powers
    stack = [(identity, ())]
    for gen, order in basis:
        new_stack = []
        for elem, exps in stack:
            x = elem
            for e in range(order):
                new_stack.append((x, exps + (e,)))
                x = mul(x, gen)
        stack = new_stack
    table = {}
    for elem, exps in stack:
        table.setdefault(elem, exps)
    if len(table) != len(elements):
        raise AssertionError("basis does not span the group")
    return table


class AbelianStructure:
    """Basis, discrete logs and character recipe for one abelian group."""

    def __init__(self, elements, mul, identity):
        self.elements = list(elements)
        self.identity = identity
        self.mul = mul
        self.basis = abelian_basis(self.elements, mul, identity)
        self.orders = [o for _, o in self.basis]
        self.logs = discrete_logs(self.elements, mul, identity, self.basis)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def exponent(self) -> int:
        return self.orders[0] if self.orders else 1

    def character_exponents(self) -> list[tuple[int, ...]]:
        """All character labels, trivial first, in lexicographic order."""
        labels = [()]
        for n in self.orders:
            labels = [lab + (k,) for lab in labels for k in range(n)]
        labels.sort()
        return labels

    def character_phase(self, label: tuple[int, ...], element) -> tuple[int, int]:
        """chi(element) as a root of unity exp(2*pi*i * num/den)."""
        exps = self.logs[element]
        num = 0
        den = 1
        for k, e, n in zip(label, exps, self.orders):
            # contribute k*e/n
            num = num * n + k * e * den
            den = den * n
        num %= den
        g = gcd(num, den) or 1
        return num // g, den // g

    def inverse(self, element):
        order = _element_order(element, self.mul, self.identity)
        x = self.identity
        for _ in range(order - 1):
            x = self.mul(x, element)
        return x
