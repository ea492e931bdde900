"""Arbitrary-precision evaluation of eta, Siegel, Weierstrass and Fricke
functions on the upper half-plane.

Everything runs through q-expansions in q = exp(2*pi*i*tau); fractional
q-powers always mean exp(2*pi*i*tau*x) with an exact rational x, so there
are no branch ambiguities.  Truncation indices are chosen so the dropped
tail is below 10^-(prec+margin) and every call carries its own decimal
precision; results are computed with guard digits and never depend on
global state left behind by other calls.

Raw lattice sums converge far too slowly for real work and are kept only
as low-precision oracles (eisenstein_lattice, wp_lattice) for testing the
q-expansion path against an independent route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import mp

from .errors import (
    DenominatorVanishes,
    IndexCollision,
    LatticePoint,
    PrecisionUnreachable,
    VerificationFailed,
)

DEFAULT_DPS = 128
GUARD_DPS = 20
ITER_BUDGET = 10 ** 6
LN10 = math.log(10)

ETA_CLASSICAL = "classical"
ETA_PAPER = "paper"


@dataclass(frozen=True)
class TauPoint:
    """A point of the upper half-plane."""

    value: object

    def __post_init__(self):
        if mp.im(mp.mpmathify(self.value)) <= 0:
            raise ValueError("tau must have positive imaginary part")


def _as_tau(tau):
    if isinstance(tau, TauPoint):
        tau = tau.value
    tau = mp.mpmathify(tau)
    if mp.im(tau) <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    return tau


def _terms_needed(tau, dps, extra=0):
    """Smallest n with |q|^n below 10^-(dps+10+extra), plus a little slack."""
    decay = 2 * math.pi * float(mp.im(tau))  # -log|q|
    n = int((dps + 10 + extra) * LN10 / decay) + 3
    if n > ITER_BUDGET:
        raise PrecisionUnreachable(
            "needs %d series terms at Im(tau)=%s; budget is %d"
            % (n, mp.nstr(mp.im(tau), 6), ITER_BUDGET)
        )
    return n


def _qpow(tau, x):
    """exp(2*pi*i*tau*x) for an exact rational exponent x."""
    x = Fraction(x)
    return mp.exp(2 * mp.pi * mp.mpc(0, 1) * tau * x.numerator / x.denominator)


def _cis(x):
    """exp(2*pi*i*x) for an exact rational x."""
    x = Fraction(x)
    return mp.exp(2 * mp.pi * mp.mpc(0, 1) * mp.mpf(x.numerator) / x.denominator)


@dataclass(frozen=True)
class FracIndex:
    """Class [a/N; b/N] with (a, b) not both 0 mod N, kept canonical."""

    a: int
    b: int
    N: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("level must be >= 2")
        object.__setattr__(self, "a", self.a % self.N)
        object.__setattr__(self, "b", self.b % self.N)
        if self.a == 0 and self.b == 0:
            raise ValueError("index must not lie in Z^2")

    @staticmethod
    def from_fractions(r, s) -> "FracIndex":
        r, s = Fraction(r), Fraction(s)
        level = math.lcm(r.denominator, s.denominator)
        if level == 1:
            raise ValueError("index must not lie in Z^2")
        if level < 2:
            level = 2
        return FracIndex(int(r * level), int(s * level), level)

    @property
    def r(self) -> Fraction:
        return Fraction(self.a, self.N)

    @property
    def s(self) -> Fraction:
        return Fraction(self.b, self.N)

    def neg(self) -> "FracIndex":
        return FracIndex(-self.a, -self.b, self.N)

    def lift(self, level: int) -> "FracIndex":
        if level % self.N:
            raise ValueError("can only lift to a multiple of the level")
        k = level // self.N
        return FracIndex(self.a * k, self.b * k, level)

    def sign_class(self) -> tuple[int, int, int]:
        """Canonical key for the pair {idx, -idx}."""
        neg = ((-self.a) % self.N, (-self.b) % self.N)
        return min((self.a, self.b), neg) + (self.N,)

    def primitive_order(self) -> int:
        """Order of the class in ((1/N)Z/Z)^2; invariant under GL2 action."""
        return self.N // math.gcd(self.a, self.b, self.N)

    def congruent_up_to_sign(self, other: "FracIndex") -> bool:
        level = math.lcm(self.N, other.N)
        return self.lift(level).sign_class() == other.lift(level).sign_class()


# ----------------------------------------------------------------------
# Dedekind eta


def eta(tau, prec: int = DEFAULT_DPS, normalization: str = ETA_CLASSICAL, _terms=None):
    """q^(1/24) * prod(1 - q^n); 'paper' adds the sqrt(2*pi)*zeta_8 prefactor."""
    if normalization not in (ETA_CLASSICAL, ETA_PAPER):
        raise ValueError("unknown eta normalization %r" % normalization)
    tau = _as_tau(tau)
    with mp.workdps(prec + GUARD_DPS):
        n_terms = _terms if _terms is not None else _terms_needed(tau, prec)
        q = _qpow(tau, 1)
        acc = mp.mpc(1)
        qk = mp.mpc(1)
        for _ in range(n_terms):
            qk *= q
            acc *= 1 - qk
        value = _qpow(tau, Fraction(1, 24)) * acc
        if normalization == ETA_PAPER:
            value *= mp.sqrt(2 * mp.pi) * mp.expjpi(mp.mpf(1) / 4)
        return +value


# ----------------------------------------------------------------------
# Siegel functions


def siegel_rs(r, s, tau, prec: int = DEFAULT_DPS, _terms=None):
    """Siegel function at the exact rational index pair (r, s).

    The q-product converges for 0 <= r < 1; other representatives are
    translated there first, picking up the root-of-unity factor
    (-1)^k * exp(-pi*i*k*s) for a shift by (k, 0).  The value is never
    zero on the upper half-plane, which gets asserted.
    """
    r, s = Fraction(r), Fraction(s)
    if r.denominator == 1 and s.denominator == 1:
        raise LatticePoint("Siegel index lies in Z^2")
    tau = _as_tau(tau)
    k = math.floor(r)
    r0 = r - k
    with mp.workdps(prec + GUARD_DPS):
        eps = mp.mpc(1)
        if k:
            # translation by (k, 0): factor (-1)^k * exp(-pi*i*k*s)
            eps = (-1) ** (k % 2) * _cis(Fraction(-k) * s / 2)
        n_terms = _terms if _terms is not None else _terms_needed(tau, prec) + 2
        q = _qpow(tau, 1)
        e_plus = _cis(s)
        e_minus = 1 / e_plus
        qr = _qpow(tau, r0)
        pref = -_qpow(tau, (r0 * r0 - r0 + Fraction(1, 6)) / 2)
        pref *= _cis(s * (r0 - 1) / 2)
        first = 1 - qr * e_plus
        prod = mp.mpc(1)
        a_term = qr * e_plus  # becomes q^(n+r0) e^(2 pi i s)
        b_term = e_minus / qr  # becomes q^(n-r0) e^(-2 pi i s)
        for _ in range(n_terms):
            a_term *= q
            b_term *= q
            prod *= (1 - a_term) * (1 - b_term)
        value = eps * pref * first * prod
        if value == 0:
            raise AssertionError("Siegel function vanished on the upper half-plane")
        return +value


def siegel_g(idx: FracIndex, tau, prec: int = DEFAULT_DPS):
    return siegel_rs(idx.r, idx.s, tau, prec)


# ----------------------------------------------------------------------
# Eisenstein data and the j-invariant


@dataclass(frozen=True)
class EisensteinValues:
    g2: object
    g3: object
    delta: object
    j: object


def _divisor_power_sums(n_max: int, power: int) -> list[int]:
    sums = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dp = d ** power
        for k in range(d, n_max + 1, d):
            sums[k] += dp
    return sums


def eisenstein(tau, prec: int = DEFAULT_DPS, _terms=None) -> EisensteinValues:
    """g2, g3, the discriminant and j at tau, via normalized q-expansions.

    g2 = (4 pi^4 / 3) E4 and g3 = (8 pi^6 / 27) E6 with the standard
    weight-4/6 Fourier series; these match the lattice sums
    60 sum 1/w^4 and 140 sum 1/w^6 (the low-precision oracle below).
    """
    tau = _as_tau(tau)
    with mp.workdps(prec + GUARD_DPS):
        # sigma_5(n) < n^6: reserve margin digits for coefficient growth.
        n_terms = _terms if _terms is not None else _terms_needed(tau, prec, extra=14)
        sig3 = _divisor_power_sums(n_terms, 3)
        sig5 = _divisor_power_sums(n_terms, 5)
        q = _qpow(tau, 1)
        e4 = mp.mpc(1)
        e6 = mp.mpc(1)
        qk = mp.mpc(1)
        for n in range(1, n_terms + 1):
            qk *= q
            e4 += 240 * sig3[n] * qk
            e6 -= 504 * sig5[n] * qk
        pi4 = mp.pi ** 4
        g2 = 4 * pi4 / 3 * e4
        g3 = 8 * pi4 * mp.pi * mp.pi / 27 * e6
        delta = g2 ** 3 - 27 * g3 ** 2
        if delta == 0:
            raise AssertionError("discriminant vanished on the upper half-plane")
        j = 1728 * g2 ** 3 / delta
        return EisensteinValues(+g2, +g3, +delta, +j)


def j_invariant(tau, prec: int = DEFAULT_DPS):
    return eisenstein(tau, prec).j


# ----------------------------------------------------------------------
# Weierstrass p-function and Fricke functions


def wp_rs(r, s, tau, prec: int = DEFAULT_DPS, _terms=None):
    """p(r*tau + s; [tau, 1]) through the exponential series.

    Equivalent to the defining lattice sum, which is kept separately as
    the slow oracle.  The argument must avoid the lattice, i.e. (r, s)
    not both integers.
    """
    r, s = Fraction(r), Fraction(s)
    if r.denominator == 1 and s.denominator == 1:
        raise LatticePoint("Weierstrass argument lies on the lattice")
    # p is lattice- and parity-invariant; reduce to 0 <= r < 1 exactly.
    r -= math.floor(r)
    s -= math.floor(s)
    tau = _as_tau(tau)
    with mp.workdps(prec + GUARD_DPS):
        n_terms = _terms if _terms is not None else _terms_needed(tau, prec) + 2
        q = _qpow(tau, 1)
        w = _qpow(tau, r) * _cis(s)
        total = mp.mpf(1) / 12 + w / (1 - w) ** 2
        qn_w = w
        qn_over_w = 1 / w
        qn = mp.mpc(1)
        for _ in range(n_terms):
            qn_w *= q
            qn_over_w *= q
            qn *= q
            total += qn_w / (1 - qn_w) ** 2
            total += qn_over_w / (1 - qn_over_w) ** 2
            total -= 2 * qn / (1 - qn) ** 2
        value = (2 * mp.pi * mp.mpc(0, 1)) ** 2 * total
        return +value


def wp_value(idx: FracIndex, tau, prec: int = DEFAULT_DPS):
    return wp_rs(idx.r, idx.s, tau, prec)


def fricke_rs(r, s, tau, prec: int = DEFAULT_DPS, eis: EisensteinValues | None = None):
    """g2*g3/(g2^3 - 27*g3^2) * p_[r;s](tau); even in the index."""
    with mp.workdps(prec + GUARD_DPS):
        if eis is None:
            eis = eisenstein(tau, prec)
        factor = eis.g2 * eis.g3 / eis.delta
        return +(factor * wp_rs(r, s, tau, prec))


def fricke_f(idx: FracIndex, tau, prec: int = DEFAULT_DPS,
             eis: EisensteinValues | None = None):
    return fricke_rs(idx.r, idx.s, tau, prec, eis=eis)


# ----------------------------------------------------------------------
# The tower ratio f_m


def fm_func(p: int, m: int, tau, prec: int = DEFAULT_DPS,
            cross_check: bool = True, eis: EisensteinValues | None = None):
    """p^(2(m+1)) * (f_[0;1/p^m] - f_[1/p;0]) / (f_[0;1/p] - f_[1/p;0]).

    For m = 1 the ratio collapses and the value is exactly p^4.  The
    result is cross-checked against the equivalent Siegel-function
    product, an independent evaluation path; disagreement means a bug.
    """
    if p < 3 or p % 2 == 0:
        raise ValueError("p must be an odd prime")
    if m < 1:
        raise ValueError("m must be >= 1")
    tau = _as_tau(tau)
    with mp.workdps(prec + GUARD_DPS):
        if m == 1:
            ratio = mp.mpc(p) ** 4
        else:
            if eis is None:
                eis = eisenstein(tau, prec)
            f_num = fricke_rs(0, Fraction(1, p ** m), tau, prec, eis=eis)
            f_mid = fricke_rs(Fraction(1, p), 0, tau, prec, eis=eis)
            f_den = fricke_rs(0, Fraction(1, p), tau, prec, eis=eis)
            denom = f_den - f_mid
            scale = max(abs(f_den), abs(f_mid), mp.mpf(1))
            if abs(denom) < scale * mp.mpf(10) ** (-(prec - 2)):
                raise DenominatorVanishes(
                    "Fricke values coincide at tau = %s" % mp.nstr(tau, 10)
                )
            ratio = mp.mpc(p) ** (2 * (m + 1)) * (f_num - f_mid) / denom
        if cross_check:
            product = _fm_siegel_product(p, m, tau, prec)
            err = abs(ratio - product)
            tol = mp.mpf(10) ** (-(prec - 12)) * max(abs(ratio), mp.mpf(1))
            if err > tol:
                raise VerificationFailed(
                    "f_m ratio and Siegel product disagree by %s" % mp.nstr(err, 5)
                )
        return +ratio


def _fm_siegel_product(p: int, m: int, tau, prec: int):
    pm = p ** m
    one_p = Fraction(1, p)
    one_pm = Fraction(1, pm)
    g = lambda r, s: siegel_rs(r, s, tau, prec)
    value = g(one_p, one_pm) * g(-one_p, one_pm) * g(0, one_p) ** 2
    value *= p / g(one_p, one_p)
    value *= p / g(-one_p, one_p)
    value *= mp.mpc(p) ** (2 * m) / g(0, one_pm) ** 2
    return value


# ----------------------------------------------------------------------
# The p-difference / Siegel-product identity


def check_ptog(idx1: FracIndex, idx2: FracIndex, tau, prec: int = DEFAULT_DPS,
               normalization: str = ETA_CLASSICAL):
    """Residual |(p_1 - p_2) + g_+ g_- eta^4 / (g_1^2 g_2^2)| at tau.

    The identity requires the two index classes to differ even up to
    sign; the eta normalization is a parameter so the test itself can
    certify which convention satisfies the identity.
    """
    if idx1.congruent_up_to_sign(idx2):
        raise IndexCollision("index classes coincide up to sign")
    tau = _as_tau(tau)
    r1, s1, r2, s2 = idx1.r, idx1.s, idx2.r, idx2.s
    with mp.workdps(prec + GUARD_DPS):
        lhs = wp_rs(r1, s1, tau, prec) - wp_rs(r2, s2, tau, prec)
        g_plus = siegel_rs(r1 + r2, s1 + s2, tau, prec)
        g_minus = siegel_rs(r1 - r2, s1 - s2, tau, prec)
        g1 = siegel_rs(r1, s1, tau, prec)
        g2 = siegel_rs(r2, s2, tau, prec)
        eta4 = eta(tau, prec, normalization) ** 4
        rhs = -(g_plus * g_minus * eta4) / (g1 ** 2 * g2 ** 2)
        return +abs(lhs - rhs)


def check_ptog_both(idx1: FracIndex, idx2: FracIndex, tau, prec: int = DEFAULT_DPS):
    """Residuals for both eta normalizations, plus which one certifies."""
    out = {}
    for norm in (ETA_CLASSICAL, ETA_PAPER):
        out[norm] = check_ptog(idx1, idx2, tau, prec, norm)
    threshold = mp.mpf(10) ** (-(prec - 12))
    certified = [n for n, v in out.items() if v < threshold]
    out["certified"] = certified[0] if len(certified) == 1 else None
    return out


# ----------------------------------------------------------------------
# Low-precision lattice-sum oracles (float64, numpy)


def eisenstein_lattice(tau, cutoff: int = 1200):
    """g2, g3 by direct truncated lattice sums 60*S4 and 140*S6."""
    tau_c = complex(mp.mpmathify(tau))
    s4 = 0.0 + 0.0j
    s6 = 0.0 + 0.0j
    b = np.arange(-cutoff, cutoff + 1, dtype=np.float64)
    for a in range(-cutoff, cutoff + 1):
        omega = a * tau_c + b
        if a == 0:
            omega = omega[b != 0]
        inv2 = 1.0 / (omega * omega)
        inv4 = inv2 * inv2
        s4 += inv4.sum()
        s6 += (inv4 * inv2).sum()
    return 60.0 * s4, 140.0 * s6


def wp_lattice(r, s, tau, cutoff: int = 2000, richardson: bool = True):
    """Direct truncated lattice sum for p(r*tau+s), paired over +-omega.

    With richardson=True the leading 1/cutoff^2 tail is removed by
    extrapolating between cutoff/2 and cutoff.
    """
    if richardson:
        half = wp_lattice(r, s, tau, cutoff // 2, richardson=False)
        fullv = wp_lattice(r, s, tau, cutoff, richardson=False)
        return (4 * fullv - half) / 3
    tau_c = complex(mp.mpmathify(tau))
    z = float(Fraction(r)) * tau_c + float(Fraction(s))
    total = 1.0 / (z * z)
    b = np.arange(-cutoff, cutoff + 1, dtype=np.float64)
    b_pos = np.arange(1, cutoff + 1, dtype=np.float64)
    # a = 0 row, pairing b with -b
    omega = b_pos.astype(np.complex128)
    total += (1.0 / (z - omega) ** 2 + 1.0 / (z + omega) ** 2 - 2.0 / omega ** 2).sum()
    # a > 0 rows paired with a < 0 rows
    for a in range(1, cutoff + 1):
        omega = a * tau_c + b
        total += (1.0 / (z - omega) ** 2 + 1.0 / (z + omega) ** 2 - 2.0 / omega ** 2).sum()
    return total
