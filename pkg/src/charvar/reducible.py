"""Non-abelian reducible representations of rational tangles and Riley
polynomials.

Upper-triangular matrices u+_{kappa^d}(a) are kept symbolically as the pair
(d, a) with ``a`` a Laurent polynomial in kappa.  The tangle is built twist
block by twist block from the seed x = d(kappa), y = u+_kappa(1); a block of
k twists on two adjacent ends (A, B) acts as conjugation by a power of AB,
followed by one extra half twist when k is odd.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .errors import DomainViolation
from .ring import Polynomial, cheb_omega, poly_exact_div, poly_sqrt
from .tangle import HORIZONTAL_HAND, VERTICAL_HAND, RationalTangle, generating_pair_sign
from .trace_engine import trace_triple

KAPPA = Polynomial.var("kappa")
U = Polynomial.var("u")
T_SUB = KAPPA + KAPPA ** -1

def kpow(d: int) -> Polynomial:
    return KAPPA ** d


@dataclass(frozen=True)
class UpperTriangular:
    """u+_{kappa^d}(a) = [[kappa^d, a], [0, kappa^-d]]."""

    d: int
    a: Polynomial

    def __mul__(self, other: "UpperTriangular") -> "UpperTriangular":
        return UpperTriangular(self.d + other.d,
                               kpow(self.d) * other.a + self.a * kpow(-other.d))

    def inv(self) -> "UpperTriangular":
        return UpperTriangular(-self.d, -self.a)

    def matrix(self):
        from .ring import Matrix2
        return Matrix2(kpow(self.d), self.a, Polynomial.const(0), kpow(-self.d))

    def evaluate(self, kappa: complex):
        from .ring import Matrix2
        return Matrix2(kappa ** self.d, self.a.evaluate({"kappa": kappa}), 0, kappa ** -self.d)


def ut(d: int, a) -> UpperTriangular:
    return UpperTriangular(d, Polynomial.coerce(a))


def ut_pow(x: UpperTriangular, k: int) -> UpperTriangular:
    """u+_mu(a)^k = u+_{mu^k}(omega_k(mu + 1/mu) a)."""
    mu_sum = kpow(x.d) + kpow(-x.d)
    return UpperTriangular(x.d * k, cheb_omega(k, mu_sum) * x.a)


def ut_conj(x: UpperTriangular, y: UpperTriangular) -> UpperTriangular:
    """x y x^{-1} = u+_nu((1/nu - nu) mu a + mu^2 b) for x = u+_mu(a), y = u+_nu(b)."""
    mu, nu = kpow(x.d), kpow(y.d)
    return UpperTriangular(y.d, (kpow(-y.d) - nu) * mu * x.a + kpow(2 * x.d) * y.a)


def half_twist(A, B, sign: int):
    """One crossing between adjacent ends; the product A*B is preserved."""
    if sign > 0:
        return B, B.inv() * A * B
    return A * B * A.inv(), A


def twist_block(A: UpperTriangular, B: UpperTriangular, k: int, hand: int):
    """|k| crossings of handedness sign(k)*hand between adjacent ends."""
    sign = hand if k > 0 else -hand
    n, odd = divmod(abs(k), 2)
    if n:
        # two half twists of sign +1 conjugate both ends by (AB)^{-1}
        P = ut_pow(A * B, -n if sign > 0 else n)
        A, B = ut_conj(P, A), ut_conj(P, B)
    if odd:
        A, B = half_twist(A, B, sign)
    return A, B


@dataclass(frozen=True)
class ThetaPair:
    theta_ne: Polynomial
    theta_sw: Polynomial

    def at(self, power: int) -> "ThetaPair":
        """Substitute kappa -> kappa^power (power = +-1)."""
        sub = {"kappa": kpow(power)}
        return ThetaPair(self.theta_ne.subs(sub), self.theta_sw.subs(sub))


def boundary_upper_triangular(cf: tuple):
    """Symbolic boundary (nw, ne, sw, se) for the seed x = d(kappa), y = u+_kappa(1)."""
    s = len(cf)
    x = ut(1, 0)
    y = ut(1, 1)
    b = y if generating_pair_sign(cf) == 1 else y.inv()
    if s % 2:
        ends = {"nw": x, "ne": x.inv(), "sw": b, "se": b.inv()}
    else:
        ends = {"nw": x, "sw": x.inv(), "ne": b, "se": b.inv()}
    horizontal = s % 2 == 1
    for k in cf:
        if horizontal:
            ends["ne"], ends["se"] = twist_block(ends["ne"], ends["se"], k, HORIZONTAL_HAND)
        else:
            ends["se"], ends["sw"] = twist_block(ends["se"], ends["sw"], k, VERTICAL_HAND)
        horizontal = not horizontal
    return ends


@lru_cache(maxsize=1024)
def _theta_for_cf(cf: tuple) -> ThetaPair:
    ends = boundary_upper_triangular(cf)
    return ThetaPair(ends["ne"].a, ends["sw"].inv().a)


def theta_pair(tangle: RationalTangle) -> ThetaPair:
    """Upper-right entries of x^ne and (x^sw)^{-1} in the reducible seed representation."""
    return _theta_for_cf(tuple(tangle.cf))


class RileyKind(str, Enum):
    ODD = "odd"
    EVEN = "even"


@dataclass(frozen=True)
class RileyPolynomial:
    body: Polynomial
    kind: RileyKind
    iota: int | None = None


def _riley_substitution(iota: int | None) -> dict:
    if iota is None:
        return {"t": T_SUB, "r": 2 - U}
    return {"t": T_SUB, "r": U + kpow(1 + iota) + kpow(-1 - iota)}


def riley_odd(tangle: RationalTangle) -> RileyPolynomial:
    """phi with z = (r - 2) phi^2 after t = kappa + 1/kappa, r = 2 - u."""
    if not tangle.is_odd:
        raise DomainViolation(f"{tangle} is even; use riley_even")
    z = trace_triple(tangle).z
    quotient = poly_exact_div(z, Polynomial.var("r") - 2)
    body = poly_sqrt(quotient.subs(_riley_substitution(None)))
    return RileyPolynomial(body, RileyKind.ODD)


def riley_even(tangle: RationalTangle, iota: int) -> RileyPolynomial:
    """phi^iota with z = (r - 2)(r + 2 - t^2) (phi^iota)^2 after
    t = kappa + 1/kappa, r = u + kappa^(1+iota) + kappa^(-1-iota)."""
    if iota not in (1, -1):
        raise DomainViolation("iota must be +1 or -1")
    if tangle.is_odd:
        raise DomainViolation(f"{tangle} is odd; use riley_odd")
    t, r = Polynomial.var("t"), Polynomial.var("r")
    z = trace_triple(tangle).z
    quotient = poly_exact_div(z, (r - 2) * (r + 2 - t * t))
    body = poly_sqrt(quotient.subs(_riley_substitution(iota)))
    return RileyPolynomial(body, RileyKind.EVEN, iota)


def riley_divisor(iota: int | None) -> Polynomial:
    """(r - 2) or (r - 2)(r + 2 - t^2) expressed in kappa, u."""
    t, r = Polynomial.var("t"), Polynomial.var("r")
    div = r - 2 if iota is None else (r - 2) * (r + 2 - t * t)
    return div.subs(_riley_substitution(iota))
