"""Trace polynomials z, zdot, zgrave in Z[t, r] of a rational tangle.

The recursion runs over the continued fraction [[k1,...,ks]]:

    psi_0(n)  = theta_n(-e0) + (2 - theta_n(-e0)) t^2 / (2 + e0)
    e_j       = psi_{j-1}(k_j)
    psi_j(n)  = e_{j-1} omega_{n+1}(-e_j) - psi_{j-1}(k_j - 1) omega_n(-e_j)
                + 2 t^2 (1 - omega_{n+1}(-e_j) + omega_n(-e_j)) / (2 + e_j)

and reads off zdot = e_{s-1} - 2, zgrave = psi_{s-1}(k_s - 1) - 2,
z = psi_{s-1}(k_s) - 2.  Every division is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .ring import Polynomial, cheb_omega, cheb_theta, poly_exact_div
from .tangle import RationalTangle, generating_pair_sign

T = Polynomial.var("t")
R = Polynomial.var("r")
TWO = Polynomial.const(2)


@dataclass(frozen=True)
class TraceTriple:
    z: Polynomial
    zdot: Polynomial
    zgrave: Polynomial

    def rename(self, r_name: str) -> "TraceTriple":
        """Same triple with r renamed (e.g. to r_i for the i-th tangle of a knot)."""
        if r_name == "r":
            return self
        sub = {"r": Polynomial.var(r_name)}
        return TraceTriple(self.z.subs(sub), self.zdot.subs(sub), self.zgrave.subs(sub))

    def as_dict(self) -> dict:
        return {"z": self.z, "zdot": self.zdot, "zgrave": self.zgrave}


def seed_e0(cf: tuple) -> Polynomial:
    """e0 = tr(x b) for the seed strand b: r when y = b, t^2 - r when y = b^-1."""
    if len(cf) < 1:
        raise ValueError("continued fraction length must be >= 1")
    return R if generating_pair_sign(cf) == 1 else T * T - R


class PsiState:
    """psi_j(n) for one level j of the recursion, memoized in n."""

    def __init__(self, j: int, e_prev: Polynomial | None, e: Polynomial,
                 psi_prev_at_kminus1: Polynomial | None):
        self.j = j
        self.e_prev = e_prev
        self.e = e
        self._carry = psi_prev_at_kminus1
        self._cache: dict = {}

    def __call__(self, n: int) -> Polynomial:
        if n not in self._cache:
            self._cache[n] = psi(self, n)
        return self._cache[n]


def psi(state: PsiState, n: int) -> Polynomial:
    t2 = T * T
    if state.j == 0:
        th = cheb_theta(n, -state.e)
        return th + poly_exact_div((TWO - th) * t2, TWO + state.e)
    x = -state.e
    w1, w0 = cheb_omega(n + 1, x), cheb_omega(n, x)
    corr = poly_exact_div(2 * t2 * (1 - w1 + w0), TWO + state.e)
    return state.e_prev * w1 - state._carry * w0 + corr


def psi_states(cf: tuple) -> list:
    """The chain of PsiStates psi_0 .. psi_{s-1} for a continued fraction."""
    states = [PsiState(0, None, seed_e0(cf), None)]
    for j in range(1, len(cf)):
        prev = states[-1]
        k = cf[j - 1]
        states.append(PsiState(j, prev.e, prev(k), prev(k - 1)))
    return states


@lru_cache(maxsize=1024)
def _triple_for_cf(cf: tuple) -> TraceTriple:
    last = psi_states(cf)[-1]
    k = cf[-1]
    return TraceTriple(z=last(k) - 2, zdot=last.e - 2, zgrave=last(k - 1) - 2)


def trace_triple(tangle: RationalTangle) -> TraceTriple:
    """z, zdot, zgrave of a rational tangle as polynomials in t and r."""
    return _triple_for_cf(tuple(tangle.cf))
