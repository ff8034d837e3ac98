"""Polynomial systems for the components X1, X2 and X' of a Montesinos knot's
irreducible character variety, and the genericity test for X'.

Every equation is stored together with a short provenance note.  Systems are
plain data and serialize to JSON deterministically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InvalidSignVector
from .reducible import KAPPA, T_SUB, kpow, theta_pair
from .ring import Polynomial, poly_exact_div
from .tangle import KnotClass, MontesinosKnot
from .trace_engine import TraceTriple, trace_triple

T = Polynomial.var("t")
LAM = Polynomial.var("lam")
TAU = LAM + LAM ** -1


@dataclass(frozen=True)
class Equation:
    poly: Polynomial
    note: str

    def to_json(self) -> dict:
        return {"note": self.note, "poly": self.poly.to_json(), "text": str(self.poly)}


@dataclass
class VarietySystem:
    """Equations (= 0) and inequations (!= 0) in declared variables."""

    component: str
    knot: str
    variables: tuple
    laurent: tuple = ()
    equations: list = field(default_factory=list)
    inequations: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, poly: Polynomial, note: str):
        self.equations.append(Equation(poly, note))

    def require_nonzero(self, poly: Polynomial, note: str):
        self.inequations.append(Equation(poly, note))

    @property
    def polys(self) -> list:
        return [e.poly for e in self.equations]

    def check_declared(self):
        declared = set(self.variables)
        for eq in self.equations + self.inequations:
            missing = set(eq.poly.variables()) - declared
            if missing:
                raise ValueError(f"undeclared variables {sorted(missing)} in {eq.note!r}")

    def to_json(self) -> dict:
        return {
            "component": self.component,
            "knot": self.knot,
            "variables": [{"name": v, "laurent": v in self.laurent} for v in self.variables],
            "equations": [e.to_json() for e in self.equations],
            "inequations": [e.to_json() for e in self.inequations],
            "metadata": self.metadata,
        }


def r_name(i: int) -> str:
    return f"r{i}"


def xi_name(i: int) -> str:
    return f"xi{i}"


def tb_name(*idx: int) -> str:
    return "tb_" + "_".join(str(i) for i in idx)


def knot_triples(knot: MontesinosKnot) -> list:
    """TraceTriple of each tangle, with r renamed to r_i (1-based)."""
    return [trace_triple(knot.tangle(i)).rename(r_name(i)) for i in range(1, knot.m + 1)]


# ---- X1: g = e ------------------------------------------------------------

def _tb_pair(i: int, j: int) -> Polynomial:
    """2 * tb_{i,j}; on the diagonal 2 * tr(xbar_i^2) = t^2 - 4."""
    if i == j:
        return T * T - 4
    return 2 * Polynomial.var(tb_name(min(i, j), max(i, j)))


def _det3(g) -> Polynomial:
    return (g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
            - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]))


def type_one_relation(I: Sequence[int], J: Sequence[int]) -> Polynomial:
    """8 * (2 tb_I tb_J + det(tb_{i_a, j_b})), integral after scaling."""
    g = [[_tb_pair(a, b) for b in J] for a in I]
    tI, tJ = Polynomial.var(tb_name(*I)), Polynomial.var(tb_name(*J))
    return 16 * tI * tJ + _det3(g)


def type_two_relation(i: int, J: Sequence[int]) -> Polynomial:
    """2 * (alternating sum tb_{i,j_a} tb_{J - j_a})."""
    out = Polynomial.const(0)
    for a, j in enumerate(J):
        rest = [x for x in J if x != j]
        out = out + (-1) ** a * _tb_pair(i, j) * Polynomial.var(tb_name(*rest))
    return out


def build_x1(knot: MontesinosKnot) -> VarietySystem:
    m = knot.m
    triples = knot_triples(knot)
    pairs = list(itertools.combinations(range(1, m + 1), 2))
    threes = list(itertools.combinations(range(1, m + 1), 3))
    fours = list(itertools.combinations(range(1, m + 1), 4))
    variables = (("t",) + tuple(r_name(i) for i in range(1, m + 1))
                 + tuple(tb_name(*p) for p in pairs) + tuple(tb_name(*p) for p in threes))
    sys = VarietySystem("X1", str(knot), variables)
    for i, tr in enumerate(triples, 1):
        sys.add(tr.z, f"z_{i}(t, r_{i}) = 0 [R_t]")
    for i, tr in enumerate(triples, 1):
        j = i % m + 1
        sys.add(T * T - _tb_pair(i, j) - 2 * tr.zdot - 4,
                f"t^2/2 - tb_{{{min(i, j)},{max(i, j)}}} = zdot_{i} + 2, scaled by 2 [X1 linkage]")
    for I, J in itertools.combinations_with_replacement(threes, 2):
        sys.add(type_one_relation(I, J), f"typeI relation for {I}, {J}, scaled by 8")
    for i in range(1, m + 1):
        for J in fours:
            sys.add(type_two_relation(i, J), f"typeII relation for i={i}, {J}, scaled by 2")
    branches = [{"kind": "tangle_irreducible", "index": i,
                 "condition": f"r{i} not in {{2, t^2 - 2}}"} for i in range(1, m + 1)]
    for i in range(1, m + 1):
        j = i % m + 1
        for k in range(1, m + 1):
            if k in (i, j):
                continue
            idx = tuple(sorted((i, j, k)))
            branches.append({"kind": "triple_nonzero", "requires_all_tangles_reducible": True,
                             "condition": f"{tb_name(*idx)} != 0"})
    sys.metadata = {
        "irreducibility": {"any_of": branches},
        "counts": {"tangle": m, "linkage": m, "typeI": len(threes) * (len(threes) + 1) // 2,
                   "typeII": m * len(fours)},
        "odd_knot_irreducible_automatically": knot.parity_class is KnotClass.ODD,
    }
    sys.check_declared()
    return sys


# ---- X2: tau not in {2, t^2 - 2} ------------------------------------------

def h_factor(tr: TraceTriple) -> Polynomial:
    """(1 + 1/lam) zdot + (1 + lam) zgrave + 2 (tau + 2 - t^2)."""
    return (1 + LAM ** -1) * tr.zdot + (1 + LAM) * tr.zgrave + 2 * (TAU + 2 - T * T)


def h_polynomial(triples: Sequence[TraceTriple]) -> Polynomial:
    """H = (prod h_i - (1 - lam)^m (tau + 2 - t^2)^m) / (lam + 1), exact."""
    m = len(triples)
    prod = Polynomial.const(1)
    for tr in triples:
        prod = prod * h_factor(tr)
    rhs = ((1 - LAM) * (TAU + 2 - T * T)) ** m
    return poly_exact_div(prod - rhs, LAM + 1)


def h_constant_term(triples: Sequence[TraceTriple]) -> Polynomial:
    """(-1)^m (m t^2 + sum(zdot_i - zgrave_i)) (2 t^2)^(m-1)."""
    m = len(triples)
    s = Polynomial.const(0)
    for tr in triples:
        s = s + tr.zdot - tr.zgrave
    return (-1) ** m * (m * T * T + s) * (2 * T * T) ** (m - 1)


def build_x2(knot: MontesinosKnot) -> VarietySystem:
    m = knot.m
    triples = knot_triples(knot)
    variables = ("t",) + tuple(r_name(i) for i in range(1, m + 1)) + ("lam",)
    sys = VarietySystem("X2", str(knot), variables, laurent=("lam",))
    for i, tr in enumerate(triples, 1):
        sys.add(tr.z + 2 - TAU, f"z_{i} + 2 = lam + 1/lam [X2 trace of g]")
    sys.add(h_polynomial(triples), "H(lam, t; r) = 0 [generic-1]")
    sys.require_nonzero(TAU - 2, "tau != 2")
    sys.require_nonzero(TAU - (T * T - 2), "tau != t^2 - 2")
    sys.metadata = {"tau": "lam + lam^-1"}
    sys.check_declared()
    return sys


# ---- X': tau = t^2 - 2 ----------------------------------------------------

@dataclass(frozen=True)
class SignVector:
    signs: tuple

    def __post_init__(self):
        if any(s not in (-1, 0, 1) for s in self.signs):
            raise InvalidSignVector(f"entries must be in {{0, +1, -1}}: {self.signs}")

    def __len__(self):
        return len(self.signs)

    def __getitem__(self, i: int) -> int:
        """1-based cyclic access."""
        return self.signs[(i - 1) % len(self.signs)]

    def __str__(self):
        return ",".join({1: "+", -1: "-", 0: "0"}[s] for s in self.signs)

    @classmethod
    def parse(cls, text: str) -> "SignVector":
        table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1, "0": 0}
        try:
            return cls(tuple(table[x.strip()] for x in text.split(",")))
        except KeyError as exc:
            raise InvalidSignVector(f"cannot parse sign vector {text!r}") from exc

    def in_xi(self) -> bool:
        return 1 in self.signs and -1 in self.signs


def enumerate_sign_vectors(knot_or_m, even: bool | None = None) -> list:
    """All of Xi, in lexicographic order over (0, +, -)."""
    if isinstance(knot_or_m, MontesinosKnot):
        m = knot_or_m.m
        if even is None:
            even = knot_or_m.parity_class is KnotClass.EVEN
    else:
        m = int(knot_or_m)
    out = []
    for signs in itertools.product((0, 1, -1), repeat=m):
        v = SignVector(signs)
        if not v.in_xi():
            continue
        if even and v[m] * v[1] != -1:
            continue
        out.append(v)
    return out


def _theta_at(knot: MontesinosKnot, i: int, power: int):
    return theta_pair(knot.tangle(i)).at(power)


def _case3_expr(knot, i, e) -> Polynomial:
    th = _theta_at(knot, i, e)
    return th.theta_ne - (1 + kpow(-2 * e)) * th.theta_sw


def _kappa_triple(knot, i) -> TraceTriple:
    tr = trace_triple(knot.tangle(i)).rename(r_name(i))
    sub = {"t": T_SUB}
    return TraceTriple(tr.z.subs(sub), tr.zdot.subs(sub), tr.zgrave.subs(sub))


def build_xprime(knot: MontesinosKnot, eps: SignVector | Sequence[int] | str) -> VarietySystem:
    if isinstance(eps, str):
        eps = SignVector.parse(eps)
    elif not isinstance(eps, SignVector):
        eps = SignVector(tuple(eps))
    m = knot.m
    if len(eps) != m:
        raise InvalidSignVector(f"sign vector has length {len(eps)}, knot has {m} tangles")
    if not eps.in_xi():
        raise InvalidSignVector(f"({eps}) must contain both + and -")
    if knot.parity_class is KnotClass.EVEN and eps[m] * eps[1] != -1:
        raise InvalidSignVector(f"even knot requires eps_m * eps_1 = -, got ({eps})")

    norm = next(i for i in range(1, m + 1) if eps[i] != 0)
    xi = {i: (Polynomial.const(1) if i == norm else Polynomial.var(xi_name(i)))
          for i in range(1, m + 1) if eps[i] != 0}
    rs = [i for i in range(1, m + 1) if eps[i] * eps[i + 1] == -1]
    variables = (("kappa",) + tuple(r_name(i) for i in rs)
                 + tuple(xi_name(i) for i in sorted(xi) if i != norm))
    sys = VarietySystem("XPrime", str(knot), variables, laurent=("kappa",))
    t = T_SUB
    cases = {}
    ratio = {}
    for i in range(1, m + 1):
        e, f = eps[i], eps[i + 1]
        j = i % m + 1
        if e == 0 and f == 0:
            cases[i] = 1
        elif e == 0:
            cases[i] = 2
            sys.add(_theta_at(knot, i, f).theta_ne,
                    f"theta_{i}^ne(kappa^{f}) = 0 [X'-Eq1]")
        elif f == 0:
            cases[i] = 3
            sys.add(_case3_expr(knot, i, e),
                    f"theta_{i}^ne = (1 + kappa^{-2 * e}) theta_{i}^sw at kappa^{e} [X'-Eq2]")
        elif e == f:
            cases[i] = 4
            a = _theta_at(knot, i, e).theta_ne
            b = _case3_expr(knot, i, e)
            sys.add(xi[j] * a - xi[i] * b, f"xi_{j} / xi_{i} from theta_{i} [X'-Eq3, cleared]")
            sys.require_nonzero(a, f"theta_{i}^ne(kappa^{e}) != 0")
            sys.require_nonzero(b, f"case-3 expression of tangle {i} != 0")
            ratio[i] = (b, a)
        else:
            cases[i] = 5
            tr = _kappa_triple(knot, i)
            prod = xi[i] * xi[j]
            sys.add(tr.z - (t * t - 4), f"z_{i} = t^2 - 4 [X'-Eq4]")
            sys.add(tr.zdot + prod, f"zdot_{i} = -xi_{i} xi_{j} [X'-Eq4]")
            sys.add(tr.zgrave - kpow(2 * e) * prod, f"zgrave_{i} = kappa^{2 * e} xi_{i} xi_{j} [X'-Eq4]")
            r = Polynomial.var(r_name(i))
            sys.require_nonzero(r - 2, f"r_{i} != 2")
            sys.require_nonzero(r - (t * t - 2), f"r_{i} != t^2 - 2")
            ratio[i] = (Polynomial.const(-1), tr.zdot)
    if all(eps[i] != 0 for i in range(1, m + 1)):
        plus_n = plus_d = minus_n = minus_d = Polynomial.const(1)
        for i in range(1, m + 1):
            n, d = ratio[i]
            if eps[i] > 0:
                plus_n, plus_d = plus_n * n, plus_d * d
            else:
                minus_n, minus_d = minus_n * n, minus_d * d
        sys.add(plus_n * minus_d - plus_d * minus_n,
                "prod f_i^eps_i = 1, denominators cleared [X' product relation; implied by the xi equations]")
    for i in sorted(xi):
        if i != norm:
            sys.require_nonzero(xi[i], f"xi_{i} != 0")
    for p, note in ((KAPPA - 1, "kappa != 1"), (KAPPA + 1, "kappa != -1"),
                    (KAPPA * KAPPA + 1, "kappa != +-i")):
        sys.require_nonzero(p, note)
    sys.metadata = {"epsilon": str(eps), "normalized": xi_name(norm),
                    "cases": {str(i): c for i, c in cases.items()}, "t": "kappa + kappa^-1"}
    sys.check_declared()
    return sys


# ---- genericity -----------------------------------------------------------

@dataclass
class GenericityReport:
    knot: str
    generic: bool
    witnesses: list

    def to_json(self) -> dict:
        return {"knot": self.knot, "generic": self.generic, "witnesses": self.witnesses}


_DEGENERATE = (KAPPA - 1, KAPPA + 1, KAPPA * KAPPA + 1)


def _strip_degenerate(p: Polynomial) -> Polynomial:
    """Clear negative kappa powers and divide out kappa, kappa +- 1, kappa^2 + 1."""
    p = p.cleared()
    for d in _DEGENERATE:
        while not p.is_constant():
            q, rem = _try_div(p, d)
            if rem:
                break
            p = q.cleared()
    return p


def _try_div(p, d):
    from .errors import NotDivisible
    try:
        return poly_exact_div(p, d), False
    except NotDivisible:
        return None, True


def _univariate_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    import sympy
    k = sympy.Symbol("kappa")
    g = sympy.gcd(sympy.Poly(_to_coeffs(a), k), sympy.Poly(_to_coeffs(b), k))
    coeffs = [int(c) for c in g.all_coeffs()]
    n = len(coeffs) - 1
    out = Polynomial.const(0)
    for i, c in enumerate(coeffs):
        out = out + c * KAPPA ** (n - i)
    return out


def _to_coeffs(p: Polynomial) -> list:
    """Dense coefficient list (highest degree first) of a polynomial in kappa."""
    by_deg = {k: c.constant_value() for k, c in p.coefficients_in("kappa").items()}
    n = max(by_deg)
    return [by_deg.get(n - k, 0) for k in range(n + 1)]


def genericity_check(knot: MontesinosKnot) -> GenericityReport:
    witnesses = []
    m = knot.m
    for i, j in itertools.product(range(1, m + 1), repeat=2):
        for iota, e in itertools.product((1, -1), repeat=2):
            a = _theta_at(knot, i, iota).theta_ne
            b = _case3_expr(knot, j, e)
            if a.is_zero() or b.is_zero():
                witnesses.append({"i": i, "j": j, "iota": iota, "epsilon": e,
                                  "common_factor": "identically zero"})
                continue
            a, b = _strip_degenerate(a), _strip_degenerate(b)
            if a.is_constant() or b.is_constant():
                continue
            g = _univariate_gcd(a, b)
            if not g.is_constant():
                witnesses.append({"i": i, "j": j, "iota": iota, "epsilon": e,
                                  "common_factor": str(g)})
    return GenericityReport(str(knot), not witnesses, witnesses)
