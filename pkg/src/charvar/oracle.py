"""Numeric brute-force oracle.

Builds the twist-block diagram of a rational tangle, pushes explicit complex
2x2 matrices through every crossing one at a time (no closed forms), and uses
the result to cross-check the symbolic engines and candidate points of the
variety systems.

Boundary model: the four ends nw, ne, sw, se carry the matrices of their
outward-directed arcs, and nw * ne * se * sw = e.  A half twist on two
adjacent ends (A, B) is (A, B) -> (B, B^-1 A B) or (A B A^-1, A) according
to its sign; the product A*B is unchanged.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (CharVarError, ConventionMismatch, NoConvergence, ReconstructionFailure,
                     SingularJacobian)
from .ring import Matrix2, d_matrix, eigenvectors, h_matrix, k_matrix, u_minus, u_plus
from .tangle import (HORIZONTAL_HAND, VERTICAL_HAND, MontesinosKnot, RationalTangle,
                     cf_value)

DEFAULT_TOLERANCE = 1e-8
ENDS = ("nw", "ne", "sw", "se")


def close(a: complex, b: complex, tol: float = DEFAULT_TOLERANCE) -> bool:
    """Mixed rule: relative when |b| > 1, absolute otherwise."""
    return abs(a - b) <= tol * max(1.0, abs(b))


def rel_err(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


def _mnorm(m: Matrix2) -> float:
    return max(abs(complex(x)) for x in m.entries())


def _mdist(a: Matrix2, b: Matrix2) -> float:
    """Entrywise distance, relative to the larger operand when that exceeds 1."""
    return a.max_abs_diff(b) / max(1.0, _mnorm(a), _mnorm(b))


# ---- diagrams ---------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    horizontal: bool
    count: int

    @property
    def hand(self) -> int:
        return HORIZONTAL_HAND if self.horizontal else VERTICAL_HAND

    @property
    def ends(self) -> tuple:
        return ("ne", "se") if self.horizontal else ("se", "sw")


@dataclass(frozen=True)
class TangleDiagram:
    cf: tuple
    start: str  # "0": nw-ne / sw-se arcs, "inf": nw-sw / ne-se arcs
    blocks: tuple
    connectivity: frozenset = field(default=frozenset())

    @classmethod
    def from_cf(cls, cf: Sequence[int]) -> "TangleDiagram":
        cf = tuple(cf)
        odd = len(cf) % 2 == 1
        blocks = tuple(Block(horizontal=(j % 2 == 0) == odd, count=k) for j, k in enumerate(cf))
        start = "0" if odd else "inf"
        diagram = cls(cf, start, blocks)
        conn = diagram._trace_strands()
        diagram = cls(cf, start, blocks, conn)
        diagram._check_fraction()
        return diagram

    @classmethod
    def from_tangle(cls, tangle: RationalTangle) -> "TangleDiagram":
        return cls.from_cf(tangle.cf)

    def _initial_labels(self) -> dict:
        if self.start == "0":
            return {"nw": ("a", 1), "ne": ("a", -1), "sw": ("b", 1), "se": ("b", -1)}
        return {"nw": ("a", 1), "sw": ("a", -1), "ne": ("b", 1), "se": ("b", -1)}

    def labels(self) -> dict:
        """(strand, orientation) at each end, followed crossing by crossing."""
        lab = self._initial_labels()
        for blk in self.blocks:
            p, q = blk.ends
            for _ in range(abs(blk.count)):
                lab[p], lab[q] = lab[q], lab[p]
        return lab

    def _trace_strands(self) -> frozenset:
        lab = self.labels()
        pairs = []
        for s in ("a", "b"):
            pairs.append(frozenset(e for e in ENDS if lab[e][0] == s))
        return frozenset(pairs)

    def _check_fraction(self):
        f = cf_value(self.cf)
        partner = next(iter(next(c for c in self.connectivity if "nw" in c) - {"nw"}))
        expected = "ne" if f.p % 2 == 0 else ("sw" if f.q % 2 == 0 else "se")
        if partner != expected:
            raise ConventionMismatch(f"diagram of {list(self.cf)} joins nw to {partner}, "
                                     f"fraction {f} requires {expected}")

    def y_sign(self) -> int:
        """Exponent e with y = b^e (y is oriented like the ne end, or like sw
        when ne lies on the nw strand)."""
        lab = self.labels()
        return lab["sw"][1] if lab["ne"][0] == "a" else lab["ne"][1]


def half_twist(A: Matrix2, B: Matrix2, sign: int):
    if sign > 0:
        return B, B.inv() * A * B
    return A * B * A.inv(), A


@dataclass(frozen=True)
class BoundaryQuadruple:
    nw: Matrix2
    ne: Matrix2
    sw: Matrix2
    se: Matrix2

    def as_dict(self) -> dict:
        return {"nw": self.nw, "ne": self.ne, "sw": self.sw, "se": self.se}

    def product_defect(self) -> float:
        prod = self.nw * self.ne * self.se * self.sw
        return _mdist(prod, Matrix2(1, 0, 0, 1))

    def traces(self) -> dict:
        """z, zdot, zgrave read off the boundary."""
        return {"z": complex((self.nw * self.ne).trace()) - 2,
                "zdot": complex((self.nw * self.sw).trace()) - 2,
                "zgrave": complex((self.nw * self.se).trace()) - 2}


def _run_blocks(diagram: TangleDiagram, ends: dict, inverse: bool = False) -> dict:
    blocks = reversed(diagram.blocks) if inverse else diagram.blocks
    for blk in blocks:
        p, q = blk.ends
        sign = blk.hand * (1 if blk.count > 0 else -1)
        if inverse:
            sign = -sign
        for _ in range(abs(blk.count)):
            ends[p], ends[q] = half_twist(ends[p], ends[q], sign)
    return ends


def propagate(diagram: TangleDiagram, x: Matrix2, y: Matrix2,
              tol: float = DEFAULT_TOLERANCE) -> BoundaryQuadruple:
    """Boundary matrices for the generating pair (x, y): x sits at nw and
    y = b^(+-1) on the second strand."""
    b = y if diagram.y_sign() == 1 else y.inv()
    if diagram.start == "0":
        ends = {"nw": x, "ne": x.inv(), "sw": b, "se": b.inv()}
    else:
        ends = {"nw": x, "sw": x.inv(), "ne": b, "se": b.inv()}
    quad = BoundaryQuadruple(**_run_blocks(diagram, ends))
    defect = quad.product_defect()
    if defect > tol:
        raise ConventionMismatch(f"nw*ne*se*sw deviates from e by {defect:.3g}")
    return quad


def unpropagate(diagram: TangleDiagram, quad: BoundaryQuadruple) -> dict:
    """Undo every crossing; returns the base-state ends."""
    return _run_blocks(diagram, dict(quad.as_dict()), inverse=True)


@dataclass(frozen=True)
class BaseCheck:
    defect: float
    x: Matrix2
    y: Matrix2


def base_check(diagram: TangleDiagram, quad: BoundaryQuadruple) -> BaseCheck:
    """How far the boundary is from coming out of a generating pair.

    Undoes the twists and measures the failure of the base relations
    (ne = nw^-1, se = sw^-1 for the [0] start, sw = nw^-1, se = ne^-1 for [inf]).
    """
    base = unpropagate(diagram, quad)
    if diagram.start == "0":
        b = base["sw"]
        defect = max(_mdist(base["nw"] * base["ne"], Matrix2(1, 0, 0, 1)),
                     _mdist(base["sw"] * base["se"], Matrix2(1, 0, 0, 1)))
    else:
        b = base["ne"]
        defect = max(_mdist(base["nw"] * base["sw"], Matrix2(1, 0, 0, 1)),
                     _mdist(base["ne"] * base["se"], Matrix2(1, 0, 0, 1)))
    y = b if diagram.y_sign() == 1 else b.inv()
    return BaseCheck(defect, base["nw"], y)


# ---- sampling --------------------------------------------------------------

class GeneratingPair(NamedTuple):
    x: Matrix2
    y: Matrix2
    degenerate: bool


def _num(v):
    """complex for Python numbers; extended-precision scalars pass through."""
    return complex(v) if isinstance(v, (int, float, complex)) else v


def kappa_from_t(t: complex) -> complex:
    """A root of kappa + 1/kappa = t (the one with |kappa| >= 1)."""
    t = complex(t)
    k = (t + cmath.sqrt(t * t - 4)) / 2
    if abs(k) < 1:
        k = 1 / k
    return k


def sample_generating_pair(t: complex, r: complex, kappa: complex | None = None,
                           flag_tol: float = 1e-3) -> GeneratingPair:
    """x = [[k, 1], [0, 1/k]], y = [[k, 0], [r - k^2 - k^-2, 1/k]]: tr x = tr y = t, tr xy = r.

    The pair is flagged when r is near k^2 + k^-2 (y diagonal, common eigenvector)
    or t is near +-2."""
    k = _num(kappa) if kappa is not None else kappa_from_t(t)
    r = _num(r)
    x = Matrix2(k, 1 + 0 * k, 0 * k, 1 / k)
    y = Matrix2(k, 0 * k, r - k * k - 1 / (k * k), 1 / k)
    flagged = abs(complex(r - k * k - 1 / (k * k))) < flag_tol or abs(abs(complex(t)) - 2) < flag_tol
    return GeneratingPair(x, y, flagged)


def sample_kappa_r(rng: np.random.Generator, avoid: float = 1e-3,
                   radius: float = 2.0) -> tuple:
    """Random (kappa, r) near the unit circle, away from kappa^4 = 1, r = 2, r = t^2 - 2."""
    while True:
        kappa = cmath.rect(rng.uniform(0.9, 1.1), rng.uniform(0, 2 * math.pi))
        r = complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
        t = kappa + 1 / kappa
        if min(abs(kappa ** 4 - 1), abs(r - 2), abs(r - (t * t - 2)),
               abs(r - kappa ** 2 - kappa ** -2)) > avoid:
            return kappa, r


def oracle_dps(cf: Sequence[int]) -> int:
    """Working precision for propagation: rounding errors are amplified by
    up to about three digits per crossing."""
    return 30 + 3 * sum(abs(k) for k in cf)


def oracle_traces(tangle: RationalTangle | Sequence[int], kappa: complex, r: complex,
                  dps: int | None = 0) -> dict:
    """z, zdot, zgrave by crossing-by-crossing propagation.

    Each crossing conjugates, and rounding errors compound quickly along a
    twist block, so propagation runs in mpmath; dps=0 picks the precision
    from the crossing count and dps=None uses plain doubles.
    """
    cf = tangle.cf if isinstance(tangle, RationalTangle) else tuple(tangle)
    diagram = TangleDiagram.from_cf(cf)
    if dps == 0:
        dps = oracle_dps(cf)
    if dps is None:
        x, y, _ = sample_generating_pair(kappa + 1 / kappa, r, kappa)
        return propagate(diagram, x, y).traces()
    import mpmath
    with mpmath.workdps(dps):
        k = mpmath.mpc(kappa)
        x, y, _ = sample_generating_pair(k + 1 / k, mpmath.mpc(r), k)
        quad = propagate(diagram, x, y)
        return {name: complex(v) for name, v in _mp_traces(quad).items()}


def _mp_traces(quad: BoundaryQuadruple) -> dict:
    return {"z": (quad.nw * quad.ne).trace() - 2,
            "zdot": (quad.nw * quad.sw).trace() - 2,
            "zgrave": (quad.nw * quad.se).trace() - 2}


def engine_traces(tangle: RationalTangle, kappa: complex, r: complex, dps: int = 30) -> dict:
    """Trace-engine polynomials evaluated in extended precision."""
    import mpmath
    from .trace_engine import trace_triple
    tr = trace_triple(tangle)
    with mpmath.workdps(dps):
        k = mpmath.mpc(kappa)
        point = {"t": k + 1 / k, "r": mpmath.mpc(r)}
        return {name: complex(p.evaluate(point)) for name, p in tr.as_dict().items()}


def compare_engine(tangle: RationalTangle, samples: int, rng: np.random.Generator) -> float:
    """Largest mixed-rule discrepancy between engine and oracle over random samples."""
    worst = 0.0
    for _ in range(samples):
        kappa, r = sample_kappa_r(rng)
        a, b = engine_traces(tangle, kappa, r), oracle_traces(tangle, kappa, r)
        worst = max(worst, *(rel_err(b[k], a[k]) for k in a))
    return worst


def reducible_boundary(tangle: RationalTangle, kappa: complex) -> BoundaryQuadruple:
    """Propagate the seed x = d(kappa), y = u+_kappa(1)."""
    return propagate(TangleDiagram.from_tangle(tangle), d_matrix(complex(kappa)),
                     u_plus(complex(kappa), 1 + 0j))


# ---- random pairs and shared eigenvectors ---------------------------------

def _crand(rng) -> complex:
    return complex(rng.normal(), rng.normal())


def random_conjugator(rng: np.random.Generator) -> Matrix2:
    a, b, c = _crand(rng), _crand(rng), _crand(rng)
    return Matrix2(a, b, c, (1 + b * c) / a)


def pair_with_traces(rng: np.random.Generator, t: complex, r: complex,
                     max_norm: float = 50.0) -> tuple:
    """Random (a1, a2) in SL(2,C) with tr a1 = tr a2 = t and tr(a1 a2) = r.

    No triangular normal form is used, so a shared eigenvector is not built in.
    Draws with an entry above max_norm are discarded: eigenvector tests lose
    accuracy roughly in proportion to the conditioning.
    """
    while True:
        a1, a2 = _draw_pair(rng, t, r)
        if max(_mnorm(a1), _mnorm(a2)) <= max_norm:
            return a1, a2


def _draw_pair(rng, t, r):
    a, b = _crand(rng), _crand(rng)
    d = t - a
    c = (a * d - 1) / b
    a1 = Matrix2(a, b, c, d)
    p = _crand(rng)
    # a2 = [[p, q], [s, t - p]]; the trace condition gives s = s0 + s1 q
    s0 = (r - a * p - d * (t - p)) / b
    s1 = -c / b
    # det: p (t - p) - q (s0 + s1 q) = 1
    qa, qb, qc = s1, s0, 1 - p * (t - p)
    if abs(qa) < 1e-12:
        q = -qc / qb
    else:
        q = (-qb + cmath.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)
    a2 = Matrix2(p, q, s0 + s1 * q, t - p)
    g = random_conjugator(rng)
    return g.conj(a1), g.conj(a2)


def eigen_defect(m: Matrix2, v) -> float:
    """|m v wedge v| for a unit vector v: zero iff v is an eigenvector of m."""
    w0 = complex(m.a) * v[0] + complex(m.b) * v[1]
    w1 = complex(m.c) * v[0] + complex(m.d) * v[1]
    return abs(w0 * v[1] - w1 * v[0]) / max(1.0, _mnorm(m))


def common_eigenvector(a1: Matrix2, a2: Matrix2, tol: float = DEFAULT_TOLERANCE) -> bool:
    return min(eigen_defect(a2, v) for v in eigenvectors(a1)) <= tol


# ---- Montesinos closure ----------------------------------------------------

def knot_component_count(knot: MontesinosKnot) -> int:
    """Number of components of the closed Montesinos diagram, by strand tracing."""
    m = knot.m
    parent = {}

    def find(u):
        while parent.setdefault(u, u) != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    def join(u, v):
        parent[find(u)] = find(v)

    for i in range(m):
        for pair in TangleDiagram.from_tangle(knot.tangles[i]).connectivity:
            u, v = sorted(pair)
            join((i, u), (i, v))
        j = (i + 1) % m
        join((i, "sw"), (j, "nw"))
        join((i, "se"), (j, "ne"))
    return len({find((i, e)) for i in range(m) for e in ENDS})


# ---- verification of variety points ----------------------------------------

@dataclass
class VerificationReport:
    component: str
    max_residual: float
    residuals: dict

    def ok(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        return self.max_residual <= tol

    def to_json(self) -> dict:
        return {"component": self.component, "max_residual": self.max_residual,
                "residuals": self.residuals}


def _get(point: Mapping, name: str) -> complex:
    if name not in point:
        raise ReconstructionFailure(f"point has no value for {name!r}")
    return complex(point[name])


def _x2_boundaries(knot: MontesinosKnot, point: Mapping) -> list:
    from .trace_engine import trace_triple
    t, lam = _get(point, "t"), _get(point, "lam")
    m = knot.m
    rs = [_get(point, f"r{i}") for i in range(1, m + 1)]
    tau = lam + 1 / lam
    dots, graves = [], []
    for i in range(m):
        tr = trace_triple(knot.tangles[i])
        dots.append(tr.zdot.evaluate({"t": t, "r": rs[i]}))
        graves.append(tr.zgrave.evaluate({"t": t, "r": rs[i]}))
    if abs(lam + 1) < 1e-7:
        # tau = -2: g = -p and x_i^nw = k_t(alpha_i), x_i^ne = k_t(alpha_i - t)
        alpha = [0j]
        for i in range(m - 1):
            alpha.append(alpha[-1] + (dots[i] - graves[i] + t * t) / (2 * t))
        return [(k_matrix(t, a), k_matrix(t, a - t)) for a in alpha]
    denom = (1 - lam) * (tau + 2 - t * t)
    mu = [1 + 0j]
    for i in range(m - 1):
        num = (1 + 1 / lam) * dots[i] + (1 + lam) * graves[i] + 2 * (tau + 2 - t * t)
        if abs(num) < 1e-14 or abs(denom) < 1e-14:
            raise ReconstructionFailure(f"mu_{i + 2} is degenerate")
        mu.append(mu[-1] * denom / num)
    return [(h_matrix(t, lam, u), h_matrix(t, lam, -u / lam)) for u in mu]


def _xprime_boundaries(knot: MontesinosKnot, point: Mapping, eps) -> list:
    kappa = _get(point, "kappa")
    out = []
    norm = next(i for i in range(1, knot.m + 1) if eps[i - 1] != 0)
    for i in range(1, knot.m + 1):
        e = eps[i - 1]
        if e == 0:
            out.append((d_matrix(kappa), d_matrix(kappa)))
            continue
        xi = complex(point.get(f"xi{i}", 1 if i == norm else None) or 0)
        if xi == 0:
            raise ReconstructionFailure(f"xi{i} must be nonzero")
        u = u_plus if e > 0 else u_minus
        out.append((u(kappa, xi), u(kappa, -kappa ** (-2 * e) * xi)))
    return out


def verify_rep_montesinos(knot: MontesinosKnot, point: Mapping[str, complex],
                          component: str = "X2", epsilon=None) -> VerificationReport:
    """Rebuild boundary matrices from a variety point and measure every defect.

    Residuals: trace of each boundary matrix vs t, equality of g_i = x_i^nw x_i^ne,
    base consistency of each tangle after undoing its crossings, and tr(x_i y_i)
    vs r_i when r_i is a coordinate.
    """
    m = knot.m
    res: dict = {}
    if component == "X1":
        return _verify_x1(knot, point)
    if component == "X2":
        pairs = _x2_boundaries(knot, point)
        t = _get(point, "t")
        r_known = {i: _get(point, f"r{i}") for i in range(1, m + 1)}
    elif component in ("XPrime", "X'"):
        from .variety import SignVector
        if epsilon is None:
            raise ReconstructionFailure("X' verification needs a sign vector")
        eps = epsilon.signs if isinstance(epsilon, SignVector) else tuple(epsilon)
        pairs = _xprime_boundaries(knot, point, eps)
        kappa = _get(point, "kappa")
        t = kappa + 1 / kappa
        r_known = {i: _get(point, f"r{i}") for i in range(1, m + 1) if f"r{i}" in point}
    else:
        raise ValueError(f"unknown component {component!r}")

    g0 = pairs[0][0] * pairs[0][1]
    for i in range(m):
        nw, ne = pairs[i]
        res[f"trace_nw_{i + 1}"] = rel_err(complex(nw.trace()), t)
        res[f"trace_ne_{i + 1}"] = rel_err(complex(ne.trace()), t)
        res[f"g_{i + 1}"] = _mdist(nw * ne, g0)
        nxt_nw, nxt_ne = pairs[(i + 1) % m]
        quad = BoundaryQuadruple(nw, ne, nxt_nw.inv(), nxt_ne.inv())
        check = base_check(TangleDiagram.from_tangle(knot.tangles[i]), quad)
        res[f"base_{i + 1}"] = check.defect
        if i + 1 in r_known:
            res[f"r_{i + 1}"] = rel_err(complex((check.x * check.y).trace()), r_known[i + 1])
    return VerificationReport(component, max(res.values()), res)


def _verify_x1(knot: MontesinosKnot, point: Mapping) -> VerificationReport:
    """Equation residuals plus a per-tangle check that z_i = 0 closes up (g = e)."""
    from .variety import build_x1
    system = build_x1(knot)
    res = {f"eq_{n}": abs(v) for n, v in enumerate(evaluate_system(system, point))}
    t = _get(point, "t")
    for i in range(1, knot.m + 1):
        r = _get(point, f"r{i}")
        x, y, _ = sample_generating_pair(t, r)
        quad = propagate(TangleDiagram.from_tangle(knot.tangle(i)), x, y, tol=1e-6)
        res[f"g_{i}"] = _mdist(quad.nw * quad.ne, Matrix2(1, 0, 0, 1))
    return VerificationReport("X1", max(res.values()), res)


# ---- Newton refinement ------------------------------------------------------

def evaluate_system(system, point: Mapping[str, complex]) -> list:
    return [complex(eq.poly.evaluate(point)) for eq in system.equations]


def residual(system, point: Mapping[str, complex]) -> float:
    vals = evaluate_system(system, point)
    return max((abs(v) for v in vals), default=0.0)


def newton_refine(system, start: Mapping[str, complex], fixed: Mapping[str, complex] | None = None,
                  max_iter: int = 100, tol: float = 1e-10) -> dict:
    """Damped Newton on the equations of ``system`` (non-certified).

    Variables in ``fixed`` are held constant; the rest are unknowns.  The step
    is the least-squares solution of J dx = -F; damping halves whenever the
    residual would grow.
    """
    fixed = dict(fixed or {})
    unknowns = [v for v in system.variables if v not in fixed]
    point = {v: complex(start[v]) for v in unknowns}
    point.update({k: complex(v) for k, v in fixed.items()})
    jac = [[eq.poly.diff(v) for v in unknowns] for eq in system.equations]

    def F(p):
        return np.array(evaluate_system(system, p), dtype=complex)

    f = F(point)
    norm = np.linalg.norm(f, np.inf)
    for _ in range(max_iter):
        if norm < tol:
            return point
        J = np.array([[complex(d.evaluate(point)) for d in row] for row in jac], dtype=complex)
        if not np.all(np.isfinite(J)) or not np.any(J):
            raise SingularJacobian("Jacobian is zero or not finite")
        dx = np.linalg.lstsq(J, -f, rcond=None)[0]
        step = 1.0
        while step > 1e-8:
            trial = dict(point)
            for v, d in zip(unknowns, dx):
                trial[v] = point[v] + step * d
            try:
                ft = F(trial)
            except (ZeroDivisionError, OverflowError, CharVarError):
                ft = None
            if ft is not None and np.all(np.isfinite(ft)):
                nt = np.linalg.norm(ft, np.inf)
                if nt < norm:
                    point, f, norm = trial, ft, nt
                    break
            step /= 2
        else:
            raise NoConvergence(f"damping exhausted at residual {norm:.3g}")
    if norm < tol:
        return point
    raise NoConvergence(f"no convergence after {max_iter} iterations (residual {norm:.3g})")
