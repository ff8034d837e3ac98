"""Exact sparse multivariate (Laurent) polynomials over Z, Chebyshev-type
recursions and a small 2x2 matrix type.

A :class:`Polynomial` is an immutable map from exponent vectors to Python
integers, tied to a :class:`VarTable` that fixes variable order and which
variables may carry negative exponents.  Binary operations between
polynomials over different tables first merge the tables in canonical
variable order, so results never depend on the order operations were
performed in.
"""

from __future__ import annotations

import cmath
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from operator import add
from typing import Any, Callable, Iterable, Mapping

from .errors import (
    DomainViolation,
    MissingVariable,
    NotASquare,
    NotDivisible,
    NotUnimodular,
    ZeroAtLaurentVariable,
)

DEFAULT_LAURENT = frozenset({"lam", "kappa"})

_PREFIX_RANK = {"t": 0, "r": 1, "lam": 2, "kappa": 3, "u": 4, "xi": 5, "tau": 6, "tb": 7}
_NAME_RE = re.compile(r"([A-Za-z]+?)_?(\d+(?:_\d+)*)?")


def var_sort_key(name: str):
    """Canonical variable order: t, r, r1.., lam, kappa, u, xi1.., tau, tb_.., others."""
    m = _NAME_RE.fullmatch(name)
    if m is None:
        return (len(_PREFIX_RANK), 0, (), name)
    prefix, idx = m.group(1), m.group(2)
    ints = tuple(int(i) for i in idx.split("_")) if idx else ()
    rank = _PREFIX_RANK.get(prefix, len(_PREFIX_RANK))
    if rank == len(_PREFIX_RANK):
        return (rank, 0, (), name)
    return (rank, len(ints), ints, name)


class VarTable:
    """Ordered, duplicate-free variable list with per-variable Laurent flags."""

    __slots__ = ("names", "laurent", "_index", "_hash")

    def __init__(self, names: Iterable[str] = (), laurent: Iterable[str] = ()):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        laurent = frozenset(laurent)
        if not laurent <= set(names):
            raise ValueError("laurent flags given for undeclared variables")
        self.names = names
        self.laurent = laurent
        self._index = {n: i for i, n in enumerate(names)}
        self._hash = hash((names, laurent))

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return (isinstance(other, VarTable) and self.names == other.names
                and self.laurent == other.laurent)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        flags = [f"{n}~" if n in self.laurent else n for n in self.names]
        return f"VarTable({', '.join(flags)})"

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name):
        return name in self._index

    def is_laurent(self, name: str) -> bool:
        return name in self.laurent

    def merge(self, other: "VarTable") -> "VarTable":
        if self is other or self == other:
            return self
        for n in set(self.names) & set(other.names):
            if (n in self.laurent) != (n in other.laurent):
                raise ValueError(f"variable {n!r} registered with conflicting laurent flags")
        names = sorted(set(self.names) | set(other.names), key=var_sort_key)
        return _table(tuple(names), self.laurent | other.laurent)


@lru_cache(maxsize=None)
def _table(names, laurent):
    return VarTable(names, laurent)


EMPTY = _table((), frozenset())


def _embed(terms, src: VarTable, dst: VarTable):
    if src == dst:
        return terms
    pos = [dst.index(n) for n in src.names]
    n = len(dst)
    out = {}
    for e, c in terms.items():
        v = [0] * n
        for i, k in zip(pos, e):
            v[i] = k
        out[tuple(v)] = c
    return out


def _grlex(e):
    return (sum(e), e)


class Polynomial:
    """Immutable sparse (Laurent) polynomial with integer coefficients."""

    __slots__ = ("table", "terms", "_hash", "_plan")

    def __init__(self, terms: Mapping[tuple, int] | None = None, table: VarTable = EMPTY,
                 _trusted: bool = False):
        if _trusted:
            self.terms = terms
        else:
            n = len(table)
            clean = {}
            for e, c in (terms or {}).items():
                e = tuple(int(k) for k in e)
                if len(e) != n:
                    raise ValueError("exponent vector length does not match variable table")
                for name, k in zip(table.names, e):
                    if k < 0 and name not in table.laurent:
                        raise ValueError(f"negative exponent for non-laurent variable {name!r}")
                c = int(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if not clean[e]:
                        del clean[e]
            self.terms = clean
        self.table = table
        self._hash = None
        self._plan = None

    # ---- constructors -------------------------------------------------
    @classmethod
    def const(cls, c: int) -> "Polynomial":
        c = int(c)
        return cls({(): c} if c else {}, EMPTY, _trusted=True)

    @classmethod
    def var(cls, name: str, laurent: bool | None = None) -> "Polynomial":
        if laurent is None:
            laurent = name in DEFAULT_LAURENT
        table = _table((name,), frozenset({name}) if laurent else frozenset())
        return cls({(1,): 1}, table, _trusted=True)

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coef: int = 1,
                 laurent: Iterable[str] | None = None) -> "Polynomial":
        names = tuple(sorted(exps, key=var_sort_key))
        if laurent is None:
            laurent = [n for n in names if n in DEFAULT_LAURENT or exps[n] < 0]
        table = _table(names, frozenset(laurent))
        return cls({tuple(exps[n] for n in names): coef}, table)

    @staticmethod
    def coerce(x: Any) -> "Polynomial":
        if isinstance(x, Polynomial):
            return x
        if isinstance(x, int):
            return Polynomial.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Polynomial")

    # ---- basic protocol -----------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), 0)

    def named_terms(self) -> dict:
        """Terms keyed by sorted (name, exponent) pairs; independent of the table."""
        names = self.table.names
        return {tuple((n, k) for n, k in zip(names, e) if k): c for e, c in self.terms.items()}

    def __eq__(self, other):
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.table == other.table:
            return self.terms == other.terms
        return self.named_terms() == other.named_terms()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.named_terms().items()))
        return self._hash

    def variables(self) -> tuple:
        """Names of variables that actually occur."""
        used = [False] * len(self.table)
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(n for n, u in zip(self.table.names, used) if u)

    def with_table(self, table: VarTable) -> "Polynomial":
        """Re-express over a table that contains every used variable."""
        if table == self.table:
            return self
        for n in self.variables():
            if n not in table:
                raise ValueError(f"variable {n!r} missing from target table")
        # drop unused source variables before embedding
        keep = [i for i, n in enumerate(self.table.names) if n in table]
        src = _table(tuple(self.table.names[i] for i in keep),
                     frozenset(n for n in self.table.laurent if n in table))
        terms = {tuple(e[i] for i in keep): c for e, c in self.terms.items()}
        return Polynomial(_embed(terms, src, table), table, _trusted=True)

    def _unify(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.coerce(other)
        if self.table == other.table:
            return self.table, self.terms, other.terms
        table = self.table.merge(other.table)
        return (table, _embed(self.terms, self.table, table),
                _embed(other.terms, other.table, table))

    # ---- arithmetic ---------------------------------------------------
    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()}, self.table, _trusted=True)

    def __add__(self, other):
        try:
            table, a, b = self._unify(other)
        except TypeError:
            return NotImplemented
        out = dict(a)
        for e, c in b.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial(out, table, _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Polynomial.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return Polynomial({}, self.table, _trusted=True)
            return Polynomial({e: c * other for e, c in self.terms.items()}, self.table,
                              _trusted=True)
        try:
            table, a, b = self._unify(other)
        except TypeError:
            return NotImplemented
        return Polynomial(_mul_terms(a, b), table, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("negative power of a non-monomial")
            (e, c), = self.terms.items()
            if c not in (1, -1):
                raise ValueError("negative power of a non-unit monomial")
            for name, k in zip(self.table.names, e):
                if k and name not in self.table.laurent:
                    raise ValueError(f"negative power of non-laurent variable {name!r}")
            return Polynomial({tuple(-k * (-n) for k in e): c ** (-n)}, self.table,
                              _trusted=True)
        result = Polynomial({(0,) * len(self.table): 1}, self.table, _trusted=True)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # ---- structure ----------------------------------------------------
    def degree(self, name: str) -> int:
        if name not in self.table or not self.terms:
            return 0 if self.terms else -1
        i = self.table.index(name)
        return max(e[i] for e in self.terms)

    def min_degree(self, name: str) -> int:
        if name not in self.table or not self.terms:
            return 0
        i = self.table.index(name)
        return min(e[i] for e in self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def leading_term(self):
        """(exponent dict, coefficient) of the graded-lex largest monomial."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex)
        return dict(zip(self.table.names, e)), self.terms[e]

    def leading_coefficient(self) -> int:
        return self.leading_term()[1]

    def sorted_terms(self):
        """Terms in canonical (descending graded-lex) order."""
        return sorted(self.terms.items(), key=lambda ec: _grlex(ec[0]), reverse=True)

    def coefficients_in(self, name: str) -> dict:
        """Map exponent of ``name`` -> coefficient polynomial in the remaining variables."""
        if name not in self.table:
            return {0: self} if self.terms else {}
        i = self.table.index(name)
        groups: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            groups.setdefault(k, {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: Polynomial(g, self.table, _trusted=True) for k, g in groups.items()}

    def diff(self, name: str) -> "Polynomial":
        if name not in self.table:
            return Polynomial({}, self.table, _trusted=True)
        i = self.table.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                out[e[:i] + (e[i] - 1,) + e[i + 1:]] = c * e[i]
        return Polynomial(out, self.table, _trusted=True)

    def laurent_shift(self) -> dict:
        """Exponents m_v (laurent vars only) such that p * prod v^m_v is a polynomial
        with minimal exponent 0 in each laurent variable."""
        shift = {}
        for name in self.table.laurent:
            if self.terms:
                shift[name] = -self.min_degree(name)
        return shift

    def cleared(self) -> "Polynomial":
        """Multiply by the monomial unit making every laurent exponent >= 0 with minimum 0."""
        shift = self.laurent_shift()
        if not any(shift.values()):
            return self
        return self * Polynomial.monomial(shift, laurent=self.table.laurent & set(shift))

    def content(self) -> int:
        from math import gcd
        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
        return g

    # ---- substitution / evaluation -------------------------------------
    def subs(self, mapping: Mapping[str, Any]) -> "Polynomial":
        """Simultaneous substitution of polynomials (or ints) for variables."""
        mapping = {k: Polynomial.coerce(v) for k, v in mapping.items() if k in self.table}
        if not mapping:
            return self
        names = self.table.names
        keep = [i for i, n in enumerate(names) if n not in mapping]
        rest_table = _table(tuple(names[i] for i in keep),
                            frozenset(n for n in self.table.laurent if n not in mapping))
        cols = [(i, names[i]) for i in range(len(names)) if names[i] in mapping]
        # group by substituted exponents to reuse power products
        groups: dict = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i, _ in cols)
            groups.setdefault(key, {})[tuple(e[i] for i in keep)] = c
        powers: dict = {}

        def power(name, k):
            if (name, k) not in powers:
                base = mapping[name]
                if k >= 0:
                    powers[(name, k)] = base ** k
                else:
                    try:
                        powers[(name, k)] = base ** k
                    except ValueError as exc:
                        raise ValueError(f"cannot invert substitution for {name!r}") from exc
            return powers[(name, k)]

        result = Polynomial.const(0)
        for key, rest in groups.items():
            term = Polynomial(rest, rest_table, _trusted=True)
            for (_, name), k in zip(cols, key):
                if k:
                    term = term * power(name, k)
            result = result + term
        return result

    def evaluate(self, assignment: Mapping[str, complex]) -> complex:
        """Nested Horner evaluation in complex floating point.

        Python numbers are coerced to complex; other scalar types (e.g.
        mpmath.mpc) are used as given, so the result has their precision.
        """
        names = self.variables()
        for n in names:
            if n not in assignment:
                raise MissingVariable(f"no value for variable {n!r}")
        for n in names:
            if n in self.table.laurent and assignment[n] == 0:
                if self.min_degree(n) < 0:
                    raise ZeroAtLaurentVariable(f"laurent variable {n!r} assigned 0")
        if self._plan is None:
            idx = [self.table.index(n) for n in names]
            items = [(tuple(e[i] for i in idx), c) for e, c in self.terms.items()]
            self._plan = _horner_plan(items, 0, len(names))
        vals = [_scalar(assignment[n]) for n in names]
        out = _run_plan(self._plan, vals, 0)
        return complex(out) if all(isinstance(v, complex) for v in vals) else out

    __call__ = evaluate

    # ---- serialization ------------------------------------------------
    def to_json(self) -> dict:
        names = self.table.names
        out = {"vars": list(names),
               "laurent": sorted(self.table.laurent, key=var_sort_key),
               "terms": []}
        for e, c in self.sorted_terms():
            out["terms"].append({"coef": str(c),
                                 "exps": {n: k for n, k in zip(names, e) if k}})
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "Polynomial":
        names = tuple(data["vars"])
        laurent = data.get("laurent")
        if laurent is None:
            laurent = [n for n in names if n in DEFAULT_LAURENT]
        table = VarTable(names, laurent)
        terms = {}
        for term in data["terms"]:
            exps = term.get("exps", {})
            for n in exps:
                if n not in table:
                    raise ValueError(f"undeclared variable {n!r} in term")
            e = tuple(int(exps.get(n, 0)) for n in names)
            terms[e] = terms.get(e, 0) + int(term["coef"])
        return cls(terms, table)

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        return _format(self, _text_var, "*", "^{}")

    def to_latex(self) -> str:
        return _format(self, latex_var, " ", "^{{{}}}")


def _mul_terms(a, b):
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for e2, c2 in b.items():
        for e1, c1 in a.items():
            e = tuple(map(add, e1, e2))
            out[e] = get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _scalar(v):
    if isinstance(v, (int, float, complex)):
        return complex(v)
    try:
        import numpy as np
        if isinstance(v, np.generic):
            return complex(v)
    except ImportError:  # pragma: no cover
        pass
    return v


def _horner_plan(items, depth, nvars):
    """Nested Horner scheme: an int at the leaves, else [(degree, subplan)]
    in decreasing degree."""
    if depth == nvars:
        return sum(c for _, c in items)
    groups: dict = {}
    for e, c in items:
        groups.setdefault(e[depth], []).append((e, c))
    return [(k, _horner_plan(groups[k], depth + 1, nvars)) for k in sorted(groups, reverse=True)]


def _run_plan(plan, vals, depth):
    if not isinstance(plan, list):
        return plan
    if not plan:
        return 0j
    x = vals[depth]
    acc = 0
    prev = None
    for k, sub in plan:
        if prev is not None:
            acc *= x ** (prev - k)
        acc += _run_plan(sub, vals, depth + 1)
        prev = k
    return acc * x ** prev


_GREEK = {"lam": r"\lambda", "kappa": r"\kappa", "xi": r"\xi", "tau": r"\tau",
          "tb": r"\overline{t}"}


def _text_var(name):
    return name


def latex_var(name: str) -> str:
    m = _NAME_RE.fullmatch(name)
    if m is None:
        return name
    prefix, idx = m.group(1), m.group(2)
    base = _GREEK.get(prefix, prefix)
    if idx:
        return f"{base}_{{{idx.replace('_', ',')}}}"
    return base


def _format(p: Polynomial, varfmt: Callable, sep: str, expfmt: str) -> str:
    if not p.terms:
        return "0"
    names = p.table.names
    pieces = []
    for e, c in p.sorted_terms():
        factors = []
        for n, k in zip(names, e):
            if k == 1:
                factors.append(varfmt(n))
            elif k:
                factors.append(varfmt(n) + expfmt.format(k))
        mono = sep.join(factors)
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}{sep}{mono}"
        pieces.append(("-" if c < 0 else "+", body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for s, b in pieces[1:]:
        out += f" {s} {b}"
    return out


# ---- exact division and square roots ------------------------------------

def _split(terms, v):
    groups: dict = {}
    for e, c in terms.items():
        groups.setdefault(e[v], {})[e[:v] + (0,) + e[v + 1:]] = c
    return groups


def _shift_terms(terms, v, k):
    return {e[:v] + (e[v] + k,) + e[v + 1:]: c for e, c in terms.items()}


def _div_terms(p: dict, d: dict, n: int) -> dict:
    """Exact quotient of polynomials with non-negative exponents, recursive in
    the first variable of ``d``."""
    if not p:
        return {}
    zero = (0,) * n
    if len(d) == 1 and zero in d:
        c = d[zero]
        out = {}
        for e, a in p.items():
            qv, rv = divmod(a, c)
            if rv:
                raise NotDivisible(f"coefficient {a} not divisible by {c}")
            out[e] = qv
        return out
    v = next(i for i in range(n) if any(e[i] for e in d))
    dd = _split(d, v)
    deg_d = max(dd)
    lc_d = dd[deg_d]
    rem = dict(p)
    q: dict = {}
    while rem:
        deg_r = max(e[v] for e in rem)
        if deg_r < deg_d:
            raise NotDivisible("remainder degree below divisor degree")
        lc_r = {e[:v] + (0,) + e[v + 1:]: c for e, c in rem.items() if e[v] == deg_r}
        cq = _div_terms(lc_r, lc_d, n)
        cq = _shift_terms(cq, v, deg_r - deg_d)
        for ec, cc in cq.items():
            q[ec] = q.get(ec, 0) + cc
            for ed, cd in d.items():
                key = tuple(map(add, ec, ed))
                val = rem.get(key, 0) - cc * cd
                if val:
                    rem[key] = val
                else:
                    rem.pop(key, None)
    return {e: c for e, c in q.items() if c}


def _sqrt_terms(p: dict, n: int) -> dict:
    zero = (0,) * n
    if not p:
        return {}
    if len(p) == 1 and zero in p:
        c = p[zero]
        if c < 0 or isqrt(c) ** 2 != c:
            raise NotASquare(f"{c} is not a perfect square")
        return {zero: isqrt(c)}
    v = next(i for i in range(n) if any(e[i] for e in p))
    pp = _split(p, v)
    top, low = max(pp), min(pp)
    if top % 2 or low % 2:
        raise NotASquare("odd extreme degree")
    big = top // 2
    q = {big: _sqrt_terms(pp[top], n)}
    two_qn = {e: 2 * c for e, c in q[big].items()}
    for j in range(big - 1, low // 2 - 1, -1):
        acc = dict(pp.get(big + j, {}))
        for i in range(j + 1, big):
            k = big + j - i
            if k <= j or k >= big or i not in q or k not in q:
                continue
            for e, c in _mul_terms(q[i], q[k]).items():
                val = acc.get(e, 0) - c
                if val:
                    acc[e] = val
                else:
                    acc.pop(e, None)
        try:
            qj = _div_terms(acc, two_qn, n)
        except NotDivisible as exc:
            raise NotASquare("coefficient recursion failed") from exc
        if qj:
            q[j] = qj
    root = {}
    for k, terms in q.items():
        root.update(_shift_terms(terms, v, k))
    if _mul_terms(root, root) != p:
        raise NotASquare("candidate root does not square back")
    return root


def _laurent_normalize(p: Polynomial, table: VarTable, terms: dict):
    """Shift laurent variables so each has minimum exponent 0; returns (terms, shifts)."""
    shifts = [0] * len(table)
    for name in table.laurent:
        i = table.index(name)
        if terms:
            shifts[i] = min(e[i] for e in terms)
    if any(shifts):
        terms = {tuple(k - s for k, s in zip(e, shifts)): c for e, c in terms.items()}
    return terms, shifts


# running totals, read by the structural-invariant checks
DIVISION_STATS = Counter()


def poly_exact_div(p: Polynomial, d: Polynomial) -> Polynomial:
    """Return q with p == q*d, raising NotDivisible if no exact quotient exists.

    Laurent variables are handled by factoring out their minimal monomials,
    which are units.
    """
    p, d = Polynomial.coerce(p), Polynomial.coerce(d)
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    DIVISION_STATS["calls"] += 1
    try:
        return _exact_div(p, d)
    except NotDivisible:
        DIVISION_STATS["failures"] += 1
        raise


def _exact_div(p: Polynomial, d: Polynomial) -> Polynomial:
    table, a, b = p._unify(d)
    a, sa = _laurent_normalize(p, table, a)
    b, sb = _laurent_normalize(d, table, b)
    q = _div_terms(a, b, len(table))
    shift = [x - y for x, y in zip(sa, sb)]
    for name, k in zip(table.names, shift):
        if k < 0 and name not in table.laurent:
            raise NotDivisible("quotient would need a negative exponent")
    if any(shift):
        q = {tuple(k + s for k, s in zip(e, shift)): c for e, c in q.items()}
    return Polynomial(q, table, _trusted=True)


def divides(d: Polynomial, p: Polynomial) -> bool:
    try:
        _exact_div(Polynomial.coerce(p), Polynomial.coerce(d))
    except NotDivisible:
        return False
    return True


def poly_sqrt(p: Polynomial) -> Polynomial:
    """Square root with positive graded-lex leading coefficient."""
    p = Polynomial.coerce(p)
    if p.is_zero():
        raise ValueError("poly_sqrt of the zero polynomial")
    table = p.table
    terms, shifts = _laurent_normalize(p, table, dict(p.terms))
    if any(s % 2 for s in shifts):
        raise NotASquare("odd power of a laurent unit")
    root = _sqrt_terms(terms, len(table))
    if any(shifts):
        half = [s // 2 for s in shifts]
        root = {tuple(k + s for k, s in zip(e, half)): c for e, c in root.items()}
    q = Polynomial(root, table, _trusted=True)
    if q.leading_coefficient() < 0:
        q = -q
    return q


# ---- Chebyshev-type recursions --------------------------------------------

def _one_like(x):
    return Polynomial.const(1) if isinstance(x, Polynomial) else 1


def cheb_omega(n: int, x):
    """omega_0 = 0, omega_1 = 1, omega_{k+1} = x*omega_k - omega_{k-1};
    omega_{-n} = -omega_n.  Works over any commutative ring (polynomials, numbers)."""
    if n < 0:
        return -cheb_omega(-n, x)
    if isinstance(x, Polynomial):
        return _omega_poly(n, x)
    prev, cur = 0 * x, 1 + 0 * x
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, x * cur - prev
    return cur


def cheb_theta(n: int, x):
    """theta_0 = 2, theta_1 = x, theta_{k+1} = x*theta_k - theta_{k-1}; even in n."""
    n = abs(n)
    if isinstance(x, Polynomial):
        return _theta_poly(n, x)
    prev, cur = 2 + 0 * x, x
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, x * cur - prev
    return cur


@lru_cache(maxsize=4096)
def _omega_poly(n, x):
    if n == 0:
        return Polynomial.const(0)
    if n == 1:
        return Polynomial.const(1)
    return x * _omega_poly(n - 1, x) - _omega_poly(n - 2, x)


@lru_cache(maxsize=4096)
def _theta_poly(n, x):
    if n == 0:
        return Polynomial.const(2)
    if n == 1:
        return x
    return x * _theta_poly(n - 1, x) - _theta_poly(n - 2, x)


# ---- 2x2 matrices ---------------------------------------------------------

@dataclass(frozen=True)
class Matrix2:
    """2x2 matrix over any commutative scalar ring (Polynomial, int, complex)."""

    a: Any
    b: Any
    c: Any
    d: Any

    def __mul__(self, other):
        if isinstance(other, Matrix2):
            return Matrix2(self.a * other.a + self.b * other.c,
                           self.a * other.b + self.b * other.d,
                           self.c * other.a + self.d * other.c,
                           self.c * other.b + self.d * other.d)
        return Matrix2(self.a * other, self.b * other, self.c * other, self.d * other)

    def __rmul__(self, scalar):
        return Matrix2(scalar * self.a, scalar * self.b, scalar * self.c, scalar * self.d)

    def __add__(self, other):
        return Matrix2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other):
        return Matrix2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self):
        return Matrix2(-self.a, -self.b, -self.c, -self.d)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def inv(self):
        """Inverse of a determinant-one matrix (the adjugate)."""
        return Matrix2(self.d, -self.b, -self.c, self.a)

    def conj(self, other: "Matrix2") -> "Matrix2":
        """self * other * self^{-1}."""
        return self * other * self.inv()

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def transpose(self):
        return Matrix2(self.a, self.c, self.b, self.d)

    def max_abs_diff(self, other: "Matrix2") -> float:
        return max(abs(complex(x) - complex(y)) for x, y in zip(self.entries(), other.entries()))

    @classmethod
    def identity(cls, one=1):
        return cls(one, 0 * one, 0 * one, one)


def identity() -> Matrix2:
    return Matrix2(1, 0, 0, 1)


E = Matrix2(1, 0, 0, 1)
P = Matrix2(1, 1, 0, 1)
W = Matrix2(0, 1, -1, 0)


def d_matrix(kappa) -> Matrix2:
    return Matrix2(kappa, 0 * kappa, 0 * kappa, _inverse(kappa))


def u_plus(kappa, xi) -> Matrix2:
    return Matrix2(kappa, xi, 0 * kappa, _inverse(kappa))


def u_minus(kappa, xi) -> Matrix2:
    return Matrix2(kappa, 0 * kappa, xi, _inverse(kappa))


def _inverse(x):
    if isinstance(x, Polynomial):
        return x ** -1
    return 1 / x


def _is_one(x, tol):
    if isinstance(x, Polynomial):
        return x == 1
    return abs(complex(x) - 1) <= tol


def mat2_pow(z: Matrix2, n: int, tol: float = 1e-9) -> Matrix2:
    """z^n = omega_n(tr z) z - omega_{n-1}(tr z) e for det z = 1."""
    if not _is_one(z.det(), tol):
        raise NotUnimodular(f"det = {z.det()}")
    tr = z.trace()
    one = _one_like(tr) if isinstance(tr, Polynomial) else 1
    wn, wn1 = cheb_omega(n, tr), cheb_omega(n - 1, tr)
    return z * wn - Matrix2(one, 0 * one, 0 * one, one) * wn1


def mat2_pow_naive(z: Matrix2, n: int) -> Matrix2:
    """Iterated multiplication (inverse for negative n)."""
    base = z if n >= 0 else z.inv()
    one = _one_like(z.a) if isinstance(z.a, Polynomial) else 1
    out = Matrix2(one, 0 * one, 0 * one, one)
    for _ in range(abs(n)):
        out = out * base
    return out


def h_matrix(t, lam, mu) -> Matrix2:
    """h_t^lam(mu); requires lam + 1/lam not in {t^2 - 2, 2, -2} and mu != 0."""
    tau = lam + 1 / lam
    for bad in (t * t - 2, 2, -2):
        if abs(tau - bad) < 1e-14:
            raise DomainViolation(f"lam + 1/lam = {tau} is excluded")
    if mu == 0:
        raise DomainViolation("mu must be nonzero")
    s = 1 / (lam + 1)
    return Matrix2(s * lam * t, s * mu, s * (t * t - tau - 2) * lam / mu, s * t)


def k_matrix(t, alpha) -> Matrix2:
    """k_t(alpha); requires t != 0."""
    if t == 0:
        raise DomainViolation("t must be nonzero")
    return Matrix2(t / 2 + alpha, (t * t / 4 - 1 - alpha * alpha) / (2 * t), 2 * t, t / 2 - alpha)


def eigenvectors(m: Matrix2):
    """Numeric eigenvectors of a complex 2x2 matrix (one per distinct eigenvalue)."""
    a, b, c, d = (complex(x) for x in m.entries())
    tr, det = a + d, a * d - b * c
    disc = cmath.sqrt(tr * tr - 4 * det)
    vecs = []
    for ev in ((tr + disc) / 2, (tr - disc) / 2):
        # rows of (m - ev) annihilate v; pick the better-conditioned row
        r1, r2 = (a - ev, b), (c, d - ev)
        row = r1 if abs(r1[0]) + abs(r1[1]) >= abs(r2[0]) + abs(r2[1]) else r2
        if abs(row[0]) + abs(row[1]) < 1e-300:
            v = (1 + 0j, 0j)
        else:
            v = (-row[1], row[0])
        norm = (abs(v[0]) ** 2 + abs(v[1]) ** 2) ** 0.5
        vecs.append((v[0] / norm, v[1] / norm))
    return vecs
