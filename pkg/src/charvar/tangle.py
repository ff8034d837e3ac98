"""Rational tangles, continued fractions and Montesinos knot classification."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction as _Q
from functools import lru_cache
from math import floor, gcd
from typing import Iterable, Sequence

from .errors import DivisionByZeroInContinuedFraction, InvalidFraction, NotAKnot


@dataclass(frozen=True, order=True)
class Fraction:
    """Reduced tangle fraction p/q with q >= 1 and p != 0."""

    p: int
    q: int = 1

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if q == 0 or p == 0:
            raise InvalidFraction(f"{p}/{q} is not a valid tangle fraction")
        if q < 0:
            p, q = -p, -q
        g = gcd(p, q)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)

    def __str__(self):
        return str(self.p) if self.q == 1 else f"{self.p}/{self.q}"

    def as_rational(self) -> _Q:
        return _Q(self.p, self.q)


def cf_value(cf: Sequence[int]) -> Fraction:
    """Evaluate [[k1,...,ks]] = k_s + 1/[[k1,...,k_{s-1}]]."""
    if not cf:
        raise ValueError("empty continued fraction")
    val = _Q(cf[0])
    for k in cf[1:]:
        if val == 0:
            raise DivisionByZeroInContinuedFraction(f"zero intermediate value in {list(cf)}")
        val = k + 1 / val
    if val == 0:
        raise InvalidFraction(f"{list(cf)} evaluates to 0")
    return Fraction(val.numerator, val.denominator)


@lru_cache(maxsize=None)
def _expansions(p: int, q: int) -> tuple:
    """Best expansion of p/q; candidates branch on floor/ceil of each partial quotient."""
    if q == 1:
        return (p,)
    x = _Q(p, q)
    best = None
    for k in (floor(x), floor(x) + 1):
        rest = 1 / (x - k)
        cand = _expansions(rest.numerator, rest.denominator) + (k,)
        if best is None or _cf_rank(cand) < _cf_rank(best):
            best = cand
    return best


def _cf_rank(cf):
    # all |k| >= 1 first, then shortest, then positive last entry, then smallest sum
    return (0 in cf, len(cf), cf[-1] <= 0, sum(abs(k) for k in cf))


def cf_expand(f: Fraction) -> tuple:
    """Deterministic continued fraction with cf_value(cf) == f."""
    return _expansions(f.p, f.q)


# Frozen crossing conventions: handedness of a positive horizontal (resp.
# vertical) twist.  Shared by the reducible engine and the numeric oracle.
HORIZONTAL_HAND = -1
VERTICAL_HAND = 1


def end_labels(cf: Sequence[int]) -> dict:
    """Strand and orientation at each end after all twists.

    The two strands are 'a' (through NW) and 'b'.  A label (strand, +1) means
    the outward orientation at that end agrees with the strand's seed
    orientation: outward at NW for a, outward at SW ([0] start, odd length)
    or NE ([inf] start, even length) for b.
    """
    if len(cf) % 2:
        ends = {"nw": ("a", 1), "ne": ("a", -1), "sw": ("b", 1), "se": ("b", -1)}
    else:
        ends = {"nw": ("a", 1), "sw": ("a", -1), "ne": ("b", 1), "se": ("b", -1)}
    horizontal = len(cf) % 2 == 1
    for k in cf:
        if k % 2:
            if horizontal:
                ends["ne"], ends["se"] = ends["se"], ends["ne"]
            else:
                ends["se"], ends["sw"] = ends["sw"], ends["se"]
        horizontal = not horizontal
    return ends


def generating_pair_sign(cf: Sequence[int]) -> int:
    """+1 if y is the seed orientation of strand b, -1 if it is reversed.

    y is oriented like the NE end when NE lies on strand b, and like the SW
    end otherwise.
    """
    ends = end_labels(cf)
    return ends["sw"][1] if ends["ne"][0] == "a" else ends["ne"][1]


class Parity(str, Enum):
    ODD = "odd"
    EVEN = "even"


@dataclass(frozen=True)
class RationalTangle:
    fraction: Fraction
    cf: tuple

    @classmethod
    def from_fraction(cls, f: Fraction | str | int, cf: Iterable[int] | None = None):
        if not isinstance(f, Fraction):
            f = parse_fraction(str(f))
        cf = tuple(cf) if cf is not None else cf_expand(f)
        if cf_value(cf) != f:
            raise InvalidFraction(f"continued fraction {list(cf)} does not evaluate to {f}")
        return cls(f, cf)

    @classmethod
    def from_cf(cls, cf: Iterable[int]):
        cf = tuple(cf)
        return cls(cf_value(cf), cf)

    @property
    def parity(self) -> Parity:
        return Parity.EVEN if self.fraction.p % 2 == 0 else Parity.ODD

    @property
    def is_odd(self) -> bool:
        return self.parity is Parity.ODD

    def __str__(self):
        return str(self.fraction)


def parse_fraction(text: str) -> Fraction:
    text = text.strip()
    try:
        if "/" in text:
            p, q = text.split("/")
            return Fraction(int(p), int(q))
        return Fraction(int(text))
    except ValueError as exc:
        raise InvalidFraction(f"cannot parse fraction {text!r}") from exc


class KnotClass(str, Enum):
    ODD = "OddKnot"
    EVEN = "EvenKnot"


@dataclass(frozen=True)
class MontesinosKnot:
    tangles: tuple
    parity_class: KnotClass

    @property
    def m(self) -> int:
        return len(self.tangles)

    def tangle(self, i: int) -> RationalTangle:
        """1-based cyclic access: tangle(m+1) is tangle(1)."""
        return self.tangles[(i - 1) % self.m]

    def __str__(self):
        return "M(" + ",".join(str(t.fraction) for t in self.tangles) + ")"


def knot_classify(fractions: Sequence[Fraction | RationalTangle]) -> MontesinosKnot:
    """Classify M(p1/q1,...,pm/qm) as odd or even and rotate an even
    numerator to the last slot.  Links are rejected."""
    tangles = []
    for f in fractions:
        if isinstance(f, RationalTangle):
            tangles.append(f)
        else:
            tangles.append(RationalTangle.from_fraction(f))
    m = len(tangles)
    if m == 0:
        raise InvalidFraction("a Montesinos knot needs at least one tangle")
    if m < 3:
        warnings.warn(f"m = {m} < 3: the diagram reduces to a rational link", stacklevel=2)
    evens = [i for i, t in enumerate(tangles) if not t.is_odd]
    if len(evens) > 1:
        raise NotAKnot(f"{len(evens)} even numerators: this is a link")
    if not evens:
        if m % 2 == 0:
            raise NotAKnot(f"all numerators odd with m = {m} even: this is a link")
        return MontesinosKnot(tuple(tangles), KnotClass.ODD)
    j = evens[0]
    rotated = tangles[j + 1:] + tangles[:j + 1]
    return MontesinosKnot(tuple(rotated), KnotClass.EVEN)
