import itertools
import warnings

import pytest
from hypothesis import given, strategies as st

from charvar.errors import DivisionByZeroInContinuedFraction, InvalidFraction, NotAKnot
from charvar.tangle import (Fraction, KnotClass, RationalTangle, cf_expand, cf_value,
                            end_labels, generating_pair_sign, knot_classify, parse_fraction)


@pytest.mark.parametrize("cf, value", [((3,), Fraction(3)), ((2, 2), Fraction(5, 2)),
                                       ((3, 2), Fraction(7, 3)), ((-2, 4), Fraction(7, 2))])
def test_cf_value(cf, value):
    assert cf_value(cf) == value


def test_cf_value_rejects_zero_intermediate():
    with pytest.raises(DivisionByZeroInContinuedFraction):
        cf_value((0, 1))
    with pytest.raises(InvalidFraction):
        cf_value((1, -1))


def test_fraction_normalization():
    assert Fraction(6, -4) == Fraction(-3, 2)
    with pytest.raises(InvalidFraction):
        Fraction(0, 1)
    assert parse_fraction(" -7/3 ") == Fraction(-7, 3)
    with pytest.raises(InvalidFraction):
        parse_fraction("7/x")


def test_expand_examples():
    assert cf_expand(Fraction(3)) == (3,)
    assert cf_value(cf_expand(Fraction(5, 2))) == Fraction(5, 2)


@given(st.integers(-60, 60), st.integers(1, 60))
def test_expand_round_trip(p, q):
    if p == 0:
        return
    f = Fraction(p, q)
    cf = cf_expand(f)
    assert cf_value(cf) == f
    assert 0 not in cf


def test_tangle_parity_and_explicit_cf():
    T = RationalTangle.from_fraction("7/2", [-2, 4])
    assert T.cf == (-2, 4) and T.is_odd
    assert not RationalTangle.from_fraction("8/3").is_odd
    assert RationalTangle.from_fraction("7/3").is_odd
    with pytest.raises(InvalidFraction):
        RationalTangle.from_fraction("7/2", [3, 2])


def test_end_labels_pair_strands():
    for cf in itertools.product([-3, -2, -1, 1, 2, 3], repeat=3):
        ends = end_labels(cf)
        strands = sorted(s for s, _ in ends.values())
        assert strands == ["a", "a", "b", "b"]
        # each strand enters once and leaves once
        for name in "ab":
            assert sorted(o for s, o in ends.values() if s == name) == [-1, 1]


def test_generating_pair_sign_examples():
    assert generating_pair_sign((3,)) == -1
    assert generating_pair_sign((2, 2)) == 1
    assert generating_pair_sign((2, 3)) == -1


def test_knot_classify():
    K = knot_classify([Fraction(-2), Fraction(3), Fraction(7)])
    assert K.parity_class is KnotClass.EVEN
    assert [t.fraction.p for t in K.tangles] == [3, 7, -2]
    assert knot_classify([Fraction(3), Fraction(5, 2), Fraction(7, 3)]).parity_class is KnotClass.ODD
    assert K.tangle(4) == K.tangle(1)
    with pytest.raises(NotAKnot):
        knot_classify([Fraction(3), Fraction(4), Fraction(4)])
    with pytest.raises(NotAKnot):
        knot_classify([Fraction(3)] * 4)


def test_short_knot_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        knot_classify([Fraction(3), Fraction(2)])
    assert caught
