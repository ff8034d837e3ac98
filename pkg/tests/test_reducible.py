import cmath

import pytest

from charvar.errors import DomainViolation
from charvar.oracle import reducible_boundary
from charvar.reducible import (KAPPA, U, riley_divisor, riley_even, riley_odd, theta_pair,
                               ut, ut_conj, ut_pow)
from charvar.ring import Polynomial, cheb_omega, mat2_pow_naive
from charvar.tangle import RationalTangle
from charvar.trace_engine import trace_triple

k = KAPPA


def T(cf):
    return RationalTangle.from_cf(cf)


def test_ut_power_examples():
    y = ut(1, 1)
    assert ut_pow(y, 1) == y
    assert ut_pow(y, 0) == ut(0, 0)
    for h in range(-3, 5):
        got = ut_pow(ut(2, k), h)
        assert got == ut(2 * h, cheb_omega(h, k ** 2 + k ** -2) * k)
        naive = mat2_pow_naive(ut(2, k).matrix(), h)
        assert got.matrix() == naive


def test_ut_conj_examples():
    assert ut_conj(ut(0, 0), ut(1, 1)) == ut(1, 1)
    assert ut_conj(ut(1, 0), ut(1, 1)) == ut(1, k ** 2)
    x, y = ut(2, k), ut(1, 0)
    m = x.matrix() * y.matrix() * x.matrix().inv()
    assert ut_conj(x, y).matrix() == m


def test_theta_three_twist():
    th = theta_pair(T((3,)))
    assert th.theta_ne == 2 * k ** -2 - 1
    assert th.theta_sw == 1
    assert th.at(-1).theta_ne == 2 * k ** 2 - 1


@pytest.mark.parametrize("cf", [(3,), (2, 2), (3, 2), (2, -3, 2), (4, 1, 3)])
def test_theta_against_numeric_propagation(cf):
    kappa = cmath.rect(1.07, 0.9)
    th = theta_pair(T(cf))
    quad = reducible_boundary(T(cf), kappa)
    assert abs(th.theta_ne.evaluate({"kappa": kappa}) - quad.ne.b) < 1e-10
    assert abs(th.theta_sw.evaluate({"kappa": kappa}) - quad.sw.inv().b) < 1e-10


def test_riley_trefoil_and_figure_eight():
    phi3 = riley_odd(T((3,))).body
    assert phi3 == k ** 2 + U - 1 + k ** -2
    assert phi3.subs({"u": Polynomial.const(0)}) == k ** 2 - 1 + k ** -2
    phi8 = riley_odd(T((2, 2))).body
    assert phi8.degree("u") == 2
    assert phi8.subs({"u": Polynomial.const(0)}) == -(k ** 2 - 3 + k ** -2)


def test_riley_factorization_identity():
    tang = T((3, 2))
    z = trace_triple(tang).z.subs({"t": k + k ** -1, "r": 2 - U})
    phi = riley_odd(tang).body
    assert z == riley_divisor(None) * phi * phi


def test_riley_even():
    tang = T((4,))
    assert riley_even(tang, 1).body == k ** 2 + U + k ** -2
    assert riley_even(tang, -1).body == U + 2
    assert riley_even(T((2,)), 1).body.degree("u") == 0
    for iota in (1, -1):
        z = trace_triple(tang).z.subs({"t": k + k ** -1,
                                        "r": U + k ** (1 + iota) + k ** (-1 - iota)})
        assert z == riley_divisor(iota) * riley_even(tang, iota).body ** 2


def test_riley_parity_errors():
    with pytest.raises(DomainViolation):
        riley_odd(T((4,)))
    with pytest.raises(DomainViolation):
        riley_even(T((3,)), 1)
    with pytest.raises(DomainViolation):
        riley_even(T((4,)), 0)
