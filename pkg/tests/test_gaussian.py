import pytest
from hypothesis import given
from hypothesis import strategies as st

from cdalattice.gaussian import I, ONE, UNITS, ZERO, GaussianInt

ints = st.integers(min_value=-10 ** 30, max_value=10 ** 30)
gauss = st.builds(GaussianInt, ints, ints)


@given(gauss, gauss, gauss)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a
    assert a + ZERO == a
    assert a * ONE == a
    assert a - a == ZERO


@given(gauss, gauss)
def test_norm_multiplicative(a, b):
    assert (a * b).norm() == a.norm() * b.norm()
    assert a.norm() >= 0
    assert (a.norm() == 0) == (a == ZERO)


@given(gauss, gauss)
def test_exact_division(a, b):
    if b:
        assert (a * b).exact_div(b) == a
        assert b.divides(a * b)


def test_units():
    assert set(UNITS) == {ONE, -ONE, I, -I}
    assert all(u.is_unit() for u in UNITS)
    assert not GaussianInt(1, 1).is_unit()
    assert I * I == -ONE


def test_coerce_and_conjugate():
    assert GaussianInt.coerce(3) == GaussianInt(3, 0)
    assert GaussianInt.coerce((2, -5)) == GaussianInt(2, -5)
    assert GaussianInt(2, -5).conjugate() == GaussianInt(2, 5)
    assert GaussianInt(1, 1) * GaussianInt(1, -1) == GaussianInt(2, 0)


def test_nondivisible():
    assert not GaussianInt(1, 1).divides(GaussianInt(1, 0))
    with pytest.raises(ValueError):
        GaussianInt(1, 0).exact_div(GaussianInt(1, 1))


def test_immutable():
    g = GaussianInt(1, 2)
    with pytest.raises(AttributeError):
        g.re = 5
