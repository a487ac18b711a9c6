from math import factorial, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special
from spheremean.errors import DomainError
from spheremean.specfun import (
    bessel_j,
    bessel_j_derivative,
    bessel_zeros,
    clear_zero_cache,
    gamma_fn,
    normalized_j,
)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_gamma_integers(n):
    assert np.isclose(gamma_fn(n), factorial(n - 1), rtol=1e-14)


def test_gamma_half():
    assert np.isclose(gamma_fn(0.5), sqrt(pi), rtol=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, np.inf])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.5, 7.0])
def test_bessel_j_scipy(nu):
    x = np.linspace(0.0, 40.0, 201)
    assert np.allclose(bessel_j(nu, x), special.jv(nu, x), rtol=0.0, atol=1e-11)


def test_bessel_j_scalar():
    y = bessel_j(0.0, 2.0)
    assert np.isscalar(y) and np.isclose(y, special.jv(0.0, 2.0), atol=1e-14)


@pytest.mark.parametrize("nu", [1.0, 1.5, 3.0])
def test_recurrence(nu):
    x = np.linspace(0.5, 30.0, 60)
    lhs = bessel_j(nu - 1.0, x) + bessel_j(nu + 1.0, x)
    rhs = 2.0 * nu / x * bessel_j(nu, x)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_normalized_half_order():
    x = np.linspace(0.0, 20.0, 81)
    tr_val = np.full(x.shape, sqrt(2.0 / pi))
    tr_val[1:] *= np.sin(x[1:]) / x[1:]
    assert np.allclose(normalized_j(0.5, x), tr_val, atol=1e-13)


@pytest.mark.parametrize("nu", [0.0, 1.0, 2.5])
def test_normalized_at_zero(nu):
    assert np.isclose(normalized_j(nu, 0.0), 1.0 / (2.0**nu * gamma_fn(nu + 1.0)))


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 3.5])
def test_derivative(nu):
    x = np.linspace(0.1, 25.0, 100)
    assert np.allclose(bessel_j_derivative(nu, x), special.jvp(nu, x), atol=1e-11)


def test_derivative_at_zero():
    assert bessel_j_derivative(1.0, 0.0) == 0.5
    assert bessel_j_derivative(2.0, 0.0) == 0.0
    assert np.isinf(bessel_j_derivative(0.5, 0.0))


@pytest.mark.parametrize("nu", [-0.5, np.nan])
def test_order_domain(nu):
    with pytest.raises(DomainError):
        bessel_j(nu, 1.0)


def test_argument_domain():
    with pytest.raises(DomainError):
        bessel_j(0.0, [-1.0, 1.0])


@pytest.mark.parametrize("nu", [0, 1, 4])
def test_zeros_scipy(nu):
    zeros = bessel_zeros(nu, 10).as_array()
    assert np.allclose(zeros, special.jn_zeros(nu, 10), rtol=1e-12)


def test_zeros_half_order():
    zeros = bessel_zeros(0.5, 5).as_array()
    assert np.allclose(zeros, pi * np.arange(1, 6), rtol=1e-14)


@pytest.mark.parametrize("nu", [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 3.5, 8.0])
def test_zeros_residual(nu):
    zeros = bessel_zeros(nu, 20).as_array()
    assert np.all(np.diff(zeros) > 0.0) and zeros[0] > 0.0
    assert np.abs(bessel_j(nu, zeros)).max() < 1e-12


@pytest.mark.parametrize("nu", [0.0, 0.5, 2.0])
def test_zeros_interlace(nu):
    lower = bessel_zeros(nu, 15).as_array()
    upper = bessel_zeros(nu + 1.0, 15).as_array()
    assert np.all(lower < upper)
    assert np.all(upper[:-1] < lower[1:])


def test_zero_cache():
    clear_zero_cache()
    long = bessel_zeros(2.0, 12)
    short = bessel_zeros(2.0, 5)
    assert len(short) == 5 and short.zeros == long.zeros[:5]
    assert short[0] == long[0]


@pytest.mark.parametrize("count", [0, -3])
def test_zeros_count(count):
    with pytest.raises(DomainError):
        bessel_zeros(0.0, count)


@settings(max_examples=50, deadline=None, derandomize=True)
@given(
    nu=st.floats(min_value=0.0, max_value=10.0),
    x=st.floats(min_value=0.0, max_value=50.0),
)
def test_bessel_j_property(nu, x):
    assert abs(bessel_j(nu, x) - special.jv(nu, x)) < 1e-10
