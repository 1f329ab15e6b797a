import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tempered_wsgd.errors import DomainError, PoleError
from tempered_wsgd.special import gamma_fn, gruenwald_weights, rgamma


def test_first_weights():
    assert gruenwald_weights(1.6, 1).omega.tolist() == [1.0, -1.6]


def test_integer_order_is_first_difference():
    np.testing.assert_array_equal(gruenwald_weights(1.0, 3).omega, [1.0, -1.0, 0.0, 0.0])


def test_second_weight_matches_binomial():
    a = 0.6
    assert gruenwald_weights(a, 2).omega[2] == pytest.approx(a * (a - 1) / 2, rel=1e-15)
    assert gruenwald_weights(a, 2).omega[2] == pytest.approx(-0.12, rel=1e-14)


def test_weights_read_only():
    w = gruenwald_weights(1.5, 4)
    with pytest.raises(ValueError):
        w.omega[0] = 2.0
    assert len(w) == 5


@pytest.mark.parametrize("alpha,n", [(0.0, 3), (-0.5, 3), (2.01, 3), (1.5, -1)])
def test_domain(alpha, n):
    with pytest.raises(DomainError):
        gruenwald_weights(alpha, n)


def test_alpha_two_is_second_difference():
    np.testing.assert_allclose(gruenwald_weights(2.0, 4).omega, [1, -2, 1, 0, 0], atol=0)


def test_recurrence_against_product(rng):
    for alpha in rng.uniform(0.01, 1.99, 20):
        om = gruenwald_weights(alpha, 100).omega
        prod = np.cumprod(np.concatenate(([1.0], 1 - (alpha + 1) / np.arange(1, 101))))
        np.testing.assert_allclose(om, prod, rtol=1e-13, atol=0)


def test_against_mpmath_binomial():
    a = 1.37
    om = gruenwald_weights(a, 30).omega
    ref = [float((-1) ** k * mpmath.binomial(a, k)) for k in range(31)]
    np.testing.assert_allclose(om, ref, rtol=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.001, 1.999))
def test_sign_pattern_and_monotone_tail(alpha):
    om = gruenwald_weights(alpha, 200).omega
    assert om[1] < 0
    assert np.all(om[2:] >= 0)
    assert np.all(np.diff(om[2:]) <= 0)
    sums = np.abs(np.cumsum(om))[2:]
    assert np.all(np.diff(sums) < 0)


def test_gamma_examples():
    assert gamma_fn(5) == 24.0
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma_fn(5.6) == pytest.approx(float(mpmath.gamma(5.6)), rel=1e-14)


def test_gamma_negative_and_poles():
    assert gamma_fn(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-14)
    for x in (0, -1, -7):
        with pytest.raises(PoleError):
            gamma_fn(x)
    assert issubclass(PoleError, DomainError)
    assert rgamma(-3) == 0.0
    assert rgamma(4) == pytest.approx(1 / 6)


def test_gamma_accuracy_on_range():
    for x in np.linspace(0.05, 29.9, 97):
        assert gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-12)


def test_gamma_functional_equation():
    for x in np.linspace(0.5, 20, 80):
        assert gamma_fn(x + 1) == pytest.approx(x * gamma_fn(x), rel=1e-12)
