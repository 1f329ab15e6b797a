import math

import mpmath
import numpy as np
import pytest

from tempered_wsgd.errors import ConvergenceError, DomainError
from tempered_wsgd.mms import (
    CASES,
    ExpPoly,
    exact_left_derivative_power,
    exact_right_derivative_power,
    make_case,
    printed_left_source,
    series_left_derivative,
    series_right_derivative,
)
from tempered_wsgd.special import gamma_fn


def rl_left(f, alpha, x):
    mpmath.mp.dps = 30
    return float(mpmath.differint(f, x, alpha, 0))


def test_closed_form_examples():
    assert exact_left_derivative_power(1.3, 2.0, 0.0) == 0.0
    assert exact_left_derivative_power(1.3, 0.0, 1.0) == pytest.approx(gamma_fn(5.3) / 6, rel=1e-15)
    assert exact_right_derivative_power(1.3, 2.0, 1.0) == 0.0


def test_closed_form_against_series():
    alpha, lam, x = 0.6, 3.0, 0.5
    series = math.exp(-lam * x) * series_left_derivative(0.0, 3 + alpha, alpha, x)
    expected = series - lam**alpha * math.exp(-lam * x) * x ** (3 + alpha)
    assert exact_left_derivative_power(alpha, lam, x) == pytest.approx(expected, rel=1e-10)


def test_closed_form_random(rng):
    for _ in range(50):
        a, lam, x = rng.uniform(0.1, 1.9), rng.uniform(0, 5), rng.uniform(0.05, 1)
        prof = ExpPoly(-lam, ((1.0, 3.0 + a),), None)
        assert prof.tempered_left(a, lam, x) == pytest.approx(exact_left_derivative_power(a, lam, x), rel=1e-9, abs=1e-12)
        rprof = ExpPoly(lam, None, ((1.0, 3.0 + a),))
        assert rprof.tempered_right(a, lam, 1 - x) == pytest.approx(
            exact_right_derivative_power(a, lam, 1 - x), rel=1e-9, abs=1e-12
        )


def test_series_single_term_at_zero_rate():
    v, n = series_left_derivative(0.0, 3, 1.4, 0.7, return_terms=True)
    assert n == 1
    assert v == pytest.approx(gamma_fn(4) / gamma_fn(4 - 1.4) * 0.7 ** (3 - 1.4), rel=1e-15)


def test_series_first_derivative_limit():
    lam, x = 0.5, 0.8
    exact = math.exp(lam * x) * (lam * x**3 + 3 * x**2)
    assert series_left_derivative(lam, 3, 1.0, x) == pytest.approx(exact, rel=1e-8)


def test_series_term_count():
    _, n = series_left_derivative(0.5, 3, 1.5, 0.5, return_terms=True)
    assert n <= 40


def test_series_cap_and_domain():
    for lam in (-5.0, 5.0):
        series_left_derivative(lam, 3, 1.5, 1.0)
    with pytest.raises(ConvergenceError):
        series_left_derivative(5.0, 3, 1.5, 1.0, max_terms=5)
    with pytest.raises(DomainError):
        series_left_derivative(1.0, 0, 1.5, 0.5)


@pytest.mark.parametrize("lam,m,alpha,x", [(0.5, 3, 1.5, 0.5), (-2.0, 4, 1.8, 0.9), (1.0, 3.6, 0.6, 0.3)])
def test_series_against_mpmath_differint(lam, m, alpha, x):
    ref = rl_left(lambda s: mpmath.exp(lam * s) * s**m, alpha, x)
    assert series_left_derivative(lam, m, alpha, x) == pytest.approx(ref, rel=1e-12)


def test_right_series_against_mpmath():
    # xD_1^alpha g(x) = 0D_y^alpha g(1 - y) at y = 1 - x
    lam, m, alpha, x = 1.5, 3, 1.3, 0.35
    ref = rl_left(lambda y: mpmath.exp(-lam * (1 - y)) * y**m, alpha, 1 - x)
    assert series_right_derivative(lam, m, alpha, x) == pytest.approx(ref, rel=1e-12)


def test_exppoly_forms_agree():
    p = ExpPoly.from_x(-0.7, [0, 0, 0, 1, -3, 3, -1])
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(p(x), np.exp(-0.7 * x) * x**3 * (1 - x) ** 3, atol=1e-16)
    q = ExpPoly(-0.7, None, p.right)
    np.testing.assert_allclose(q(x), p(x), atol=1e-15)
    np.testing.assert_allclose(q.dx(x), p.dx(x), atol=1e-13)
    d = np.exp(-0.7 * x) * (-0.7 * x**3 * (1 - x) ** 3 + 3 * x**2 * (1 - x) ** 3 - 3 * x**3 * (1 - x) ** 2)
    np.testing.assert_allclose(p.dx(x), d, atol=1e-14)


def test_tempered_two_sided_against_mpmath():
    alpha, lam, x0 = 1.5, 0.5, 0.4
    p = ExpPoly.from_x(0.0, [0, 0, 0, 1, -3, 3, -1])
    u = lambda s: s**3 * (1 - s) ** 3  # noqa: E731
    left = math.exp(-lam * x0) * rl_left(lambda s: mpmath.exp(lam * s) * u(s), alpha, x0)
    assert p.tempered_left(alpha, lam, x0) == pytest.approx(left - lam**alpha * u(x0), rel=1e-11)
    right = math.exp(lam * x0) * rl_left(lambda y: mpmath.exp(-lam * (1 - y)) * u(1 - y), alpha, 1 - x0)
    assert p.tempered_right(alpha, lam, x0) == pytest.approx(right - lam**alpha * u(x0), rel=1e-11)


@pytest.mark.parametrize("name", [c for c in CASES if not c.startswith("deriv")])
def test_residual_vanishes(name):
    case = make_case(name)
    x = np.linspace(0, 1, 19)[1:-1]
    for t in (0.0, 0.3, 1.0):
        assert np.abs(case.residual(x, t)).max() < 1e-8


def test_case_values():
    assert make_case("diff-left").exact(1.0, 0.0) == pytest.approx(math.exp(-4))
    bs = make_case("bs-left")
    x = np.linspace(0, 1, 7)
    np.testing.assert_allclose(bs.exact(x, bs.params["T"]), np.exp(-x) * x**3 * (1 - x), atol=1e-16)
    two = make_case("bs-two-sided")
    np.testing.assert_allclose(two.exact(x, 1.0), x**3 * (1 - x) ** 3, atol=1e-16)
    assert make_case("diff-two-sided").reference_table == "table9"


def test_left_source_is_printed_plus_tempering_shift():
    case = make_case("diff-left", alpha=1.2, lam=4.0)
    x = np.linspace(0.05, 0.95, 7)
    u = case.exact(x, 0.2)
    np.testing.assert_allclose(case.source(x, 0.2), printed_left_source(1.2, 4.0, x, 0.2) + 4.0**1.2 * u, rtol=1e-12)


def test_source_cache_is_safe():
    case = make_case("diff-two-sided")
    x1 = np.linspace(0, 1, 9)
    x2 = x1.copy()
    x2[4] = 0.51
    a = case.source(x1, 0.0).copy()
    b = case.source(x2, 0.0)
    assert a[4] != b[4]
    np.testing.assert_array_equal(case.source(x1, 0.0), a)


def test_unknown_case_and_params():
    with pytest.raises(DomainError):
        make_case("diff-middle")
    with pytest.raises(DomainError):
        make_case("diff-left", sigma=1.0)
    with pytest.raises(DomainError):
        make_case("deriv-left").residual(0.5, 0.0)
