import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tempered_wsgd.errors import DomainError
from tempered_wsgd.harness import derivative_errors
from tempered_wsgd.mms import make_case
from tempered_wsgd.report import observed_orders, rms
from tempered_wsgd.special import gruenwald_weights
from tempered_wsgd.tempered_ops import GridFn, apply_left, apply_right, build_weights, left_all, right_all
from tempered_wsgd.wsgd_coeffs import gamma_order2, gamma_order3


def test_untempered_phi_zero():
    for order in (2, 3):
        assert build_weights(order, 1.5, 0.0, 0.1, 0.0, 10).phi == 0.0


def test_order2_first_weights():
    alpha, lam, h, g3 = 1.4, 2.0, 0.05, 0.02
    w = build_weights(2, alpha, lam, h, g3, 10)
    f = gamma_order2(alpha, g3)
    assert w.g[0] == pytest.approx(f.gammas[0] * math.exp(h * lam), rel=1e-15)
    assert w.g[1] == pytest.approx(f.gammas[0] * -alpha + f.gammas[1], rel=1e-14)


def test_order3_weight_formula():
    alpha, lam, h, g4 = 1.5, 1.0, 0.1, -0.03
    w = build_weights(3, alpha, lam, h, g4, 12)
    om = gruenwald_weights(alpha, 12).omega
    y1, y2, y3, y4 = gamma_order3(alpha, g4).gammas
    k = 5
    expected = (y1 * om[k] + y2 * om[k - 1] + y3 * om[k - 2] + y4 * om[k - 3]) * math.exp(-(k - 1) * h * lam)
    assert w.g[5] == pytest.approx(expected, rel=1e-14)
    assert w.g[2] == pytest.approx((y1 * om[2] + y2 * om[1] + y3) * math.exp(-h * lam), rel=1e-14)
    phi = sum(y * math.exp(p * h * lam) for y, p in zip((y1, y2, y3, y4), (1, 0, -1, -2)))
    assert w.phi == pytest.approx(phi * (1 - math.exp(-h * lam)) ** alpha, rel=1e-14)
    assert w.n == 12
    assert not w.g.flags.writeable


def test_zero_function():
    w = build_weights(3, 1.5, 1.0, 0.1, -0.03, 11)
    u = GridFn(0.0, 1.0, np.zeros(11))
    assert apply_left(w, u, 4) == 0.0
    assert apply_right(w, u, 4) == 0.0


def test_pointwise_matches_vectorized(rng):
    w = build_weights(3, 1.7, 0.8, 1 / 16, -0.01, 17)
    u = GridFn(0.0, 1.0, rng.normal(size=17))
    np.testing.assert_allclose(left_all(w, u), [apply_left(w, u, i) for i in range(1, 16)], rtol=1e-13)
    np.testing.assert_allclose(right_all(w, u), [apply_right(w, u, i) for i in range(1, 16)], rtol=1e-13)


def test_constant_right_mirrors_left():
    w = build_weights(2, 1.3, 0.0, 0.1, 0.0, 11)
    u = GridFn(0.0, 1.0, np.full(11, 2.5))
    for i in range(1, 10):
        assert apply_right(w, u, i) == pytest.approx(apply_left(w, u, 10 - i), rel=1e-14)
        assert apply_right(w, u, i) == pytest.approx(2.5 * w.g[: 12 - i].sum() / 0.1**1.3, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3), st.floats(0.1, 1.95), st.floats(0.0, 5.0), st.integers(4, 40), st.integers(0, 2**31))
def test_reflection_duality(order, alpha, lam, M, seed):
    h = 1.0 / M
    w = build_weights(order, alpha, lam, h, -0.01, M + 1)
    u = GridFn(0.0, 1.0, np.random.default_rng(seed).normal(size=M + 1))
    np.testing.assert_array_equal(right_all(w, u), left_all(w, u.reflected())[::-1])


def test_index_and_grid_errors():
    w = build_weights(2, 1.5, 1.0, 0.1, 0.0, 11)
    u = GridFn(0.0, 1.0, np.ones(11))
    for i in (0, 10):
        with pytest.raises(IndexError):
            apply_left(w, u, i)
    with pytest.raises(DomainError):
        apply_left(w, GridFn(0.0, 2.0, np.ones(11)), 3)
    with pytest.raises(DomainError):
        left_all(build_weights(2, 1.5, 1.0, 0.1, 0.0, 5), u)
    with pytest.raises(DomainError):
        build_weights(2, 1.5, -1.0, 0.1, 0.0, 5)
    with pytest.raises(DomainError):
        build_weights(2, 2.0, 1.0, 0.1, 0.0, 5)
    with pytest.raises(DomainError):
        GridFn(0.0, 1.0, np.ones(1))


def test_gridfn_sample():
    u = GridFn.sample(np.sin, 0.0, 1.0, 8)
    assert u.M == 8 and u.h == 0.125
    np.testing.assert_allclose(u.values, np.sin(np.linspace(0, 1, 9)))


@pytest.mark.parametrize(
    "name,order,fp,alpha,lam,M,expected",
    [
        ("deriv-left", 2, 0.001, 0.6, 1.0, 20, 1.21e-3),
        ("deriv-left", 3, 0.001, 1.6, 0.0, 160, 1.50e-6),
        ("deriv-right", 2, -0.001, 0.6, 1.0, 20, 3.13e-3),
        ("deriv-right", 3, -0.001, 1.6, 3.0, 40, 7.34e-4),
    ],
)
def test_reference_errors(name, order, fp, alpha, lam, M, expected):
    e = derivative_errors(make_case(name, alpha=alpha, lam=lam), order, fp, M)
    assert rms(e, M + 1) == pytest.approx(expected, rel=0.05)


@pytest.mark.parametrize("name", ["deriv-left", "deriv-right"])
@pytest.mark.parametrize("order", [2, 3])
def test_observed_order(name, order):
    case = make_case(name, alpha=1.4, lam=2.0)
    Ms = [40, 80, 160]
    errs = [rms(derivative_errors(case, order, 0.0, M), M + 1) for M in Ms]
    for o in observed_orders([1 / M for M in Ms], errs)[1:]:
        assert abs(o - order) < 0.15


def test_weight_signs_in_window(rng):
    from conftest import admissible_gamma4

    for _ in range(200):
        alpha = rng.uniform(1.27, 1.70)
        g4 = admissible_gamma4(rng, alpha)
        w = build_weights(3, alpha, rng.uniform(0, 5), 0.01, g4, 300)
        assert w.g[1] <= 0 and w.g[0] + w.g[2] >= 0 and np.all(w.g[3:] >= 0)
