import math

import numpy as np
import pytest

from tempered_wsgd.bs_solver import BSProblem, convection_matrix, convection_stencil, solve_bs
from tempered_wsgd.diffusion_solver import DiffusionProblem, solve
from tempered_wsgd.errors import DomainError
from tempered_wsgd.mms import make_case
from tempered_wsgd.report import l2_h
from tempered_wsgd.tempered_ops import GridFn


def bs_error(case, M, N, fp, boundary="one-sided"):
    res = solve_bs(BSProblem.from_case(case), M, N, fp, boundary=boundary)
    return l2_h((res.grid.values - case.exact(res.grid.x, 0.0))[1:-1], res.h)


@pytest.mark.parametrize("boundary", ["one-sided", "zero"])
def test_stencil_exact_on_linear(boundary):
    u = GridFn.sample(lambda x: x, 0.0, 1.0, 10)
    lo = 2 if boundary == "zero" else 1
    for i in range(lo, 10 - lo + 1):
        assert convection_stencil(u, i, boundary) == pytest.approx(1.0, abs=1e-12)


def test_stencil_exact_on_quartic():
    u = GridFn.sample(lambda x: x**4 - 2 * x**3 + x, 0.0, 1.0, 12)
    for i in range(1, 12):
        x = i / 12
        assert convection_stencil(u, i) == pytest.approx(4 * x**3 - 6 * x**2 + 1, abs=1e-11)


def test_stencil_sine_accuracy():
    u = GridFn.sample(np.sin, 0.0, 1.0, 100)
    err = max(abs(convection_stencil(u, i) - math.cos(i / 100)) for i in range(1, 100))
    assert err < 1e-9


@pytest.mark.parametrize("boundary", ["one-sided", "zero"])
def test_matrix_matches_stencil(boundary, rng):
    M = 9
    v = np.concatenate(([0.0], rng.normal(size=M - 1), [0.0]))
    u = GridFn(0.0, 1.0, v)
    C = convection_matrix(M, 1 / M, boundary)
    np.testing.assert_allclose(C @ v[1:-1], [convection_stencil(u, i, boundary) for i in range(1, M)], rtol=1e-12)


def test_stencil_errors():
    u = GridFn(0.0, 1.0, np.zeros(11))
    with pytest.raises(IndexError):
        convection_stencil(u, 0)
    with pytest.raises(DomainError):
        convection_stencil(u, 3, "ghost")
    with pytest.raises(DomainError):
        convection_matrix(5, 0.2)


def test_zero_payoff_zero_solution():
    prob = BSProblem(1.6, 0.3, 0.5, 0.2, 0.05, 1.0, terminal=np.zeros_like)
    res = solve_bs(prob, 16, 10, -0.5, keep_history=True)
    assert np.all(res.grid.values == 0.0) and len(res.history) == 11


def test_matches_diffusion_on_reversed_time():
    case = make_case("diff-left", alpha=1.5, lam=1.0)
    b = 0.8
    T = 1.0
    payoff = lambda x: np.sin(np.pi * x) ** 3  # noqa: E731
    f = lambda x, t: np.cos(3 * x) * (1 + t)  # noqa: E731
    bs = BSProblem(1.5, 0.0, b, 0.0, 0.0, 1.0, terminal=payoff, source=f, T=T)
    diff = DiffusionProblem(1.5, b, 0.0, 1.0, initial=payoff, source=lambda x, s: -f(x, T - s), T=T)
    M, N = 32, 40
    r1 = solve_bs(bs, M, N, -0.03)
    r2 = solve(diff, 3, M, N, -0.03)
    np.testing.assert_allclose(r1.grid.values, r2.grid.values, atol=1e-10)
    assert case.kind == "diffusion"


def test_table11_cell():
    assert bs_error(make_case("bs-left"), 128, 10_000, -0.5) == pytest.approx(1.38e-6, rel=0.05)


def test_table12_cell():
    assert bs_error(make_case("bs-two-sided"), 128, 10_000, 0.0) == pytest.approx(4.74e-7, rel=0.15)


def test_one_sided_rows_beat_zero_extension():
    case = make_case("bs-left")
    e_one = bs_error(case, 32, 500, -0.5)
    e_zero = bs_error(case, 32, 500, -0.5, "zero")
    assert e_one < e_zero


def test_problem_validation():
    pay = np.zeros_like
    with pytest.raises(DomainError):
        BSProblem(1.6, 0.0, -1.0, 0.0, 0.0, 1.0, terminal=pay)
    with pytest.raises(DomainError):
        BSProblem(1.6, 0.0, 0.0, 0.0, 0.0, 1.0, terminal=pay)
    with pytest.raises(DomainError):
        BSProblem(2.4, 0.0, 1.0, 0.0, 0.0, 1.0, terminal=pay)
    with pytest.raises(DomainError):
        BSProblem(1.6, 0.0, 1.0, 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        BSProblem.from_case(make_case("diff-left"))
    with pytest.raises(DomainError):
        solve_bs(BSProblem(1.6, 0.0, 1.0, 0.0, 0.0, 1.0, terminal=pay), 16, 0, 0.0)
