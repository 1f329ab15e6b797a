"""Manufactured solutions, analytic tempered derivatives and source terms.

Tempered derivatives here are the variants the schemes approximate,

    DL u = e^{-lam x} 0D_x^alpha (e^{lam x} u) - lam^alpha u
    DR u = e^{lam x} xD_1^alpha (e^{-lam x} u) - lam^alpha u

with Riemann-Liouville derivatives on [0, 1].  Every manufactured solution is
separable, ``u(x, t) = T(t) e^{mu x} P(x)``, so the derivatives reduce to the
power series

    0D_x^alpha (e^{c x} x^m) = sum_n c^n Gamma(n+m+1) / (n! Gamma(n+m-alpha+1)) x^{n+m-alpha}.

Sources are built so that the exact solution satisfies the equation the
solver discretizes (see :func:`make_case`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ConvergenceError, DomainError
from .special import gamma_fn

_MAX_TERMS = 200


def series_left_derivative(lam, m, alpha, x, tol=1e-14, max_terms=_MAX_TERMS, return_terms=False):
    """``0D_x^alpha(e^{lam x} x^m)`` by its power series.

    Terms follow the ratio ``t_{n+1}/t_n = lam x (n+m+1) / ((n+1)(n+m-alpha+1))``
    and summation stops once every new term is below ``tol`` times the
    partial sum.  Raises :class:`ConvergenceError` if ``max_terms`` is hit.
    ``x`` may be a scalar or an array; with ``return_terms`` the number of
    terms used is returned as well.
    """
    if m - alpha + 1 <= 0:
        raise DomainError(f"series needs m > alpha - 1, got m={m}, alpha={alpha}")
    xa = np.asarray(x, dtype=float)
    term = gamma_fn(m + 1) / gamma_fn(m - alpha + 1) * xa ** (m - alpha)
    total = np.array(term, dtype=float)
    z = lam * xa
    n = 1
    if np.any(z != 0):
        while True:
            if n >= max_terms:
                raise ConvergenceError(f"power series did not reach tol={tol} in {max_terms} terms")
            term = term * z * (n + m) / (n * (n + m - alpha))
            total = total + term
            n += 1
            if np.all(np.abs(term) <= tol * np.abs(total)):
                break
    out = total if np.ndim(x) else float(total)
    return (out, n) if return_terms else out


def series_right_derivative(lam, m, alpha, x, tol=1e-14, max_terms=_MAX_TERMS, return_terms=False):
    """``xD_1^alpha(e^{-lam x} (1-x)^m)``, i.e. ``e^{-lam}`` times the left series at ``1 - x``."""
    res = series_left_derivative(lam, m, alpha, 1.0 - np.asarray(x, dtype=float), tol, max_terms, True)
    val = math.exp(-lam) * res[0]
    return (val, res[1]) if return_terms else val


def exact_left_derivative_power(alpha, lam, x):
    """``DL(e^{-lam x} x^{3+alpha}) = e^{-lam x} x^3 (Gamma(4+alpha)/6 - lam^alpha x^alpha)``."""
    x = np.asarray(x, dtype=float)
    return np.exp(-lam * x) * x**3 * (gamma_fn(4 + alpha) / 6 - lam**alpha * x**alpha)


def exact_right_derivative_power(alpha, lam, x):
    """Mirror of :func:`exact_left_derivative_power` for ``e^{lam x} (1-x)^{3+alpha}``."""
    y = 1.0 - np.asarray(x, dtype=float)
    return np.exp(lam * (1.0 - y)) * y**3 * (gamma_fn(4 + alpha) / 6 - lam**alpha * y**alpha)


@dataclass(frozen=True)
class ExpPoly:
    """``e^{mu x}`` times a generalized polynomial.

    ``left`` lists ``(coef, power)`` pairs in powers of x, ``right`` the same
    function in powers of (1 - x).  Either may be ``None`` when the function
    is only needed for one side; for integer powers :meth:`from_x` fills both.
    """

    mu: float
    left: tuple | None
    right: tuple | None

    @classmethod
    def from_x(cls, mu, coefs):
        """From ordinary polynomial coefficients ``coefs[k]`` of x^k."""
        c = np.asarray(coefs, dtype=float)
        q = _reverse(c)
        left = tuple((float(v), k) for k, v in enumerate(c) if v != 0)
        right = tuple((float(v), k) for k, v in enumerate(q) if abs(v) > 1e-15)
        return cls(float(mu), left, right)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        terms = self.left if self.left is not None else self.right
        base = x if self.left is not None else 1.0 - x
        return np.exp(self.mu * x) * sum(c * base**m for c, m in terms)

    def dx(self, x):
        x = np.asarray(x, dtype=float)
        if self.left is not None:
            p = sum(c * x**m for c, m in self.left)
            dp = sum(c * m * x ** (m - 1) for c, m in self.left if m != 0)
        else:
            y = 1.0 - x
            p = sum(c * y**m for c, m in self.right)
            dp = -sum(c * m * y ** (m - 1) for c, m in self.right if m != 0)
        return np.exp(self.mu * x) * (self.mu * p + dp)

    def tempered_left(self, alpha, lam, x, tol=1e-14):
        if self.left is None:
            raise DomainError("left derivative needs the x-power form")
        x = np.asarray(x, dtype=float)
        s = sum(c * series_left_derivative(lam + self.mu, m, alpha, x, tol) for c, m in self.left)
        return np.exp(-lam * x) * s - lam**alpha * self(x)

    def tempered_right(self, alpha, lam, x, tol=1e-14):
        if self.right is None:
            raise DomainError("right derivative needs the (1-x)-power form")
        x = np.asarray(x, dtype=float)
        nu = lam - self.mu
        s = sum(c * series_left_derivative(nu, m, alpha, 1.0 - x, tol) for c, m in self.right)
        return np.exp(lam * x + self.mu - lam) * s - lam**alpha * self(x)


def _reverse(c):
    # coefficients of Q with P(x) = Q(1 - x)
    q = np.zeros(1)
    shift = np.array([1.0, -1.0])  # x = 1 - y
    power = np.ones(1)
    for ck in c:
        q = npoly.polyadd(q, ck * power)
        power = npoly.polymul(power, shift)
    return q


@dataclass
class ManufacturedCase:
    """A named test problem with exact solution and consistent source.

    ``kind`` is ``"derivative"``, ``"diffusion"`` or ``"black-scholes"``.
    For derivative cases ``target(x)`` is the exact tempered derivative of
    ``exact(x, 0)``.  ``norm`` names how errors are aggregated (see
    :mod:`tempered_wsgd.report`).
    """

    name: str
    kind: str
    alpha: float
    params: dict
    exact: Callable
    source: Callable | None
    reference_table: str | None
    norm: str
    target: Callable | None = None
    profile: ExpPoly | None = field(default=None, repr=False)

    def residual(self, x, t):
        """Equation residual of the exact solution, with derivatives from the series oracle."""
        if self.source is None:
            raise DomainError(f"{self.name} is a derivative case without an equation")
        x = np.asarray(x, dtype=float)
        p = self.params
        u = self.profile
        tf, dtf = _time_factor(self.kind, p.get("T", 1.0))
        left = u.tempered_left(self.alpha, p["lambda_l"], x) if p.get("c_l", 0) else 0.0
        right = u.tempered_right(self.alpha, p["lambda_r"], x) if p.get("c_r", 0) else 0.0
        if self.kind == "diffusion":
            lhs = dtf(t) * u(x) - tf(t) * (p["c_l"] * left + p["c_r"] * right)
        else:
            lhs = tf(t) * (p["a"] * u.dx(x) + p["c_l"] * left + p["c_r"] * right - p["p"] * u(x)) + dtf(t) * u(x)
        return lhs - self.source(x, t)


def _time_factor(kind, T):
    if kind == "diffusion":
        return (lambda t: math.exp(-t)), (lambda t: -math.exp(-t))
    return (lambda t: math.exp(T - t)), (lambda t: -math.exp(T - t))


class _CachedSpace:
    """Spatial part of a separable source, cached per grid."""

    def __init__(self, fn):
        self.fn = fn
        self._cache = {}

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        key = (x.shape, float(x.flat[0]), float(x.flat[-1])) if x.size else (x.shape,)
        hit = self._cache.get(key)
        if hit is None or not np.array_equal(hit[0], x):
            hit = (x.copy(), np.asarray(self.fn(x), dtype=float))
            hit[1].setflags(write=False)
            self._cache[key] = hit
        return hit[1]


CASES = ("deriv-left", "deriv-right", "diff-left", "diff-right", "diff-two-sided", "bs-left", "bs-two-sided")

_DEFAULTS = {
    "deriv-left": dict(alpha=0.6, lam=1.0),
    "deriv-right": dict(alpha=0.6, lam=1.0),
    "diff-left": dict(alpha=1.2, lam=4.0),
    "diff-right": dict(alpha=1.8, lam=4.0),
    "diff-two-sided": dict(alpha=1.5, lam=0.5, c_l=0.5, c_r=0.5),
    "bs-left": dict(alpha=1.6, lam=1.0, sigma=0.25, r=0.05, T=1.0),
    "bs-two-sided": dict(alpha=1.8, lambda_l=0.5, lambda_r=1.0, a=-0.5, b=1.0, d=1.0, p=1.0, T=1.0),
}

_TABLES = {
    "deriv-left": None,
    "deriv-right": None,
    "diff-left": "table5",
    "diff-right": "table7",
    "diff-two-sided": "table9",
    "bs-left": "table11",
    "bs-two-sided": "table12",
}


def make_case(name: str, **overrides) -> ManufacturedCase:
    """Build a named manufactured case; keyword arguments override defaults.

    Cases and exact solutions:

    * ``deriv-left``: ``e^{-lam x} x^{3+alpha}``; ``deriv-right``: ``e^{lam x} (1-x)^{3+alpha}``.
    * ``diff-left`` / ``diff-right``: the same profiles times ``e^{-t}``.
    * ``diff-two-sided``: ``e^{-t} x^3 (1-x)^3``.
    * ``bs-left``: ``e^{T-t} e^{-lam x} x^3 (1-x)`` with b = -sigma^alpha / (2 cos(alpha pi / 2)),
      a = r - b, p = r.
    * ``bs-two-sided``: ``e^{T-t} x^3 (1-x)^3``.

    Diffusion sources satisfy ``u_t = c_l DL u + c_r DR u + f``; Black-Scholes
    sources satisfy ``u_t + a u_x + b DL u + d DR u - p u = f``.
    """
    if name not in _DEFAULTS:
        raise DomainError(f"unknown case {name!r}; expected one of {', '.join(CASES)}")
    cfg = dict(_DEFAULTS[name])
    unknown = set(overrides) - set(cfg) - {"lambda_l", "lambda_r"}
    if unknown:
        raise DomainError(f"unknown parameters for {name}: {sorted(unknown)}")
    cfg.update(overrides)
    alpha = float(cfg["alpha"])
    table = _TABLES[name]

    if name.startswith("deriv"):
        lam = float(cfg["lam"])
        if name == "deriv-left":
            prof = ExpPoly(-lam, ((1.0, 3.0 + alpha),), None)
            target = lambda x: exact_left_derivative_power(alpha, lam, x)  # noqa: E731
        else:
            prof = ExpPoly(lam, None, ((1.0, 3.0 + alpha),))
            target = lambda x: exact_right_derivative_power(alpha, lam, x)  # noqa: E731
        params = dict(lambda_l=lam, lambda_r=lam)
        return ManufacturedCase(name, "derivative", alpha, params, lambda x, t=0.0: prof(x), None, table, "rms", target, prof)

    if name.startswith("diff"):
        if name == "diff-two-sided":
            lam_l = lam_r = float(cfg["lam"])
            c_l, c_r = float(cfg["c_l"]), float(cfg["c_r"])
            prof = ExpPoly.from_x(0.0, [0, 0, 0, 1, -3, 3, -1])
        else:
            lam_l = lam_r = float(cfg["lam"])
            if name == "diff-left":
                c_l, c_r = 1.0, 0.0
                prof = ExpPoly(-lam_l, ((1.0, 3.0 + alpha),), None)
            else:
                c_l, c_r = 0.0, 1.0
                prof = ExpPoly(lam_r, None, ((1.0, 3.0 + alpha),))
        lam_l = float(cfg.get("lambda_l", lam_l))
        lam_r = float(cfg.get("lambda_r", lam_r))
        params = dict(lambda_l=lam_l, lambda_r=lam_r, c_l=c_l, c_r=c_r, T=1.0)

        def space(x):
            out = prof(x)
            if c_l:
                out = out + c_l * prof.tempered_left(alpha, lam_l, x)
            if c_r:
                out = out + c_r * prof.tempered_right(alpha, lam_r, x)
            return -out

        cached = _CachedSpace(space)
        return ManufacturedCase(
            name,
            "diffusion",
            alpha,
            params,
            lambda x, t: math.exp(-t) * prof(x),
            lambda x, t: math.exp(-t) * cached(x),
            table,
            "h",
            None,
            prof,
        )

    T = float(cfg["T"])
    if name == "bs-left":
        lam = float(cfg.get("lambda_l", cfg["lam"]))
        sigma, r = float(cfg["sigma"]), float(cfg["r"])
        b = -0.5 * sigma**alpha / math.cos(alpha * math.pi / 2)
        params = dict(lambda_l=lam, lambda_r=lam, a=r - b, c_l=b, c_r=0.0, p=r, T=T)
        prof = ExpPoly.from_x(-lam, [0, 0, 0, 1, -1])
    else:
        params = dict(
            lambda_l=float(cfg["lambda_l"]),
            lambda_r=float(cfg["lambda_r"]),
            a=float(cfg["a"]),
            c_l=float(cfg["b"]),
            c_r=float(cfg["d"]),
            p=float(cfg["p"]),
            T=T,
        )
        prof = ExpPoly.from_x(0.0, [0, 0, 0, 1, -3, 3, -1])
    pr = params

    def space(x):
        out = pr["a"] * prof.dx(x) - (1.0 + pr["p"]) * prof(x)
        if pr["c_l"]:
            out = out + pr["c_l"] * prof.tempered_left(alpha, pr["lambda_l"], x)
        if pr["c_r"]:
            out = out + pr["c_r"] * prof.tempered_right(alpha, pr["lambda_r"], x)
        return out

    cached = _CachedSpace(space)
    return ManufacturedCase(
        name,
        "black-scholes",
        alpha,
        params,
        lambda x, t: math.exp(T - t) * prof(x),
        lambda x, t: math.exp(T - t) * cached(x),
        table,
        "h",
        None,
        prof,
    )


def printed_left_source(alpha, lam, x, t):
    """Source of the left-sided diffusion example as usually printed.

    It is written with the untempered-shift derivative and so lacks the
    ``lam^alpha u`` term; ``make_case("diff-left").source`` equals this plus
    ``lam^alpha u``.
    """
    x = np.asarray(x, dtype=float)
    return -np.exp(-lam * x - t) * (x ** (3 + alpha) + gamma_fn(4 + alpha) / 6 * x**3)
