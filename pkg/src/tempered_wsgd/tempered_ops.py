"""Tempered-WSGD weights and the left/right tempered fractional operators.

For a family (p_j, gamma_j) with integer shifts the weights are

    g_k = exp(-(k-1) h lam) * sum_j gamma_j omega_{k-1+p_j}

and the drift correction is ``phi = sum_j gamma_j exp(p_j h lam) (1 - exp(-h lam))^alpha``.
The left operator at node i is ``h^-alpha (sum_k g_k u_{i-k+1} - phi u_i)``;
the right operator is its mirror image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError
from .special import gruenwald_weights
from .wsgd_coeffs import GammaFamily, family


@dataclass(frozen=True)
class OperatorWeights:
    """Weights ``g[0..n]`` and drift correction ``phi`` for one operator choice."""

    order: int
    alpha: float
    lam: float
    h: float
    g: np.ndarray = field(repr=False)
    phi: float
    family: GammaFamily

    @property
    def n(self) -> int:
        return self.g.shape[0] - 1


@dataclass(frozen=True)
class GridFn:
    """Samples ``values[i] = u(a + i h)``, i = 0..M, on a uniform grid of [a, b]."""

    a: float
    b: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.shape[0] < 2:
            raise DomainError("a grid function needs at least two samples")
        if not self.b > self.a:
            raise DomainError(f"empty interval [{self.a}, {self.b}]")
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return self.values.shape[0] - 1

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.M

    @property
    def x(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.M + 1)

    @classmethod
    def sample(cls, fn, a: float, b: float, M: int) -> "GridFn":
        x = a + (b - a) / M * np.arange(M + 1)
        return cls(a, b, np.asarray(fn(x), dtype=float))

    def reflected(self) -> "GridFn":
        """The same samples read from right to left (x -> a + b - x)."""
        return GridFn(self.a, self.b, self.values[::-1].copy())


def weights_from_family(fam: GammaFamily, lam: float, h: float, n: int) -> OperatorWeights:
    """Grid-aligned weights for an integer-shift family."""
    if lam < 0:
        raise DomainError(f"tempering rate must be non-negative, got {lam}")
    if not h > 0:
        raise DomainError(f"grid spacing must be positive, got {h}")
    if n < 2:
        raise DomainError(f"need at least three weights, got n={n}")
    offsets = fam.integer_offsets()
    omega = gruenwald_weights(fam.alpha, n).omega
    gam = np.asarray(fam.gammas, dtype=float)
    g = _kernels.wsgd_weights(omega, offsets, gam, lam, h, n)
    g.setflags(write=False)
    shifts = np.asarray(fam.shifts, dtype=float)
    phi = float(np.dot(gam, np.exp(shifts * h * lam))) * (-math.expm1(-h * lam)) ** fam.alpha
    return OperatorWeights(fam.order, fam.alpha, float(lam), float(h), g, phi, fam)


def build_weights(order: int, alpha: float, lam: float, h: float, free_param: float, n: int) -> OperatorWeights:
    """Weights of the order-2 (shifts 1, 0, -1) or order-3 (1, 0, -1, -2) operator.

    Parameters
    ----------
    order : 2 or 3
    alpha : fractional order in (0, 2)
    lam : tempering rate, >= 0
    h : grid spacing
    free_param : gamma_3 for order 2, gamma_4 for order 3
    n : highest weight index; a grid of M intervals needs ``n >= M + 1``
    """
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    return weights_from_family(family(order, alpha, free_param), lam, h, n)


def _check(w: OperatorWeights, u: GridFn):
    if abs(u.h - w.h) > 1e-12 * w.h:
        raise DomainError(f"grid spacing {u.h} does not match the weights' spacing {w.h}")
    if w.n < u.M + 1:
        raise DomainError(f"weights built to n={w.n}, grid needs n >= {u.M + 1}")


def apply_left(w: OperatorWeights, u: GridFn, i: int) -> float:
    """Left operator at interior node ``i`` (1 <= i <= M-1)."""
    _check(w, u)
    if not 1 <= i <= u.M - 1:
        raise IndexError(f"node {i} outside 1..{u.M - 1}")
    v = u.values
    s = float(np.dot(w.g[: i + 2], v[i + 1 :: -1]))
    return (s - w.phi * v[i]) / w.h**w.alpha


def apply_right(w: OperatorWeights, u: GridFn, i: int) -> float:
    """Right operator at interior node ``i``: the mirror image of :func:`apply_left`."""
    return apply_left(w, u.reflected(), u.M - i)


def left_all(w: OperatorWeights, u: GridFn) -> np.ndarray:
    """Left operator at every interior node 1..M-1."""
    _check(w, u)
    return _kernels.stencil_apply(w.g, w.phi, u.values) / w.h**w.alpha


def right_all(w: OperatorWeights, u: GridFn) -> np.ndarray:
    """Right operator at every interior node 1..M-1."""
    _check(w, u)
    return _kernels.stencil_apply(w.g, w.phi, u.values[::-1])[::-1] / w.h**w.alpha
