"""Gamma function and normalized Grünwald weights."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, PoleError


@dataclass(frozen=True)
class GruenwaldWeights:
    """Normalized Grünwald weights ``omega[k] = (-1)^k binom(alpha, k)``, k = 0..n."""

    alpha: float
    omega: np.ndarray

    def __len__(self):
        return self.omega.shape[0]


def gruenwald_weights(alpha: float, n: int) -> GruenwaldWeights:
    """Weights by the recurrence ``omega[k] = (1 - (alpha+1)/k) omega[k-1]``.

    Raises
    ------
    DomainError
        If ``alpha`` is outside (0, 2] or ``n`` is negative.
    """
    if not 0.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    omega = _kernels.gruenwald(alpha, n)
    omega.setflags(write=False)
    return GruenwaldWeights(alpha=float(alpha), omega=omega)


def gamma_fn(x: float) -> float:
    """Gamma function on the reals, with a :class:`PoleError` at 0, -1, -2, ..."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"gamma has a pole at {x}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal gamma, zero at the poles."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)
