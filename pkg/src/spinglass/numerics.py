"""Scalar numerics shared by every other module.

Gaussian expectations are computed with Gauss-Hermite quadrature in the
probabilists' normalization, so that ``sum(w_i * f(x_i))`` approximates
``E[f(z)]`` for ``z ~ N(0, 1)``.  Randomness is counter-based (Philox) and
splittable: every consumer derives an independent stream from a
``(master_seed, stream_id)`` pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_hermitenorm

from .errors import NumericFailure

# 512 keeps the tanh/log-cosh expectations below 1e-12 even at large
# arguments, where lower orders (~100) stall near 1e-6 because of the
# integrands' complex poles approaching the real axis.
DEFAULT_ORDER = 512

_MAX_ORDER = 512


@dataclass(frozen=True)
class SeedSpec:
    """Splittable seed: a master seed plus a stream identifier."""

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh counter-based generator for this (seed, stream) pair."""
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def stream(self, stream_id: int) -> "SeedSpec":
        """Derive a sibling spec with a different stream id."""
        return SeedSpec(self.master_seed, stream_id)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite nodes/weights normalized for the standard Gaussian."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int


@lru_cache(maxsize=32)
def gauss_hermite_rule(order: int) -> QuadratureRule:
    """Quadrature rule exact for polynomials of degree <= 2*order - 1.

    Nodes and weights come from the probabilists' Hermite polynomials
    (``scipy.special.roots_hermitenorm``, numerically stable through order
    512), with weights normalized to sum to 1.
    """
    if not 1 <= order <= _MAX_ORDER:
        raise ValueError(f"quadrature order must be in [1, {_MAX_ORDER}], got {order}")
    nodes, w = roots_hermitenorm(order)
    weights = w / w.sum()
    if order == 1:
        nodes = np.zeros(1)
    return QuadratureRule(nodes=nodes, weights=weights, order=order)


def expect_gauss(integrand: Callable[[np.ndarray], np.ndarray], rule: QuadratureRule) -> float:
    """E[integrand(z)] for z ~ N(0,1), by quadrature.

    The integrand must accept a vector of nodes (any numpy ufunc-style
    callable works).
    """
    values = np.asarray(integrand(rule.nodes), dtype=float)
    if not np.all(np.isfinite(values)):
        bad = rule.nodes[~np.isfinite(values)][0]
        raise NumericFailure(f"integrand is non-finite at node {bad!r}")
    return float(np.dot(rule.weights, values))


def psi(gamma: float, rule: QuadratureRule | None = None) -> float:
    """E[tanh(gamma + sqrt(gamma) z)] for z ~ N(0,1).

    Strictly increasing on [0, inf) with values in [0, 1); the gamma = 0
    case short-circuits to exactly 0 (tanh of a centered Gaussian is odd).
    """
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    if gamma == 0:
        return 0.0
    if rule is None:
        rule = gauss_hermite_rule(DEFAULT_ORDER)
    root = math.sqrt(gamma)
    return expect_gauss(lambda z: np.tanh(gamma + root * z), rule)
