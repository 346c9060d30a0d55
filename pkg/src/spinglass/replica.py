"""Replica-symmetric free energy and phase classification for spiked Wigner.

The RS free energy density at overlap q and conjugate mu is

    f(q, mu) = (1/lambda) [ -(lambda^2/4)(q^2 + 1) + (mu/2)(q + 1)
                            - E_z log(2 cosh(mu + sqrt(mu) z)) ].

Eliminating mu by its own stationarity condition mu = lambda^2 q gives a
one-dimensional landscape F(q) whose critical points are exactly the
solutions of q = E_z tanh(mu + sqrt(mu) z); these coincide with the state
evolution fixed points via gamma = lambda^2 q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .numerics import DEFAULT_ORDER, QuadratureRule, expect_gauss, gauss_hermite_rule, psi
from .state_evolution import se_fixed_point

Q_MAX = 1.0 - 1e-6

DEFAULT_GRID_SIZE = 256


class Phase(Enum):
    IMPOSSIBLE_A = "IMPOSSIBLE_A"  # q = 0 is the unique local minimum
    IMPOSSIBLE_B = "IMPOSSIBLE_B"  # nontrivial local minimum exists, q = 0 still global
    HARD = "HARD"  # global minimum at q > 0, but AMP stays trivial
    EASY = "EASY"  # global minimum at q > 0 and AMP reaches it


@dataclass(frozen=True)
class QMuSolution:
    q: float
    mu: float
    c: float
    nu: float
    free_energy: float


@dataclass(frozen=True)
class LandscapeCurve:
    lam: float
    grid_q: np.ndarray
    grid_f: np.ndarray
    minima: np.ndarray  # locally minimal q values, refined
    global_min_q: float
    phase: Phase


def _log2cosh(x: np.ndarray) -> np.ndarray:
    # log(2 cosh x) without overflow
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax))


def rs_free_energy(
    q: float, mu: float, lam: float, rule: QuadratureRule | None = None
) -> float:
    """RS free energy density at (q, mu)."""
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if rule is None:
        rule = gauss_hermite_rule(DEFAULT_ORDER)
    if mu == 0:
        expect = math.log(2.0)
    else:
        root = math.sqrt(mu)
        expect = expect_gauss(lambda z: _log2cosh(mu + root * z), rule)
    return (-(lam * lam / 4.0) * (q * q + 1.0) + (mu / 2.0) * (q + 1.0) - expect) / lam


def landscape_value(q: float, lam: float, rule: QuadratureRule | None = None) -> float:
    """F(q) with mu eliminated by stationarity: F(q) = f(q, lambda^2 q)."""
    return rs_free_energy(q, lam * lam * q, lam, rule)


def _refine_minimum(lam: float, lo: float, hi: float, rule: QuadratureRule) -> float:
    res = minimize_scalar(
        lambda q: landscape_value(q, lam, rule),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(res.x)


def landscape(
    lam: float,
    grid_size: int = DEFAULT_GRID_SIZE,
    rule: QuadratureRule | None = None,
    se_escapes: bool | None = None,
) -> LandscapeCurve:
    """Sample F(q) on [0, 1), locate its local minima, and label the phase.

    ``se_escapes`` (whether state evolution leaves the trivial fixed point)
    is computed from the state-evolution module when not supplied.
    """
    if grid_size < 64:
        raise ValueError(f"grid_size must be >= 64, got {grid_size}")
    if rule is None:
        rule = gauss_hermite_rule(DEFAULT_ORDER)
    qs = np.linspace(0.0, Q_MAX, grid_size)
    fs = np.array([landscape_value(q, lam, rule) for q in qs])

    minima: list[float] = []
    if fs[0] < fs[1]:
        minima.append(0.0)
    for i in range(1, grid_size - 1):
        if fs[i] <= fs[i - 1] and fs[i] <= fs[i + 1]:
            # plateau ties resolve to the smaller q: skip flat right shoulders
            if fs[i] == fs[i - 1] and i > 1:
                continue
            minima.append(_refine_minimum(lam, qs[i - 1], qs[i + 1], rule))
    if fs[-1] < fs[-2]:
        minima.append(_refine_minimum(lam, qs[-2], Q_MAX, rule))

    vals = [landscape_value(q, lam, rule) for q in minima]
    global_min_q = minima[int(np.argmin(vals))]
    if se_escapes is None:
        se_escapes = se_fixed_point(lam).fixed_point > 0
    curve = LandscapeCurve(
        lam=lam,
        grid_q=qs,
        grid_f=fs,
        minima=np.array(minima),
        global_min_q=global_min_q,
        phase=Phase.IMPOSSIBLE_A,  # placeholder, replaced below
    )
    phase = classify_phase(curve, se_escapes)
    return LandscapeCurve(
        lam=lam, grid_q=qs, grid_f=fs, minima=curve.minima,
        global_min_q=global_min_q, phase=phase,
    )


def classify_phase(curve: LandscapeCurve, se_escapes: bool) -> Phase:
    """Label the landscape per the four qualitative free-energy shapes."""
    trivial_is_min = any(q < 1e-8 for q in curve.minima)
    nontrivial = [q for q in curve.minima if q >= 1e-8]
    global_trivial = curve.global_min_q < 1e-8
    if trivial_is_min and not nontrivial:
        if se_escapes:
            raise ValueError(
                "inconsistent inputs: state evolution escapes but q=0 is the unique minimum"
            )
        return Phase.IMPOSSIBLE_A
    if global_trivial:
        return Phase.IMPOSSIBLE_B
    return Phase.EASY if se_escapes else Phase.HARD


def solve_q_mu(
    lam: float, scan_points: int = 1024, rule: QuadratureRule | None = None
) -> list[QMuSolution]:
    """All solutions of q = psi(lambda^2 q) on [0, 1], with free energies.

    Sign-change scan on a uniform grid plus bisection refinement; q = 0 is
    always a solution.  On the Nishimori line c = q and nu = mu.
    """
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if rule is None:
        rule = gauss_hermite_rule(DEFAULT_ORDER)

    def residual(q: float) -> float:
        return q - psi(lam * lam * q, rule)

    roots = [0.0]
    qs = np.linspace(0.0, 1.0, scan_points)
    vals = np.array([residual(q) for q in qs])
    for i in range(1, scan_points - 1):
        if vals[i] == 0.0 and qs[i] > 0:
            roots.append(float(qs[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(float(brentq(residual, qs[i], qs[i + 1], xtol=1e-10)))

    out = []
    for q in roots:
        mu = lam * lam * q
        out.append(
            QMuSolution(q=q, mu=mu, c=q, nu=mu, free_energy=rs_free_energy(q, mu, lam, rule))
        )
    return out


def thresholds(
    lambda_grid: np.ndarray,
    grid_size: int = DEFAULT_GRID_SIZE,
    rule: QuadratureRule | None = None,
) -> tuple[float | None, float | None]:
    """Smallest grid lambda with a nontrivial global minimum (statistical
    threshold) and smallest with phase EASY (computational threshold)."""
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    if np.any(np.diff(lambda_grid) <= 0):
        raise ValueError("lambda grid must be strictly increasing")
    phases = [landscape(lam, grid_size, rule) for lam in lambda_grid]
    return thresholds_from_curves(lambda_grid, phases)


def thresholds_from_curves(
    lambda_grid: np.ndarray, curves: list[LandscapeCurve]
) -> tuple[float | None, float | None]:
    lambda_stat = None
    lambda_comp = None
    for lam, curve in zip(lambda_grid, curves):
        if lambda_stat is None and curve.global_min_q >= 1e-8:
            lambda_stat = float(lam)
        if lambda_comp is None and curve.phase is Phase.EASY:
            lambda_comp = float(lam)
    return lambda_stat, lambda_comp
