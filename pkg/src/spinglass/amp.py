"""Approximate message passing for the spiked Wigner model.

The corrected iteration is

    v^{t+1} = Y f(v^t) - b_t f(v^{t-1}),   f(v) = tanh(lambda * v),
    b_t = lambda * (1 - ||f(v^t)||^2 / n),

where b_t f(v^{t-1}) is the Onsager reaction term cancelling the aggregate
two-step backtracking contribution.  The uncorrected update (no Onsager
term) and plain power iteration are provided as baselines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericFailure
from .models import DenseInstance, overlap
from .numerics import SeedSpec

DIVERGENCE_LIMIT = 1e6
DEFAULT_INIT_SCALE = 1e-3
DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITERS = 500


@dataclass(frozen=True)
class AmpState:
    v_current: np.ndarray
    v_previous: np.ndarray
    t: int
    lam: float


@dataclass(frozen=True)
class AmpResult:
    estimate_soft: np.ndarray
    estimate_hard: np.ndarray
    overlap_trajectory: np.ndarray
    iterations: int
    converged: bool


def _check(state: AmpState, instance: DenseInstance) -> None:
    if state.lam != instance.lam:
        raise ValueError(f"state lambda {state.lam} != instance lambda {instance.lam}")
    if state.v_current.shape != (instance.n,):
        raise ValueError("state/instance dimension mismatch")


def onsager_coefficient(state: AmpState) -> float:
    """b_t = lambda * (1 - ||f(v^t)||^2 / n), the mean of f'(v^t)."""
    f = np.tanh(state.lam * state.v_current)
    return state.lam * (1.0 - float(np.dot(f, f)) / f.size)


def amp_step(state: AmpState, instance: DenseInstance) -> AmpState:
    """One corrected AMP step."""
    _check(state, instance)
    f_cur = np.tanh(state.lam * state.v_current)
    f_prev = np.tanh(state.lam * state.v_previous)
    b_t = state.lam * (1.0 - float(np.dot(f_cur, f_cur)) / instance.n)
    v_next = instance.observation @ f_cur - b_t * f_prev
    if not np.all(np.isfinite(v_next)):
        raise NumericFailure(f"non-finite iterate at step {state.t + 1}")
    return AmpState(v_current=v_next, v_previous=state.v_current, t=state.t + 1, lam=state.lam)


def amp_step_no_onsager(state: AmpState, instance: DenseInstance) -> AmpState:
    """One uncorrected step v^{t+1} = Y f(v^t); the flawed baseline."""
    _check(state, instance)
    v_next = instance.observation @ np.tanh(state.lam * state.v_current)
    if not np.all(np.isfinite(v_next)):
        raise NumericFailure(f"non-finite iterate at step {state.t + 1}")
    return AmpState(v_current=v_next, v_previous=state.v_current, t=state.t + 1, lam=state.lam)


def iterate_amp(
    observation: np.ndarray,
    lam: float,
    v0: np.ndarray,
    max_iters: int,
    tol: float,
    with_onsager: bool = True,
) -> tuple[np.ndarray, int, bool, list[np.ndarray]]:
    """Core loop on a raw matrix; returns (v_final, iterations, converged, iterates).

    Used by both ``amp_run`` (which also tracks overlap against the truth)
    and the sklearn-style estimator, which has no truth available.
    """
    n = v0.size
    instance = DenseInstance(
        n=n, lam=lam, observation=observation, truth=np.ones(n, dtype=np.int64),
        seed=SeedSpec(0),
    )
    step = amp_step if with_onsager else amp_step_no_onsager
    state = AmpState(v_current=v0, v_previous=np.zeros(n), t=0, lam=lam)
    iterates = [v0]
    converged = False
    for _ in range(max_iters):
        state = step(state, instance)
        if np.max(np.abs(state.v_current)) > DIVERGENCE_LIMIT:
            raise NumericFailure(f"iterate diverged at step {state.t}")
        iterates.append(state.v_current)
        change = np.linalg.norm(state.v_current - state.v_previous) / np.sqrt(n)
        # the Onsager term needs two past iterates, so never stop before t = 2
        if change < tol and state.t >= 2:
            converged = True
            break
    return state.v_current, state.t, converged, iterates


def amp_run(
    instance: DenseInstance,
    init_scale: float = DEFAULT_INIT_SCALE,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: SeedSpec | None = None,
    with_onsager: bool = True,
) -> AmpResult:
    """Run AMP from a small random initialization and track the overlap."""
    if max_iters < 2:
        raise ValueError(f"max_iters must be >= 2, got {max_iters}")
    if init_scale < 0:
        raise ValueError(f"init_scale must be nonnegative, got {init_scale}")
    if seed is None:
        seed = SeedSpec(0)
    rng = seed.generator()
    v0 = init_scale * rng.standard_normal(instance.n)
    v_final, iters, converged, iterates = iterate_amp(
        instance.observation, instance.lam, v0, max_iters, tol, with_onsager
    )
    trajectory = np.array(
        [overlap(np.tanh(instance.lam * v), instance.truth) for v in iterates]
    )
    soft = np.tanh(instance.lam * v_final)
    hard = np.where(soft >= 0, 1, -1)
    return AmpResult(
        estimate_soft=soft,
        estimate_hard=hard,
        overlap_trajectory=trajectory,
        iterations=iters,
        converged=converged,
    )


def power_iteration(instance: DenseInstance, iters: int, seed: SeedSpec) -> np.ndarray:
    """Leading-eigenvector estimate of the observation, as a unit vector."""
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    rng = seed.generator()
    v = rng.standard_normal(instance.n)
    for _ in range(iters):
        v = instance.observation @ v
        norm = np.linalg.norm(v)
        if norm == 0 or not np.isfinite(norm):
            raise NumericFailure("power iteration hit a zero or non-finite vector")
        v = v / norm
    return v
