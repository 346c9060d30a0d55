"""Brute-force enumeration over {+-1}^n for tiny systems.

Ground truth for everything else: exact log-partition functions, posterior
marginals (gauge-fixed, since the raw marginals vanish by global sign
symmetry), pairwise means, and a direct check that the Gibbs distribution
minimizes the free energy E[H] - T S.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .models import DenseInstance, SbmInstance
from .numerics import SeedSpec

MAX_ENUM_N = 24

_BLOCK_BITS = 16  # enumerate states in blocks of at most 2^16


@dataclass(frozen=True)
class GibbsSpec:
    """Hamiltonian + inverse temperature on n spins, small enough to enumerate.

    ``hamiltonian`` maps a (m, n) block of +-1 states to a length-m energy
    vector (vectorized evaluation keeps 2^n enumeration fast).
    """

    hamiltonian: Callable[[np.ndarray], np.ndarray]
    beta: float
    n: int


@dataclass(frozen=True)
class ExactSummary:
    log_partition: float
    marginals: np.ndarray  # raw E[sigma_i]
    gauge_marginals: np.ndarray  # E[sigma_i | sigma_1 = +1]
    pair_means: np.ndarray  # E[sigma_i sigma_j], (n, n)
    free_energy: float
    entropy: float
    mean_energy: float


def _state_blocks(n: int):
    """Yield (m, n) blocks of +-1 states covering all 2^n configurations."""
    total = 1 << n
    block = min(total, 1 << _BLOCK_BITS)
    bits = np.arange(n, dtype=np.uint64)
    for start in range(0, total, block):
        codes = np.arange(start, min(start + block, total), dtype=np.uint64)
        states = ((codes[:, None] >> bits[None, :]) & 1).astype(np.int8)
        yield states * 2 - 1


def enumerate_gibbs(spec: GibbsSpec) -> ExactSummary:
    """Exact Gibbs summary by log-sum-exp accumulation over all 2^n states."""
    if spec.n > MAX_ENUM_N:
        raise ValueError(f"n={spec.n} exceeds enumeration limit {MAX_ENUM_N}")
    if spec.beta <= 0:
        raise ValueError(f"beta must be positive, got {spec.beta}")

    log_terms: list[float] = []
    # accumulators for expectations, carried relative to a running scale
    num_marg = np.zeros(spec.n)
    num_gauge = np.zeros(spec.n)
    num_pair = np.zeros((spec.n, spec.n))
    num_energy = 0.0
    gauge_mass = 0.0
    scale = None

    for states in _state_blocks(spec.n):
        energies = np.asarray(spec.hamiltonian(states), dtype=float)
        logw = -spec.beta * energies
        block_max = float(np.max(logw))
        if scale is None:
            scale = block_max
        elif block_max > scale:
            ratio = math.exp(scale - block_max)
            num_marg *= ratio
            num_gauge *= ratio
            num_pair *= ratio
            num_energy *= ratio
            gauge_mass *= ratio
            scale = block_max
        w = np.exp(logw - scale)
        fstates = states.astype(float)
        num_marg += w @ fstates
        num_pair += (fstates * w[:, None]).T @ fstates
        num_energy += float(np.dot(w, energies))
        mask = states[:, 0] == 1
        num_gauge += w[mask] @ fstates[mask]
        gauge_mass += float(np.sum(w[mask]))
        log_terms.append(scale + math.log(np.sum(w)))

    log_z = float(logsumexp(log_terms))
    z_scaled = math.exp(log_z - scale)
    marginals = num_marg / z_scaled
    pair_means = num_pair / z_scaled
    gauge_marginals = num_gauge / gauge_mass
    mean_energy = num_energy / z_scaled
    t = 1.0 / spec.beta
    free_energy = -t * log_z
    entropy = (mean_energy - free_energy) / t
    return ExactSummary(
        log_partition=log_z,
        marginals=marginals,
        gauge_marginals=gauge_marginals,
        pair_means=pair_means,
        free_energy=free_energy,
        entropy=entropy,
        mean_energy=mean_energy,
    )


def dense_hamiltonian(instance: DenseInstance) -> Callable[[np.ndarray], np.ndarray]:
    """H(sigma) = -sum_{i<j} Y_ij sigma_i sigma_j; at beta = lambda the Gibbs
    distribution is the posterior."""
    y = np.triu(instance.observation, k=1)

    def ham(states: np.ndarray) -> np.ndarray:
        f = states.astype(float)
        return -0.5 * np.einsum("si,ij,sj->s", f, y + y.T, f)

    return ham


def sbm_hamiltonian(instance: SbmInstance) -> Callable[[np.ndarray], np.ndarray]:
    """Exact block-model log-likelihood (edge and non-edge factors) as an energy.

    An edge (u,v) contributes log(a/n) or log(b/n) according to the spin
    product; a non-edge contributes log(1 - a/n) or log(1 - b/n).  Written
    as a pairwise Ising energy plus a constant (dropped).
    """
    n, a, b = instance.n, instance.a, instance.b
    # half the log-ratio gives the coupling on sigma_u sigma_v
    j_edge = 0.5 * (math.log(a / n) - math.log(b / n)) if b > 0 else None
    j_non = 0.5 * (math.log(1 - a / n) - math.log(1 - b / n))
    if j_edge is None:
        raise ValueError("exact SBM likelihood requires b > 0 (b = 0 has hard constraints)")
    adj = np.zeros((n, n))
    for u, v in instance.edges:
        adj[u, v] = adj[v, u] = 1.0
    coupling = adj * j_edge + (1.0 - adj) * j_non
    np.fill_diagonal(coupling, 0.0)

    def ham(states: np.ndarray) -> np.ndarray:
        f = states.astype(float)
        return -0.5 * np.einsum("si,ij,sj->s", f, coupling, f)

    return ham


def ising_edge_hamiltonian(
    edges: np.ndarray, coupling: float, fields: dict[int, float] | None = None, n: int | None = None
) -> Callable[[np.ndarray], np.ndarray]:
    """Pure edge Ising energy H = -J sum_edges sigma_u sigma_v - sum_v h_v sigma_v."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(edges.max()) + 1 if edges.size else 1
    h = np.zeros(n)
    for v, hv in (fields or {}).items():
        h[v] = hv

    def ham(states: np.ndarray) -> np.ndarray:
        f = states.astype(float)
        e = -f @ h
        if edges.size:
            e = e - coupling * np.sum(f[:, edges[:, 0]] * f[:, edges[:, 1]], axis=1)
        return e

    return ham


def exact_posterior_marginals(
    instance: DenseInstance | SbmInstance, gauge: str = "fix-first"
) -> np.ndarray:
    """Posterior means E[sigma_i | observation] by enumeration.

    ``gauge="fix-first"`` conditions on sigma_1 = +1 (the raw marginals are
    exactly 0 by global sign symmetry); ``gauge="none"`` returns the raw
    marginals.
    """
    if instance.n > MAX_ENUM_N:
        raise ValueError(f"n={instance.n} exceeds enumeration limit {MAX_ENUM_N}")
    if gauge not in ("fix-first", "none"):
        raise ValueError(f"unknown gauge {gauge!r}")
    if isinstance(instance, DenseInstance):
        if instance.lam == 0:
            # posterior is uniform; conditioning on sigma_1 = +1 pins only that spin
            marg = np.zeros(instance.n)
            if gauge == "fix-first":
                marg[0] = 1.0
            return marg
        spec = GibbsSpec(dense_hamiltonian(instance), beta=instance.lam, n=instance.n)
    else:
        spec = GibbsSpec(sbm_hamiltonian(instance), beta=1.0, n=instance.n)
    summary = enumerate_gibbs(spec)
    return summary.gauge_marginals if gauge == "fix-first" else summary.marginals


def free_energy_of(probs: np.ndarray, energies: np.ndarray, temperature: float) -> float:
    """F = E[H] - T S for an explicit distribution over the enumerated states."""
    p = probs[probs > 0]
    entropy = -float(np.dot(p, np.log(p)))
    return float(np.dot(probs, energies)) - temperature * entropy


def gibbs_minimizes_free_energy(spec: GibbsSpec, trials: int, seed: SeedSpec) -> bool:
    """Check that the Gibbs distribution strictly minimizes E[H] - T S.

    Compares against ``trials`` multiplicative Dirichlet-jittered copies of
    the Gibbs weights (concentration 100, renormalized), which stay in the
    simplex interior.
    """
    if spec.n > 12:
        raise ValueError(f"n={spec.n} too large for the perturbation check (max 12)")
    states = np.concatenate(list(_state_blocks(spec.n)))
    energies = np.asarray(spec.hamiltonian(states), dtype=float)
    logw = -spec.beta * energies
    logw -= logsumexp(logw)
    gibbs = np.exp(logw)
    t = 1.0 / spec.beta
    f_gibbs = free_energy_of(gibbs, energies, t)
    rng = seed.generator()
    for _ in range(trials):
        jitter = rng.gamma(100.0, 1.0 / 100.0, size=gibbs.size)
        perturbed = gibbs * jitter
        perturbed /= perturbed.sum()
        if free_energy_of(perturbed, energies, t) <= f_gibbs:
            return False
    return True


def summary_to_fixture(
    instance: DenseInstance | SbmInstance, gauge: str = "fix-first"
) -> dict:
    """Regression-fixture dict: seed, params, gauge, marginals, logZ."""
    if isinstance(instance, DenseInstance):
        spec = GibbsSpec(dense_hamiltonian(instance), beta=instance.lam, n=instance.n)
        params = {"model": "spiked-wigner", "lambda": instance.lam}
    else:
        spec = GibbsSpec(sbm_hamiltonian(instance), beta=1.0, n=instance.n)
        params = {"model": "sbm", "a": instance.a, "b": instance.b}
    summary = enumerate_gibbs(spec)
    marg = summary.gauge_marginals if gauge == "fix-first" else summary.marginals
    return {
        "instance-seed": {
            "master_seed": instance.seed.master_seed,
            "stream_id": instance.seed.stream_id,
        },
        "params": {**params, "n": instance.n},
        "gauge": gauge,
        "marginals": marg.tolist(),
        "logZ": summary.log_partition,
    }


def write_fixture(path, instance, gauge: str = "fix-first") -> None:
    with open(path, "w") as fh:
        json.dump(summary_to_fixture(instance, gauge), fh, indent=1)
