"""Synthetic instance generators and the sign-invariant overlap metric.

Two observation models: a dense spiked Wigner matrix with a hidden +-1
signal, and a sparse two-community block-model graph.  Instances are
immutable and fully determined by their ``SeedSpec``, so by default only
the seed and parameters are serialized and the observation is regenerated
on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .numerics import SeedSpec


@dataclass(frozen=True)
class DenseInstance:
    """Spiked Wigner observation Y = (lam/n) x x^T + W/sqrt(n)."""

    n: int
    lam: float
    observation: np.ndarray
    truth: np.ndarray
    seed: SeedSpec


@dataclass(frozen=True)
class SbmInstance:
    """Sparse graph with hidden +-1 communities and rates a > b."""

    n: int
    a: float
    b: float
    edges: np.ndarray  # (m, 2) int array, each row u < v
    truth: np.ndarray
    seed: SeedSpec

    def adjacency_lists(self) -> list[np.ndarray]:
        """Neighbor arrays per vertex."""
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return [np.array(sorted(x), dtype=np.int64) for x in nbrs]


@dataclass(frozen=True)
class GwTree:
    """Two-type Galton-Watson tree with +-1 spins.

    ``nodes`` lists (spin, parent) pairs in breadth-first order; the root
    is node 0 with parent -1.
    """

    spins: np.ndarray
    parents: np.ndarray
    depth: int
    k: float
    eps: float

    def children(self) -> list[np.ndarray]:
        kids: list[list[int]] = [[] for _ in range(len(self.spins))]
        for i, p in enumerate(self.parents):
            if p >= 0:
                kids[p].append(i)
        return [np.array(c, dtype=np.int64) for c in kids]


def _rademacher(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n) * 2 - 1


def gen_spiked_wigner(n: int, lam: float, seed: SeedSpec) -> DenseInstance:
    """Draw a spiked Wigner instance.

    Off-diagonal noise is iid N(0,1) on the upper triangle (mirrored), the
    diagonal is N(0,2) per the usual GOE convention; the whole noise matrix
    is scaled by n^{-1/2} and the rank-one signal (lam/n) x x^T is added.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    rng = seed.generator()
    truth = _rademacher(rng, n)
    w = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    w[iu] = rng.standard_normal(iu[0].size)
    w = w + w.T
    w[np.diag_indices(n)] = rng.standard_normal(n) * np.sqrt(2.0)
    y = (lam / n) * np.outer(truth, truth) + w / np.sqrt(n)
    return DenseInstance(n=n, lam=float(lam), observation=y, truth=truth, seed=seed)


def _sample_pair_indices(rng: np.random.Generator, total: int, p: float) -> np.ndarray:
    """Uniformly sample a Binomial(total, p) number of distinct indices in [0, total)."""
    if total <= 0 or p <= 0:
        return np.empty(0, dtype=np.int64)
    count = rng.binomial(total, min(p, 1.0))
    chosen = np.unique(rng.integers(0, total, size=count))
    # collisions are rare in the sparse regime; top up until distinct count is met
    while chosen.size < count:
        extra = rng.integers(0, total, size=count - chosen.size)
        chosen = np.unique(np.concatenate([chosen, extra]))
    return chosen


def _unrank_triangular(t: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Map flat indices in [0, m(m-1)/2) to (i, j) pairs with i < j < m."""
    # i is the largest row whose block start <= t, found from the triangular cumsum
    tt = t.astype(np.float64)
    i = np.floor((2 * m - 1 - np.sqrt((2 * m - 1) ** 2 - 8 * tt)) / 2).astype(np.int64)
    start = i * (2 * m - i - 1) // 2
    # guard against float rounding at block boundaries
    over = start > t
    i[over] -= 1
    start = i * (2 * m - i - 1) // 2
    under = t >= start + (m - 1 - i)
    i[under] += 1
    start = i * (2 * m - i - 1) // 2
    j = t - start + i + 1
    return i, j


def gen_sbm(n: int, a: float, b: float, seed: SeedSpec) -> SbmInstance:
    """Draw a block-model graph: edge probability a/n within, b/n across."""
    if not (0 <= b < a <= n):
        raise ValueError(f"rates must satisfy 0 <= b < a <= n, got a={a}, b={b}")
    rng = seed.generator()
    truth = _rademacher(rng, n)
    plus = np.flatnonzero(truth == 1)
    minus = np.flatnonzero(truth == -1)

    parts: list[np.ndarray] = []
    for group in (plus, minus):
        m = group.size
        flat = _sample_pair_indices(rng, m * (m - 1) // 2, a / n)
        if flat.size:
            i, j = _unrank_triangular(flat, m)
            parts.append(np.column_stack([group[i], group[j]]))
    flat = _sample_pair_indices(rng, plus.size * minus.size, b / n)
    if flat.size:
        i, j = np.divmod(flat, max(minus.size, 1))
        parts.append(np.column_stack([plus[i], minus[j]]))

    if parts:
        edges = np.concatenate(parts)
        edges = np.sort(edges, axis=1)
        edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return SbmInstance(n=n, a=float(a), b=float(b), edges=edges, truth=truth, seed=seed)


def overlap(estimate: np.ndarray, truth: np.ndarray) -> float:
    """|<estimate, truth>| / n for a soft estimate in [-1,1]^n.

    The absolute value makes the metric invariant to the global sign flip
    that leaves both observation models unchanged.
    """
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth)
    if estimate.shape != truth.shape:
        raise ValueError(f"length mismatch: {estimate.shape} vs {truth.shape}")
    if np.max(np.abs(estimate)) > 1 + 1e-9:
        raise ValueError("estimate entries must lie in [-1, 1]")
    return float(abs(np.dot(estimate, truth)) / truth.size)


def sample_galton_watson(k: float, eps: float, depth: int, seed: SeedSpec) -> GwTree:
    """Grow a two-type Galton-Watson tree to the given depth.

    Each node spawns Pois((1-eps) k) same-spin and Pois(eps k) opposite-spin
    children; the root spin is uniform +-1.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if not 0 <= eps <= 0.5:
        raise ValueError(f"eps must be in [0, 1/2], got {eps}")
    if depth < 0:
        raise ValueError(f"depth must be nonnegative, got {depth}")
    rng = seed.generator()
    spins = [int(rng.integers(0, 2)) * 2 - 1]
    parents = [-1]
    frontier = [0]
    for _ in range(depth):
        nxt: list[int] = []
        for node in frontier:
            same = rng.poisson((1 - eps) * k)
            diff = rng.poisson(eps * k)
            for _ in range(same):
                spins.append(spins[node])
                parents.append(node)
                nxt.append(len(spins) - 1)
            for _ in range(diff):
                spins.append(-spins[node])
                parents.append(node)
                nxt.append(len(spins) - 1)
        frontier = nxt
    return GwTree(
        spins=np.array(spins, dtype=np.int64),
        parents=np.array(parents, dtype=np.int64),
        depth=depth,
        k=float(k),
        eps=float(eps),
    )


# ---------------------------------------------------------------------------
# serialization


def instance_to_json(
    instance: DenseInstance | SbmInstance,
    store_observation: bool = False,
    include_truth: bool = True,
) -> str:
    """Serialize an instance; by default the observation is regenerated from the seed."""
    seed = {"master_seed": instance.seed.master_seed, "stream_id": instance.seed.stream_id}
    if isinstance(instance, DenseInstance):
        doc: dict = {
            "model": "spiked-wigner",
            "n": instance.n,
            "params": {"lambda": instance.lam},
            "seed": seed,
        }
        if include_truth:
            doc["truth"] = instance.truth.tolist()
        if store_observation:
            doc["matrix"] = instance.observation.tolist()
    else:
        doc = {
            "model": "sbm",
            "n": instance.n,
            "params": {"a": instance.a, "b": instance.b},
            "seed": seed,
        }
        if include_truth:
            doc["truth"] = instance.truth.tolist()
        if store_observation:
            doc["edges"] = instance.edges.tolist()
    return json.dumps(doc)


def instance_from_json(text: str) -> DenseInstance | SbmInstance:
    """Inverse of ``instance_to_json``; regenerates omitted observations."""
    doc = json.loads(text)
    seed = SeedSpec(doc["seed"]["master_seed"], doc["seed"]["stream_id"])
    if doc["model"] == "spiked-wigner":
        inst = gen_spiked_wigner(doc["n"], doc["params"]["lambda"], seed)
        if "matrix" in doc:
            inst = DenseInstance(
                n=inst.n,
                lam=inst.lam,
                observation=np.array(doc["matrix"]),
                truth=np.array(doc["truth"]),
                seed=seed,
            )
        return inst
    if doc["model"] == "sbm":
        inst = gen_sbm(doc["n"], doc["params"]["a"], doc["params"]["b"], seed)
        if "edges" in doc:
            inst = SbmInstance(
                n=inst.n,
                a=inst.a,
                b=inst.b,
                edges=np.array(doc["edges"], dtype=np.int64).reshape(-1, 2),
                truth=np.array(doc["truth"]),
                seed=seed,
            )
        return inst
    raise ValueError(f"unknown model {doc['model']!r}")
