"""Sklearn-style estimator wrappers around the message-passing cores.

These give the algorithms a fit/predict surface (get_params, trailing
underscore attributes, input validation) so they compose with pipelines
and model selection; the functional modules remain the source of truth.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import amp as amp_mod
from . import bp as bp_mod
from .models import SbmInstance
from .numerics import SeedSpec


class SpikedWignerAMP(ClusterMixin, BaseEstimator):
    """AMP estimator for a symmetric spiked matrix observation.

    ``fit(Y)`` runs the corrected iteration on the n x n matrix Y; the
    soft estimate (entrywise in (-1, 1)) lands in ``embedding_`` and the
    sign-rounded labels in ``labels_``.
    """

    def __init__(
        self,
        snr: float = 1.5,
        init_scale: float = amp_mod.DEFAULT_INIT_SCALE,
        max_iters: int = amp_mod.DEFAULT_MAX_ITERS,
        tol: float = amp_mod.DEFAULT_TOL,
        random_state: int = 0,
    ):
        self.snr = snr
        self.init_scale = init_scale
        self.max_iters = max_iters
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X)
        if X.shape[0] != X.shape[1]:
            raise ValueError(f"expected a square observation matrix, got {X.shape}")
        if not np.allclose(X, X.T):
            raise ValueError("observation matrix must be symmetric")
        n = X.shape[0]
        rng = SeedSpec(self.random_state).generator()
        v0 = self.init_scale * rng.standard_normal(n)
        v_final, iters, converged, _ = amp_mod.iterate_amp(
            X, self.snr, v0, self.max_iters, self.tol
        )
        self.embedding_ = np.tanh(self.snr * v_final)
        self.labels_ = np.where(self.embedding_ >= 0, 1, -1)
        self.n_iter_ = iters
        self.converged_ = converged
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class BlockModelBP(ClusterMixin, BaseEstimator):
    """Belief-propagation community detector for a sparse graph.

    ``fit(X)`` accepts either an (m, 2) edge list or an n x n 0/1
    adjacency matrix.  Soft beliefs end up in ``embedding_`` and the
    sign-rounded community labels in ``labels_``.
    """

    def __init__(
        self,
        a: float = 10.0,
        b: float = 2.0,
        mode: str = "full",
        init_scale: float = 1e-2,
        max_iters: int = 200,
        tol: float = 1e-8,
        random_state: int = 0,
    ):
        self.a = a
        self.b = b
        self.mode = mode
        self.init_scale = init_scale
        self.max_iters = max_iters
        self.tol = tol
        self.random_state = random_state

    def _as_instance(self, X) -> SbmInstance:
        X = check_array(X)
        if X.shape[0] == X.shape[1] and X.shape[0] > 2 and set(np.unique(X)) <= {0.0, 1.0}:
            iu = np.triu_indices(X.shape[0], k=1)
            mask = X[iu] > 0
            edges = np.column_stack([iu[0][mask], iu[1][mask]]).astype(np.int64)
            n = X.shape[0]
        elif X.shape[1] == 2:
            edges = X.astype(np.int64)
            n = int(edges.max()) + 1 if edges.size else 0
        else:
            raise ValueError("X must be an adjacency matrix or an (m, 2) edge list")
        return SbmInstance(
            n=n, a=self.a, b=self.b, edges=edges,
            truth=np.ones(n, dtype=np.int64), seed=SeedSpec(0),
        )

    def fit(self, X, y=None):
        instance = self._as_instance(X)
        result = bp_mod.bp_run(
            instance,
            mode=self.mode,
            init_scale=self.init_scale,
            max_iters=self.max_iters,
            tol=self.tol,
            seed=SeedSpec(self.random_state),
        )
        self.embedding_ = result.beliefs
        self.labels_ = np.where(result.beliefs >= 0, 1, -1)
        self.converged_ = result.converged
        self.n_iter_ = result.iterations
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_

    def predict(self, X=None):
        check_is_fitted(self, "labels_")
        return self.labels_
