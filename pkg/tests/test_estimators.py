import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from spinglass import BlockModelBP, SeedSpec, SpikedWignerAMP, gen_sbm, gen_spiked_wigner, overlap


class TestSpikedWignerAMP:
    def test_params_round_trip(self):
        est = SpikedWignerAMP(snr=2.0, max_iters=100)
        params = est.get_params()
        assert params["snr"] == 2.0
        cloned = clone(est)
        assert cloned.get_params() == params

    def test_fit_recovers_strong_signal(self):
        inst = gen_spiked_wigner(500, 2.0, SeedSpec(120))
        est = SpikedWignerAMP(snr=2.0, random_state=1).fit(inst.observation)
        assert est.converged_
        assert est.embedding_.shape == (500,)
        assert np.all(np.abs(est.embedding_) < 1.0)
        assert overlap(est.labels_, inst.truth) > 0.8

    def test_fit_predict_matches_labels(self):
        inst = gen_spiked_wigner(200, 2.0, SeedSpec(121))
        est = SpikedWignerAMP(snr=2.0)
        labels = est.fit_predict(inst.observation)
        assert np.array_equal(labels, est.labels_)

    def test_rejects_nonsquare_input(self):
        with pytest.raises(ValueError, match="square"):
            SpikedWignerAMP().fit(np.zeros((4, 5)))

    def test_rejects_asymmetric_input(self):
        m = np.arange(16, dtype=float).reshape(4, 4)
        with pytest.raises(ValueError, match="symmetric"):
            SpikedWignerAMP().fit(m)


class TestBlockModelBP:
    def test_edge_list_and_adjacency_agree(self):
        g = gen_sbm(2000, 10.0, 2.0, SeedSpec(122))
        adjacency = np.zeros((g.n, g.n))
        adjacency[g.edges[:, 0], g.edges[:, 1]] = 1
        adjacency[g.edges[:, 1], g.edges[:, 0]] = 1
        from_edges = BlockModelBP(a=10.0, b=2.0).fit(g.edges)
        from_matrix = BlockModelBP(a=10.0, b=2.0).fit(adjacency)
        assert np.array_equal(from_edges.labels_, from_matrix.labels_)
        assert overlap(from_edges.labels_, g.truth) > 0.5

    def test_predict_requires_fit(self):
        with pytest.raises(NotFittedError):
            BlockModelBP().predict()

    def test_fit_sets_diagnostics(self):
        g = gen_sbm(1000, 10.0, 2.0, SeedSpec(123))
        est = BlockModelBP(a=10.0, b=2.0).fit(g.edges)
        assert est.n_iter_ >= 1
        assert isinstance(est.converged_, bool)
        assert set(np.unique(est.labels_)) <= {-1, 1}

    def test_rejects_malformed_input(self):
        with pytest.raises(ValueError, match="edge list"):
            BlockModelBP().fit(np.zeros((3, 5)))
