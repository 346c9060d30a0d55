import math

import numpy as np
import pytest

from spinglass import (
    AmpState,
    NumericFailure,
    SeedSpec,
    amp_run,
    amp_step,
    amp_step_no_onsager,
    gen_spiked_wigner,
    overlap,
    power_iteration,
)
from spinglass.amp import onsager_coefficient
from spinglass.oracles import naive_amp_step


class TestAmpStep:
    def test_zero_is_a_fixed_point(self):
        inst = gen_spiked_wigner(10, 1.5, SeedSpec(40))
        state = AmpState(np.zeros(10), np.zeros(10), t=0, lam=1.5)
        nxt = amp_step(state, inst)
        assert np.array_equal(nxt.v_current, np.zeros(10))
        assert nxt.t == 1

    def test_matches_scalar_loop_reference(self):
        inst = gen_spiked_wigner(12, 1.7, SeedSpec(41))
        rng = SeedSpec(42).generator()
        state = AmpState(rng.standard_normal(12), rng.standard_normal(12), t=2, lam=1.7)
        fast = amp_step(state, inst).v_current
        naive = naive_amp_step(state.v_current, state.v_previous, inst.observation, 1.7)
        assert np.max(np.abs(fast - naive)) < 1e-12

    def test_reaction_coefficient_at_zero(self):
        state = AmpState(np.zeros(8), np.zeros(8), t=0, lam=1.5)
        assert onsager_coefficient(state) == pytest.approx(1.5)

    def test_uncorrected_step_differs_by_reaction_term(self):
        inst = gen_spiked_wigner(10, 1.3, SeedSpec(43))
        rng = SeedSpec(44).generator()
        state = AmpState(rng.standard_normal(10), rng.standard_normal(10), t=1, lam=1.3)
        corrected = amp_step(state, inst).v_current
        plain = amp_step_no_onsager(state, inst).v_current
        b_t = onsager_coefficient(state)
        f_prev = np.tanh(1.3 * state.v_previous)
        assert np.allclose(plain, corrected + b_t * f_prev, atol=1e-12)

    def test_mismatched_state_rejected(self):
        inst = gen_spiked_wigner(10, 1.5, SeedSpec(45))
        state = AmpState(np.zeros(10), np.zeros(10), t=0, lam=2.0)
        with pytest.raises(ValueError, match="lambda"):
            amp_step(state, inst)
        state = AmpState(np.zeros(9), np.zeros(9), t=0, lam=1.5)
        with pytest.raises(ValueError, match="dimension"):
            amp_step(state, inst)


class TestAmpRun:
    def test_zero_init_is_the_trivial_fixed_point(self):
        inst = gen_spiked_wigner(50, 1.5, SeedSpec(46))
        result = amp_run(inst, init_scale=0.0)
        assert result.converged
        assert result.iterations == 2
        assert np.allclose(result.overlap_trajectory, 0.0)
        assert np.array_equal(result.estimate_soft, np.zeros(50))

    def test_below_transition_stays_uncorrelated(self):
        inst = gen_spiked_wigner(2000, 0.5, SeedSpec(47))
        result = amp_run(inst, seed=SeedSpec(48))
        assert result.overlap_trajectory[-1] <= 5 / math.sqrt(2000)

    def test_above_transition_finds_signal(self):
        inst = gen_spiked_wigner(2000, 2.0, SeedSpec(49))
        result = amp_run(inst, seed=SeedSpec(50))
        assert result.overlap_trajectory[-1] > 0.8
        assert set(np.unique(result.estimate_hard)) <= {-1, 1}
        assert overlap(result.estimate_hard, inst.truth) > 0.8

    def test_reaction_term_improves_over_plain_iteration(self):
        # compare normalized alignment: the uncorrected iterate saturates
        # towards +-1 entries, which inflates the raw inner product while
        # its direction stays strictly worse aligned with the signal
        def cosine(estimate, truth):
            return abs(float(np.dot(estimate, truth))) / (
                np.linalg.norm(estimate) * np.linalg.norm(truth)
            )

        lam, n = 1.5, 2000
        corrected, plain = [], []
        for i in range(6):
            inst = gen_spiked_wigner(n, lam, SeedSpec(51, 2 * i))
            algo_seed = SeedSpec(51, 2 * i + 1)
            corrected.append(
                cosine(amp_run(inst, seed=algo_seed).estimate_soft, inst.truth)
            )
            plain.append(
                cosine(
                    amp_run(inst, seed=algo_seed, with_onsager=False).estimate_soft,
                    inst.truth,
                )
            )
        assert np.mean(plain) < np.mean(corrected)

    def test_validation(self):
        inst = gen_spiked_wigner(10, 1.5, SeedSpec(52))
        with pytest.raises(ValueError, match="max_iters"):
            amp_run(inst, max_iters=1)
        with pytest.raises(ValueError, match="init_scale"):
            amp_run(inst, init_scale=-0.1)

    def test_divergence_detection(self):
        inst = gen_spiked_wigner(10, 1.5, SeedSpec(53))
        huge = gen_spiked_wigner(10, 1.5, SeedSpec(53))
        object.__setattr__(huge, "observation", inst.observation * 1e9)
        with pytest.raises(NumericFailure, match="diverged"):
            amp_run(huge, init_scale=1.0, seed=SeedSpec(54))


class TestPowerIteration:
    def test_known_two_by_two_eigenvector(self):
        inst = gen_spiked_wigner(2, 1.0, SeedSpec(55))
        m = np.array([[2.0, 1.0], [1.0, 2.0]])
        object.__setattr__(inst, "observation", m)
        v = power_iteration(inst, iters=200, seed=SeedSpec(56))
        expected = np.array([1.0, 1.0]) / math.sqrt(2)
        assert min(np.max(np.abs(v - expected)), np.max(np.abs(v + expected))) < 1e-8

    def test_unit_norm(self):
        inst = gen_spiked_wigner(100, 2.0, SeedSpec(57))
        v = power_iteration(inst, iters=50, seed=SeedSpec(58))
        assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_strong_signal_recovered(self):
        inst = gen_spiked_wigner(2000, 3.0, SeedSpec(59))
        v = power_iteration(inst, iters=100, seed=SeedSpec(60))
        assert overlap(np.sign(v), inst.truth) > 0.5

    def test_no_signal_stays_uncorrelated(self):
        inst = gen_spiked_wigner(2000, 0.0, SeedSpec(61))
        v = power_iteration(inst, iters=100, seed=SeedSpec(62))
        assert overlap(np.sign(v), inst.truth) <= 5 / math.sqrt(2000)

    def test_iteration_count_validated(self):
        inst = gen_spiked_wigner(10, 1.0, SeedSpec(63))
        with pytest.raises(ValueError, match="iters"):
            power_iteration(inst, iters=0, seed=SeedSpec(0))
