"""Phase-transition toolkit for the Rademacher spiked Wigner model and the
two-community stochastic block model: message passing, state evolution,
replica-symmetric free energy, and brute-force oracles."""

from .amp import AmpResult, AmpState, amp_run, amp_step, amp_step_no_onsager, power_iteration
from .bp import (
    BpResult,
    Couplings,
    MessagePool,
    MessageSet,
    bp_clamped_marginals,
    bp_edge_step,
    bp_full_step,
    bp_run,
    couplings_from_rates,
    ks_threshold,
    linear_growth_rate,
    population_dynamics,
    sbm_to_ks,
    tree_bp_root,
)
from .errors import DegenerateModelError, NumericFailure
from .exact import (
    ExactSummary,
    GibbsSpec,
    enumerate_gibbs,
    exact_posterior_marginals,
    gibbs_minimizes_free_energy,
)
from .estimators import BlockModelBP, SpikedWignerAMP
from .models import (
    DenseInstance,
    GwTree,
    SbmInstance,
    gen_sbm,
    gen_spiked_wigner,
    overlap,
    sample_galton_watson,
)
from .numerics import QuadratureRule, SeedSpec, expect_gauss, gauss_hermite_rule, psi
from .replica import (
    LandscapeCurve,
    Phase,
    QMuSolution,
    classify_phase,
    landscape,
    rs_free_energy,
    solve_q_mu,
    thresholds,
)
from .state_evolution import SePrediction, SeTrajectory, se_fixed_point, se_predict, se_step

__version__ = "0.1.0"
