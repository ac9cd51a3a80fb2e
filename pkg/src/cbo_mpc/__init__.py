"""Consensus-based optimization driving receding-horizon control.

An ensemble of agents minimizes each finite-horizon tracking loss by
drifting toward a Gibbs-weighted consensus point; the first move of that
consensus is applied to the plant and the ensemble warm-starts the next
sub-problem.  Includes an exact QP oracle and quantitative convergence
bounds for plants whose control enters linearly, a stirred-tank reactor
benchmark, and a reproducible experiment harness.
"""

from .accel import NUMBA_ENABLED, backend
from .box import ControlBox, project_box
from .cbo import (CboParams, Ensemble, EvaluationError, cbo_step,
                  consensus_point, run_cbo)
from .mpc import (MpcConfig, MpcTrace, RolloutError, RolloutObjective,
                  mpc_run, reference_init, rollout_loss, uniform_init)
from .plants import (CstrPlant, IntegrationError, LinearAdditivePlant,
                     PlantModel, cstr_rhs, cstr_step, linear_step)
from .rng import NoiseSource
from .theory import (QpObjective, QpSolution, alpha0, alpha0_n, delta_r_bound,
                     growth_check, kbar_min, laplace_bound, log_delta_r_bound,
                     mass_estimate, qp_solve, r_epsilon, v_star, vdecay_bound)

__version__ = "0.1.0"

__all__ = [
    "CboParams",
    "ControlBox",
    "CstrPlant",
    "Ensemble",
    "EvaluationError",
    "IntegrationError",
    "LinearAdditivePlant",
    "MpcConfig",
    "MpcTrace",
    "NoiseSource",
    "NUMBA_ENABLED",
    "PlantModel",
    "QpObjective",
    "QpSolution",
    "RolloutError",
    "RolloutObjective",
    "alpha0",
    "alpha0_n",
    "backend",
    "cbo_step",
    "consensus_point",
    "cstr_rhs",
    "cstr_step",
    "delta_r_bound",
    "growth_check",
    "kbar_min",
    "laplace_bound",
    "linear_step",
    "log_delta_r_bound",
    "mass_estimate",
    "mpc_run",
    "project_box",
    "qp_solve",
    "r_epsilon",
    "reference_init",
    "rollout_loss",
    "run_cbo",
    "uniform_init",
    "v_star",
    "vdecay_bound",
]
