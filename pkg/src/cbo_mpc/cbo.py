"""Projected consensus-based optimization over a box.

An ensemble of N agents explores the search space; each step every agent
drifts toward a Gibbs-weighted average of the ensemble (the consensus
point), receives scaled Gaussian noise, and is clamped back into the box.
The objective is a black box: only function values enter the dynamics.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .box import ControlBox, project_box
from .rng import NoiseSource

DIFFUSION_MODES = ("isotropic", "consensus")


class EvaluationError(RuntimeError):
    """Objective returned a non-finite value for some agent."""

    def __init__(self, agent_index, value):
        super().__init__(
            f"objective returned non-finite value {value!r} at agent {agent_index}"
        )
        self.agent_index = int(agent_index)


@dataclass
class CboParams:
    """Parameters of the consensus-based optimizer.

    ``lam`` is the drift rate, ``sigma`` the noise scale, ``tau`` the
    pseudo-time step, ``alpha`` the Gibbs weight exponent, ``n_agents``
    the ensemble size and ``k_bar`` the number of iterations spent on one
    sub-problem.  ``diffusion`` selects the noise shape: ``"isotropic"``
    scales the Gaussian by 1 in every component; ``"consensus"`` scales
    it by the agent's distance to the consensus point plus
    ``sigma_tilde``.
    """

    lam: float = 1.0
    sigma: float = 3.0
    tau: float = 0.1
    alpha: float = 1e5
    n_agents: int = 32
    k_bar: int = 10
    diffusion: str = "isotropic"
    sigma_tilde: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.lam <= 0 or self.sigma < 0 or self.tau <= 0:
            raise ValueError("require lam > 0, sigma >= 0, tau > 0")
        if not 0.0 < self.lam * self.tau < 1.0:
            raise ValueError(f"lam * tau = {self.lam * self.tau} must lie in (0, 1)")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")
        # k_bar = 0 is a degenerate but valid run (no steps applied).
        if self.k_bar < 0:
            raise ValueError("k_bar must be >= 0")
        if self.diffusion not in DIFFUSION_MODES:
            raise ValueError(f"diffusion must be one of {DIFFUSION_MODES}")
        if self.sigma_tilde < 0:
            raise ValueError("sigma_tilde must be >= 0")


@dataclass
class Ensemble:
    """Agent positions with cached objective values and consensus point.

    ``values`` and ``consensus`` are None until the ensemble has been
    evaluated against an objective; afterwards ``values[i]`` always equals
    the objective at ``positions[i]`` and ``consensus`` is the Gibbs mean
    of the current positions.
    """

    positions: np.ndarray
    values: np.ndarray | None = None
    consensus: np.ndarray | None = None

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))

    @property
    def n_agents(self):
        return self.positions.shape[0]

    @property
    def dim(self):
        return self.positions.shape[1]


def _check_finite(values):
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise EvaluationError(bad[0], values[bad[0]])


def evaluate_objective(objective, positions):
    """Objective values for a stack of positions, shape ``(N, D) -> (N,)``.

    Uses the objective's vectorized ``batch`` method when it has one,
    otherwise calls it once per row.  Non-finite values raise
    :class:`EvaluationError` naming the offending agent.
    """
    batch = getattr(objective, "batch", None)
    if batch is not None:
        values = np.asarray(batch(positions), dtype=float)
    else:
        values = np.array([float(objective(p)) for p in positions])
    _check_finite(values)
    return values


def consensus_from(positions, values, alpha):
    """Gibbs-weighted mean of positions: weights ``exp(-alpha * values)``.

    The values are shifted by their minimum before exponentiation.  The
    weights are invariant under that translation, so the result is exact,
    and the shift keeps the exponentials representable even at
    ``alpha = 1e5``.
    """
    if alpha == 0.0:
        # exp(0) weights for every agent: plain arithmetic mean.
        return positions.mean(axis=0)
    weights = np.exp(-alpha * (values - values.min()))
    return (weights @ positions) / weights.sum()


def consensus_point(ensemble, alpha):
    """Consensus point of an evaluated ensemble (see :func:`consensus_from`)."""
    if ensemble.values is None:
        raise ValueError("ensemble has no cached objective values; evaluate it first")
    _check_finite(ensemble.values)
    return consensus_from(ensemble.positions, ensemble.values, alpha)


def refresh(ensemble, objective, alpha):
    """Re-evaluate the cache and consensus of an ensemble's positions.

    Needed whenever the objective changes under a standing ensemble, e.g.
    at the start of each receding-horizon sub-problem.
    """
    values = evaluate_objective(objective, ensemble.positions)
    consensus = consensus_from(ensemble.positions, values, alpha)
    return Ensemble(ensemble.positions, values, consensus)


def _diffusion_factors(params, positions, consensus):
    if params.diffusion == "isotropic":
        return 1.0
    # Consensus-relative: component-wise distance to the consensus point
    # plus a small offset; may be negative, which only flips the sign of
    # the symmetric Gaussian noise.
    return (consensus - positions) + params.sigma_tilde


def cbo_step(ensemble, objective, params, box, noise, step_index):
    """One simultaneous update of all agents.

    Every agent moves using the consensus point of the incoming ensemble
    (no agent sees intra-step moves), receives its own noise row from
    ``noise`` at ``step_index``, and is projected back into ``box``.  The
    returned ensemble has a coherent value cache and a consensus point
    recomputed on the new positions.
    """
    if ensemble.values is None or ensemble.consensus is None:
        raise ValueError("ensemble must be evaluated before stepping; call refresh()")
    pos = ensemble.positions
    m = ensemble.consensus
    theta = noise.normals(step_index, ensemble.n_agents, ensemble.dim)
    drift = params.lam * params.tau * (m - pos)
    spread = params.sigma * math.sqrt(params.tau) * _diffusion_factors(params, pos, m)
    new_pos = np.clip(pos + drift + spread * theta, box.lower, box.upper)
    new_values = evaluate_objective(objective, new_pos)
    new_consensus = consensus_from(new_pos, new_values, params.alpha)
    return Ensemble(new_pos, new_values, new_consensus)


def run_cbo(ensemble, objective, params, box, noise=None, start_step=0):
    """Refresh the ensemble under ``objective`` and apply ``k_bar`` steps.

    Steps consume noise at indices ``start_step .. start_step + k_bar - 1``
    so that successive sub-problems sharing one :class:`NoiseSource` never
    reuse a draw.  Returns the final ensemble and its consensus point.
    """
    if noise is None:
        noise = NoiseSource(params.seed)
    ens = refresh(ensemble, objective, params.alpha)
    for k in range(params.k_bar):
        ens = cbo_step(ens, objective, params, box, noise, start_step + k)
    return ens, ens.consensus
