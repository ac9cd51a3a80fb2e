"""Receding-horizon control loop driven by consensus-based optimization.

At each outer step n the plant state x_n defines a finite-horizon
tracking loss over the next H control moves.  A warm-started ensemble
attacks that loss for a fixed number of CBO iterations, the first block
of the resulting consensus point is applied to the plant, and the final
ensemble seeds the next sub-problem.
"""

from dataclasses import dataclass
import time

import numpy as np

from .box import project_box
from .cbo import Ensemble, run_cbo
from .rng import NoiseSource


class RolloutError(RuntimeError):
    """Plant produced a non-finite state during a horizon rollout."""

    def __init__(self, move_index, state):
        super().__init__(
            f"non-finite state {state!r} after rollout move {move_index}"
        )
        self.move_index = int(move_index)
        self.state = state


@dataclass
class MpcConfig:
    """Sub-problem shape shared by every outer step.

    ``horizon`` is the number of control moves H per sub-problem (search
    dimension is ``plant.control_dim * horizon``), ``nu`` the control
    penalty weight, ``n_steps`` the number of outer steps, ``dt`` the
    sampling period.  With ``regularize_to_reference`` the penalty is
    ``|u - u_ref(t)|^2`` instead of ``|u|^2``.
    """

    horizon: int
    nu: float
    n_steps: int
    dt: float
    regularize_to_reference: bool = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.nu < 0:
            raise ValueError("nu must be >= 0")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.dt <= 0:
            raise ValueError("dt must be positive")


@dataclass
class MpcTrace:
    """Record of one closed-loop run.

    ``states`` has one more row than the other arrays (it includes the
    final state), so ``states[n+1] == plant.step(states[n], controls[n])``
    holds for every recorded step and the run can be replayed exactly.
    ``losses[n]`` is the sub-problem loss at the applied (consensus)
    control sequence.  ``n_evaluations`` counts objective evaluations by
    agents; the recorded losses are not part of the count.
    """

    dt: float
    states: np.ndarray        # (n_steps + 1, state_dim)
    controls: np.ndarray      # (n_steps, control_dim)
    losses: np.ndarray        # (n_steps,)
    consensus: np.ndarray     # (n_steps, control_dim * horizon)
    inner_seconds: np.ndarray  # (n_steps,)
    n_evaluations: int

    @property
    def n_steps(self):
        return self.controls.shape[0]

    @property
    def times(self):
        return self.dt * np.arange(self.n_steps)


def rollout_loss(plant, x_n, t_n, u_seq, config):
    """Tracking loss of one control sequence from state ``x_n`` at ``t_n``.

    The sequence splits into ``config.horizon`` moves applied in order;
    the plant is stepped through them and the squared tracking error of
    every visited output is accumulated together with the control
    penalty.  This scalar path defines the loss; vectorized plant hooks
    must agree with it.
    """
    d = plant.control_dim
    u_seq = np.asarray(u_seq, dtype=float).ravel()
    if u_seq.shape != (d * config.horizon,):
        raise ValueError(
            f"expected {d * config.horizon} control values, got {u_seq.shape}"
        )
    x = np.asarray(x_n, dtype=float)
    loss = 0.0
    for m in range(config.horizon):
        u_m = u_seq[m * d:(m + 1) * d]
        t_m = t_n + m * config.dt
        x = plant.step(x, u_m, t_m)
        if not np.all(np.isfinite(x)):
            raise RolloutError(m, x)
        dy = plant.tracked_output(x) - plant.reference(t_m + config.dt)[0]
        loss += dy @ dy
        du = u_m - plant.reference(t_m)[1] if config.regularize_to_reference else u_m
        loss += config.nu * (du @ du)
    return loss


class RolloutObjective:
    """Sub-problem loss as a black-box objective over control sequences.

    Evaluation strategy, fastest available first: a plant-level batched
    rollout (``plant.rollout_losses``), a vectorized per-move stepper
    (``plant.step_many``), or the scalar rollout row by row.  Counts
    every evaluated sequence in ``n_calls``.
    """

    def __init__(self, plant, x_n, t_n, config):
        self.plant = plant
        self.x_n = np.asarray(x_n, dtype=float)
        self.t_n = t_n
        self.config = config
        self.n_calls = 0

    def __call__(self, u_seq):
        self.n_calls += 1
        return rollout_loss(self.plant, self.x_n, self.t_n, u_seq, self.config)

    def batch(self, u_seqs):
        u_seqs = np.atleast_2d(np.asarray(u_seqs, dtype=float))
        self.n_calls += u_seqs.shape[0]
        cfg = self.config
        if hasattr(self.plant, "rollout_losses"):
            return self.plant.rollout_losses(
                self.x_n, self.t_n, u_seqs, cfg.nu, cfg.regularize_to_reference)
        if hasattr(self.plant, "step_many"):
            return self._batch_by_steps(u_seqs)
        return np.array([
            rollout_loss(self.plant, self.x_n, self.t_n, row, cfg)
            for row in u_seqs
        ])

    def _batch_by_steps(self, u_seqs):
        plant, cfg = self.plant, self.config
        d = plant.control_dim
        n = u_seqs.shape[0]
        states = np.broadcast_to(self.x_n, (n, self.x_n.size)).copy()
        losses = np.zeros(n)
        for m in range(cfg.horizon):
            u_m = u_seqs[:, m * d:(m + 1) * d]
            t_m = self.t_n + m * cfg.dt
            states = plant.step_many(states, u_m)
            dy = plant.tracked_output_many(states) - plant.reference(t_m + cfg.dt)[0]
            losses += np.einsum("ij,ij->i", dy, dy)
            du = u_m - plant.reference(t_m)[1] if cfg.regularize_to_reference else u_m
            losses += cfg.nu * np.einsum("ij,ij->i", du, du)
        return losses


def reference_init(plant, config, half_width=0.5):
    """Default initial ensemble: control reference at t=0 plus uniform noise.

    Perturbations are Unif([-half_width, half_width]) per component; the
    result is projected into the box so the sampler is admissible for any
    reference near the boundary.
    """
    def sampler(rng, n_agents, box):
        center = np.tile(plant.reference(0.0)[1], config.horizon)
        pts = center + rng.uniform(-half_width, half_width, (n_agents, box.dim))
        return project_box(pts, box)
    return sampler


def uniform_init(rng, n_agents, box):
    """Initial ensemble drawn uniformly over the whole box."""
    return box.sample_uniform(rng, n_agents)


def mpc_run(plant, x0, cbo, config, init=None):
    """Closed-loop run of ``config.n_steps`` outer steps; returns a trace.

    Each sub-problem runs ``cbo.k_bar`` consensus iterations on the
    current rollout loss, consuming a dedicated slice of the noise
    sequence so the whole run is a pure function of its arguments.  The
    ensemble leaving sub-problem n enters sub-problem n+1 unchanged.
    """
    noise = NoiseSource(cbo.seed)
    box = plant.box.replicate(config.horizon)
    if init is None:
        init = reference_init(plant, config)
    positions = np.asarray(init(noise.init_rng(), cbo.n_agents, box), dtype=float)
    if positions.shape != (cbo.n_agents, box.dim):
        raise ValueError(
            f"init sampler returned shape {positions.shape}, "
            f"expected {(cbo.n_agents, box.dim)}"
        )
    if not box.contains(positions):
        raise ValueError("init sampler produced points outside the box")

    ens = Ensemble(positions)
    d = plant.control_dim
    x = np.asarray(x0, dtype=float)
    states = np.empty((config.n_steps + 1, x.size))
    controls = np.empty((config.n_steps, d))
    losses = np.empty(config.n_steps)
    consensus = np.empty((config.n_steps, box.dim))
    inner_seconds = np.empty(config.n_steps)
    n_evaluations = 0

    for n in range(config.n_steps):
        t_n = n * config.dt
        objective = RolloutObjective(plant, x, t_n, config)
        tic = time.perf_counter()
        ens, m = run_cbo(ens, objective, cbo, box, noise,
                         start_step=n * cbo.k_bar)
        inner_seconds[n] = time.perf_counter() - tic
        n_evaluations += objective.n_calls
        # Consensus is a convex combination of in-box agents; anything
        # beyond rounding slack indicates a broken update.
        if not box.contains(m[None, :], atol=1e-9 * (1.0 + box.diameter())):
            raise RuntimeError(f"consensus left the admissible box at step {n}: {m}")
        u_n = m[:d]
        states[n] = x
        controls[n] = u_n
        consensus[n] = m
        losses[n] = rollout_loss(plant, x, t_n, m, config)
        x = plant.step(x, u_n, t_n)
    states[config.n_steps] = x

    return MpcTrace(config.dt, states, controls, losses, consensus,
                    inner_seconds, n_evaluations)
