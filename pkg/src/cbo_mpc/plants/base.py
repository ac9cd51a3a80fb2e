"""Plant model interface used by the receding-horizon engine.

A plant is anything with a deterministic one-step transition map, a
tracked output, a reference schedule, and an admissible control box.
Concrete models may additionally expose vectorized hooks (``step_many``
or ``rollout_losses``) that the engine uses to evaluate whole ensembles
at once; the scalar ``step`` remains the authoritative definition.
"""

import numpy as np


class IntegrationError(RuntimeError):
    """Plant state became non-finite during integration."""

    def __init__(self, substep_index, state):
        super().__init__(
            f"non-finite plant state {state!r} at sub-step {substep_index}"
        )
        self.substep_index = int(substep_index)
        self.state = state


class PlantModel:
    """Interface contract; concrete plants implement all four methods."""

    state_dim: int
    control_dim: int

    def step(self, x, u, t):
        """Next state from state ``x`` under control ``u`` applied at time ``t``."""
        raise NotImplementedError

    def tracked_output(self, x):
        """The components of the state that the loss tracks."""
        raise NotImplementedError

    def reference(self, t):
        """Pair (tracked reference, control reference) at time ``t``.

        Defined for all t >= 0; past the end of an experiment the schedule
        holds its final value.
        """
        raise NotImplementedError


def as_state(x, dim):
    x = np.asarray(x, dtype=float).ravel()
    if x.shape != (dim,):
        raise ValueError(f"expected state of dimension {dim}, got shape {x.shape}")
    return x
