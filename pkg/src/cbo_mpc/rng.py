"""Counter-based random streams for reproducible agent noise.

Each optimizer step draws its noise matrix from a Philox generator keyed
by ``(seed, step index)``; row ``i`` of the matrix is the noise of agent
``i``.  Because Philox is counter-based, the noise of agent ``i`` at step
``k`` is a pure function of ``(seed, k, i, dim)`` -- independent of how
many agents are updated before it, of evaluation order, and of any
parallel scheduling of the update loop.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


class NoiseSource:
    """Deterministic per-step Gaussian noise keyed by a single seed."""

    def __init__(self, seed):
        self.seed = int(seed) & _MASK64

    def _generator(self, stream):
        return np.random.Generator(np.random.Philox(key=[self.seed, stream]))

    def normals(self, step, n_agents, dim):
        """Standard-normal matrix of shape ``(n_agents, dim)`` for a step.

        ``step`` must be the global step counter (unique across the whole
        run); reusing a step index reproduces the same draw.
        """
        if step < 0:
            raise ValueError("step index must be >= 0")
        return self._generator(step + 1).standard_normal((n_agents, dim))

    def init_rng(self):
        """Generator reserved for initial-ensemble sampling (stream 0)."""
        return self._generator(0)
