"""Plant with additive linear control action: x_next = phi_s(x) + F_c u."""

import numpy as np

from ..box import ControlBox
from .base import PlantModel, as_state


def _as_control_matrix(F_c):
    F_c = np.asarray(F_c, dtype=float)
    if F_c.ndim == 0:
        return F_c.reshape(1, 1)
    if F_c.ndim == 1:
        # Column vector: several states, one control channel.
        return F_c.reshape(-1, 1)
    if F_c.ndim != 2:
        raise ValueError("F_c must be a scalar, vector or matrix")
    return F_c


def piecewise_constant(times, values):
    """Right-continuous step schedule: value[i] holds on [times[i], times[i+1]).

    ``times`` must start at 0 and increase strictly; the final value
    holds forever.  Returns a callable of time producing a 1-D array.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] != 0.0:
        raise ValueError("times must be a non-empty 1-D grid starting at 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    table = np.atleast_2d(np.asarray(values, dtype=float).T).T
    if table.shape[0] != times.size:
        raise ValueError("one value (row) per time is required")

    def schedule(t):
        return table[np.searchsorted(times, t, side="right") - 1]

    return schedule


def _as_schedule(ref, dim):
    """Normalize a reference (None, constant, or callable) to a callable."""
    if ref is None:
        const = np.zeros(dim)
        return lambda t: const
    if callable(ref):
        return lambda t: np.asarray(ref(t), dtype=float).ravel()
    const = np.asarray(ref, dtype=float).ravel()
    if const.shape != (dim,):
        raise ValueError(f"constant reference must have dimension {dim}")
    return lambda t: const


class LinearAdditivePlant(PlantModel):
    """Discrete plant whose control enters linearly.

    ``phi_s`` is the uncontrolled state map: a callable ``x -> x_next``,
    a square matrix ``A_s`` (then ``phi_s(x) = A_s x``), or a pair
    ``(A_s, b_s)`` for the affine map ``A_s x + b_s``.  ``F_c`` is the
    ``state_dim x control_dim`` control matrix and ``box`` the admissible
    control set.  ``x_ref`` / ``u_ref`` give the tracked and control
    references, each either constant or a callable of time (default 0).
    """

    def __init__(self, phi_s, F_c, box, x_ref=None, u_ref=None):
        self.F_c = _as_control_matrix(F_c)
        self.state_dim, self.control_dim = self.F_c.shape
        if not isinstance(box, ControlBox):
            box = ControlBox(*box)
        if box.dim != self.control_dim:
            raise ValueError("box dimension must match the control dimension")
        self.box = box
        if callable(phi_s):
            self.A_s = None
            self.b_s = None
            self._phi_s = phi_s
        else:
            if isinstance(phi_s, tuple):
                A_s, b_s = phi_s
            else:
                A_s, b_s = phi_s, None
            A_s = np.asarray(A_s, dtype=float)
            if A_s.ndim == 0:
                A_s = A_s.reshape(1, 1)
            if A_s.shape != (self.state_dim, self.state_dim):
                raise ValueError("A_s must be square with the state dimension")
            self.A_s = A_s
            self.b_s = np.zeros(self.state_dim) if b_s is None else as_state(b_s, self.state_dim)
            self._phi_s = None
        self._x_ref = _as_schedule(x_ref, self.state_dim)
        self._u_ref = _as_schedule(u_ref, self.control_dim)

    def phi_s(self, x):
        """Uncontrolled part of the step map."""
        x = as_state(x, self.state_dim)
        if self._phi_s is not None:
            return as_state(self._phi_s(x), self.state_dim)
        return self.A_s @ x + self.b_s

    def step(self, x, u, t=0.0):
        u = as_state(u, self.control_dim)
        return self.phi_s(x) + self.F_c @ u

    def step_many(self, states, controls):
        """Vectorized step for ``(N, m)`` states under ``(N, d)`` controls."""
        if self._phi_s is None:
            drift = states @ self.A_s.T + self.b_s
        else:
            drift = np.array([self.phi_s(s) for s in states])
        return drift + controls @ self.F_c.T

    def tracked_output(self, x):
        return as_state(x, self.state_dim)

    def tracked_output_many(self, states):
        return states

    def reference(self, t):
        return self._x_ref(t), self._u_ref(t)


def linear_step(x, u, plant):
    """Transition of the additive-control plant: phi_s(x) + F_c u."""
    return plant.step(x, u)
