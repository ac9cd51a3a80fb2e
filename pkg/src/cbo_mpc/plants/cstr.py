"""Continuous stirred-tank reactor with coolant flow control.

State (C, T): reactant concentration [mol/l] and temperature [K].
Control q_c: coolant flow rate [l/min], held constant over each sampling
interval (zero-order hold) and integrated with fixed-step explicit Euler.
The tracked output is the concentration alone; the reference schedule
steps from one operating point to another at ``t_switch``.
"""

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..box import ControlBox
from .base import IntegrationError, PlantModel, as_state


@dataclass
class CstrPlant(PlantModel):
    """Reactor model; defaults are the standard operating parameters."""

    q: float = 100.0          # process flow rate, l/min
    V: float = 100.0          # reactor volume, l
    C_f: float = 1.0          # feed concentration, mol/l
    T_0: float = 350.0        # feed temperature, K
    T_C0: float = 350.0       # inlet coolant temperature, K
    hA: float = 7e5           # heat transfer term, kcal/min
    k_0: float = 7.2e10       # reaction rate, 1/min
    E_over_R: float = 1e4     # activation energy over gas constant, K
    dH: float = -2e5          # heat of reaction, cal/mol (exothermic)
    rho: float = 1e3          # liquid density, g/l
    rho_c: float = 1e3        # coolant density, g/l
    c_p: float = 1.0          # specific heat, kcal/g
    c_pc: float = 1.0         # coolant specific heat, kcal/g
    substep: float = 1e-3     # internal Euler step, min
    dt: float = 0.05          # sampling period, min
    qc_min: float = 20.0      # coolant flow bounds, l/min
    qc_max: float = 200.0
    t_switch: float = 3.0     # reference switch time, min
    c_ref: tuple = (0.1, 0.12)          # tracked concentration, mol/l
    qc_ref: tuple = (103.411, 108.1)    # control reference, l/min

    state_dim = 2
    control_dim = 1

    def __post_init__(self):
        if self.substep <= 0 or self.dt <= 0:
            raise ValueError("substep and dt must be positive")
        n_sub = round(self.dt / self.substep)
        if n_sub < 1 or abs(n_sub * self.substep - self.dt) > 1e-9 * self.dt:
            raise ValueError("dt must be an integer multiple of substep")
        self.n_sub = n_sub
        self.box = ControlBox([self.qc_min], [self.qc_max])

    def _consts(self):
        return (self.q, self.V, self.C_f, self.T_0, self.T_C0, self.hA,
                self.k_0, self.E_over_R, self.dH, self.rho, self.rho_c,
                self.c_p, self.c_pc)

    def step(self, x, u, t=0.0):
        x = as_state(x, 2)
        q_c = float(np.asarray(u).ravel()[0])
        C, T = cstr_step((x[0], x[1]), q_c, self)
        return np.array([C, T])

    def tracked_output(self, x):
        return np.asarray(x, dtype=float).ravel()[:1]

    def reference(self, t):
        # Right-continuous switch: t_switch belongs to the second regime.
        idx = 0 if t < self.t_switch else 1
        return np.array([self.c_ref[idx]]), np.array([self.qc_ref[idx]])

    def rollout_losses(self, x, t_n, u_seqs, nu, to_reference):
        """Loss of every control sequence in ``u_seqs`` (one agent per row).

        Rollouts start at state ``x`` and time ``t_n``; each row holds one
        coolant flow per sampling period.  Tracking error is summed over
        the states visited, control penalty over the moves, measured from
        the control reference when ``to_reference`` is set.
        """
        u_seqs = np.ascontiguousarray(u_seqs, dtype=float)
        horizon = u_seqs.shape[1]
        y_refs = np.empty(horizon)
        u_refs = np.zeros(horizon)
        for m in range(horizon):
            # same float grid as the scalar rollout: t_m = t_n + m*dt, then +dt
            t_m = t_n + m * self.dt
            y_refs[m] = self.reference(t_m + self.dt)[0][0]
            if to_reference:
                u_refs[m] = self.reference(t_m)[1][0]
        x = as_state(x, 2)
        return kernels.cstr_rollout_losses(
            u_seqs, x[0], x[1], self.n_sub, self.substep, *self._consts(),
            y_refs, u_refs, nu)


def cstr_rhs(C, T, q_c, params):
    """Instantaneous derivatives (dC/dt, dT/dt) of the reactor."""
    if q_c <= 0:
        raise ValueError(f"coolant flow must be positive, got {q_c}")
    return kernels.cstr_derivatives(C, T, q_c, *params._consts())


def cstr_step(state, q_c, params):
    """One sampling period of the reactor under constant coolant flow.

    Applies ``dt / substep`` explicit Euler sub-steps.  Raises
    :class:`IntegrationError` with the failing sub-step index if the
    state leaves the finite range.
    """
    if q_c <= 0:
        raise ValueError(f"coolant flow must be positive, got {q_c}")
    C, T = float(state[0]), float(state[1])
    C, T, bad = kernels.cstr_euler(C, T, float(q_c), params.n_sub,
                                   params.substep, *params._consts())
    if bad >= 0:
        raise IntegrationError(bad, (C, T))
    return C, T
