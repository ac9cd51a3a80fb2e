"""Numerical kernels for the stirred-tank reactor.

The batched horizon rollout is where every experiment spends its time
(agents x horizon x Euler sub-steps), so it is compiled with numba when
available.  A vectorized numpy twin implements the same arithmetic; the
CBO_MPC_NO_NUMBA environment variable selects it (see ``accel``).  The
scalar Euler routine is shared by the plant's single-step path so that
trace replay and the batched rollouts integrate identically.
"""

import math

import numpy as np

from .accel import NUMBA_ENABLED, njit


@njit(cache=True)
def cstr_derivatives(C, T, q_c, q, V, C_f, T_0, T_C0, hA, k_0, E_over_R,
                     dH, rho, rho_c, c_p, c_pc):
    """Time derivatives (dC/dt, dT/dt) of the reactor state."""
    arr = math.exp(-E_over_R / T)
    cool = rho_c * c_pc * q_c / (rho * c_p * V) * (1.0 - math.exp(-hA / (q_c * rho_c * c_pc)))
    dC = q / V * (C_f - C) - k_0 * C * arr
    dT = q / V * (T_0 - T) - k_0 * dH / (rho * c_p) * C * arr + cool * (T_C0 - T)
    return dC, dT


@njit(cache=True)
def cstr_euler(C, T, q_c, n_sub, h, q, V, C_f, T_0, T_C0, hA, k_0, E_over_R,
               dH, rho, rho_c, c_p, c_pc):
    """``n_sub`` explicit Euler sub-steps of size ``h`` with q_c held fixed.

    Returns ``(C, T, bad)`` where ``bad`` is the index of the first
    sub-step that produced a non-finite state, or -1 on success.
    """
    qV = q / V
    heat = k_0 * dH / (rho * c_p)
    cool = rho_c * c_pc * q_c / (rho * c_p * V) * (1.0 - math.exp(-hA / (q_c * rho_c * c_pc)))
    for k in range(n_sub):
        arr = math.exp(-E_over_R / T)
        dC = qV * (C_f - C) - k_0 * C * arr
        dT = qV * (T_0 - T) - heat * C * arr + cool * (T_C0 - T)
        C = C + h * dC
        T = T + h * dT
        if not (math.isfinite(C) and math.isfinite(T)):
            return C, T, k
    return C, T, -1


@njit(cache=True)
def _cstr_rollout_numba(controls, C0, T0, n_sub, h, q, V, C_f, T_0, T_C0,
                        hA, k_0, E_over_R, dH, rho, rho_c, c_p, c_pc,
                        y_refs, u_refs, nu):
    n_agents, horizon = controls.shape
    losses = np.empty(n_agents)
    qV = q / V
    heat = k_0 * dH / (rho * c_p)
    for i in range(n_agents):
        C = C0
        T = T0
        acc = 0.0
        for m in range(horizon):
            q_c = controls[i, m]
            cool = rho_c * c_pc * q_c / (rho * c_p * V) * (1.0 - math.exp(-hA / (q_c * rho_c * c_pc)))
            for k in range(n_sub):
                arr = math.exp(-E_over_R / T)
                dC = qV * (C_f - C) - k_0 * C * arr
                dT = qV * (T_0 - T) - heat * C * arr + cool * (T_C0 - T)
                C = C + h * dC
                T = T + h * dT
            dy = C - y_refs[m]
            du = q_c - u_refs[m]
            acc += dy * dy + nu * du * du
        losses[i] = acc
    return losses


def _cstr_rollout_numpy(controls, C0, T0, n_sub, h, q, V, C_f, T_0, T_C0,
                        hA, k_0, E_over_R, dH, rho, rho_c, c_p, c_pc,
                        y_refs, u_refs, nu):
    n_agents, horizon = controls.shape
    C = np.full(n_agents, C0)
    T = np.full(n_agents, T0)
    losses = np.zeros(n_agents)
    qV = q / V
    heat = k_0 * dH / (rho * c_p)
    for m in range(horizon):
        q_c = controls[:, m]
        cool = rho_c * c_pc * q_c / (rho * c_p * V) * (1.0 - np.exp(-hA / (q_c * rho_c * c_pc)))
        for k in range(n_sub):
            arr = np.exp(-E_over_R / T)
            dC = qV * (C_f - C) - k_0 * C * arr
            dT = qV * (T_0 - T) - heat * C * arr + cool * (T_C0 - T)
            C = C + h * dC
            T = T + h * dT
        losses += (C - y_refs[m]) ** 2 + nu * (q_c - u_refs[m]) ** 2
    return losses


# Active rollout kernel; both variants stay importable for benchmarking.
cstr_rollout_losses = _cstr_rollout_numba if NUMBA_ENABLED else _cstr_rollout_numpy
