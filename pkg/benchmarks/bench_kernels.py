"""Timing comparison of the two reactor rollout kernels.

The batched horizon rollout in ``cbo_mpc.kernels`` exists twice: a numba
njit loop and a vectorized numpy twin.  This script runs both on the same
workload (ensemble x horizon x Euler sub-steps, defaults match the
reactor tracking protocol), checks they agree to round-off, and prints
per-call times and the speedup.  With CBO_MPC_NO_NUMBA=1 the njit
decorator is a no-op, so the "numba" column degenerates to plain Python;
the printed backend line says which situation you are in.
"""

import argparse
import time

import numpy as np

from cbo_mpc.accel import NUMBA_ENABLED, backend
from cbo_mpc.kernels import _cstr_rollout_numba, _cstr_rollout_numpy
from cbo_mpc.plants import CstrPlant


def build_workload(n_agents, horizon, seed):
    plant = CstrPlant()
    rng = np.random.default_rng(seed)
    u_seqs = rng.uniform(plant.qc_min, plant.qc_max, size=(n_agents, horizon))
    y_refs = np.empty(horizon)
    u_refs = np.empty(horizon)
    for m in range(horizon):
        t_m = m * plant.dt
        y_refs[m] = plant.reference(t_m + plant.dt)[0][0]
        u_refs[m] = plant.reference(t_m)[1][0]
    return (np.ascontiguousarray(u_seqs), 0.1, 438.54, plant.n_sub,
            plant.substep, *plant._consts(), y_refs, u_refs, 1.0)


def time_per_call(fn, args, trials):
    # Calibrate the inner loop so one trial takes ~50 ms, then keep the
    # best trial (least scheduler noise).
    tic = time.perf_counter()
    fn(*args)
    once = time.perf_counter() - tic
    inner = int(np.clip(0.05 / max(once, 1e-9), 1, 10_000))
    best = np.inf
    for _ in range(trials):
        tic = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - tic) / inner)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--agents", type=int, default=32)
    ap.add_argument("--horizon", type=int, default=10)
    ap.add_argument("--trials", type=int, default=7)
    ap.add_argument("--seed", type=int, default=0)
    opts = ap.parse_args()

    args = build_workload(opts.agents, opts.horizon, opts.seed)
    print(f"workload: {opts.agents} agents x {opts.horizon} moves "
          f"x {args[3]} Euler sub-steps per move")
    print(f"active backend: {backend()}")
    if not NUMBA_ENABLED:
        print("note: numba disabled, 'numba' row below is uncompiled Python")

    # First call JIT-compiles; do it before timing and use it to check
    # both paths produce the same numbers.
    np.testing.assert_allclose(_cstr_rollout_numba(*args),
                               _cstr_rollout_numpy(*args), rtol=1e-12)

    t_nb = time_per_call(_cstr_rollout_numba, args, opts.trials)
    t_np = time_per_call(_cstr_rollout_numpy, args, opts.trials)
    print(f"numba  {t_nb * 1e3:9.4f} ms/call")
    print(f"numpy  {t_np * 1e3:9.4f} ms/call")
    print(f"speedup numpy/numba: {t_np / t_nb:.2f}x")


if __name__ == "__main__":
    main()
