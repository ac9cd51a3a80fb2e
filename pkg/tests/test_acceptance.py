"""Acceptance suite: one test per headline criterion.

Each test drives the full stack at the protocol sizes, then records a
single PASS/FAIL line (see conftest) and asserts.  The sweeps dominate
the runtime at roughly two minutes total.
"""

import math
import time

import numpy as np
import pytest

from cbo_mpc import harness
from cbo_mpc.box import ControlBox
from cbo_mpc.cbo import CboParams, Ensemble, consensus_from, run_cbo
from cbo_mpc.mpc import MpcConfig, RolloutObjective, mpc_run, uniform_init
from cbo_mpc.plants import CstrPlant, LinearAdditivePlant, cstr_step
from cbo_mpc.plants.linear import piecewise_constant
from cbo_mpc.rng import NoiseSource
from cbo_mpc.theory import (QpObjective, qp_solve, v_star, vdecay_bound)

from conftest import record_criterion
from oracles import cstr_integrate_oracle, quadratic_box_argmin


def check(name, ok, detail):
    line = record_criterion(name, ok, detail)
    assert ok, line


def headline_config(seed):
    return harness.config_from_dict({"seed": seed})


def tracking_plant():
    # 1-D plant with decaying drift and unit control authority, tracking a
    # two-level piecewise-constant state reference
    return LinearAdditivePlant(
        (np.array([[0.9]]), None), 1.0, ControlBox([-1.0], [1.0]),
        x_ref=piecewise_constant([0.0, 1.25], [0.5, -0.3]))


TRACKING_MPC = MpcConfig(horizon=1, nu=0.1, n_steps=50, dt=0.05)


def tracking_cbo(seed, n_agents=200, k_bar=50):
    return CboParams(lam=1.0, sigma=0.3, tau=0.1, alpha=1e5,
                     n_agents=n_agents, k_bar=k_bar, diffusion="isotropic",
                     seed=seed)


def qp_reference_controls(plant, trace, nu):
    u_star = np.empty_like(trace.controls)
    for n in range(trace.n_steps):
        x_ref = plant.reference(n * trace.dt + trace.dt)[0]
        u_star[n] = qp_solve(plant, trace.states[n], x_ref, nu).u_star
    return u_star


def test_cstr_headline_tracking_accuracy():
    finals, walls = [], []
    for seed in range(10):
        config = headline_config(seed)
        _, trace, seconds = harness.execute(config)
        finals.append(float(trace.losses[-20:].mean()))
        walls.append(seconds)
    median = float(np.median(finals))
    ok = median <= 1e-5 and max(walls) <= 60.0
    check("cstr-headline", ok,
          f"median final-20 mean loss {median:.3e} (need <= 1e-05), "
          f"max wall {max(walls):.1f}s (need <= 60s)")


def test_linear_tracking_matches_qp_oracle():
    plant = tracking_plant()
    successes = 0
    tic = time.perf_counter()
    for seed in range(20):
        trace = mpc_run(plant, [0.0], tracking_cbo(seed), TRACKING_MPC,
                        init=uniform_init)
        u_star = qp_reference_controls(plant, trace, TRACKING_MPC.nu)
        successes += bool(np.all(np.abs(trace.controls - u_star) <= 0.05))
    seconds = time.perf_counter() - tic
    ok = successes >= 18 and seconds <= 10.0
    check("linear-vs-qp-oracle", ok,
          f"{successes}/20 runs within 0.05 of the QP solution "
          f"at every step, {seconds:.1f}s (need >= 18 and <= 10s)")


def test_variance_decay_bound_mean_field():
    # same tracking protocol at N = 10^4: measured V* at k_bar stays below
    # the decay bound seeded with eps = 0.05 at every MPC step
    plant = tracking_plant()
    cbo = tracking_cbo(0, n_agents=10_000)
    config = TRACKING_MPC
    eps, slack = 0.05, 5.0 / math.sqrt(cbo.n_agents)
    noise = NoiseSource(cbo.seed)
    box = plant.box.replicate(config.horizon)
    ens = Ensemble(uniform_init(noise.init_rng(), cbo.n_agents, box))
    x = np.array([0.0])
    tic = time.perf_counter()
    worst = -math.inf
    for n in range(config.n_steps):
        t_n = n * config.dt
        u_star = qp_solve(plant, x, plant.reference(t_n + config.dt)[0],
                          config.nu).u_star
        v0 = v_star(ens.positions, u_star)
        objective = RolloutObjective(plant, x, t_n, config)
        ens, m = run_cbo(ens, objective, cbo, box, noise,
                         start_step=n * cbo.k_bar)
        v_end = v_star(ens.positions, u_star)
        bound = vdecay_bound(v0, eps, cbo.lam, cbo.tau, cbo.k_bar, cbo.sigma)
        worst = max(worst, v_end - bound - slack)
        x = plant.step(x, m[:1], t_n)
    seconds = time.perf_counter() - tic
    ok = worst <= 0.0 and seconds <= 60.0
    check("variance-decay-bound", ok,
          f"max excess over bound {worst:.3e} (need <= 0), {seconds:.1f}s")


def random_qp_instance(rng, d):
    m = int(rng.integers(1, 4))
    plant = LinearAdditivePlant(
        (rng.normal(size=(m, m)) * 0.4, rng.normal(size=m) * 0.5),
        rng.normal(size=(m, d)),
        ControlBox(*(lambda c, w: (c - w, c + w))(
            rng.normal(size=d) * 0.8, rng.uniform(0.5, 2.0, size=d))))
    return plant, rng.normal(size=m), rng.normal(size=m), float(rng.uniform(0.5, 2.0))


def test_qp_oracle_correctness():
    rng = np.random.default_rng(2024)
    worst_cells, worst_kkt = 0.0, 0.0
    tic = time.perf_counter()
    for i in range(100):
        d = 1 if i < 50 else 2
        plant, x, x_ref, nu = random_qp_instance(rng, d)
        qp = qp_solve(plant, x, x_ref, nu)
        tol = 1e-4 * plant.box.diameter()
        obj = QpObjective(plant, x, x_ref, nu)
        grid = quadratic_box_argmin(obj.batch, plant.box.lower,
                                    plant.box.upper, tol / 4.0)
        worst_cells = max(worst_cells, float(np.max(np.abs(qp.u_star - grid)) / tol))
        A = plant.F_c.T @ plant.F_c + nu * np.eye(d)
        b = -(plant.F_c.T @ (plant.phi_s(x) - x_ref))
        grad = 2.0 * (A @ qp.u_star - b)
        residuals = [
            np.max(np.abs(grad + qp.eta1 - qp.eta2)),
            np.max(np.abs(qp.eta1 * (qp.u_star - plant.box.upper))),
            np.max(np.abs(qp.eta2 * (plant.box.lower - qp.u_star))),
            np.max(np.abs(qp.eta1 * qp.eta2)),
        ]
        worst_kkt = max(worst_kkt, float(max(residuals)))
    seconds = time.perf_counter() - tic
    ok = worst_cells <= 1.0 and worst_kkt <= 1e-10 and seconds <= 10.0
    check("qp-oracle", ok,
          f"100 instances: worst grid offset {worst_cells:.2f} cells "
          f"(need <= 1), worst KKT residual {worst_kkt:.1e} "
          f"(need <= 1e-10), {seconds:.1f}s")


def test_growth_bounds_hold():
    rng = np.random.default_rng(7)
    worst = -math.inf
    for i in range(20):
        plant, x, x_ref, nu = random_qp_instance(rng, int(rng.integers(1, 4)))
        qp = qp_solve(plant, x, x_ref, nu)
        obj = QpObjective(plant, x, x_ref, nu)
        samples = plant.box.sample_uniform(rng, 10_000)
        excess = obj.batch(samples) - obj(qp.u_star)
        dist = np.linalg.norm(samples - qp.u_star, axis=1)
        lower_gap = excess - qp.lambda_min_A * dist**2
        upper_gap = qp.eta_norm * dist + qp.lambda_max_A * dist**2 - excess
        worst = max(worst, float(-lower_gap.min()), float(-upper_gap.min()))
    ok = worst <= 1e-10
    check("growth-bounds", ok,
          f"20 instances x 10^4 points: worst violation {worst:.1e} "
          f"(need <= 1e-10)")


def test_cbo_unit_invariants():
    rng = np.random.default_rng(11)
    box = ControlBox([-1.0, 0.0], [1.0, 2.0])
    loss = lambda u: float(np.sum((u - [0.2, 1.1]) ** 2))  # noqa: E731
    params = CboParams(sigma=2.0, n_agents=24, k_bar=12, seed=3,
                       diffusion="consensus")
    ens_a, m_a = run_cbo(Ensemble(box.sample_uniform(rng, 24)), loss, params, box)
    ens_b, m_b = run_cbo(Ensemble(ens_a.positions.copy()), loss, params, box)
    checks = {
        "box feasibility": box.contains(ens_a.positions),
        "hull containment": bool(
            np.all(m_a >= ens_a.positions.min(axis=0) - 1e-12)
            and np.all(m_a <= ens_a.positions.max(axis=0) + 1e-12)),
        "seed determinism": np.array_equal(
            run_cbo(Ensemble(ens_a.positions.copy()), loss, params, box)[1], m_b),
    }
    pos = rng.normal(size=(30, 4))
    values = rng.uniform(size=30)
    checks["translation invariance"] = bool(np.allclose(
        consensus_from(pos, values + 500.0, 1e5),
        consensus_from(pos, values, 1e5), rtol=1e-12))
    checks["alpha-zero mean"] = np.array_equal(
        consensus_from(pos, values, 0.0), pos.mean(axis=0))
    naive_w = np.exp(-0.3 * values)
    checks["min-shift equivalence"] = bool(np.allclose(
        consensus_from(pos, values, 0.3), (naive_w @ pos) / naive_w.sum(),
        rtol=1e-12))
    failed = [k for k, v in checks.items() if not v]
    check("cbo-invariants", not failed,
          "all six invariant groups hold" if not failed
          else f"failed: {', '.join(failed)}")


@pytest.fixture(scope="module")
def sweep_results(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweeps")
    results = {}
    for axis, values, overrides in (
            ("n", [8, 32, 128], {"cbo": {"k_bar": 15}}),
            ("kbar", [4, 16, 32], {})):
        config = harness.config_from_dict({
            **overrides,
            "sweep_axis": axis, "sweep_values": values, "repetitions": 20,
            "out_dir": str(out / axis),
        })
        tic = time.perf_counter()
        paths = harness.run_sweep(config)
        seconds = time.perf_counter() - tic
        table = np.genfromtxt(paths["sweep_summary"], delimiter=",",
                              names=True)
        results[axis] = (table, seconds)
    return results


def test_n_sweep_interquartile_shrinks(sweep_results):
    table, seconds = sweep_results["n"]
    iqr = dict(zip(table["point"].astype(int),
                   table["p75"] - table["p25"]))
    ok = iqr[128] < iqr[8] and seconds <= 1200.0
    check("n-sweep-trend", ok,
          f"IQR of total loss N=128: {iqr[128]:.3g} < N=8: {iqr[8]:.3g}, "
          f"{seconds:.0f}s (need strict decrease, <= 20 min)")


def test_kbar_sweep_plateau(sweep_results):
    table, seconds = sweep_results["kbar"]
    med = dict(zip(table["point"].astype(int), table["median"]))
    plateau = abs(med[16] - med[32]) <= 0.25 * med[32]
    ordered = med[16] < med[4] and med[32] < med[4]
    ok = plateau and ordered and seconds <= 1200.0
    check("kbar-sweep-trend", ok,
          f"median total loss k=4: {med[4]:.3g}, k=16: {med[16]:.3g}, "
          f"k=32: {med[32]:.3g}; need k=16 within 25% of k=32 "
          f"and both below k=4; {seconds:.0f}s")


def test_integrator_sanity():
    plant = CstrPlant()
    got = np.array(cstr_step((0.1, 438.54), 103.411, plant))
    want = cstr_integrate_oracle([0.1, 438.54], 103.411, plant.dt)
    err = abs(got[0] - want[0])

    results = {}
    for h in (1e-3, 5e-4, 2.5e-4):
        state = (0.1, 438.54)
        stepper = CstrPlant(substep=h)
        for _ in range(10):
            state = cstr_step(state, 120.0, stepper)
        results[h] = np.array(state)
    ratio = np.abs(results[1e-3] - results[5e-4]) \
        / np.abs(results[5e-4] - results[2.5e-4])
    first_order = bool(np.all(ratio > 1.6) and np.all(ratio < 2.4))
    ok = err <= 1e-5 and first_order
    check("integrator-sanity", ok,
          f"one-interval error in C vs adaptive oracle {err:.2e} "
          f"(need <= 1e-05), halving ratios {np.round(ratio, 2)} "
          f"(need ~2 for first order)")
