"""Experiment runner: configuration, single runs, sweeps, theory reports.

Configurations are plain JSON; every number written to disk round-trips
exactly (CSV floats use 17 significant digits, JSON uses shortest
round-trip formatting).  A run is a pure function of its resolved
configuration, so identical configs produce identical output bytes.
"""

from dataclasses import dataclass, field
import json
import os
import time

import numpy as np

from .box import ControlBox
from .cbo import CboParams
from .mpc import MpcConfig, mpc_run, reference_init, uniform_init
from .plants import CstrPlant, LinearAdditivePlant
from .plants.linear import piecewise_constant
from .rng import NoiseSource
from .theory import (alpha0, alpha0_n, kbar_min, log_delta_r_bound, qp_solve,
                     r_epsilon, v_star)

PLANTS = ("cstr", "linear")
SWEEP_AXES = ("n", "kbar")

# The reactor tracking protocol: 6.5 minutes sampled at 0.05, ten-move
# horizon, penalty measured from the control reference.
DEFAULT_CONFIG = {
    "plant": "cstr",
    "plant_params": {},
    "x0": [0.1, 438.54],
    "mpc": {
        "horizon": 10,
        "nu": 1.0,
        "n_steps": 130,
        "dt": 0.05,
        "regularize_to_reference": True,
    },
    "cbo": {
        "lam": 1.0,
        "sigma": 3.0,
        "tau": 0.1,
        "alpha": 1e5,
        "n_agents": 32,
        "k_bar": 10,
        "diffusion": "consensus",
        "sigma_tilde": 1e-3,
    },
    "seed": 0,
    "sweep_axis": None,
    "sweep_values": [],
    "repetitions": 20,
    "epsilon": 0.05,
    "out_dir": "results",
}


@dataclass
class ExperimentConfig:
    """Resolved experiment description; see DEFAULT_CONFIG for the schema."""

    plant: str = "cstr"
    plant_params: dict = field(default_factory=dict)
    x0: list | None = None
    mpc: MpcConfig = None
    cbo: CboParams = None
    seed: int = 0
    sweep_axis: str | None = None
    sweep_values: list = field(default_factory=list)
    repetitions: int = 20
    epsilon: float = 0.05
    out_dir: str = "results"

    def __post_init__(self):
        if self.plant not in PLANTS:
            raise ValueError(f"plant: must be one of {PLANTS}, got {self.plant!r}")
        if self.mpc is None:
            self.mpc = MpcConfig(**DEFAULT_CONFIG["mpc"])
        if self.cbo is None:
            self.cbo = CboParams(**DEFAULT_CONFIG["cbo"], seed=self.seed)
        if self.sweep_axis is not None:
            if self.sweep_axis not in SWEEP_AXES:
                raise ValueError(
                    f"sweep_axis: must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
            values = list(self.sweep_values)
            if not values:
                raise ValueError("sweep_values: must be non-empty when sweeping")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError("sweep_values: must be strictly increasing")
        if self.repetitions < 1:
            raise ValueError("repetitions: must be >= 1")

    def to_dict(self):
        mpc = self.mpc
        cbo = self.cbo
        return {
            "plant": self.plant,
            "plant_params": self.plant_params,
            "x0": None if self.x0 is None else list(self.x0),
            "mpc": {
                "horizon": mpc.horizon,
                "nu": mpc.nu,
                "n_steps": mpc.n_steps,
                "dt": mpc.dt,
                "regularize_to_reference": mpc.regularize_to_reference,
            },
            "cbo": {
                "lam": cbo.lam,
                "sigma": cbo.sigma,
                "tau": cbo.tau,
                "alpha": cbo.alpha,
                "n_agents": cbo.n_agents,
                "k_bar": cbo.k_bar,
                "diffusion": cbo.diffusion,
                "sigma_tilde": cbo.sigma_tilde,
            },
            "seed": self.seed,
            "sweep_axis": self.sweep_axis,
            "sweep_values": list(self.sweep_values),
            "repetitions": self.repetitions,
            "epsilon": self.epsilon,
            "out_dir": self.out_dir,
        }


def config_from_dict(data):
    """Build a config from a (possibly partial) dict of the JSON schema."""
    merged = {**DEFAULT_CONFIG, **data}
    unknown = set(merged) - set(DEFAULT_CONFIG)
    if unknown:
        raise ValueError(f"{sorted(unknown)[0]}: unknown configuration key")
    seed = int(merged["seed"])
    try:
        mpc = MpcConfig(**{**DEFAULT_CONFIG["mpc"], **merged["mpc"]})
    except TypeError as exc:
        raise ValueError(f"mpc: {exc}") from None
    try:
        cbo = CboParams(**{**DEFAULT_CONFIG["cbo"], **merged["cbo"]}, seed=seed)
    except TypeError as exc:
        raise ValueError(f"cbo: {exc}") from None
    return ExperimentConfig(
        plant=merged["plant"],
        plant_params=dict(merged["plant_params"]),
        x0=merged["x0"],
        mpc=mpc,
        cbo=cbo,
        seed=seed,
        sweep_axis=merged["sweep_axis"],
        sweep_values=list(merged["sweep_values"]),
        repetitions=int(merged["repetitions"]),
        epsilon=float(merged["epsilon"]),
        out_dir=merged["out_dir"],
    )


def load_config(path):
    """Read a config file; a summary.json is accepted and unwrapped."""
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    return config_from_dict(data)


def _as_reference(value):
    if value is None or np.isscalar(value):
        return value
    if isinstance(value, dict):
        return piecewise_constant(value["times"], value["values"])
    return np.asarray(value, dtype=float)


def build_plant(config):
    """Instantiate the configured plant model."""
    params = dict(config.plant_params)
    if config.plant == "cstr":
        params.setdefault("dt", config.mpc.dt)
        try:
            plant = CstrPlant(**params)
        except TypeError as exc:
            raise ValueError(f"plant_params: {exc}") from None
        if plant.dt != config.mpc.dt:
            raise ValueError("plant_params.dt: must equal mpc.dt")
        return plant
    a_s = params.pop("a_s", 0.9)
    b_s = params.pop("b_s", None)
    f_c = params.pop("f_c", 1.0)
    box = params.pop("box", [[-1.0], [1.0]])
    x_ref = _as_reference(params.pop("x_ref", None))
    u_ref = _as_reference(params.pop("u_ref", None))
    if params:
        raise ValueError(f"plant_params.{sorted(params)[0]}: unknown key")
    phi_s = (np.asarray(a_s, dtype=float), None if b_s is None else b_s)
    return LinearAdditivePlant(phi_s, f_c, ControlBox(*box),
                               x_ref=x_ref, u_ref=u_ref)


def resolve_x0(config, plant):
    if config.x0 is not None:
        return np.asarray(config.x0, dtype=float)
    if config.plant == "cstr":
        return np.array([0.1, 438.54])
    return np.zeros(plant.state_dim)


def _fmt(value):
    return "%.17g" % value


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(row) + "\n")


def _trace_rows_cstr(trace):
    for n in range(trace.n_steps):
        yield [str(n), _fmt(n * trace.dt), _fmt(trace.states[n, 0]),
               _fmt(trace.states[n, 1]), _fmt(trace.controls[n, 0]),
               _fmt(trace.losses[n])]


def _trace_rows_linear(trace, plant, config):
    for n in range(trace.n_steps):
        t_n = n * trace.dt
        qp = qp_solve(plant, trace.states[n],
                      plant.reference(t_n + trace.dt)[0], config.mpc.nu)
        err = np.linalg.norm(trace.controls[n] - qp.u_star)
        yield ([str(n), _fmt(t_n)]
               + [_fmt(v) for v in trace.states[n]]
               + [_fmt(v) for v in trace.controls[n]]
               + [_fmt(trace.losses[n])]
               + [_fmt(v) for v in qp.u_star]
               + [_fmt(err)])


def write_trace(path, trace, plant, config):
    """Emit the per-step trace CSV for the configured plant kind."""
    if config.plant == "cstr":
        header = ["n", "t_min", "C", "T", "q_c_applied", "loss_n"]
        rows = _trace_rows_cstr(trace)
    else:
        m, d = plant.state_dim, plant.control_dim
        header = (["n", "t"] + [f"x{i}" for i in range(m)]
                  + [f"u{j}" for j in range(d)] + ["loss_n"]
                  + [f"u_star{j}" for j in range(d)] + ["err_u"])
        rows = _trace_rows_linear(trace, plant, config)
    _write_csv(path, header, rows)


def execute(config):
    """Run the closed loop for a resolved config; returns (plant, trace, seconds)."""
    plant = build_plant(config)
    x0 = resolve_x0(config, plant)
    tic = time.perf_counter()
    trace = mpc_run(plant, x0, config.cbo, config.mpc)
    return plant, trace, time.perf_counter() - tic


def run_single(config):
    """One closed-loop run; writes trace.csv and summary.json.

    Returns the mapping of artifact names to paths.
    """
    plant, trace, seconds = execute(config)
    os.makedirs(config.out_dir, exist_ok=True)
    trace_path = os.path.join(config.out_dir, "trace.csv")
    write_trace(trace_path, trace, plant, config)
    summary = {
        "config": config.to_dict(),
        "seed": config.seed,
        "n_steps": trace.n_steps,
        "final_loss": float(trace.losses[-1]),
        "mean_loss": float(trace.losses.mean()),
        "total_loss": float(trace.losses.sum()),
        "n_evaluations": int(trace.n_evaluations),
        "wall_clock_seconds": seconds,
    }
    summary_path = os.path.join(config.out_dir, "summary.json")
    with open(summary_path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2)
        f.write("\n")
    return {"trace": trace_path, "summary": summary_path}


def sweep_seed(seed_base, point_index, repetition):
    """Documented seeding: seed_base + point_index * 10^6 + repetition."""
    return seed_base + point_index * 10**6 + repetition


def _with_sweep_value(config, value):
    cbo = config.cbo
    fields = {
        "lam": cbo.lam, "sigma": cbo.sigma, "tau": cbo.tau, "alpha": cbo.alpha,
        "n_agents": cbo.n_agents, "k_bar": cbo.k_bar, "diffusion": cbo.diffusion,
        "sigma_tilde": cbo.sigma_tilde,
    }
    if config.sweep_axis == "n":
        fields["n_agents"] = int(value)
    else:
        fields["k_bar"] = int(value)
    return fields


def run_sweep(config):
    """Repeated runs over the sweep axis; writes sweep.csv and sweep_summary.csv.

    Seeds follow :func:`sweep_seed` with the 0-based index of the sweep
    point, so any (point, repetition) cell can be reproduced in
    isolation.  The metric is the total loss over the run.  Per-run
    traces are kept under ``traces/``.
    """
    if config.sweep_axis is None:
        raise ValueError("sweep_axis: sweep requested but no axis configured")
    os.makedirs(config.out_dir, exist_ok=True)
    traces_dir = os.path.join(config.out_dir, "traces")
    os.makedirs(traces_dir, exist_ok=True)

    rows = []
    summary_rows = []
    for p, value in enumerate(config.sweep_values):
        metrics = []
        for r in range(config.repetitions):
            seed = sweep_seed(config.seed, p, r)
            cbo = CboParams(**_with_sweep_value(config, value), seed=seed)
            run_config = ExperimentConfig(
                plant=config.plant, plant_params=config.plant_params,
                x0=config.x0, mpc=config.mpc, cbo=cbo, seed=seed,
                repetitions=1, epsilon=config.epsilon,
                out_dir=config.out_dir)
            plant, trace, _ = execute(run_config)
            metric = float(trace.losses.sum())
            metrics.append(metric)
            rows.append([_fmt(value), str(r), str(seed), _fmt(metric)])
            trace_path = os.path.join(
                traces_dir, f"point{value:g}_rep{r}.csv")
            write_trace(trace_path, trace, plant, run_config)
        summary_rows.append([
            _fmt(value), _fmt(np.median(metrics)),
            _fmt(np.percentile(metrics, 25)), _fmt(np.percentile(metrics, 75)),
        ])

    sweep_path = os.path.join(config.out_dir, "sweep.csv")
    _write_csv(sweep_path, ["point", "repetition", "seed", "metric"], rows)
    summary_path = os.path.join(config.out_dir, "sweep_summary.csv")
    _write_csv(summary_path, ["point", "median", "p25", "p75"], summary_rows)
    return {"sweep": sweep_path, "sweep_summary": summary_path}


def theory_report(config):
    """Bound calculator report for the configured linear-additive instance.

    Evaluates the unit-horizon sub-problem at t = 0 from the configured
    initial state: QP solution, spectrum of A, multiplier norms, the
    Laplace-ball radius, the (log-space) mass bound, both alpha0
    variants, and the minimal iteration count, all at the configured
    accuracy epsilon.  Rejects nonlinear plants.
    """
    if config.plant != "linear":
        raise ValueError("plant: theory-report requires the linear-additive plant")
    plant = build_plant(config)
    x0 = resolve_x0(config, plant)
    eps = config.epsilon
    cbo = config.cbo
    qp = qp_solve(plant, x0, plant.reference(config.mpc.dt)[0], config.mpc.nu)
    diam = plant.box.diameter()
    r_eps = r_epsilon(eps, qp.lambda_min_A, qp.lambda_max_A, qp.eta_norm)
    log_delta = log_delta_r_bound(r_eps, cbo.sigma, cbo.tau,
                                  plant.control_dim, diam)
    noise = NoiseSource(config.seed)
    positions = uniform_init(noise.init_rng(), cbo.n_agents, plant.box)
    v0 = v_star(positions, qp.u_star)
    report = {
        "epsilon": eps,
        "u_star": [float(v) for v in qp.u_star],
        "lambda_min_A": qp.lambda_min_A,
        "lambda_max_A": qp.lambda_max_A,
        "eta1_norm": float(np.linalg.norm(qp.eta1)),
        "eta2_norm": float(np.linalg.norm(qp.eta2)),
        "diam_U": diam,
        "r_epsilon": r_eps,
        "log_delta_r": log_delta,
        "v0": v0,
        "alpha0": alpha0(eps, qp.lambda_min_A, None, diam, cbo.sigma,
                         cbo.lam, cbo.tau, log_delta_R=log_delta),
        "alpha0_n": alpha0_n(eps, qp.lambda_min_A, None, v0, cbo.sigma,
                             cbo.lam, cbo.tau, log_delta_R=log_delta),
        "kbar_min": kbar_min(eps, cbo.lam, cbo.tau, diam),
    }
    os.makedirs(config.out_dir, exist_ok=True)
    path = os.path.join(config.out_dir, "theory_report.json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    return {"theory_report": path}
