"""Experiment orchestration: lockstep engine evolution, diagnostics capture,
derived scalars, sweeps, and structured outputs."""

import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classical import (TrajectoryState, classical_diffusion_coefficient,
                        ensemble_momentum_spread, liouville_step,
                        lyapunov_exponent)
from .config import DERIV_PREFIX, L2_PREFIX, L2_SEP, SCALAR_DIAGNOSTICS
from .decoherence import compose_step, compose_with
from .diagnostics import (DiagnosticSeries, break_time, derivative_norm,
                          l2_distance, l2_norm, negativity_volume, norm,
                          purity)
from .errors import NumericalBlowupError
from .io import (FORMAT_VERSION, atomic_write_text, ndjson_line, write_ndjson,
                 write_snapshot)
from .quantum import moyal_step

BOUNDARY_WARN_FRACTION = 1e-8


@dataclass
class RunReport:
    """Self-describing result of one run; replaying ``config`` reproduces
    the diagnostic series bit-exactly."""

    config: dict
    series: dict
    derived: dict
    meta: dict
    format_version: str = FORMAT_VERSION

    def to_dict(self):
        return {
            "format_version": self.format_version,
            "config": self.config,
            "series": self.series,
            "derived": self.derived,
            "meta": self.meta,
        }


def _scalar_diagnostic(token, dist, params):
    if token == "norm":
        return norm(dist)
    if token == "purity":
        return purity(dist, params)
    if token == "negativity_volume":
        return negativity_volume(dist)
    if token.startswith(DERIV_PREFIX):
        return derivative_norm(dist, int(token[len(DERIV_PREFIX):]), "p")
    raise AssertionError(f"unhandled diagnostic {token}")


def _make_steppers(cfg):
    pot = cfg.potential()
    params = cfg.params()
    mcfg = cfg.moyal_config()
    dcfg = cfg.decoherence_config()

    def classical(d, h):
        return liouville_step(d, pot, params, h)

    steppers = {}
    for engine in cfg.engines:
        if engine == "classical":
            steppers[engine] = classical
        elif engine == "quantum":
            steppers[engine] = lambda d, h: moyal_step(d, pot, params, mcfg, h)
        elif engine == "quantum+decoherence":
            steppers[engine] = (
                lambda d, h: compose_step(d, pot, params, mcfg, dcfg, h))
        elif engine == "classical+decoherence":
            steppers[engine] = lambda d, h: compose_with(d, classical, dcfg, h)
    return steppers, params


def run_experiment(cfg, out_dir=None, snapshots=False):
    """Execute one fully resolved configuration.

    All requested engines evolve in lockstep so cross-engine distances are
    sampled without storing field histories.  Writes report.json and
    diagnostics.ndjson (and snapshot pairs when enabled) atomically under
    the output directory, and returns the RunReport.
    """
    t_wall = time.perf_counter()
    out_dir = out_dir or cfg.output_directory
    grid = cfg.grid()
    steppers, params = _make_steppers(cfg)
    dt = cfg.dt
    n_steps = round(cfg.t_final / dt)
    stride = cfg.snapshot_stride

    scalar_tokens = [t for t in cfg.diagnostics if not t.startswith(L2_PREFIX)]
    pair_tokens = [t for t in cfg.diagnostics if t.startswith(L2_PREFIX)]
    pairs = {t: tuple(t[len(L2_PREFIX):].split(L2_SEP, 1)) for t in pair_tokens}

    states = {e: cfg.initial_state(grid) for e in cfg.engines}
    times = [0.0]
    series = {e: {t: [_scalar_diagnostic(t, states[e], params)]
                  for t in scalar_tokens} for e in cfg.engines}
    pair_series = {t: [0.0] for t in pair_tokens}
    pair_series_norm = {t: [0.0] for t in pair_tokens}
    run_warnings = []
    rows = []

    def emit(step, t_now):
        for e in cfg.engines:
            for tok in scalar_tokens:
                v = series[e][tok][-1] if step == 0 else _scalar_diagnostic(
                    tok, states[e], params)
                if step != 0:
                    series[e][tok].append(v)
                rows.append({"t": t_now, "engine": e, "diagnostic": tok, "value": v})
        for tok in pair_tokens:
            a, b = pairs[tok]
            if step == 0:
                raw = nrm = 0.0
            else:
                raw = l2_distance(states[a], states[b])
                nrm = raw / l2_norm(states[b])
                pair_series[tok].append(raw)
                pair_series_norm[tok].append(nrm)
            rows.append({"t": t_now, "engine": f"{a}{L2_SEP}{b}",
                         "diagnostic": tok, "value": raw})
            rows.append({"t": t_now, "engine": f"{a}{L2_SEP}{b}",
                         "diagnostic": "l2n" + tok[len("l2"):], "value": nrm})
        for e in cfg.engines:
            frac = states[e].boundary_mass_fraction()
            if frac > BOUNDARY_WARN_FRACTION and e not in [w[0] for w in run_warnings]:
                msg = (f"engine {e}: {frac:.2e} of |rho| mass in the outer 10% "
                       f"boundary band at t={t_now:.6g}")
                run_warnings.append((e, msg))
                warnings.warn(msg, stacklevel=2)
        if snapshots:
            for e in cfg.engines:
                write_snapshot(os.path.join(out_dir, "snapshots"), e, step, states[e])

    emit(0, 0.0)
    for i in range(n_steps):
        for e in cfg.engines:
            try:
                states[e] = steppers[e](states[e], dt)
            except NumericalBlowupError as err:
                err.engine = e
                err.step_index = i
                raise
        if (i + 1) % stride == 0 or (i + 1) == n_steps:
            times.append((i + 1) * dt)
            emit(i + 1, (i + 1) * dt)

    derived = {"break_times": {}, "final_distances": {}}
    for tok in pair_tokens:
        ds = DiagnosticSeries("l2n" + tok[len("l2"):], np.array(times),
                              np.array(pair_series_norm[tok]))
        if cfg.break_threshold is not None:
            bt = break_time(ds, cfg.break_threshold)
            derived["break_times"][tok] = None if math.isinf(bt) else bt
        derived["final_distances"][tok] = pair_series[tok][-1]

    if cfg.raw.get("lyapunov") is not None:
        ly = cfg.raw["lyapunov"]
        res = lyapunov_exponent(
            TrajectoryState(ly["x0"], ly["p0"]), cfg.potential(), params,
            ly["dt"], ly["n_steps"], ly["renorm_every"])
        derived["lambda"] = res.lambda_
        derived["lambda_unit"] = res.unit

    if cfg.raw.get("ensemble") is not None:
        en = cfg.raw["ensemble"]
        rng = np.random.default_rng(cfg.seed)
        thetas = rng.uniform(0.0, 2 * np.pi, en["n_particles"])
        ps = np.full(en["n_particles"], en["p0"])
        msd = ensemble_momentum_spread(thetas, ps,
                                       cfg.potential().kick.strength, en["n_steps"])
        derived["d_cl"] = classical_diffusion_coefficient(msd)
        for step, value in enumerate(msd):
            rows.append({"t": float(step), "engine": "ensemble",
                         "diagnostic": "momentum_msd", "value": float(value)})

    report = RunReport(
        config=cfg.to_dict(),
        series={
            "times": list(times),
            "engines": {e: {t: list(v) for t, v in series[e].items()}
                        for e in cfg.engines},
            "pairs": {t: {"l2": list(pair_series[t]),
                          "l2_normalized": list(pair_series_norm[t])}
                      for t in pair_tokens},
        },
        derived=derived,
        meta={
            "n_steps": n_steps,
            "dt": dt,
            "wall_clock_s": time.perf_counter() - t_wall,
            "warnings": [w[1] for w in run_warnings],
        },
    )
    os.makedirs(out_dir, exist_ok=True)
    write_ndjson(os.path.join(out_dir, "diagnostics.ndjson"), rows)
    atomic_write_text(os.path.join(out_dir, "report.json"),
                      ndjson_line(report.to_dict()))
    return report


def _sweep_worker(args):
    cfg, value, run_dir, snapshots = args
    sub = cfg.with_sweep_value(value)
    try:
        report = run_experiment(sub, out_dir=run_dir, snapshots=snapshots)
        return {"status": "ok", "report": report.to_dict()}
    except NumericalBlowupError as err:
        return {"status": "numerical-error", "error": str(err)}


def run_sweep(cfg, out_dir=None, snapshots=False, threads=1):
    """One run per sweep value plus an aggregate table.

    Runs are independent; failures are recorded per-run and do not abort
    the sweep.  Returns (results, aggregate_rows).
    """
    sweep = cfg.sweep
    if sweep is None:
        raise ValueError("config has no sweep section")
    out_dir = out_dir or cfg.output_directory
    jobs = [(cfg, v, os.path.join(out_dir, f"run_{i:03d}"), snapshots)
            for i, v in enumerate(sweep["values"])]

    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(j) for j in jobs]

    aggregate = []
    for value, res in zip(sweep["values"], results):
        row = {"parameter": sweep["parameter"], "value": value,
               "status": res["status"]}
        if res["status"] == "ok":
            derived = res["report"]["derived"]
            row["break_times"] = derived.get("break_times", {})
            row["final_distances"] = derived.get("final_distances", {})
            if "lambda" in derived:
                row["lambda"] = derived["lambda"]
            if "d_cl" in derived:
                row["d_cl"] = derived["d_cl"]
        else:
            row["error"] = res["error"]
        aggregate.append(row)

    os.makedirs(out_dir, exist_ok=True)
    atomic_write_text(os.path.join(out_dir, "aggregate.json"),
                      "\n".join(ndjson_line(r) for r in aggregate) + "\n")
    return results, aggregate


def run_trajectory_stats(cfg, out_dir=None):
    """The `lyapunov` verb: tangent-space exponent and, when configured,
    the standard-map ensemble diffusion coefficient."""
    out_dir = out_dir or cfg.output_directory
    pot = cfg.potential()
    params = cfg.params()
    out = {"format_version": FORMAT_VERSION}
    if cfg.raw.get("lyapunov") is not None:
        ly = cfg.raw["lyapunov"]
        res = lyapunov_exponent(TrajectoryState(ly["x0"], ly["p0"]), pot, params,
                                ly["dt"], ly["n_steps"], ly["renorm_every"])
        conv = res.convergence_series
        keep = max(1, len(conv) // 200)
        out["lambda"] = res.lambda_
        out["lambda_unit"] = res.unit
        out["n_steps"] = res.n_steps
        out["convergence_series"] = [float(v) for v in conv[::keep]]
    if cfg.raw.get("ensemble") is not None:
        en = cfg.raw["ensemble"]
        rng = np.random.default_rng(cfg.seed)
        thetas = rng.uniform(0.0, 2 * np.pi, en["n_particles"])
        ps = np.full(en["n_particles"], en["p0"])
        msd = ensemble_momentum_spread(thetas, ps, pot.kick.strength, en["n_steps"])
        out["d_cl"] = classical_diffusion_coefficient(msd)
        out["momentum_msd"] = [float(v) for v in msd]
    if "lambda" not in out and "d_cl" not in out:
        raise ValueError("config has neither a lyapunov nor an ensemble section")
    os.makedirs(out_dir, exist_ok=True)
    atomic_write_text(os.path.join(out_dir, "trajectory_report.json"),
                      ndjson_line(out))
    return out
