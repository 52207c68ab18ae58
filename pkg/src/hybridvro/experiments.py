"""Experiment orchestration: VRO runs, parameter sweeps, spectra and CSV output."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis
from .config import RunConfig
from .disorder import sample_ensemble
from .dynamics import Trajectory, average_trajectories, build_generator, evolve
from .model import RotatingFrameSystem, build_system

log = logging.getLogger(__name__)

VRO_HEADER = "t_ns,p_qubit,p_qubit_std,norm_total"
SPECTRUM_HEADER = "nu_mhz,re_response,im_response,abs2"


def fmt(x) -> str:
    return format(float(x), ".12g")


def realization_system(config: RunConfig, index: int) -> RotatingFrameSystem:
    ens = sample_ensemble(config.disorder_spec(), index)
    return build_system(config.flux_qubit(), config.g_single, ens.spins, delta_c=config.delta_c)


def simulate_realization(config: RunConfig, index: int) -> Trajectory:
    gen = build_generator(realization_system(config, index))
    traj = evolve(gen, config.t_max_ns, config.dt_ns, keep_amplitude=False)
    traj.meta["realization_index"] = index
    return traj


def run_vro(config: RunConfig, threads: int = 1) -> Trajectory:
    """Disorder-averaged qubit population over ``n_realizations`` ensembles."""
    indices = range(config.n_realizations)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trajs = list(pool.map(lambda i: simulate_realization(config, i), indices))
    else:
        trajs = [simulate_realization(config, i) for i in indices]
    avg = average_trajectories(trajs)
    avg.meta["config_hash"] = config.config_hash()
    return avg


def _header_comment(config: RunConfig, **extra) -> str:
    parts = [f"config_sha256={config.config_hash()}"]
    parts += [f"{k}={v}" for k, v in extra.items()]
    return "# " + " ".join(parts) + "\n"


def vro_csv(traj: Trajectory, config: RunConfig) -> str:
    std = traj.p_std if traj.p_std is not None else np.zeros_like(traj.p)
    rows = [_header_comment(config), VRO_HEADER + "\n"]
    rows += [f"{fmt(t)},{fmt(p)},{fmt(s)},{fmt(n)}\n" for t, p, s, n in zip(traj.t, traj.p, std, traj.norm)]
    return "".join(rows)


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _lifetime_or_nan(traj: Trajectory) -> float:
    try:
        return analysis.fit_envelope_lifetime(traj).tau
    except (analysis.NoOscillation, analysis.BadFit) as exc:
        log.info("lifetime fit failed: %s", exc)
        return math.nan


def run_sweep(config: RunConfig, key: str, values, threads: int = 1) -> tuple[list[Trajectory], float, list[float]]:
    """Run ``run_vro`` for each value of one config field, everything else fixed."""
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    trajs = [run_vro(config.replace(**{key: float(v)}), threads) for v in values]
    spread = analysis.trace_spread(trajs)
    taus = [_lifetime_or_nan(tr) for tr in trajs]
    return trajs, spread, taus


def write_sweep(config: RunConfig, key: str, values, out_dir, prefix: str, threads: int = 1) -> tuple[list[Path], float]:
    out_dir = Path(out_dir)
    trajs, spread, taus = run_sweep(config, key, values, threads)
    paths = []
    for v, tr in zip(values, trajs):
        cfg = config.replace(**{key: float(v)})
        paths.append(write_text(out_dir / f"{prefix}_{fmt(v)}.csv", vro_csv(tr, cfg)))
    summary = [_header_comment(config, sweep=key, trace_spread=fmt(spread)), f"{key},tau_ns\n"]
    summary += [f"{fmt(v)},{fmt(tau)}\n" for v, tau in zip(values, taus)]
    paths.append(write_text(out_dir / f"{prefix}_summary.csv", "".join(summary)))
    return paths, spread


def run_spectrum(config: RunConfig, nu_min: float, nu_max: float, points: int, realization: int = 0):
    if points < 1:
        raise ValueError("need at least one probe point")
    if points == 1:
        grid = np.array([nu_min])
    else:
        if not nu_max > nu_min:
            raise ValueError("nu_max must exceed nu_min")
        grid = np.linspace(nu_min, nu_max, points)
    return analysis.spectrum_resolvent(realization_system(config, realization), grid)


def spectrum_csv(trace: analysis.SpectrumTrace, config: RunConfig) -> str:
    rows = [_header_comment(config), SPECTRUM_HEADER + "\n"]
    rows += [
        f"{fmt(nu)},{fmt(r.real)},{fmt(r.imag)},{fmt(p)}\n"
        for nu, r, p in zip(trace.nu, trace.response, trace.power)
    ]
    return "".join(rows)
