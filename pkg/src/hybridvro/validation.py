"""Self-consistency checks shared by the ``selftest`` command and the test suite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disorder import DisorderSpec, sample_ensemble
from .dynamics import build_generator, evolve, evolve_oracle
from .model import FluxQubitParams, RotatingFrameSystem, build_system


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.3e} (tol {self.tolerance:.1e})"


def random_small_system(seed: int, max_spins: int = 8) -> RotatingFrameSystem:
    """A disordered system with 1..max_spins spins, random field and decay rates."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_spins + 1))
    spec = DisorderSpec(
        n_spins=n,
        b_ext_mt=float(rng.choice([0.0, 2.6])),
        gamma_b=float(rng.uniform(0, 1)),
        gamma_d=float(rng.uniform(0, 1)),
        master_seed=seed,
    )
    ens = sample_ensemble(spec, 0)
    fq = FluxQubitParams(gap=2878.0, bias=float(rng.uniform(0, 500)), gamma_c=float(rng.uniform(0, 1)))
    return build_system(fq, 13.0 / np.sqrt(n), ens.spins, delta_c=float(rng.uniform(-5, 5)))


def oracle_deviation(system: RotatingFrameSystem, t_max: float = 200.0, dt: float = 0.05) -> float:
    gen = build_generator(system)
    rk = evolve(gen, t_max, dt, keep_amplitude=False)
    ref = evolve_oracle(gen, rk.t)
    return float(np.max(np.abs(rk.p - ref.p)))


def check_oracle_equivalence(n_systems: int = 50, t_max: float = 200.0, dt: float = 0.05, tol: float = 1e-6) -> CheckResult:
    worst = max(oracle_deviation(random_small_system(s), t_max, dt) for s in range(n_systems))
    return CheckResult(f"RK4 vs eigendecomposition, {n_systems} systems", worst, tol)


def check_norm_conservation(n_spins: int = 1200, t_max: float = 200.0, dt: float = 0.05, seed: int = 0, tol: float = 1e-9) -> CheckResult:
    spec = DisorderSpec(n_spins=n_spins, gamma_b=0.0, gamma_d=0.0, master_seed=seed)
    ens = sample_ensemble(spec, 0)
    system = build_system(FluxQubitParams(gap=2878.0), 13.0 / np.sqrt(n_spins), ens.spins)
    traj = evolve(build_generator(system), t_max, dt, keep_amplitude=False)
    return CheckResult(f"decay-free norm drift, N={n_spins}", float(np.max(np.abs(traj.norm - 1.0))), tol)
