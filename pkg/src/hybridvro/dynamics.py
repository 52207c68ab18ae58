"""Single-excitation equations of motion: generator assembly and propagation.

State layout is ``x = (c, b_1..b_N, d_1..d_N)``. The generator ``M`` of
``dx/dt = M x`` has an arrowhead structure (qubit row/column coupled to every
bright mode, 2x2 blocks per spin), so it is stored as flat arrays and applied
in O(N). Entries are angular rates in rad/ns: a linear frequency f in MHz
becomes ``2 pi f 1e-3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import RotatingFrameSystem

TWO_PI_PER_NS = 2e-3 * np.pi  # MHz -> rad/ns

STABILITY_LIMIT = 0.5
ORACLE_MAX_DIM = 2001
ORACLE_MAX_COND = 1e12


class StepTooLarge(ValueError):
    def __init__(self, dt, required_dt):
        self.dt = dt
        self.required_dt = required_dt
        super().__init__(f"dt = {dt} ns violates the RK4 stability guard; use dt < {required_dt:.6g} ns")


class IllConditioned(np.linalg.LinAlgError):
    pass


class GridMismatch(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorMatrix:
    """Arrowhead-sparse generator.

    qc: qubit diagonal; coupling: (N,) entries of both the c->b_k column and the
    b_k->c row (they coincide, -i 2pi g'); bb, bd, db, dd: (N,) diagonals of
    the per-spin 2x2 blocks.
    """

    qc: complex
    coupling: np.ndarray
    bb: np.ndarray
    bd: np.ndarray
    db: np.ndarray
    dd: np.ndarray

    @property
    def n_spins(self) -> int:
        return len(self.bb)

    @property
    def dimension(self) -> int:
        return 2 * self.n_spins + 1

    @property
    def nnz(self) -> int:
        # structural count, zeros included
        return 1 + 6 * self.n_spins + 2 * self.n_spins

    def matvec(self, x: np.ndarray) -> np.ndarray:
        n = self.n_spins
        c, b, d = x[0], x[1 : n + 1], x[n + 1 :]
        y = np.empty_like(x)
        y[0] = self.qc * c + self.coupling @ b
        y[1 : n + 1] = self.bb * b + self.bd * d + self.coupling * c
        y[n + 1 :] = self.db * b + self.dd * d
        return y

    def to_dense(self) -> np.ndarray:
        n = self.n_spins
        m = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
        ib = np.arange(1, n + 1)
        id_ = ib + n
        m[0, 0] = self.qc
        m[0, ib] = self.coupling
        m[ib, 0] = self.coupling
        m[ib, ib] = self.bb
        m[ib, id_] = self.bd
        m[id_, ib] = self.db
        m[id_, id_] = self.dd
        return m

    def spectral_bound(self) -> float:
        """Upper bound on the spectral norm of ``M`` in rad/ns.

        Splits ``M`` into its block-diagonal part and the rank-2 qubit
        coupling; the latter has norm ||coupling||_2.
        """
        blocks = np.sqrt(np.abs(self.bb) ** 2 + np.abs(self.bd) ** 2 + np.abs(self.db) ** 2 + np.abs(self.dd) ** 2)
        diag = max(abs(self.qc), float(blocks.max(initial=0.0)))
        return diag + float(np.linalg.norm(self.coupling))


@dataclass
class Trajectory:
    t: np.ndarray
    p: np.ndarray
    norm: np.ndarray
    p_std: np.ndarray | None = None
    bright: np.ndarray | None = None
    dark: np.ndarray | None = None
    c: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])


def build_generator(system: RotatingFrameSystem) -> GeneratorMatrix:
    if system.n_spins == 0:
        raise ValueError("generator needs at least one spin")
    a = system.arrays()
    w = TWO_PI_PER_NS
    n = system.n_spins
    return GeneratorMatrix(
        qc=complex(-1j * w * system.delta_c - w * system.gamma_c),
        coupling=np.full(n, -1j * w * system.g_eff),
        bb=-1j * w * a["omega_b"] - w * a["gamma_b"],
        bd=w * (-1j * a["j"] + a["j_prime"]),
        db=w * (-1j * a["j"] - a["j_prime"]),
        dd=-1j * w * a["omega_d"] - w * a["gamma_d"],
    )


def initial_state(n_spins: int) -> np.ndarray:
    x = np.zeros(2 * n_spins + 1, dtype=complex)
    x[0] = 1.0
    return x


def excitation_norm(state: np.ndarray) -> float:
    return float(np.vdot(state, state).real)


def max_stable_dt(gen: GeneratorMatrix) -> float:
    bound = gen.spectral_bound()
    return np.inf if bound == 0 else STABILITY_LIMIT / bound


def time_grid(t_max: float, dt: float) -> np.ndarray:
    n_steps = int(round(t_max / dt))
    if not np.isclose(n_steps * dt, t_max, rtol=1e-9, atol=1e-12):
        raise ValueError(f"t_max = {t_max} is not a multiple of dt = {dt}")
    return dt * np.arange(n_steps + 1)


def evolve(gen: GeneratorMatrix, t_max: float, dt: float, keep_amplitude: bool = True) -> Trajectory:
    """Classical fixed-step RK4 from the state with the qubit excited."""
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    if not dt > 0:
        raise ValueError("dt must be positive")
    dt_max = max_stable_dt(gen)
    if not dt < dt_max:
        raise StepTooLarge(dt, dt_max)
    t = time_grid(t_max, dt)
    n = gen.n_spins
    x = initial_state(n)
    steps = len(t)
    p = np.empty(steps)
    bright = np.empty(steps)
    dark = np.empty(steps)
    amp = np.empty(steps, dtype=complex) if keep_amplitude else None

    f = gen.matvec
    h = dt
    for i in range(steps):
        c = x[0]
        p[i] = c.real**2 + c.imag**2
        bright[i] = np.vdot(x[1 : n + 1], x[1 : n + 1]).real
        dark[i] = np.vdot(x[n + 1 :], x[n + 1 :]).real
        if amp is not None:
            amp[i] = c
        if i == steps - 1:
            break
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return Trajectory(
        t=t,
        p=p,
        norm=p + bright + dark,
        bright=bright,
        dark=dark,
        c=amp,
        meta={"method": "rk4", "dt": dt},
    )


def evolve_oracle(gen: GeneratorMatrix, t_grid) -> Trajectory:
    """Propagate through the dense eigendecomposition ``M = V diag(lam) V^-1``."""
    if gen.dimension > ORACLE_MAX_DIM:
        raise ValueError(f"dimension {gen.dimension} exceeds the dense oracle bound {ORACLE_MAX_DIM}")
    t = np.asarray(t_grid, dtype=float)
    m = gen.to_dense()
    lam, v = np.linalg.eig(m)
    cond = np.linalg.cond(v)
    if not cond < ORACLE_MAX_COND:
        raise IllConditioned(f"eigenvector matrix condition number {cond:.3g}")
    n = gen.n_spins
    a0 = np.linalg.solve(v, initial_state(n))
    p = np.empty(len(t))
    bright = np.empty(len(t))
    dark = np.empty(len(t))
    amp = np.empty(len(t), dtype=complex)
    chunk = max(1, 4_000_000 // gen.dimension)
    for s in range(0, len(t), chunk):
        phases = np.exp(np.outer(lam, t[s : s + chunk])) * a0[:, None]
        x = v @ phases
        amp[s : s + chunk] = x[0]
        a2 = np.abs(x) ** 2
        p[s : s + chunk] = a2[0]
        bright[s : s + chunk] = a2[1 : n + 1].sum(axis=0)
        dark[s : s + chunk] = a2[n + 1 :].sum(axis=0)
    return Trajectory(
        t=t,
        p=p,
        norm=p + bright + dark,
        bright=bright,
        dark=dark,
        c=amp,
        meta={"method": "eig", "cond": float(cond)},
    )


def average_trajectories(trajectories) -> Trajectory:
    """Pointwise mean and standard deviation of P(t), in the given order."""
    trajs = list(trajectories)
    if not trajs:
        raise ValueError("nothing to average")
    t0 = trajs[0].t
    for tr in trajs[1:]:
        if tr.t.shape != t0.shape or not np.array_equal(tr.t, t0):
            raise GridMismatch("trajectories have different time grids")
    p = np.stack([tr.p for tr in trajs])
    norm = np.stack([tr.norm for tr in trajs])
    meta = {"n_realizations": len(trajs)}
    meta["realizations"] = [tr.meta.get("realization_index") for tr in trajs]
    return Trajectory(
        t=t0.copy(),
        p=p.mean(axis=0),
        norm=norm.mean(axis=0),
        p_std=p.std(axis=0),
        meta=meta,
    )
