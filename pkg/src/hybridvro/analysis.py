"""Observables extracted from trajectories: lifetime, period, spectra, spread."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .dynamics import TWO_PI_PER_NS, GridMismatch, Trajectory
from .model import RotatingFrameSystem

# extrema must stand out by this fraction of the trace's full range
PROMINENCE_FRACTION = 0.01
ASYMPTOTE_TAIL = 0.2
MIN_EXTREMA = 4
MAX_LOG_RESIDUAL = 1.0  # rms residual of the log-envelope fit


class NoOscillation(ValueError):
    pass


class BadFit(ValueError):
    pass


@dataclass(frozen=True)
class LifetimeFit:
    tau: float
    amplitude: float
    asymptote: float
    residual: float
    n_extrema: int


@dataclass(frozen=True)
class SpectrumTrace:
    nu: np.ndarray
    response: np.ndarray

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.response) ** 2


def switching_probability(p, offset=0.0, contrast=1.0):
    """Map qubit population onto a readout switching probability."""
    return offset + contrast * np.asarray(p)


def _refine(t, y, idx):
    """Parabolic vertex through (idx-1, idx, idx+1) on a uniform grid."""
    idx = np.asarray(idx)
    ok = (idx > 0) & (idx < len(y) - 1)
    tv = t[idx].astype(float).copy()
    yv = y[idx].astype(float).copy()
    i = idx[ok]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    safe = denom != 0
    shift = np.zeros_like(y1)
    shift[safe] = 0.5 * (y0[safe] - y2[safe]) / denom[safe]
    h = t[1] - t[0]
    tv[ok] = t[i] + shift * h
    yv[ok] = y1 - 0.25 * (y0 - y2) * shift
    return tv, yv


def local_extrema(traj: Trajectory, kind: str = "both"):
    """Sub-grid times and values of the local extrema of P(t).

    ``kind`` is ``"max"``, ``"min"`` or ``"both"``. Extrema whose prominence
    is below ``PROMINENCE_FRACTION`` of the trace range are ignored, which keeps
    the result independent of affine rescaling of P.
    """
    p = np.asarray(traj.p, dtype=float)
    span = p.max() - p.min()
    if span == 0:
        return np.empty(0), np.empty(0)
    prom = PROMINENCE_FRACTION * span
    idx = []
    if kind in ("max", "both"):
        idx.append(find_peaks(p, prominence=prom)[0])
    if kind in ("min", "both"):
        idx.append(find_peaks(-p, prominence=prom)[0])
    idx = np.sort(np.concatenate(idx))
    return _refine(traj.t, p, idx)


def envelope_extrema(traj: Trajectory):
    """Interior extrema plus t=0 when the trace starts at a maximum.

    Every VRO trace starts with the qubit fully excited, so the first half
    swing begins at t=0 rather than at an interior peak.
    """
    t_ext, p_ext = local_extrema(traj)
    p = np.asarray(traj.p, dtype=float)
    if len(p) > 1 and p[0] > p[1] and (len(p_ext) == 0 or p_ext[0] < p[0]):
        t_ext = np.concatenate([[traj.t[0]], t_ext])
        p_ext = np.concatenate([[p[0]], p_ext])
    return t_ext, p_ext


def fit_envelope_lifetime(traj: Trajectory) -> LifetimeFit:
    """Exponential decay constant of the oscillation envelope.

    The envelope is sampled by the swings |P_i+1 - P_i| between consecutive
    extrema, placed at their midpoint times, and fit in log space as
    ``log A - t / tau + (-1)^i kappa``. The alternating term absorbs the
    offset between falling and rising swings when the maxima and minima
    envelopes differ, as for P = |c|^2 whose minima stay pinned near zero.
    The asymptote (mean of the final 20% of the trace) is reported alongside.
    """
    p = np.asarray(traj.p, dtype=float)
    t_ext, p_ext = envelope_extrema(traj)
    if len(t_ext) < MIN_EXTREMA:
        raise NoOscillation(f"found {len(t_ext)} extrema, need {MIN_EXTREMA}")
    tail = max(1, int(round(ASYMPTOTE_TAIL * len(p))))
    asym = float(p[-tail:].mean())
    swing = np.abs(np.diff(p_ext))
    t_mid = 0.5 * (t_ext[1:] + t_ext[:-1])
    if np.any(swing == 0):
        raise NoOscillation("consecutive extrema are equal")
    log_swing = np.log(swing)
    design = np.column_stack([np.ones_like(t_mid), t_mid, (-1.0) ** np.arange(len(t_mid))])
    coef, *_ = np.linalg.lstsq(design, log_swing, rcond=None)
    intercept, slope, _ = coef
    resid = log_swing - design @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    if not slope < 0:
        raise BadFit(f"envelope does not decay (slope {slope:.3g} per ns)")
    if rms > MAX_LOG_RESIDUAL:
        raise BadFit(f"log-envelope residual {rms:.3g} exceeds {MAX_LOG_RESIDUAL}")
    return LifetimeFit(
        tau=float(-1.0 / slope),
        amplitude=float(np.exp(intercept)),
        asymptote=asym,
        residual=rms,
        n_extrema=len(t_ext),
    )


def oscillation_frequency(traj: Trajectory) -> float:
    """Population oscillation frequency in MHz from the mean spacing of P minima."""
    t_min, _ = local_extrema(traj, "min")
    if len(t_min) < 3:
        raise NoOscillation(f"found {len(t_min)} minima, need 3")
    period_ns = (t_min[-1] - t_min[0]) / (len(t_min) - 1)
    return 1e3 / period_ns


def first_revival(traj: Trajectory) -> float:
    """Time (ns) of the first interior maximum of P(t)."""
    t_max, _ = local_extrema(traj, "max")
    if len(t_max) == 0:
        raise NoOscillation("no revival found")
    return float(t_max[0])


def self_energy(system: RotatingFrameSystem, nu) -> np.ndarray:
    """Spin contribution to the qubit denominator, in MHz, at probe ``nu`` (MHz).

    Each spin's (b, d) pair is eliminated from the frequency-domain equations:
    d = (J - iJ') b / (nu - omega_d + i Gamma_d), which leaves
    b = g' c (nu - omega_d + i Gamma_d) / [(nu - omega_b + i Gamma_b)(nu - omega_d + i Gamma_d) - (J^2 + J'^2)].
    """
    if system.g_eff == 0:
        return np.zeros(np.shape(nu), dtype=complex)
    a = system.arrays()
    nu = np.asarray(nu, dtype=float)[:, None]
    zb = nu - a["omega_b"] + 1j * a["gamma_b"]
    zd = nu - a["omega_d"] + 1j * a["gamma_d"]
    coupling2 = a["j"] ** 2 + a["j_prime"] ** 2
    out = np.empty(nu.shape[0], dtype=complex)
    # chunked to bound memory for fine grids over large ensembles
    step = max(1, 2_000_000 // max(1, system.n_spins))
    for s in range(0, nu.shape[0], step):
        sl = slice(s, s + step)
        out[sl] = (zd[sl] / (zb[sl] * zd[sl] - coupling2)).sum(axis=1)
    return system.g_eff**2 * out


def spectrum_resolvent(system: RotatingFrameSystem, probe_grid) -> SpectrumTrace:
    """Qubit response 1 / (nu - delta_c + i Gamma_c - Sigma(nu)) in angular units."""
    nu = np.asarray(probe_grid, dtype=float)
    if nu.ndim != 1 or np.any(np.diff(nu) <= 0):
        raise ValueError("probe grid must be strictly increasing")
    denom = nu - system.delta_c + 1j * system.gamma_c - self_energy(system, nu)
    return SpectrumTrace(nu=nu, response=1.0 / (TWO_PI_PER_NS * denom))


def fft_cross_check(traj: Trajectory, pad: int = 4) -> SpectrumTrace:
    """Hann-windowed, zero-padded transform of c(t) onto a frequency axis in MHz.

    Uses the kernel exp(+2 pi i nu t) so a component c ~ exp(-2 pi i f t) shows
    up at nu = +f, matching the resolvent's sign convention.
    """
    if traj.c is None:
        raise ValueError("trajectory carries no qubit amplitude")
    t = np.asarray(traj.t, dtype=float)
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9):
        raise ValueError("time grid must be uniform")
    h = dt[0]
    x = np.asarray(traj.c) * np.hanning(len(t))
    n = pad * len(t)
    spec = np.fft.ifft(x, n) * n * h
    nu = np.fft.fftfreq(n, d=h) * 1e3
    order = np.argsort(nu)
    return SpectrumTrace(nu=nu[order], response=spec[order])


def spectral_peaks(trace: SpectrumTrace, min_fraction: float = 0.05) -> np.ndarray:
    """Frequencies of local maxima of |response|^2 above a fraction of the largest."""
    power = trace.power
    if power.max() == 0:
        return np.empty(0)
    idx, _ = find_peaks(power, height=min_fraction * power.max())
    return trace.nu[idx]


def trace_spread(trajectories) -> float:
    trajs = list(trajectories)
    if not trajs:
        raise ValueError("need at least one trajectory")
    t0 = trajs[0].t
    for tr in trajs[1:]:
        if tr.t.shape != t0.shape or not np.array_equal(tr.t, t0):
            raise GridMismatch("trajectories have different time grids")
    p = np.stack([tr.p for tr in trajs])
    return float((p.max(axis=0) - p.min(axis=0)).max())
