"""Seeded sampling of the inhomogeneously broadened NV ensemble.

Every random channel of a realization draws from its own numpy ``SeedSequence``
built as ``SeedSequence(master_seed, spawn_key=(realization_index, channel))``.
SeedSequence hashes its entropy and spawn key through a 32-bit-word avalanche
mix, so streams for different (realization, channel) pairs are independent
and identical on every machine. Channel tags are the integers in ``CHANNELS``;
do not renumber them, or old seeds stop reproducing old ensembles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import NvSpin, project_field_to_nv_axes

CHANNELS = {
    "d": 0,
    "e1": 1,
    "e2": 2,
    "phi": 3,
    "bz": 4,
    "hyperfine": 5,
    "orientation": 6,
}

# rejection redraw cap; the acceptance probability per draw is > 0.96 at any truncation >= 1
_MAX_REDRAWS = 200


@dataclass(frozen=True)
class DisorderSpec:
    n_spins: int = 1200
    d_center: float = 2878.0
    d_fwhm: float = 0.08
    e_fwhm: float = 4.4
    bz_fwhm: float = 3.1
    hyperfine: float = 2.3
    b_ext_mt: float = 0.0
    b_ext_axis: str = "100"
    gamma_b: float = 0.44
    gamma_d: float = 0.44
    truncation: float = 10.0
    master_seed: int = 0

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError(f"n_spins must be >= 1, got {self.n_spins}")
        for name in ("d_fwhm", "e_fwhm", "bz_fwhm"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not self.truncation > 0:
            raise ValueError("truncation must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class EnsembleRealization:
    d: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    phi: np.ndarray
    b_z: np.ndarray
    orientation: np.ndarray
    hyperfine_offset: np.ndarray
    gamma_b: float
    gamma_d: float
    realization_index: int
    seed_used: tuple[int, int]

    @property
    def n_spins(self) -> int:
        return len(self.d)

    @property
    def spins(self) -> tuple[NvSpin, ...]:
        return tuple(
            NvSpin(
                d_k=float(self.d[k]),
                e1_k=float(self.e1[k]),
                e2_k=float(self.e2[k]),
                phi_k=float(self.phi[k]),
                b_z_zeeman_k=float(self.b_z[k]),
                gamma_b=self.gamma_b,
                gamma_d=self.gamma_d,
            )
            for k in range(self.n_spins)
        )


def lorentzian_quantile(center, fwhm, u):
    """Inverse CDF of a Cauchy law with the given FWHM."""
    return center + 0.5 * fwhm * np.tan(np.pi * (np.asarray(u, dtype=float) - 0.5))


def sample_lorentzian(center, fwhm, truncation, u, rng: np.random.Generator | None = None):
    """Map uniform variates ``u`` to a Lorentzian truncated at ``truncation * fwhm``.

    Rejected draws are replaced with fresh uniforms from ``rng``; without an
    ``rng`` a rejected draw raises ``ValueError``. ``fwhm == 0`` returns ``center``.
    """
    if fwhm < 0:
        raise ValueError("fwhm must be non-negative")
    scalar = np.ndim(u) == 0
    u = np.array(u, dtype=float, ndmin=1)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("uniform variates must lie in the open interval (0, 1)")
    if fwhm == 0:
        out = np.full(u.shape, float(center))
        return float(out[0]) if scalar else out
    out = lorentzian_quantile(center, fwhm, u)
    limit = truncation * fwhm
    bad = np.abs(out - center) > limit
    redraws = 0
    while np.any(bad):
        if rng is None:
            raise ValueError("draw rejected by truncation and no generator to redraw from")
        if redraws >= _MAX_REDRAWS:
            raise RuntimeError("rejection sampling failed to converge")
        out[bad] = lorentzian_quantile(center, fwhm, _open_uniform(rng, int(bad.sum())))
        bad = np.abs(out - center) > limit
        redraws += 1
    return float(out[0]) if scalar else out


def sample_hyperfine_offset(hyperfine, u):
    """Equal-weight triplet {-A, 0, +A} by tertiles of ``u``."""
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("uniform variates must lie in the open interval (0, 1)")
    level = np.floor(3.0 * u) - 1.0
    out = hyperfine * level
    return float(out) if out.ndim == 0 else out


def strain_width_from_d_width(d_fwhm: float) -> float:
    if d_fwhm < 0:
        raise ValueError("d_fwhm must be non-negative")
    return 50.0 * d_fwhm


def channel_rng(master_seed: int, realization_index: int, channel: str) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(realization_index, CHANNELS[channel]))
    return np.random.Generator(np.random.PCG64(ss))


def _open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    u = rng.random(n)
    # random() is in [0, 1); 0 maps to -inf under the quantile
    zero = u == 0.0
    while np.any(zero):
        u[zero] = rng.random(int(zero.sum()))
        zero = u == 0.0
    return u


def sample_ensemble(spec: DisorderSpec, realization_index: int) -> EnsembleRealization:
    n = spec.n_spins

    def rng(ch):
        return channel_rng(spec.master_seed, realization_index, ch)

    def lorentz(ch, center, fwhm):
        r = rng(ch)
        return sample_lorentzian(center, fwhm, spec.truncation, _open_uniform(r, n), rng=r)

    d = lorentz("d", spec.d_center, spec.d_fwhm)
    e1 = lorentz("e1", 0.0, spec.e_fwhm)
    e2 = lorentz("e2", 0.0, spec.e_fwhm)
    phi = 2 * np.pi * rng("phi").random(n)
    orientation = rng("orientation").integers(0, 4, size=n)
    projections = project_field_to_nv_axes(spec.b_ext_mt, spec.b_ext_axis)
    hf = sample_hyperfine_offset(spec.hyperfine, _open_uniform(rng("hyperfine"), n))
    b_z = lorentz("bz", 0.0, spec.bz_fwhm) + hf + projections[orientation]
    return EnsembleRealization(
        d=d,
        e1=e1,
        e2=e2,
        phi=phi,
        b_z=b_z,
        orientation=orientation,
        hyperfine_offset=hf,
        gamma_b=spec.gamma_b,
        gamma_d=spec.gamma_d,
        realization_index=realization_index,
        seed_used=(spec.master_seed, realization_index),
    )
