"""Parameter types and closed-form quantities of the rotating-frame model.

All frequencies are linear frequencies nu = omega / 2pi in MHz. Time is in ns.
Nothing in this module multiplies by 2pi; the dynamics module does that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# g_e mu_B / 2pi in MHz per mT
GYROMAGNETIC_MHZ_PER_MT = 28.0

# the four NV symmetry axes, each defined up to inversion
NV_AXES = np.array(
    [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ]
) / np.sqrt(3.0)

_NAMED_AXES = {
    "100": (1.0, 0.0, 0.0),
    "010": (0.0, 1.0, 0.0),
    "001": (0.0, 0.0, 1.0),
    "110": (1.0, 1.0, 0.0),
    "111": (1.0, 1.0, 1.0),
}


@dataclass(frozen=True)
class FluxQubitParams:
    gap: float
    bias: float = 0.0
    gamma_c: float = 0.0

    def __post_init__(self):
        if not self.gap > 0:
            raise ValueError(f"flux qubit gap must be positive, got {self.gap}")
        if self.gamma_c < 0:
            raise ValueError(f"gamma_c must be non-negative, got {self.gamma_c}")


@dataclass(frozen=True)
class NvSpin:
    """One sampled NV center.

    ``b_z_zeeman_k`` is the full axial Zeeman frequency g_e mu_B B_z / 2pi,
    i.e. external-field projection plus static bath field plus hyperfine offset.
    """

    d_k: float
    e1_k: float = 0.0
    e2_k: float = 0.0
    phi_k: float = 0.0
    b_z_zeeman_k: float = 0.0
    gamma_b: float = 0.0
    gamma_d: float = 0.0

    def __post_init__(self):
        if not self.d_k > 0:
            raise ValueError(f"zero-field splitting must be positive, got {self.d_k}")
        if self.gamma_b < 0 or self.gamma_d < 0:
            raise ValueError("spin decay rates must be non-negative")
        if not 0.0 <= self.phi_k < 2 * np.pi:
            raise ValueError(f"phi_k must lie in [0, 2pi), got {self.phi_k}")

    @property
    def strain(self) -> float:
        return float(np.hypot(self.e1_k, self.e2_k))


@dataclass(frozen=True)
class RotatingFrameSpin:
    omega_b: float
    omega_d: float
    j: float
    j_prime: float
    gamma_b: float = 0.0
    gamma_d: float = 0.0


@dataclass(frozen=True)
class RotatingFrameSystem:
    delta_c: float
    g_eff: float
    gamma_c: float
    spins: tuple[RotatingFrameSpin, ...]
    frame_frequency: float = 0.0

    @property
    def n_spins(self) -> int:
        return len(self.spins)

    def arrays(self) -> dict[str, np.ndarray]:
        """Per-spin parameters as float arrays, keyed by field name."""
        names = ("omega_b", "omega_d", "j", "j_prime", "gamma_b", "gamma_d")
        return {n: np.array([getattr(s, n) for s in self.spins], dtype=float) for n in names}


def qubit_frequency_and_coupling(fq: FluxQubitParams, g: float) -> tuple[float, float]:
    """Return (omega_c, g_eff) for a flux qubit with single-spin coupling ``g``.

    The coupling is reduced by the mixing factor gap / omega_c away from the
    symmetry point.
    """
    if not fq.gap > 0:
        raise ValueError("gap must be positive")
    if g < 0:
        raise ValueError("coupling g must be non-negative")
    omega_c = float(np.hypot(fq.bias, fq.gap))
    return omega_c, g * fq.gap / omega_c


def strain_components(spin: NvSpin) -> tuple[float, float]:
    # the intrinsic strain phase is absorbed into phi_k
    e = spin.strain
    return e * np.cos(2 * spin.phi_k), e * np.sin(2 * spin.phi_k)


def rotating_frame_spin(spin: NvSpin, frame_frequency: float) -> RotatingFrameSpin:
    e_x, e_y = strain_components(spin)
    detuning = spin.d_k - frame_frequency
    return RotatingFrameSpin(
        omega_b=detuning - e_y,
        omega_d=detuning + e_y,
        j=spin.b_z_zeeman_k,
        j_prime=e_x,
        gamma_b=spin.gamma_b,
        gamma_d=spin.gamma_d,
    )


def default_frame_frequency(spins: Sequence[NvSpin]) -> float:
    """Mean bright-transition frequency of the coupled branch.

    At zero mean axial field this is the mean D. With a field the frame sits
    on the upper (m=+1) branch: mean D plus mean axial Zeeman frequency.
    The hyperfine offsets are symmetric so they do not move the mean.
    """
    d = np.array([s.d_k for s in spins])
    bz = np.array([s.b_z_zeeman_k for s in spins])
    return float(d.mean() + bz.mean())


def build_system(
    fq: FluxQubitParams,
    g: float,
    spins: Sequence[NvSpin],
    frame_frequency: float | None = None,
    delta_c: float = 0.0,
) -> RotatingFrameSystem:
    """Assemble the rotating-frame system.

    ``delta_c`` is the qubit detuning omega_c - omega; it defaults to 0 since
    the qubit is flux-tuned onto the ensemble for the VRO protocol.
    """
    if len(spins) == 0:
        raise ValueError("need at least one spin")
    if frame_frequency is None:
        frame_frequency = default_frame_frequency(spins)
    _, g_eff = qubit_frequency_and_coupling(fq, g)
    rf = tuple(rotating_frame_spin(s, frame_frequency) for s in spins)
    return RotatingFrameSystem(
        delta_c=delta_c,
        g_eff=g_eff,
        gamma_c=fq.gamma_c,
        spins=rf,
        frame_frequency=frame_frequency,
    )


def single_nv_eigenenergies(e_x: float, e_y: float, zeeman: float, d: float) -> tuple[float, float, float]:
    if not d > 0:
        raise ValueError("D must be positive")
    split = float(np.sqrt(e_x**2 + e_y**2 + zeeman**2))
    return 0.0, d + split, d - split


def eigenenergy_large_field_expansion(e_x: float, e_y: float, zeeman: float) -> tuple[float, float]:
    """Second-order expansion of the excited-state splitting in E / zeeman.

    Returns ``zeeman +/- (E_x^2 + E_y^2) / (2 zeeman)``; the ``+`` entry is the
    approximation to the exact splitting sqrt(E^2 + zeeman^2).
    """
    if zeeman == 0:
        raise ValueError("large-field expansion is singular at zero field")
    corr = (e_x**2 + e_y**2) / (2.0 * zeeman)
    return zeeman + corr, zeeman - corr


def axis_vector(axis) -> np.ndarray:
    """Unit vector for a Miller-index string like ``"100"`` or an explicit 3-vector."""
    if isinstance(axis, str):
        key = axis.strip().strip("[]").replace(",", "").replace(" ", "")
        if key not in _NAMED_AXES:
            raise ValueError(f"unknown crystal axis {axis!r}")
        v = np.array(_NAMED_AXES[key], dtype=float)
    else:
        v = np.asarray(axis, dtype=float)
        if v.shape != (3,):
            raise ValueError("axis must be a 3-vector")
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("axis vector must be nonzero")
    return v / n


def project_field_to_nv_axes(b_magnitude: float, axis) -> np.ndarray:
    """Axial Zeeman frequency (MHz) on each of the four NV orientations."""
    b = b_magnitude * axis_vector(axis)
    return GYROMAGNETIC_MHZ_PER_MT * np.abs(NV_AXES @ b)
