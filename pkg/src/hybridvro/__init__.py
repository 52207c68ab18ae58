"""Flux qubit coupled to an inhomogeneous NV ensemble: vacuum Rabi oscillation simulator."""

from .analysis import fit_envelope_lifetime, oscillation_frequency, spectrum_resolvent, trace_spread
from .config import RunConfig, parse_config
from .disorder import DisorderSpec, sample_ensemble
from .dynamics import Trajectory, average_trajectories, build_generator, evolve, evolve_oracle
from .model import FluxQubitParams, NvSpin, build_system

__all__ = [
    "DisorderSpec",
    "FluxQubitParams",
    "NvSpin",
    "RunConfig",
    "Trajectory",
    "average_trajectories",
    "build_generator",
    "build_system",
    "evolve",
    "evolve_oracle",
    "fit_envelope_lifetime",
    "oscillation_frequency",
    "parse_config",
    "sample_ensemble",
    "spectrum_resolvent",
    "trace_spread",
]
