"""Run configuration: a flat ``key = value`` text format.

Lines starting with ``#`` (or the part of a line after ``#``) are comments.
Missing keys take the defaults below, which are the parameters of the
zero-field VRO simulation (N = 1200, sqrt(N) g = 13 MHz, ...). ``seed`` has no
default.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, fields

import numpy as np

from .disorder import DisorderSpec
from .model import FluxQubitParams, axis_vector


class ConfigError(ValueError):
    pass


class UnknownKey(ConfigError):
    pass


class TypeMismatch(ConfigError):
    pass


class MissingRequired(ConfigError):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int
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
    gap: float = 2878.0
    bias: float = 0.0
    gamma_c: float = 0.3
    collective_coupling_mhz: float = 13.0
    delta_c: float = 0.0
    t_max_ns: float = 200.0
    dt_ns: float = 0.05
    n_realizations: int = 8
    output: str = "."

    def __post_init__(self):
        if self.n_realizations < 1:
            raise ConfigError("n_realizations must be >= 1")
        if not self.dt_ns > 0:
            raise ConfigError("dt_ns must be positive")
        if not self.t_max_ns > self.dt_ns:
            raise ConfigError("t_max_ns must exceed dt_ns")
        if self.collective_coupling_mhz < 0:
            raise ConfigError("collective_coupling_mhz must be non-negative")
        try:
            self.disorder_spec()
            self.flux_qubit()
            axis_vector(self.b_ext_axis)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def g_single(self) -> float:
        """Per-spin coupling g from the collective sqrt(N) g."""
        return self.collective_coupling_mhz / np.sqrt(self.n_spins)

    def disorder_spec(self) -> DisorderSpec:
        return DisorderSpec(
            n_spins=self.n_spins,
            d_center=self.d_center,
            d_fwhm=self.d_fwhm,
            e_fwhm=self.e_fwhm,
            bz_fwhm=self.bz_fwhm,
            hyperfine=self.hyperfine,
            b_ext_mt=self.b_ext_mt,
            b_ext_axis=self.b_ext_axis,
            gamma_b=self.gamma_b,
            gamma_d=self.gamma_d,
            truncation=self.truncation,
            master_seed=self.seed,
        )

    def flux_qubit(self) -> FluxQubitParams:
        return FluxQubitParams(gap=self.gap, bias=self.bias, gamma_c=self.gamma_c)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self, include_output: bool = True) -> str:
        lines = []
        for f in fields(self):
            if f.name == "output" and not include_output:
                continue
            value = getattr(self, f.name)
            lines.append(f"{f.name} = {value!r}" if isinstance(value, float) else f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        """SHA-256 of the canonical text form, ignoring the output location."""
        return hashlib.sha256(self.to_text(include_output=False).encode()).hexdigest()


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    kind = _TYPES[key]
    try:
        if kind == "int":
            value = int(raw, 0)
            return value
        if kind == "float":
            return float(raw)
    except ValueError:
        raise TypeMismatch(f"{key}: expected {kind}, got {raw!r}") from None
    return raw.strip().strip('"').strip("'")


def parse_config(text: str) -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _TYPES:
            raise UnknownKey(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw)
    if "seed" not in values:
        raise MissingRequired("seed is required")
    try:
        return RunConfig(**values)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
