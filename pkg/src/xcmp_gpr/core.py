"""Shared GPR data types and signal conditioning.

All quantities are SI internally (metres, seconds). Conversions to ns / cm
happen only in :mod:`xcmp_gpr.io` and the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: Free-space EM wave speed, 0.3 m/ns.
C = 3.0e8

MIN_SAMPLES = 16


class InvalidInputError(ValueError):
    """Input violates a documented precondition."""


class DetectionError(RuntimeError):
    """Edge detection could not find both layer reflections."""


class ConvergenceError(RuntimeError):
    """The XCMP system solve found no acceptable root."""


class InconsistentTOFError(ValueError):
    """Travel times that cannot come from a physical layer."""


def _frozen_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise InvalidInputError(f"expected a {ndim}-D array, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AScan:
    """A single time-sampled trace.

    Sample ``k`` sits at ``k * time_window / n_samples``; sample 0 is t = 0.
    ``scale`` is the factor the amplitudes were divided by in
    :func:`normalize` (1.0 for raw traces).
    """

    amplitudes: np.ndarray
    time_window: float
    trace_index: int = 0
    scale: float = 1.0

    def __post_init__(self):
        amps = _frozen_array(self.amplitudes, 1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.size < MIN_SAMPLES:
            raise InvalidInputError(f"need at least {MIN_SAMPLES} samples, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise InvalidInputError("amplitudes must be finite")
        if not self.time_window > 0:
            raise InvalidInputError("time_window must be positive")
        if self.trace_index < 0:
            raise InvalidInputError("trace_index must be non-negative")

    @property
    def n_samples(self) -> int:
        return self.amplitudes.size

    @property
    def dt(self) -> float:
        """Sample interval in seconds."""
        return self.time_window / self.n_samples

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.dt

    def timestamp(self, k: float) -> float:
        return k * self.dt

    def peak(self) -> float:
        return float(np.max(np.abs(self.amplitudes)))

    def is_normalized(self, atol: float = 1e-12) -> bool:
        return abs(self.peak() - 1.0) <= atol

    def with_amplitudes(self, amplitudes, scale: float | None = None) -> "AScan":
        return AScan(amplitudes, self.time_window, self.trace_index,
                     self.scale if scale is None else scale)

    def shifted(self, n: int) -> "AScan":
        """Circularly shift the trace by ``n`` samples (positive = later)."""
        return self.with_amplitudes(np.roll(self.amplitudes, n))


@dataclass(frozen=True)
class BScan:
    """Traces along a survey line, stored as an (n_samples, n_traces) array."""

    data: np.ndarray
    time_window: float
    trace_spacing: float = 1.0
    channel_label: str = ""

    def __post_init__(self):
        data = _frozen_array(self.data, 2)
        object.__setattr__(self, "data", data)
        if data.shape[0] < MIN_SAMPLES:
            raise InvalidInputError(f"need at least {MIN_SAMPLES} samples per trace")
        if data.shape[1] < 1:
            raise InvalidInputError("B-scan has no traces")
        if not np.all(np.isfinite(data)):
            raise InvalidInputError("amplitudes must be finite")
        if not self.time_window > 0:
            raise InvalidInputError("time_window must be positive")
        if not self.trace_spacing > 0:
            raise InvalidInputError("trace_spacing must be positive")

    @classmethod
    def from_traces(cls, traces: Sequence[AScan], trace_spacing: float = 1.0,
                    channel_label: str = "") -> "BScan":
        if not traces:
            raise InvalidInputError("B-scan has no traces")
        n, window = traces[0].n_samples, traces[0].time_window
        for tr in traces:
            if tr.n_samples != n or tr.time_window != window:
                raise InvalidInputError("traces differ in n_samples or time_window")
        return cls(np.column_stack([tr.amplitudes for tr in traces]), window,
                   trace_spacing, channel_label)

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_traces(self) -> int:
        return self.data.shape[1]

    @property
    def dt(self) -> float:
        return self.time_window / self.n_samples

    def trace(self, i: int) -> AScan:
        return AScan(self.data[:, i], self.time_window, trace_index=i)

    def __iter__(self):
        return (self.trace(i) for i in range(self.n_traces))

    def __len__(self):
        return self.n_traces


@dataclass(frozen=True)
class AntennaGeometry:
    """Two-pair air-coupled antenna layout.

    d0 is the height of the antenna centre above the pavement; x01 and x02
    are the transmitter-receiver separations of the inner and outer pairs.
    """

    d0: float
    x01: float
    x02: float

    def __post_init__(self):
        if not self.d0 > 0:
            raise InvalidInputError("d0 must be positive")
        if not 0 < self.x01 < self.x02:
            raise InvalidInputError("need 0 < x01 < x02")

    def offset(self, pair: str) -> float:
        if pair == "inner":
            return self.x01
        if pair == "outer":
            return self.x02
        raise InvalidInputError(f"pair must be 'inner' or 'outer', got {pair!r}")

    def scaled(self, k: float) -> "AntennaGeometry":
        return AntennaGeometry(self.d0 * k, self.x01 * k, self.x02 * k)


@dataclass(frozen=True)
class Sublayer:
    epsilon: float
    thickness: float


@dataclass(frozen=True)
class LayerProfile:
    """Asphalt sublayer stack over a base layer (top sublayer first)."""

    sublayers: tuple[Sublayer, ...]
    base_epsilon: float = 10.0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        layers = tuple(s if isinstance(s, Sublayer) else Sublayer(*s) for s in self.sublayers)
        object.__setattr__(self, "sublayers", layers)
        if not layers:
            raise InvalidInputError("profile needs at least one sublayer")
        for s in layers:
            if not s.epsilon >= 1:
                raise InvalidInputError("sublayer epsilon must be >= 1")
            if not s.thickness > 0:
                raise InvalidInputError("sublayer thickness must be positive")
        if not self.base_epsilon >= 1:
            raise InvalidInputError("base epsilon must be >= 1")

    @classmethod
    def uniform(cls, epsilon: float, thickness: float, base_epsilon: float = 10.0,
                name: str = "") -> "LayerProfile":
        return cls((Sublayer(epsilon, thickness),), base_epsilon, name)

    @classmethod
    def from_lists(cls, epsilons: Iterable[float], thicknesses: Iterable[float],
                   base_epsilon: float = 10.0, name: str = "") -> "LayerProfile":
        return cls(tuple(Sublayer(e, d) for e, d in zip(epsilons, thicknesses, strict=True)),
                   base_epsilon, name)

    @property
    def epsilons(self) -> list[float]:
        return [s.epsilon for s in self.sublayers]

    @property
    def thicknesses(self) -> list[float]:
        return [s.thickness for s in self.sublayers]

    @property
    def total_thickness(self) -> float:
        return float(sum(self.thicknesses))

    def bulk_epsilon(self, n_layers: int | None = None) -> float:
        """Homogeneous epsilon with the same vertical travel time as the top
        ``n_layers`` sublayers (all of them by default)."""
        layers = self.sublayers[:n_layers]
        depth = sum(s.thickness for s in layers)
        slowness = sum(s.thickness * np.sqrt(s.epsilon) for s in layers)
        return float((slowness / depth) ** 2)


def normalize(scan: AScan) -> AScan:
    """Divide a trace by its peak magnitude so that max |amplitude| = 1."""
    peak = scan.peak()
    if peak == 0:
        raise InvalidInputError("cannot normalize an all-zero scan")
    return scan.with_amplitudes(scan.amplitudes / peak, scale=scan.scale * peak)


def decouple(raw: AScan, coupling: AScan) -> AScan:
    """Remove the direct transmitter-receiver pulse by subtracting an air shot."""
    if raw.n_samples != coupling.n_samples or raw.time_window != coupling.time_window:
        raise InvalidInputError("raw and coupling scans are not dimensionally identical")
    return raw.with_amplitudes(raw.amplitudes - coupling.amplitudes)
