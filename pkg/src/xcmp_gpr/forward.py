"""Ray-based synthetic GPR traces for a layered pavement.

Arrival times come from Fermat's principle (the refraction point minimising
the two-way path time), amplitudes from normal-incidence Fresnel
coefficients with two-way transmission losses, and each event is rendered
as a Ricker wavelet.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .core import C, AntennaGeometry, AScan, InvalidInputError, LayerProfile

_BRENT_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class RayEvent:
    arrival_time: float
    effective_coefficient: float
    origin_interface: int  # 0 = pavement surface, j = bottom of sublayer j


@dataclass(frozen=True)
class SynthConfig:
    """Sampling and source settings for synthetic traces (SI units).

    ``coupling_amplitude`` is the direct-pulse amplitude relative to the
    magnitude of the surface reflection. ``support_floor`` is the edge
    strength (per sample, on the normalised trace) that delimits a
    reflection's waveform for accuracy scoring.
    """

    center_frequency: float = 2.0e9
    time_window: float = 10e-9
    n_samples: int = 2121
    include_coupling: bool = True
    coupling_amplitude: float = 10.0
    support_floor: float = 0.01

    def __post_init__(self):
        if not self.center_frequency > 0:
            raise InvalidInputError("center_frequency must be positive")
        if not self.time_window > 0 or self.n_samples < 16:
            raise InvalidInputError("need time_window > 0 and n_samples >= 16")
        if not self.n_samples / self.time_window > 4 * self.center_frequency:
            raise InvalidInputError(
                f"sampling rate {self.n_samples / self.time_window:.4g} Hz is not above "
                f"4 x center frequency ({4 * self.center_frequency:.4g} Hz)")

    @property
    def dt(self) -> float:
        return self.time_window / self.n_samples

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.dt

    @property
    def half_support(self) -> float:
        """Ricker truncation half-width; the wavelet is below 1e-15 beyond it."""
        return 2.0 / self.center_frequency


def ricker(t, frequency: float, half_support: float | None = None):
    """Ricker wavelet with unit peak at t = 0, zeroed outside ``half_support``."""
    t = np.asarray(t, dtype=float)
    a = (np.pi * frequency * t) ** 2
    w = (1.0 - 2.0 * a) * np.exp(-a)
    if half_support is not None:
        w = np.where(np.abs(t) <= half_support, w, 0.0)
    return w


def fresnel_normal(eps_a: float, eps_b: float) -> float:
    """Normal-incidence amplitude reflection coefficient going from a to b."""
    if eps_a < 1 or eps_b < 1:
        raise InvalidInputError("dielectric constants must be >= 1")
    na, nb = np.sqrt(eps_a), np.sqrt(eps_b)
    return float((na - nb) / (na + nb))


def surface_time(geometry: AntennaGeometry, pair: str) -> float:
    """Two-way air time to the pavement surface for one antenna pair."""
    x0 = geometry.offset(pair)
    return float(np.hypot(2 * geometry.d0, x0) / C)


def path_time(d0: float, x0: float, eps: float, d1: float, x) -> np.ndarray:
    """Two-way time of the surface-refracted bottom path with in-layer offset x."""
    x = np.asarray(x, dtype=float)
    air = np.hypot(2 * d0, x0 - x)
    layer = np.sqrt(eps) * np.hypot(2 * d1, x)
    return (air + layer) / C


def snell_residual(d0: float, x0: float, eps: float, d1: float, x: float) -> float:
    """sin(theta_air) - sqrt(eps) sin(theta_layer); equals -c dT/dx."""
    sin_air = (x0 - x) / np.hypot(2 * d0, x0 - x)
    sin_layer = x / np.hypot(2 * d1, x)
    return float(sin_air - np.sqrt(eps) * sin_layer)


def bottom_time(d0: float, x0: float, eps: float, d1: float) -> tuple[float, float]:
    """Fermat two-way time to a reflector at depth d1 below a medium of epsilon eps.

    Returns ``(t_total, x)`` where x is the horizontal distance between the
    entry and exit points on the surface.
    """
    if eps < 1 or d1 <= 0:
        raise InvalidInputError("need eps >= 1 and d1 > 0")
    if x0 == 0:
        return float((2 * d0 + 2 * d1 * np.sqrt(eps)) / C), 0.0
    # path time is convex in x, so dT/dx has a single sign change on (0, x0)
    x = brentq(lambda v: snell_residual(d0, x0, eps, d1, v), 0.0, x0,
               xtol=1e-18, rtol=_BRENT_RTOL, maxiter=500)
    return float(path_time(d0, x0, eps, d1, x)), float(x)


def fermat_bottom_time(geometry: AntennaGeometry, pair: str, epsilon_bulk: float,
                       d1: float) -> tuple[float, float]:
    return bottom_time(geometry.d0, geometry.offset(pair), epsilon_bulk, d1)


def _interface_coefficients(profile: LayerProfile) -> list[float]:
    eps = [1.0, *profile.epsilons, profile.base_epsilon]
    return [fresnel_normal(a, b) for a, b in zip(eps[:-1], eps[1:])]


def _effective_coefficients(profile: LayerProfile) -> list[float]:
    out, transmission = [], 1.0
    for r in _interface_coefficients(profile):
        out.append(transmission * r)
        transmission *= 1.0 - r * r
    return out


def pair_events(profile: LayerProfile, geometry: AntennaGeometry, pair: str) -> list[RayEvent]:
    """Surface, sublayer-interface and base reflections seen by one pair.

    Deeper interfaces are timed with the bulk (slowness-averaged) epsilon of
    the material above them.
    """
    coefs = _effective_coefficients(profile)
    events = [RayEvent(surface_time(geometry, pair), coefs[0], 0)]
    depth = 0.0
    for j, layer in enumerate(profile.sublayers, start=1):
        depth += layer.thickness
        t, _ = fermat_bottom_time(geometry, pair, profile.bulk_epsilon(j), depth)
        events.append(RayEvent(t, coefs[j], j))
    return events


def normal_incidence_events(profile: LayerProfile, height: float) -> list[RayEvent]:
    coefs = _effective_coefficients(profile)
    t = 2 * height / C
    events = [RayEvent(t, coefs[0], 0)]
    for j, layer in enumerate(profile.sublayers, start=1):
        t += 2 * layer.thickness * np.sqrt(layer.epsilon) / C
        events.append(RayEvent(t, coefs[j], j))
    return events


def _check_window(times, config: SynthConfig):
    latest = max(times) + config.half_support
    if latest > config.time_window:
        raise InvalidInputError(
            f"events extend to {latest * 1e9:.4f} ns; time_window must be at least "
            f"{latest * 1e9:.4f} ns (got {config.time_window * 1e9:.4f} ns)")


def render(events, config: SynthConfig, extra=()) -> np.ndarray:
    """Sum Ricker wavelets for ``events`` plus any (time, amplitude) pairs in ``extra``."""
    t = config.times
    out = np.zeros(config.n_samples)
    pulses = [(e.arrival_time, e.effective_coefficient) for e in events] + list(extra)
    for when, amp in pulses:
        out += amp * ricker(t - when, config.center_frequency, config.half_support)
    return out


def edge_strength(amplitudes: np.ndarray) -> np.ndarray:
    """Per-sample central-difference slope magnitude with replicated ends."""
    p = np.pad(amplitudes, 1, mode="edge")
    return np.abs(p[2:] - p[:-2]) / 2.0


def waveform_supports(clean: np.ndarray, events, config: SynthConfig) -> list[tuple[int, int]]:
    """Sample spans of the given reflections on a noise-free trace.

    A span runs from the first to the last sample within one wavelet period
    of the event where the normalised trace's edge strength reaches
    ``config.support_floor``.
    """
    g = edge_strength(clean / np.max(np.abs(clean)))
    t = config.times
    period = 1.0 / config.center_frequency
    spans = []
    for e in events:
        idx = np.flatnonzero((np.abs(t - e.arrival_time) <= period) & (g >= config.support_floor))
        if idx.size:
            spans.append((int(idx[0]), int(idx[-1])))
    return spans


@dataclass(frozen=True)
class PairTruth:
    surface_time: float
    bottom_time: float
    refraction_offset: float
    supports: tuple[tuple[int, int], ...]
    events: tuple[RayEvent, ...] = field(repr=False)

    @property
    def delta_t(self) -> float:
        return self.bottom_time - self.surface_time

    def support_mask(self, n_samples: int) -> np.ndarray:
        mask = np.zeros(n_samples, dtype=bool)
        for a, b in self.supports:
            mask[a:b + 1] = True
        return mask


@dataclass(frozen=True)
class SynthTruth:
    inner: PairTruth
    outer: PairTruth
    epsilon_bulk: float
    thickness: float

    @property
    def dt1(self) -> float:
        return self.inner.delta_t

    @property
    def dt2(self) -> float:
        return self.outer.delta_t

    def pair(self, name: str) -> PairTruth:
        return {"inner": self.inner, "outer": self.outer}[name]


@dataclass(frozen=True)
class PairScans:
    inner: AScan
    outer: AScan
    coupling_inner: AScan
    coupling_outer: AScan
    truth: SynthTruth

    def raw(self, pair: str) -> AScan:
        return {"inner": self.inner, "outer": self.outer}[pair]

    def coupling(self, pair: str) -> AScan:
        return {"inner": self.coupling_inner, "outer": self.coupling_outer}[pair]


def synthesize_pair_scans(profile: LayerProfile, geometry: AntennaGeometry,
                          config: SynthConfig = SynthConfig()) -> PairScans:
    """Inner/outer pair traces, their air-shot coupling traces and ground truth."""
    scans, couplings, truths = {}, {}, {}
    eps_bulk = profile.bulk_epsilon()
    depth = profile.total_thickness
    for idx, pair in enumerate(("inner", "outer")):
        events = pair_events(profile, geometry, pair)
        direct = geometry.offset(pair) / C
        coupling = [(direct, config.coupling_amplitude * abs(events[0].effective_coefficient))]
        _check_window([e.arrival_time for e in events] + [direct], config)
        clean = render(events, config)
        raw = clean + render((), config, coupling) if config.include_coupling else clean
        air = render((), config, coupling) if config.include_coupling else np.zeros_like(clean)
        scans[pair] = AScan(raw, config.time_window, trace_index=0)
        couplings[pair] = AScan(air, config.time_window, trace_index=0)
        _, x_ref = fermat_bottom_time(geometry, pair, eps_bulk, depth)
        truths[pair] = PairTruth(
            surface_time=events[0].arrival_time,
            bottom_time=events[-1].arrival_time,
            refraction_offset=x_ref,
            supports=tuple(waveform_supports(clean, (events[0], events[-1]), config)),
            events=tuple(events),
        )
    truth = SynthTruth(truths["inner"], truths["outer"], eps_bulk, depth)
    return PairScans(scans["inner"], scans["outer"], couplings["inner"], couplings["outer"], truth)


@dataclass(frozen=True)
class SrScans:
    pavement: AScan
    metal_plate: AScan
    surface_time: float
    bottom_time: float
    surface_coefficient: float


def synthesize_sr_scans(profile: LayerProfile, config: SynthConfig = SynthConfig(),
                        height: float = 0.8) -> SrScans:
    """Zero-offset pavement trace and metal-plate calibration trace.

    The plate lies on the pavement surface and reflects with coefficient -1.
    """
    events = normal_incidence_events(profile, height)
    _check_window([e.arrival_time for e in events], config)
    pavement = render(events, config)
    plate = render([RayEvent(events[0].arrival_time, -1.0, 0)], config)
    return SrScans(AScan(pavement, config.time_window), AScan(plate, config.time_window),
                   events[0].arrival_time, events[-1].arrival_time,
                   events[0].effective_coefficient)


def _table1(epsilons, name):
    return LayerProfile.from_lists(epsilons, [0.02] * len(epsilons), base_epsilon=10.0, name=name)


PRESETS: dict[str, LayerProfile] = {
    "decreasing": _table1([6.0, 5.8, 5.6, 5.4, 5.2], "decreasing"),
    "increasing": _table1([5.2, 5.4, 5.6, 5.8, 6.0], "increasing"),
    "uniform-5.6": LayerProfile.uniform(5.6, 0.10, base_epsilon=10.0, name="uniform-5.6"),
}

CANONICAL_GEOMETRY = AntennaGeometry(d0=0.8, x01=0.4, x02=1.2)
