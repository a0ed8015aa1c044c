"""End-to-end analysis of recorded traces: decouple, pick TOFs, invert."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AntennaGeometry, AScan, decouple
from .detect import DEFAULT_GAP_MIN, DEFAULT_THRESHOLD, TofEstimate, estimate_tof
from .inversion import SolverOptions, SrResult, XcmpResult, sr_epsilon, sr_thickness, xcmp_solve


@dataclass(frozen=True)
class XcmpAnalysis:
    result: XcmpResult
    inner: TofEstimate
    outer: TofEstimate


def xcmp_from_scans(inner: AScan, outer: AScan, geometry: AntennaGeometry,
                    coupling_inner: AScan | None = None, coupling_outer: AScan | None = None,
                    threshold: float = DEFAULT_THRESHOLD, gap_min: int = DEFAULT_GAP_MIN,
                    options: SolverOptions = SolverOptions()) -> XcmpAnalysis:
    if coupling_inner is not None:
        inner = decouple(inner, coupling_inner)
    if coupling_outer is not None:
        outer = decouple(outer, coupling_outer)
    tof1 = estimate_tof(inner, threshold, gap_min, pair="inner")
    tof2 = estimate_tof(outer, threshold, gap_min, pair="outer")
    return XcmpAnalysis(xcmp_solve(tof1.delta_t, tof2.delta_t, geometry, options), tof1, tof2)


@dataclass(frozen=True)
class SrAnalysis:
    result: SrResult
    tof: TofEstimate
    a0: float
    a_inc: float


def surface_amplitude(scan: AScan, tof: TofEstimate) -> float:
    """Peak magnitude of the raw trace inside the detected surface reflection."""
    a = int(round(tof.surface.start_time / scan.dt))
    b = int(round(tof.surface.end_time / scan.dt))
    return float(np.max(np.abs(scan.amplitudes[a:b + 1])))


def sr_from_scans(pavement: AScan, metal_plate: AScan, threshold: float = DEFAULT_THRESHOLD,
                  gap_min: int = DEFAULT_GAP_MIN) -> SrAnalysis:
    """Surface-reflection method on a pavement trace and its metal-plate calibration."""
    tof = estimate_tof(pavement, threshold, gap_min)
    a0 = surface_amplitude(pavement, tof)
    a_inc = metal_plate.peak()
    eps = sr_epsilon(a0, a_inc)
    return SrAnalysis(SrResult(eps, sr_thickness(tof.delta_t, eps), a0 / a_inc), tof, a0, a_inc)
