"""Automatic surface/bottom reflection picking with a Sobel edge detector.

Traces are normalised to unit peak, the Sobel magnitude is thresholded,
mark runs are merged into clusters, and the two clusters with the strongest
gradients are taken as the layer surface and bottom. Each reflection is
located at the midpoint of its cluster's first and last marks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import ndimage

from .core import AScan, BScan, DetectionError, InvalidInputError, normalize

# First kernel differentiates across traces, second along time; scaled by 1/8
# so a ramp rising by s per sample yields magnitude s.
SOBEL_ACROSS = np.array([[1, 0, -1], [2, 0, -2], [1, 0, -1]], dtype=float) / 8.0
SOBEL_ALONG = np.array([[1, 2, 1], [0, 0, 0], [-1, -2, -1]], dtype=float) / 8.0

DEFAULT_THRESHOLD = 0.01
# Gradient lobes of a single 2 GHz reflection sampled at 2121 / 10 ns sit up
# to ~25 samples apart at 5x the default threshold.
DEFAULT_GAP_MIN = 32


@dataclass(frozen=True)
class EdgeMap:
    gradient_magnitude: np.ndarray
    threshold: float
    dt: float

    @property
    def marks(self) -> np.ndarray:
        return self.gradient_magnitude >= self.threshold

    def clusters(self, gap_min: int = DEFAULT_GAP_MIN) -> list[tuple[int, int]]:
        """Inclusive (start, end) sample spans of mark runs, merging runs whose
        unmarked gap is shorter than ``gap_min`` samples."""
        idx = np.flatnonzero(self.marks)
        if idx.size == 0:
            return []
        breaks = np.flatnonzero(np.diff(idx) - 1 >= gap_min)
        starts = np.concatenate(([idx[0]], idx[breaks + 1]))
        ends = np.concatenate((idx[breaks], [idx[-1]]))
        return [(int(a), int(b)) for a, b in zip(starts, ends)]

    def cluster_mask(self, gap_min: int = DEFAULT_GAP_MIN) -> np.ndarray:
        mask = np.zeros(self.gradient_magnitude.size, dtype=bool)
        for a, b in self.clusters(gap_min):
            mask[a:b + 1] = True
        return mask


@dataclass(frozen=True)
class ReflectionEvent:
    start_time: float
    end_time: float
    peak_gradient: float

    @property
    def center_time(self) -> float:
        return 0.5 * (self.start_time + self.end_time)


@dataclass(frozen=True)
class TofEstimate:
    surface: ReflectionEvent
    bottom: ReflectionEvent
    pair: str = "inner"

    @property
    def delta_t(self) -> float:
        return self.bottom.center_time - self.surface.center_time


def _check_threshold(threshold: float):
    if not 0 < threshold < 1:
        raise InvalidInputError(f"threshold must lie in (0, 1), got {threshold}")


def sobel_magnitude(image: np.ndarray) -> np.ndarray:
    """Gradient norm of a (time, trace) image, borders replicated."""
    gx = ndimage.convolve(image, SOBEL_ACROSS, mode="nearest")
    gy = ndimage.convolve(image, SOBEL_ALONG, mode="nearest")
    return np.hypot(gx, gy)


def edge_map(scan: AScan, threshold: float = DEFAULT_THRESHOLD) -> EdgeMap:
    """Edge map of a normalised A-scan.

    The trace is replicated into three identical columns, which reduces the
    2-D Sobel response to a smoothed time derivative.
    """
    _check_threshold(threshold)
    if not scan.is_normalized():
        raise InvalidInputError("edge_map needs a normalised scan (peak magnitude 1)")
    image = np.repeat(scan.amplitudes[:, None], 3, axis=1)
    return EdgeMap(sobel_magnitude(image)[:, 1], threshold, scan.dt)


def edge_map_bscan(bscan: BScan, threshold: float = DEFAULT_THRESHOLD) -> list[EdgeMap]:
    """Per-trace edge maps from a 2-D Sobel pass over a trace-normalised B-scan."""
    _check_threshold(threshold)
    peaks = np.max(np.abs(bscan.data), axis=0)
    if not np.allclose(peaks, 1.0, rtol=0, atol=1e-12):
        raise InvalidInputError("edge_map_bscan needs every trace normalised to unit peak")
    mag = sobel_magnitude(bscan.data)
    return [EdgeMap(mag[:, i], threshold, bscan.dt) for i in range(bscan.n_traces)]


def normalize_bscan(bscan: BScan) -> BScan:
    peaks = np.max(np.abs(bscan.data), axis=0)
    if np.any(peaks == 0):
        raise InvalidInputError("cannot normalise an all-zero trace")
    return BScan(bscan.data / peaks, bscan.time_window, bscan.trace_spacing, bscan.channel_label)


def locate_reflections(emap: EdgeMap, gap_min: int = DEFAULT_GAP_MIN
                       ) -> tuple[ReflectionEvent, ReflectionEvent]:
    """Pick the surface and bottom reflections from an edge map."""
    clusters = emap.clusters(gap_min)
    if len(clusters) < 2:
        raise DetectionError(
            f"found {len(clusters)} edge cluster(s) at threshold {emap.threshold:g}; "
            "need a surface and a bottom reflection")
    g = emap.gradient_magnitude
    peaks = [float(g[a:b + 1].max()) for a, b in clusters]
    # strongest first; ties go to the earlier cluster
    order = sorted(range(len(clusters)), key=lambda i: (-peaks[i], clusters[i][0]))
    chosen = sorted(order[:2], key=lambda i: clusters[i][0])
    events = [ReflectionEvent(clusters[i][0] * emap.dt, clusters[i][1] * emap.dt, peaks[i])
              for i in chosen]
    return events[0], events[1]


def estimate_tof(scan: AScan, threshold: float = DEFAULT_THRESHOLD,
                 gap_min: int = DEFAULT_GAP_MIN, pair: str = "inner") -> TofEstimate:
    """Normalise, edge-detect and locate; Δt is the bottom minus surface centre."""
    surface, bottom = locate_reflections(edge_map(normalize(scan), threshold), gap_min)
    return TofEstimate(surface, bottom, pair)


def estimate_tof_bscan(bscan: BScan, threshold: float = DEFAULT_THRESHOLD,
                       gap_min: int = DEFAULT_GAP_MIN, pair: str = "inner"
                       ) -> list[TofEstimate | DetectionError]:
    """2-D variant: one estimate (or the detection error) per trace."""
    out: list[TofEstimate | DetectionError] = []
    for emap in edge_map_bscan(normalize_bscan(bscan), threshold):
        try:
            out.append(TofEstimate(*locate_reflections(emap, gap_min), pair))
        except DetectionError as exc:
            out.append(exc)
    return out


class EdaScore(NamedTuple):
    eda: float
    precision: float
    recall: float


def intervals_to_mask(intervals: Sequence[tuple[int, int]], n_samples: int) -> np.ndarray:
    mask = np.zeros(n_samples, dtype=bool)
    for a, b in intervals:
        mask[a:b + 1] = True
    return mask


def eda(marks: np.ndarray, truth_intervals: Sequence[tuple[int, int]]) -> EdaScore:
    """Edge detection accuracy as the Dice overlap of marks and true supports.

    ``truth_intervals`` are inclusive sample spans of the reflection
    waveforms. Precision and recall are returned alongside.
    """
    marks = np.asarray(marks, dtype=bool)
    truth = intervals_to_mask(truth_intervals, marks.size)
    n_truth = int(truth.sum())
    if n_truth == 0:
        raise InvalidInputError("truth intervals are empty")
    n_marks = int(marks.sum())
    hit = int((marks & truth).sum())
    precision = hit / n_marks if n_marks else 0.0
    return EdaScore(2.0 * hit / (n_marks + n_truth), precision, hit / n_truth)


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    eda: float
    precision: float
    recall: float
    n_clusters: int
    detected: bool


def threshold_sweep(scan: AScan, truth_intervals: Sequence[tuple[int, int]],
                    thresholds: Sequence[float], gap_min: int = DEFAULT_GAP_MIN
                    ) -> list[SweepRow]:
    """Score the detector over increasing thresholds.

    Marks are scored as filled cluster spans, i.e. the range each detected
    edge cluster covers.
    """
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.size == 0 or np.any(np.diff(thresholds) <= 0):
        raise InvalidInputError("thresholds must be non-empty and strictly increasing")
    if thresholds[0] <= 0 or thresholds[-1] >= 1:
        raise InvalidInputError("thresholds must lie in (0, 1)")
    norm = normalize(scan)
    rows = []
    for th in thresholds:
        emap = edge_map(norm, float(th))
        n_clusters = len(emap.clusters(gap_min))
        score = eda(emap.cluster_mask(gap_min), truth_intervals)
        rows.append(SweepRow(float(th), score.eda, score.precision, score.recall,
                             n_clusters, n_clusters >= 2))
    return rows


def optimal_threshold(rows: Sequence[SweepRow]) -> float:
    """Smallest threshold attaining the maximum EDA."""
    best = max(r.eda for r in rows)
    return next(r.threshold for r in rows if r.eda == best)
