"""One-at-a-time sensitivity of the XCMP inversion to its inputs.

Delays are perturbed in whole samples of the acquisition grid, geometry in
metres; errors are relative to the unperturbed solve.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .core import (AntennaGeometry, ConvergenceError, InconsistentTOFError,
                   InvalidInputError, LayerProfile)
from .forward import CANONICAL_GEOMETRY, fermat_bottom_time, surface_time
from .inversion import SolverOptions, xcmp_solve

TARGETS = ("dt1", "dt2", "x01", "x02", "d0")


@dataclass(frozen=True)
class PerturbationSpec:
    target: str
    offsets: tuple[float, ...]

    def __post_init__(self):
        if self.target not in TARGETS:
            raise InvalidInputError(f"unknown target {self.target!r}; expected one of {TARGETS}")
        offsets = tuple(float(o) for o in self.offsets)
        object.__setattr__(self, "offsets", offsets)
        if self.target in ("dt1", "dt2") and any(o != round(o) for o in offsets):
            raise InvalidInputError("delay offsets are whole samples")


@dataclass(frozen=True)
class Baseline:
    geometry: AntennaGeometry
    dt1: float
    dt2: float
    time_window: float = 10e-9
    n_samples: int = 2121

    @property
    def sample(self) -> float:
        return self.time_window / self.n_samples

    @classmethod
    def from_layer(cls, epsilon: float, thickness: float,
                   geometry: AntennaGeometry = CANONICAL_GEOMETRY,
                   time_window: float = 10e-9, n_samples: int = 2121) -> "Baseline":
        """Exact Fermat delays of a homogeneous layer."""
        dt = [fermat_bottom_time(geometry, p, epsilon, thickness)[0] - surface_time(geometry, p)
              for p in ("inner", "outer")]
        return cls(geometry, dt[0], dt[1], time_window, n_samples)

    @classmethod
    def from_profile(cls, profile: LayerProfile, **kwargs) -> "Baseline":
        return cls.from_layer(profile.bulk_epsilon(), profile.total_thickness, **kwargs)


@dataclass(frozen=True)
class SensitivityRecord:
    target: str
    offset: float
    epsilon: float
    thickness: float
    epsilon_error_pct: float
    thickness_error_pct: float
    ok: bool = True
    message: str = ""


def perturbed_inputs(baseline: Baseline, target: str, offset: float):
    geometry, dt1, dt2 = baseline.geometry, baseline.dt1, baseline.dt2
    if target == "dt1":
        dt1 += offset * baseline.sample
    elif target == "dt2":
        dt2 += offset * baseline.sample
    else:
        geometry = replace(geometry, **{target: getattr(geometry, target) + offset})
    return geometry, dt1, dt2


def run_sensitivity(baseline: Baseline, spec: PerturbationSpec,
                    options: SolverOptions = SolverOptions()) -> list[SensitivityRecord]:
    ref = xcmp_solve(baseline.dt1, baseline.dt2, baseline.geometry, options)
    records = []
    for offset in sorted(spec.offsets):
        try:
            geometry, dt1, dt2 = perturbed_inputs(baseline, spec.target, offset)
            res = xcmp_solve(dt1, dt2, geometry, options)
        except (ConvergenceError, InconsistentTOFError, InvalidInputError) as exc:
            records.append(SensitivityRecord(spec.target, offset, float("nan"), float("nan"),
                                             float("nan"), float("nan"), False, str(exc)))
            continue
        records.append(SensitivityRecord(
            spec.target, offset, res.epsilon_bulk, res.thickness,
            100.0 * (res.epsilon_bulk - ref.epsilon_bulk) / ref.epsilon_bulk,
            100.0 * (res.thickness - ref.thickness) / ref.thickness,
        ))
    return records


def run_all(baseline: Baseline, specs: Sequence[PerturbationSpec],
            options: SolverOptions = SolverOptions()) -> list[SensitivityRecord]:
    return [rec for spec in specs for rec in run_sensitivity(baseline, spec, options)]
