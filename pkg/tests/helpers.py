"""Fixtures shared by several test modules."""

from __future__ import annotations

import numpy as np

from xcmp_gpr.core import LayerProfile
from xcmp_gpr.forward import CANONICAL_GEOMETRY, SynthConfig, synthesize_pair_scans
from xcmp_gpr.io import SurveyManifest, dump_json, geometry_to_dict, write_scan_csv

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def survey_profiles() -> list[LayerProfile]:
    return [
        LayerProfile.from_lists([6.0, 5.8, 5.6, 5.4, 5.2], [0.02] * 5, name="decreasing"),
        LayerProfile.from_lists([5.2, 5.4, 5.6, 5.8, 6.0], [0.02] * 5, name="increasing"),
        LayerProfile.uniform(4.5, 0.08),
        LayerProfile.uniform(6.5, 0.12),
        LayerProfile.from_lists([5.0, 6.0], [0.05, 0.06]),
    ]


def write_survey(root, profiles=None, geometry=CANONICAL_GEOMETRY, config=SynthConfig(),
                 dead_trace: bool = True) -> SurveyManifest:
    """Write a multi-trace survey (optionally ending in an all-zero trace)."""
    profiles = survey_profiles() if profiles is None else profiles
    cols = {"inner": [], "outer": [], "coupling_inner": [], "coupling_outer": []}
    for p in profiles:
        s = synthesize_pair_scans(p, geometry, config)
        for pair in ("inner", "outer"):
            cols[pair].append(s.raw(pair).amplitudes)
            cols[f"coupling_{pair}"].append(s.coupling(pair).amplitudes)
    if dead_trace:
        for v in cols.values():
            v.append(np.zeros(config.n_samples))
    for name, v in cols.items():
        write_scan_csv(root / f"{name}.csv", np.column_stack(v), config.time_window)
    dump_json(geometry_to_dict(geometry), root / "geometry.json")
    manifest = SurveyManifest("geometry.json", {k: f"{k}.csv" for k in cols},
                              config.time_window * 1e9, config.n_samples)
    dump_json(manifest.to_dict(), root / "manifest.json")
    return manifest
