"""
XCMP against the surface-reflection method
==========================================

Run both methods on the two graded profiles. Surface reflection only sees
the top sublayer, so its bias follows the gradient; XCMP measures the bulk.
"""

from xcmp_gpr import CANONICAL_GEOMETRY, PRESETS, synthesize_pair_scans, synthesize_sr_scans
from xcmp_gpr.pipeline import sr_from_scans, xcmp_from_scans

print(f"{'profile':>11} {'method':>6} {'epsilon':>8} {'thickness cm':>13}")
for name in ("decreasing", "increasing"):
    profile = PRESETS[name]
    s = synthesize_pair_scans(profile, CANONICAL_GEOMETRY)
    x = xcmp_from_scans(s.inner, s.outer, CANONICAL_GEOMETRY, s.coupling_inner, s.coupling_outer)
    sr = synthesize_sr_scans(profile, height=CANONICAL_GEOMETRY.d0)
    r = sr_from_scans(sr.pavement, sr.metal_plate)
    print(f"{name:>11} {'XCMP':>6} {x.result.epsilon_bulk:8.3f} {x.result.thickness * 100:13.2f}")
    print(f"{name:>11} {'SR':>6} {r.result.epsilon:8.3f} {r.result.thickness * 100:13.2f}")
    print(f"{'':>11} truth  {profile.bulk_epsilon():8.3f} {profile.total_thickness * 100:13.2f}")
