"""
Choosing the edge-detector threshold
====================================

Sweep the threshold on a decoupled inner trace and score the detected edge
clusters against the true reflection supports.
"""

import numpy as np

from xcmp_gpr import (CANONICAL_GEOMETRY, PRESETS, DetectionError, decouple, edge_map,
                      locate_reflections, normalize, optimal_threshold, synthesize_pair_scans,
                      threshold_sweep)

scans = synthesize_pair_scans(PRESETS["decreasing"], CANONICAL_GEOMETRY)
scan = decouple(scans.inner, scans.coupling_inner)
supports = scans.truth.inner.supports
print("true supports (samples):", supports)

rows = threshold_sweep(scan, supports, np.linspace(0.001, 0.05, 50))
print(f"{'threshold':>9} {'EDA':>6} {'prec':>6} {'recall':>6} clusters")
for r in rows[::5]:
    print(f"{r.threshold:9.3f} {r.eda:6.3f} {r.precision:6.3f} {r.recall:6.3f} {r.n_clusters:>8}")

best = optimal_threshold(rows)
print(f"optimal threshold {best:.3f}")

# %%
# Far above the optimum the bottom reflection drops out and picking fails.

try:
    locate_reflections(edge_map(normalize(scan), 5 * best))
except DetectionError as exc:
    print("at 5x the optimum:", exc)
