"""Asphalt layer dielectric and thickness from two-pair air-coupled GPR."""

__version__ = "0.1.0"

from .core import (
    C,
    AntennaGeometry,
    AScan,
    BScan,
    ConvergenceError,
    DetectionError,
    InconsistentTOFError,
    InvalidInputError,
    LayerProfile,
    Sublayer,
    decouple,
    normalize,
)
from .detect import (
    EdgeMap,
    ReflectionEvent,
    TofEstimate,
    edge_map,
    edge_map_bscan,
    eda,
    estimate_tof,
    estimate_tof_bscan,
    locate_reflections,
    optimal_threshold,
    threshold_sweep,
)
from .forward import (
    CANONICAL_GEOMETRY,
    PRESETS,
    SynthConfig,
    fermat_bottom_time,
    fresnel_normal,
    surface_time,
    synthesize_pair_scans,
    synthesize_sr_scans,
)
from .inversion import (
    SrResult,
    XcmpResult,
    in_layer_times,
    skin_depth,
    sr_epsilon,
    sr_thickness,
    xcmp_epsilon,
    xcmp_solve,
)
from .pipeline import sr_from_scans, xcmp_from_scans
from .sensitivity import Baseline, PerturbationSpec, run_sensitivity
