"""CSV scan files and JSON configs.

Scan CSV: one header row, column 0 ``time_ns``, then one column per trace.
JSON keys carry their units (``d0_m``, ``time_window_ns``, ...).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import AntennaGeometry, BScan, InvalidInputError, LayerProfile, Sublayer
from .detect import DEFAULT_GAP_MIN, DEFAULT_THRESHOLD
from .forward import PRESETS, SynthConfig

NS = 1e-9


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_scan_csv(path, data: np.ndarray, time_window: float):
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    n = data.shape[0]
    times_ns = np.arange(n) * (time_window / n) / NS
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time_ns"] + [f"trace_{i}" for i in range(data.shape[1])])
        for t, row in zip(times_ns, data):
            w.writerow([fmt(t)] + [repr(float(v)) for v in row])


def read_scan_csv(path, time_window: float | None = None, channel: str = "") -> BScan:
    """Load a scan CSV as a B-scan. ``time_window`` (s) overrides the value
    implied by the time column."""
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"scan file not found: {path}")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2 or len(rows[0]) < 2:
        raise InvalidInputError(f"{path} holds no traces")
    try:
        table = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise InvalidInputError(f"{path}: {exc}") from None
    if table.shape[1] != len(rows[0]):
        raise InvalidInputError(f"{path}: ragged rows")
    if time_window is None:
        time_window = table.shape[0] * (table[1, 0] - table[0, 0]) * NS
    return BScan(table[:, 1:], time_window, channel_label=channel)


def load_json(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"config file not found: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: {exc}") from None


def dump_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _require(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise InvalidInputError(f"{where}: missing key {key!r}")
    return cfg[key]


def geometry_from_dict(cfg: dict) -> AntennaGeometry:
    return AntennaGeometry(float(_require(cfg, "d0_m", "geometry")),
                           float(_require(cfg, "x01_m", "geometry")),
                           float(_require(cfg, "x02_m", "geometry")))


def geometry_to_dict(g: AntennaGeometry) -> dict:
    return {"d0_m": g.d0, "x01_m": g.x01, "x02_m": g.x02}


def profile_from_dict(cfg: dict) -> LayerProfile:
    """Either ``{"preset": name}`` or explicit sublayers with ``base_epsilon``."""
    if "preset" in cfg:
        name = cfg["preset"]
        if name not in PRESETS:
            raise InvalidInputError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        return PRESETS[name]
    layers = _require(cfg, "sublayers", "profile")
    try:
        subs = tuple(Sublayer(float(s["epsilon"]), float(s["thickness_m"])) for s in layers)
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"profile sublayer entry malformed: {exc}") from None
    return LayerProfile(subs, float(cfg.get("base_epsilon", 10.0)), cfg.get("name", "custom"))


def profile_to_dict(p: LayerProfile) -> dict:
    return {"name": p.name,
            "sublayers": [{"epsilon": s.epsilon, "thickness_m": s.thickness} for s in p.sublayers],
            "base_epsilon": p.base_epsilon}


def synth_config_from_dict(cfg: dict) -> SynthConfig:
    d = SynthConfig()
    return SynthConfig(
        center_frequency=float(cfg.get("center_frequency_ghz", d.center_frequency / 1e9)) * 1e9,
        time_window=float(cfg.get("time_window_ns", d.time_window / NS)) * NS,
        n_samples=int(cfg.get("n_samples", d.n_samples)),
        include_coupling=bool(cfg.get("include_coupling", d.include_coupling)),
        coupling_amplitude=float(cfg.get("coupling_amplitude", d.coupling_amplitude)),
        support_floor=float(cfg.get("support_floor", d.support_floor)),
    )


def synth_config_to_dict(c: SynthConfig) -> dict:
    return {"center_frequency_ghz": c.center_frequency / 1e9, "time_window_ns": c.time_window / NS,
            "n_samples": c.n_samples, "include_coupling": c.include_coupling,
            "coupling_amplitude": c.coupling_amplitude, "support_floor": c.support_floor}


CHANNELS = ("inner", "outer", "coupling_inner", "coupling_outer", "sr_pavement", "sr_metal")


@dataclass
class SurveyManifest:
    """Files and settings for one survey; paths are relative to the workdir."""

    geometry: str
    scans: dict[str, str] = field(default_factory=dict)
    time_window_ns: float | None = None
    n_samples: int | None = None
    threshold: float = DEFAULT_THRESHOLD
    gap_min: int = DEFAULT_GAP_MIN

    @classmethod
    def from_dict(cls, cfg: dict) -> "SurveyManifest":
        scans = dict(_require(cfg, "scans", "manifest"))
        unknown = set(scans) - set(CHANNELS) - {"coupling"}
        if unknown:
            raise InvalidInputError(f"manifest: unknown channels {sorted(unknown)}")
        # a single air shot may serve both pairs
        if "coupling" in scans:
            shared = scans.pop("coupling")
            scans.setdefault("coupling_inner", shared)
            scans.setdefault("coupling_outer", shared)
        return cls(
            geometry=str(_require(cfg, "geometry", "manifest")),
            scans=scans,
            time_window_ns=cfg.get("time_window_ns"),
            n_samples=cfg.get("n_samples"),
            threshold=float(cfg.get("threshold", DEFAULT_THRESHOLD)),
            gap_min=int(cfg.get("gap_min", DEFAULT_GAP_MIN)),
        )

    def to_dict(self) -> dict:
        return {"geometry": self.geometry, "scans": dict(self.scans),
                "time_window_ns": self.time_window_ns, "n_samples": self.n_samples,
                "threshold": self.threshold, "gap_min": self.gap_min}

    def load_scan(self, channel: str, workdir: Path) -> BScan:
        if channel not in self.scans:
            raise InvalidInputError(f"manifest has no {channel!r} scan")
        window = None if self.time_window_ns is None else float(self.time_window_ns) * NS
        scan = read_scan_csv(workdir / self.scans[channel], window, channel)
        if self.n_samples is not None and scan.n_samples != int(self.n_samples):
            raise InvalidInputError(
                f"{channel}: {scan.n_samples} samples, manifest says {self.n_samples}")
        return scan

    def load_geometry(self, workdir: Path) -> AntennaGeometry:
        return geometry_from_dict(load_json(workdir / self.geometry))
