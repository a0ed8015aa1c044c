"""Layer dielectric and thickness from GPR travel times and amplitudes.

Two methods:

* XCMP: two antenna pairs with different offsets. The surface-to-bottom
  delays of both pairs fix the in-layer ray geometry (x1, x2) through the
  Snell-consistency equations, from which the bulk dielectric constant and
  thickness follow.
* Surface reflection: dielectric from the surface/metal-plate amplitude
  ratio, thickness from the delay at that dielectric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import C, AntennaGeometry, ConvergenceError, InconsistentTOFError, InvalidInputError


@dataclass(frozen=True)
class SolverOptions:
    grid: int = 64
    margin: float = 0.01
    tol: float = 1e-12
    max_iter: int = 100
    max_seeds: int = 16


@dataclass(frozen=True)
class XcmpResult:
    epsilon_bulk: float
    thickness: float
    x1: float
    x2: float
    t1: float
    t2: float
    theta_i1: float
    theta_i2: float
    residual_norm: float
    iterations: int


@dataclass(frozen=True)
class SrResult:
    epsilon: float
    thickness: float
    reflection_ratio: float


def _in_layer_time(dt, d0, x0, x):
    return dt + (np.hypot(2 * d0, x0) - np.hypot(2 * d0, x0 - x)) / C


def in_layer_times(dt1: float, dt2: float, geometry: AntennaGeometry, x1: float, x2: float
                   ) -> tuple[float, float]:
    """In-layer two-way times t1, t2 from the observed surface-to-bottom delays.

    The bottom ray's air legs are shorter than the surface ray's by the
    horizontal distance spent inside the layer; that difference is added
    back to each delay.
    """
    if not (0 <= x1 <= geometry.x01 and 0 <= x2 <= geometry.x02):
        raise InvalidInputError("need 0 <= x1 <= x01 and 0 <= x2 <= x02")
    t1 = float(_in_layer_time(dt1, geometry.d0, geometry.x01, x1))
    t2 = float(_in_layer_time(dt2, geometry.d0, geometry.x02, x2))
    if t1 <= 0 or t2 <= 0:
        raise InconsistentTOFError("in-layer time is not positive")
    return t1, t2


def xcmp_residuals(x1, x2, dt1: float, dt2: float, geometry: AntennaGeometry):
    """Residuals of the two Snell-consistency equations; broadcasts over x1, x2.

    Each is sec^2 of the air incidence angle minus the same quantity implied
    by the in-layer times and the bulk dielectric they define.
    """
    d0, x01, x02 = geometry.d0, geometry.x01, geometry.x02
    t1 = _in_layer_time(dt1, d0, x01, x1)
    t2 = _in_layer_time(dt2, d0, x02, x2)
    a = (x2 ** 2 - x1 ** 2) ** 2
    b = C ** 2 * (t2 ** 2 - t1 ** 2) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        f1 = ((x01 - x1) / (2 * d0)) ** 2 + 1 - t1 ** 2 * a / (t1 ** 2 * a - x1 ** 2 * b)
        f2 = ((x02 - x2) / (2 * d0)) ** 2 + 1 - t2 ** 2 * a / (t2 ** 2 * a - x2 ** 2 * b)
    return f1, f2


def _admissible(x1, x2, dt1, dt2, geometry):
    """Cells where the in-layer geometry is physically possible."""
    t1 = _in_layer_time(dt1, geometry.d0, geometry.x01, x1)
    t2 = _in_layer_time(dt2, geometry.d0, geometry.x02, x2)
    with np.errstate(divide="ignore", invalid="ignore"):
        eps = C ** 2 * (t2 ** 2 - t1 ** 2) / (x2 ** 2 - x1 ** 2)
        # sin of the air incidence angle implied by Snell, must stay below 1
        s1 = eps * x1 / (C * t1)
        s2 = eps * x2 / (C * t2)
    return (t1 > 0) & (t2 > t1) & (x2 > x1) & (eps >= 1) & (s1 < 1) & (s2 < 1)


def xcmp_epsilon(t1: float, t2: float, x1: float, x2: float) -> float:
    """Bulk dielectric constant from the in-layer times and offsets of both pairs."""
    if not x2 > x1 > 0:
        raise InvalidInputError("need x2 > x1 > 0")
    if t2 <= t1:
        raise InconsistentTOFError("t2 <= t1 gives a non-physical dielectric constant")
    return float(C ** 2 * (t2 ** 2 - t1 ** 2) / (x2 ** 2 - x1 ** 2))


def xcmp_thickness(t1: float, x1: float, epsilon: float) -> float:
    radicand = (C * t1 / (2 * np.sqrt(epsilon))) ** 2 - (x1 / 2) ** 2
    if radicand <= 0:
        raise InconsistentTOFError("negative thickness radicand")
    return float(np.sqrt(radicand))


def _grid_seeds(dt1, dt2, geometry, opts):
    lo, hi = opts.margin, 1 - opts.margin
    g1 = np.linspace(lo * geometry.x01, hi * geometry.x01, opts.grid)
    g2 = np.linspace(lo * geometry.x02, hi * geometry.x02, opts.grid)
    X1, X2 = np.meshgrid(g1, g2, indexing="ij")
    ok = _admissible(X1, X2, dt1, dt2, geometry)
    if not ok.any():
        raise InconsistentTOFError("no antenna-offset split gives t2 > t1 with eps >= 1")
    f1, f2 = xcmp_residuals(X1, X2, dt1, dt2, geometry)
    norm = np.where(ok, np.hypot(f1, f2), np.inf)
    norm = np.where(np.isfinite(norm), norm, np.inf)
    padded = np.pad(norm, 1, constant_values=np.inf)
    neighbours = np.stack([padded[1 + i:1 + i + opts.grid, 1 + j:1 + j + opts.grid]
                           for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0)])
    is_min = np.isfinite(norm) & (norm <= neighbours.min(axis=0))
    i, j = np.nonzero(is_min)
    seeds = sorted(zip(g1[i], g2[j]), key=lambda s: s[0] + s[1])
    return seeds[:opts.max_seeds]


def _newton(seed, dt1, dt2, geometry, opts):
    """Damped Newton with a central-difference Jacobian. Returns (x, norm, iters)."""

    def fvec(x):
        if not _admissible(x[0], x[1], dt1, dt2, geometry):
            return None
        if not (0 < x[0] < geometry.x01 and 0 < x[1] < geometry.x02):
            return None
        f = np.array(xcmp_residuals(x[0], x[1], dt1, dt2, geometry), dtype=float)
        return f if np.all(np.isfinite(f)) else None

    x = np.array(seed, dtype=float)
    f = fvec(x)
    if f is None:
        return x, np.inf, 0
    norm = float(np.hypot(*f))
    h = 1e-7 * np.array([geometry.x01, geometry.x02])
    for it in range(1, opts.max_iter + 1):
        if norm < opts.tol:
            return x, norm, it - 1
        jac = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = h[k]
            fp, fm = fvec(x + e), fvec(x - e)
            if fp is None or fm is None:
                return x, norm, it
            jac[:, k] = (fp - fm) / (2 * h[k])
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return x, norm, it
        lam = 1.0
        for _ in range(40):
            trial = x + lam * step
            ft = fvec(trial)
            if ft is not None and np.hypot(*ft) < norm:
                break
            lam *= 0.5
        else:
            return x, norm, it
        x, f = trial, ft
        norm = float(np.hypot(*f))
    return x, norm, opts.max_iter


def xcmp_solve(dt1: float, dt2: float, geometry: AntennaGeometry,
               options: SolverOptions = SolverOptions()) -> XcmpResult:
    """Solve for the in-layer ray offsets, then the bulk dielectric and thickness.

    Grid minima of the residual norm seed a damped Newton iteration; seeds are
    tried in order of increasing x1 + x2 and the first admissible root wins.
    """
    if not (dt1 > 0 and dt2 > 0):
        raise InvalidInputError("delays must be positive")
    seeds = _grid_seeds(dt1, dt2, geometry, options)
    best = np.inf
    inconsistent = None
    for seed in seeds:
        x, norm, iters = _newton(seed, dt1, dt2, geometry, options)
        best = min(best, norm)
        if norm >= options.tol:
            continue
        x1, x2 = float(x[0]), float(x[1])
        t1, t2 = in_layer_times(dt1, dt2, geometry, x1, x2)
        try:
            eps = xcmp_epsilon(t1, t2, x1, x2)
            d1 = xcmp_thickness(t1, x1, eps)
        except InconsistentTOFError as exc:
            inconsistent = exc
            continue
        return XcmpResult(
            epsilon_bulk=eps, thickness=d1, x1=x1, x2=x2, t1=t1, t2=t2,
            theta_i1=float(np.arctan((geometry.x01 - x1) / (2 * geometry.d0))),
            theta_i2=float(np.arctan((geometry.x02 - x2) / (2 * geometry.d0))),
            residual_norm=norm, iterations=iters,
        )
    if inconsistent is not None:
        raise inconsistent
    raise ConvergenceError(
        f"no root below {options.tol:g} from {len(seeds)} seeds (best residual {best:.3g})")


def snell_identity_residual(result: XcmpResult, geometry: AntennaGeometry) -> float:
    """Largest mismatch between sec^2(theta_air) and t^2 / (t^2 - eps^2 x^2 / c^2)."""
    eps = result.epsilon_bulk
    worst = 0.0
    for x0, x, t in ((geometry.x01, result.x1, result.t1), (geometry.x02, result.x2, result.t2)):
        lhs = ((x0 - x) / (2 * geometry.d0)) ** 2 + 1
        rhs = t ** 2 / (t ** 2 - eps ** 2 * x ** 2 / C ** 2)
        worst = max(worst, abs(lhs - rhs))
    return worst


def sr_epsilon(a0: float, a_inc: float) -> float:
    """Surface dielectric from the surface / metal-plate amplitude ratio."""
    r = abs(a0) / abs(a_inc) if a_inc != 0 else np.inf
    if not r < 1:
        raise InvalidInputError("|a0| must be smaller than |a_inc|")
    return float(((1 + r) / (1 - r)) ** 2)


def sr_thickness(delta_t: float, epsilon: float) -> float:
    if not delta_t > 0 or not epsilon >= 1:
        raise InvalidInputError("need delta_t > 0 and epsilon >= 1")
    return float(C * delta_t / (2 * np.sqrt(epsilon)))


def skin_depth(alpha: float) -> float:
    """Depth at which amplitude falls to 1/e for attenuation ``alpha`` (1/m)."""
    if not alpha > 0:
        raise InvalidInputError("attenuation must be positive")
    return 1.0 / alpha
