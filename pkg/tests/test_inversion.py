import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xcmp_gpr import (CANONICAL_GEOMETRY, C, ConvergenceError, InconsistentTOFError,
                      InvalidInputError, fermat_bottom_time, fresnel_normal, in_layer_times,
                      skin_depth, sr_epsilon, sr_thickness, surface_time, xcmp_epsilon,
                      xcmp_solve)
from xcmp_gpr.inversion import (SolverOptions, snell_identity_residual, xcmp_residuals,
                                xcmp_thickness)

G = CANONICAL_GEOMETRY
NS = 1e-9


def oracle(eps=5.6, d1=0.10, geometry=G):
    """Delays, refraction offsets and in-layer times from the Fermat forward model."""
    out = {}
    for pair in ("inner", "outer"):
        t, x = fermat_bottom_time(geometry, pair, eps, d1)
        out[pair] = (t - surface_time(geometry, pair), x, np.sqrt(eps) * np.hypot(2 * d1, x) / C)
    return out


def air_excess(x0, d0=G.d0):
    return (np.hypot(2 * d0, x0) - 2 * d0) / C


def test_in_layer_time_limits():
    dt1, dt2 = 1.5 * NS, 1.4 * NS
    assert in_layer_times(dt1, dt2, G, 0.0, 0.0) == (dt1, dt2)
    t1, t2 = in_layer_times(dt1, dt2, G, G.x01, G.x02)
    assert t1 == pytest.approx(dt1 + air_excess(G.x01), rel=1e-14)
    assert t2 == pytest.approx(dt2 + air_excess(G.x02), rel=1e-14)


def test_in_layer_time_matches_oracle():
    o = oracle()
    t1, t2 = in_layer_times(o["inner"][0], o["outer"][0], G, o["inner"][1], o["outer"][1])
    assert t1 == pytest.approx(o["inner"][2], rel=1e-12)
    assert t2 == pytest.approx(o["outer"][2], rel=1e-12)


def test_in_layer_time_validation():
    with pytest.raises(InvalidInputError):
        in_layer_times(1e-9, 1e-9, G, 0.5, 0.1)
    with pytest.raises(InconsistentTOFError):
        in_layer_times(-1e-9, 1e-9, G, 0.0, 0.1)


def test_residuals_vanish_at_oracle_offsets():
    o = oracle(4.0, 0.15)
    f = xcmp_residuals(o["inner"][1], o["outer"][1], o["inner"][0], o["outer"][0], G)
    assert np.max(np.abs(f)) < 1e-9


def test_epsilon_examples():
    assert xcmp_epsilon(2 * NS, 4.2688 * NS, 0.2, 0.6) == pytest.approx(4.000, abs=1e-3)
    o = oracle()
    eps = xcmp_epsilon(o["inner"][2], o["outer"][2], o["inner"][1], o["outer"][1])
    assert eps == pytest.approx(5.6, rel=1e-10)
    with pytest.raises(InconsistentTOFError):
        xcmp_epsilon(2 * NS, 2 * NS, 0.2, 0.6)


def test_thickness_from_oracle_values():
    o = oracle()
    assert xcmp_thickness(o["inner"][2], o["inner"][1], 5.6) == pytest.approx(0.10, rel=1e-10)


def test_solve_recovers_oracle_layer():
    o = oracle()
    r = xcmp_solve(o["inner"][0], o["outer"][0], G)
    assert r.epsilon_bulk == pytest.approx(5.6, abs=1e-5)
    assert r.thickness == pytest.approx(0.100, abs=1e-6)
    assert 0 < r.x1 < G.x01 and 0 < r.x2 < G.x02 and r.t2 > r.t1
    assert r.x1 == pytest.approx(o["inner"][1], rel=1e-8)
    assert r.residual_norm < 1e-12
    assert snell_identity_residual(r, G) < 1e-9
    assert 0 < r.theta_i1 < r.theta_i2 < np.pi / 2


@settings(max_examples=40, deadline=None)
@given(eps=st.floats(2.0, 12.0), d1=st.floats(0.03, 0.25))
def test_solve_round_trip_property(eps, d1):
    o = oracle(eps, d1)
    r = xcmp_solve(o["inner"][0], o["outer"][0], G)
    assert r.epsilon_bulk == pytest.approx(eps, rel=1e-6)
    assert r.thickness == pytest.approx(d1, rel=1e-6)
    assert snell_identity_residual(r, G) < 1e-9


def test_degenerate_equal_in_layer_times_rejected():
    # Delays chosen so the only zero of the residuals has t1 = t2 (x at the antennas)
    dt1 = 1.5 * NS
    dt2 = dt1 - (air_excess(G.x02) - air_excess(G.x01))
    t1, t2 = in_layer_times(dt1, dt2, G, G.x01, G.x02)
    assert t1 == pytest.approx(t2, rel=1e-14)
    with pytest.raises(InconsistentTOFError):
        xcmp_solve(dt1, dt2, G)


def test_swapped_delays_are_inconsistent():
    with pytest.raises(InconsistentTOFError):
        xcmp_solve(1.57 * NS, 0.1 * NS, G)


def test_convergence_failure_reported():
    o = oracle()
    with pytest.raises(ConvergenceError):
        xcmp_solve(o["inner"][0], o["outer"][0], G, SolverOptions(tol=0.0))


def test_non_positive_delays_rejected():
    with pytest.raises(InvalidInputError):
        xcmp_solve(0.0, 1e-9, G)


def test_sr_epsilon_examples():
    assert sr_epsilon(0.0, 1.0) == 1.0
    assert sr_epsilon(1 / 3, 1.0) == pytest.approx(4.0, rel=1e-14)
    assert sr_epsilon(-0.3903, 1.0) == pytest.approx(5.20, abs=0.01)
    with pytest.raises(InvalidInputError):
        sr_epsilon(1.0, 1.0)
    with pytest.raises(InvalidInputError):
        sr_epsilon(1.0, 0.0)


@given(st.floats(1.0, 12.0))
def test_sr_epsilon_inverts_fresnel(eps):
    assert sr_epsilon(fresnel_normal(1, eps), -1.0) == pytest.approx(eps, rel=1e-9)


def test_sr_thickness_inverts_vertical_time():
    assert sr_thickness(2 * 0.1 * np.sqrt(5.6) / C, 5.6) == pytest.approx(0.100, rel=1e-14)
    with pytest.raises(InvalidInputError):
        sr_thickness(0.0, 5.6)


def test_skin_depth():
    assert skin_depth(20) == 0.05
    assert skin_depth(1) == 1.0
    with pytest.raises(InvalidInputError):
        skin_depth(0)
