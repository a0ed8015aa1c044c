import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from xcmp_gpr import (CANONICAL_GEOMETRY, PRESETS, AntennaGeometry, AScan, BScan,
                      InvalidInputError, LayerProfile, decouple, normalize,
                      synthesize_pair_scans)
from xcmp_gpr.forward import SynthConfig

W = 10e-9


def scan(values, window=W):
    return AScan(np.asarray(values, dtype=float), window)


def padded(values, n=16):
    return np.concatenate([values, np.zeros(n - len(values))])


def test_normalize_divides_by_peak_magnitude():
    out = normalize(scan(padded([0, 2, -4, 1])))
    np.testing.assert_array_equal(out.amplitudes[:4], [0, 0.5, -1, 0.25])
    assert out.scale == 4


def test_normalize_idempotent_on_normalized_input():
    a = normalize(scan(padded([0, 2, -4, 1])))
    np.testing.assert_array_equal(normalize(a).amplitudes, a.amplitudes)


def test_normalize_rejects_all_zero():
    with pytest.raises(InvalidInputError):
        normalize(scan(np.zeros(16)))


def test_synthetic_pair_scan_normalizes_to_unit_peak():
    s = synthesize_pair_scans(PRESETS["decreasing"], CANONICAL_GEOMETRY)
    assert normalize(s.inner).peak() == 1.0


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=60)
@given(arrays(float, 32, elements=finite), st.floats(1e-3, 1e3))
def test_normalize_gain_invariant(values, gain):
    if np.max(np.abs(values)) == 0:
        values[0] = 1.0
    a = normalize(scan(values)).amplitudes
    b = normalize(scan(values * gain)).amplitudes
    np.testing.assert_allclose(b, a, rtol=0, atol=4e-16)


def test_decouple_identities():
    raw = scan(np.arange(16.0))
    assert not decouple(raw, raw).amplitudes.any()
    np.testing.assert_array_equal(decouple(raw, scan(np.zeros(16))).amplitudes, raw.amplitudes)


@given(arrays(float, 20, elements=finite), arrays(float, 20, elements=finite))
def test_decouple_then_zero_air_shot_is_exact(a, b):
    once = decouple(scan(a), scan(b))
    np.testing.assert_array_equal(decouple(once, scan(np.zeros(20))).amplitudes, once.amplitudes)


def test_decouple_recovers_reflections_only_trace():
    with_c = synthesize_pair_scans(PRESETS["increasing"], CANONICAL_GEOMETRY)
    clean = synthesize_pair_scans(PRESETS["increasing"], CANONICAL_GEOMETRY,
                                  SynthConfig(include_coupling=False))
    for pair in ("inner", "outer"):
        got = decouple(with_c.raw(pair), with_c.coupling(pair)).amplitudes
        np.testing.assert_allclose(got, clean.raw(pair).amplitudes, rtol=0, atol=1e-12)


def test_decouple_rejects_mismatch():
    with pytest.raises(InvalidInputError):
        decouple(scan(np.zeros(16)), scan(np.zeros(17)))
    with pytest.raises(InvalidInputError):
        decouple(scan(np.zeros(16)), scan(np.zeros(16), window=5e-9))


def test_timestamps_follow_sample_grid():
    a = AScan(np.zeros(2121), W)
    assert a.dt == W / 2121
    assert a.timestamp(7) == 7 * W / 2121
    assert a.times[0] == 0.0
    assert a.timestamp(8) - a.timestamp(7) == pytest.approx(W / 2121, rel=1e-12)


def test_ascan_is_read_only_and_validated():
    a = scan(np.ones(16))
    with pytest.raises(ValueError):
        a.amplitudes[0] = 2.0
    for bad in (np.ones(4), [np.nan] * 16):
        with pytest.raises(InvalidInputError):
            scan(bad)
    with pytest.raises(InvalidInputError):
        scan(np.ones(16), window=0)


def test_shifted_moves_samples():
    a = scan(padded([1.0, 2.0]))
    assert a.shifted(3).amplitudes[3] == 1.0


def test_bscan_from_traces_and_iteration():
    traces = [scan(np.full(16, float(i))) for i in range(3)]
    b = BScan.from_traces(traces)
    assert (b.n_samples, b.n_traces, len(b)) == (16, 3, 3)
    assert [t.amplitudes[0] for t in b] == [0.0, 1.0, 2.0]
    assert b.trace(2).trace_index == 2


def test_bscan_rejects_inconsistent_traces():
    with pytest.raises(InvalidInputError):
        BScan.from_traces([scan(np.zeros(16)), scan(np.zeros(17))])
    with pytest.raises(InvalidInputError):
        BScan(np.zeros((16, 2)), W, trace_spacing=0)


def test_geometry_invariants():
    with pytest.raises(InvalidInputError):
        AntennaGeometry(0.0, 0.4, 1.2)
    with pytest.raises(InvalidInputError):
        AntennaGeometry(0.8, 1.2, 0.4)
    g = AntennaGeometry(0.8, 0.4, 1.2)
    assert g.offset("outer") == 1.2
    with pytest.raises(InvalidInputError):
        g.offset("middle")


def test_profile_thickness_and_bulk_epsilon():
    p = PRESETS["decreasing"]
    assert p.total_thickness == pytest.approx(0.10)
    assert p.epsilons == [6.0, 5.8, 5.6, 5.4, 5.2]
    # slowness average: (mean of sqrt(eps))^2 for equal thicknesses
    assert p.bulk_epsilon() == pytest.approx(np.mean(np.sqrt(p.epsilons)) ** 2, rel=1e-14)
    assert p.bulk_epsilon() == pytest.approx(5.59642, abs=1e-5)
    assert p.bulk_epsilon(1) == pytest.approx(6.0)
    assert LayerProfile.uniform(4.0, 0.1).bulk_epsilon() == pytest.approx(4.0)


def test_profile_validation():
    with pytest.raises(InvalidInputError):
        LayerProfile(())
    with pytest.raises(InvalidInputError):
        LayerProfile.uniform(0.5, 0.1)
    with pytest.raises(InvalidInputError):
        LayerProfile.uniform(4.0, -0.1)
