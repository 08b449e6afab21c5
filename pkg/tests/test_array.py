from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from earthfixed.array import (
    TAPER_GAIN,
    ArrayGeometry,
    BeamWeights,
    array_factor,
    build_array,
    calibrate_taper_gain,
    element_gain,
    mean_beamwidth,
    measure_beamwidth,
    pattern_cut,
    phased_weights,
    rotate_positions,
    widened_weights,
)
from earthfixed.errors import NoMainLobe

LAM = 299_792_458.0 / 20e9


def _pair(weights):
    arr = ArrayGeometry(positions=np.array([[-LAM / 4, 0.0], [LAM / 4, 0.0]]), spacing=LAM / 2, wavelength=LAM)
    w = np.asarray(weights, dtype=complex)
    return BeamWeights(weights=w, array=arr, power=float(np.sum(np.abs(w) ** 2)), u=0.0, v=0.0)


def test_build_array_shape(arr):
    assert arr.n_elements == 512
    assert np.allclose(arr.positions.mean(axis=0), 0.0, atol=1e-15)
    d = np.hypot(*(arr.positions[:, None, :] - arr.positions[None, :, :]).transpose(2, 0, 1))
    assert d[d > 0].min() == pytest.approx(0.65 * LAM)


def test_single_element_field():
    arr = ArrayGeometry(positions=np.zeros((1, 2)), spacing=LAM, wavelength=LAM)
    beam = BeamWeights(weights=np.array([0.3 - 0.4j]), array=arr, power=0.25, u=0.0, v=0.0)
    u, v = 0.3, -0.2
    theta = np.degrees(np.arcsin(np.hypot(u, v)))
    assert array_factor(beam, u, v) == pytest.approx((0.3 - 0.4j) * np.sqrt(element_gain(theta)), rel=1e-14)


def test_two_element_broadside_doubles():
    one = array_factor(_pair([1.0, 0.0]), 0.0, 0.0)
    two = array_factor(_pair([1.0, 1.0]), 0.0, 0.0)
    assert two == pytest.approx(2 * one, rel=1e-14)


def test_two_element_endfire_null():
    # half-wavelength pair, in phase: the path difference at u = 1 cancels the pair
    beam = _pair([1.0, 1.0])
    kx = 2 * np.pi / LAM * beam.array.positions[:, 0]
    raw = np.sum(np.exp(-1j * kx * 1.0))
    assert abs(raw) < 1e-12
    assert abs(array_factor(beam, 1.0, 0.0)) < 1e-12


def test_nadir_beamwidth_pin(arr):
    assert mean_beamwidth(phased_weights(arr, 0.0, 0.0, 1.0)) == pytest.approx(3.64, abs=0.2)


def test_coherent_gain_identity(arr):
    u, v, p = 0.3, 0.2, 2.0
    beam = phased_weights(arr, u, v, p)
    theta = np.degrees(np.arcsin(np.hypot(u, v)))
    expect = p * arr.n_elements * element_gain(theta)
    assert abs(array_factor(beam, u, v)) ** 2 == pytest.approx(expect, rel=1e-12)


def test_phased_weights_nadir_uniform(arr):
    w = phased_weights(arr, 0.0, 0.0, 3.0).weights
    assert np.allclose(w, np.sqrt(3.0 / 512))
    with pytest.raises(ValueError):
        phased_weights(arr, 0.9, 0.9, 1.0)


def test_zero_widening_is_phased(arr):
    a = widened_weights(arr, 0.2, -0.1, 33.0, 0.0, 0.0, 1.5)
    b = phased_weights(arr, 0.2, -0.1, 1.5)
    assert np.array_equal(a.weights, b.weights)


def test_scan_broadening(arr):
    t = np.radians(46.0)
    beam = phased_weights(arr, np.sin(t), 0.0, 1.0)
    assert measure_beamwidth(beam, 0.0) == pytest.approx(3.64 / np.cos(t), rel=0.10)


def test_widened_12_2_target(arr):
    width = mean_beamwidth(widened_weights(arr, 0.0, 0.0, 0.0, 12.2, 12.2, 1.0))
    assert 12.2 * 0.85 <= width <= 12.2


def test_small_widening_undershoots(arr):
    width = mean_beamwidth(widened_weights(arr, 0.0, 0.0, 0.0, 4.3, 4.3, 1.0))
    natural = mean_beamwidth(phased_weights(arr, 0.0, 0.0, 1.0))
    assert natural < width < 4.3


def test_width_monotone_in_wx(arr):
    widths = [measure_beamwidth(widened_weights(arr, 0.0, 0.0, 0.0, w, 0.0, 1.0), 0.0) for w in np.arange(0.0, 15.01, 0.5)]
    assert np.all(np.diff(widths) >= -1e-4)


def test_rotation_equivariance(arr):
    a = widened_weights(arr, 0.1, 0.2, 20.0, 9.0, 5.0, 1.0)
    b = widened_weights(arr, 0.1, 0.2, 110.0, 5.0, 9.0, 1.0)
    u = np.linspace(-0.2, 0.4, 31)
    uu, vv = np.meshgrid(u, u)
    pa = np.abs(array_factor(a, uu, vv)) ** 2
    pb = np.abs(array_factor(b, uu, vv)) ** 2
    assert np.allclose(pa, pb, rtol=1e-9, atol=1e-12 * pa.max())


def test_pointing_invariance(arr):
    w = 12.2
    beam = widened_weights(arr, 0.25, 0.0, 0.0, w, w, 1.0)
    t, g = pattern_cut(beam, 0.0, span=20.0, step=0.05)
    assert abs(t[np.argmax(g)]) <= w / 2


def test_rotate_positions(arr):
    x, y = arr.positions.T
    xr, yr = rotate_positions(arr, 90.0)
    assert np.allclose(xr, -y, atol=1e-15) and np.allclose(yr, x, atol=1e-15)
    xr, yr = rotate_positions(arr, 360.0)
    assert np.allclose(xr, x, rtol=1e-12, atol=1e-15) and np.allclose(yr, y, rtol=1e-12, atol=1e-15)


def test_no_main_lobe():
    arr = ArrayGeometry(positions=np.zeros((1, 2)), spacing=LAM, wavelength=LAM)
    flat = BeamWeights(weights=np.array([1.0 + 0j]), array=arr, power=1.0, u=0.0, v=0.0)
    with pytest.raises(NoMainLobe):
        measure_beamwidth(flat, 0.0, span=10.0)


def test_negative_widening_rejected(arr):
    with pytest.raises(ValueError):
        widened_weights(arr, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0)


def test_taper_gain_reproducible(arr):
    assert calibrate_taper_gain(arr, tol=1e-3) == pytest.approx(TAPER_GAIN, abs=1e-3)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-0.5, 0.5),
    st.floats(-0.5, 0.5),
    st.floats(0.0, 360.0),
    st.floats(0.0, 20.0),
    st.floats(0.0, 20.0),
    st.floats(0.01, 50.0),
)
def test_phase_only_taper(u, v, rot, wx, wy, p):
    arr = build_array(61, 0.65 * LAM, LAM)
    w = widened_weights(arr, u, v, rot, wx, wy, p).weights
    assert np.allclose(np.abs(w), np.sqrt(p / arr.n_elements), rtol=1e-12)
    assert np.sum(np.abs(w) ** 2) == pytest.approx(p, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 360.0))
def test_rotation_preserves_distances(angle):
    arr = build_array(37, 0.65 * LAM, LAM)
    xr, yr = rotate_positions(arr, angle)
    p = arr.positions
    q = np.column_stack([xr, yr])
    d0 = np.linalg.norm(p[:, None] - p[None], axis=-1)
    d1 = np.linalg.norm(q[:, None] - q[None], axis=-1)
    assert np.allclose(d0, d1, rtol=1e-12, atol=1e-15)
