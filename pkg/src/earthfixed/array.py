"""Direct radiating array: element layout, beamformers and far-field patterns."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NoMainLobe

ELEMENT_GAIN_DBI = 4.7
POWER_PER_ELEMENT_W = 0.065

# Multiplies the linear-FM sweep so that a nadir beam widened to 12.2 deg
# measures 12.2 deg (phi-averaged -3 dB width) on the 512-element reference
# array.  Regenerate with ``calibrate_taper_gain``.
TAPER_GAIN = 2.6024188995361333


@dataclass(frozen=True)
class ArrayGeometry:
    """Planar array of identical elements.

    Attributes
    ----------
    positions : ndarray, shape (N, 2)
        Element (x, y) coordinates in metres, centred on their centroid.
    spacing : float
        Lattice step in metres.
    wavelength : float
        Carrier wavelength in metres.
    """

    positions: np.ndarray
    spacing: float
    wavelength: float
    element_gain_dbi: float = ELEMENT_GAIN_DBI
    power_per_element: float = POWER_PER_ELEMENT_W

    @property
    def n_elements(self) -> int:
        return len(self.positions)

    @property
    def total_power(self) -> float:
        return self.power_per_element * self.n_elements

    @property
    def wavenumber(self) -> float:
        return 2 * np.pi / self.wavelength

    @property
    def aperture_diameter(self) -> float:
        """Diameter of the circle with the same area as the lattice patch."""
        cell = np.sqrt(3) / 2 * self.spacing**2
        return float(2 * np.sqrt(self.n_elements * cell / np.pi))


@dataclass(frozen=True)
class BeamWeights:
    weights: np.ndarray
    array: ArrayGeometry = field(repr=False)
    power: float
    u: float
    v: float
    wx: float = 0.0
    wy: float = 0.0
    rotation: float = 0.0

    def scaled(self, power: float) -> "BeamWeights":
        """Same beam shape carrying ``power`` watts."""
        factor = np.sqrt(power / self.power) if self.power > 0 else 0.0
        return replace(self, weights=self.weights * factor, power=power)


def hex_lattice(n_rings: int, spacing: float) -> np.ndarray:
    """All points of a triangular lattice within ``n_rings`` hexagonal rings of the origin."""
    q, r = np.meshgrid(np.arange(-n_rings, n_rings + 1), np.arange(-n_rings, n_rings + 1), indexing="ij")
    q, r = q.ravel(), r.ravel()
    keep = np.abs(q + r) <= n_rings
    q, r = q[keep], r[keep]
    x = spacing * (q + 0.5 * r)
    y = spacing * (np.sqrt(3) / 2 * r)
    return np.column_stack([x, y])


def build_array(n_elements: int, spacing: float, wavelength: float = 0.0149896229, **kwargs) -> ArrayGeometry:
    """Circularly truncated hexagonal lattice of ``n_elements`` elements.

    The elements nearest to the lattice origin are kept (ties broken by
    azimuth, then by lattice index) and the result is centred on its centroid.
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    rings = 1
    while 3 * rings * (rings + 1) + 1 < 2 * n_elements:
        rings += 1
    pts = hex_lattice(rings, spacing)
    radius = np.round(np.hypot(pts[:, 0], pts[:, 1]) / spacing, 9)
    azim = np.round(np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi), 12)
    order = np.lexsort((np.arange(len(pts)), azim, radius))
    chosen = pts[order[:n_elements]]
    chosen = chosen - chosen.mean(axis=0)
    return ArrayGeometry(positions=chosen, spacing=spacing, wavelength=wavelength, **kwargs)


def element_gain(theta, gain_dbi: float = ELEMENT_GAIN_DBI):
    """Linear element power gain ``g0 cos^2(theta)``; zero behind the array."""
    t = np.radians(np.asarray(theta, dtype=float))
    g0 = 10 ** (gain_dbi / 10)
    return np.where(np.abs(t) < np.pi / 2, g0 * np.cos(t) ** 2, 0.0)


def steering_phase(arr: ArrayGeometry, u, v) -> np.ndarray:
    """Phase (rad) of the element excitations pointing at (u, v); shape (..., N)."""
    u = np.asarray(u, dtype=float)[..., None]
    v = np.asarray(v, dtype=float)[..., None]
    x, y = arr.positions[:, 0], arr.positions[:, 1]
    return arr.wavenumber * (x * u + y * v)


def phased_weights(arr: ArrayGeometry, u: float, v: float, power: float) -> BeamWeights:
    """Uniform-amplitude, linear-phase beamformer pointing at (u, v)."""
    if u * u + v * v > 1.0:
        raise ValueError("(u, v) outside the unit disk")
    amp = np.sqrt(power / arr.n_elements)
    w = amp * np.exp(1j * steering_phase(arr, u, v))
    return BeamWeights(weights=w, array=arr, power=power, u=u, v=v)


def rotate_positions(arr: ArrayGeometry, angle: float):
    """Element coordinates rotated by ``angle`` degrees (counter-clockwise)."""
    a = np.radians(angle)
    x, y = arr.positions[:, 0], arr.positions[:, 1]
    return x * np.cos(a) - y * np.sin(a), x * np.sin(a) + y * np.cos(a)


def natural_half_width(arr: ArrayGeometry) -> float:
    """Half -3 dB width of an unwidened beam in direction-cosine units."""
    return 0.5 * 1.029 * arr.wavelength / arr.aperture_diameter


def taper_coefficient(arr: ArrayGeometry, width: float, gain: float | None = None) -> float:
    """Quadratic phase coefficient (1/m) spreading the beam to ``width`` degrees.

    A phase ``k * a * x**2`` steers the aperture point ``x`` towards the direction
    cosine ``2 a x``, so across the aperture the beam sweeps ``+-a D``.  The sweep
    is set to the extra half-width requested beyond the natural beam.
    """
    if width <= 0:
        return 0.0
    gain = TAPER_GAIN if gain is None else gain
    extra = np.sin(np.radians(width) / 2) - natural_half_width(arr)
    return gain * max(extra, 0.0) / arr.aperture_diameter


def widened_weights(
    arr: ArrayGeometry,
    u: float,
    v: float,
    rotation: float,
    wx: float,
    wy: float,
    power: float,
    gain: float | None = None,
) -> BeamWeights:
    """Phase-tapered beamformer widened to ``wx`` along ``rotation`` and ``wy`` across it.

    ``rotation`` is the azimuth (deg) of the widening x-axis in the array
    frame. The taper is unit-modulus, so every element keeps its power.
    """
    if wx < 0 or wy < 0:
        raise ValueError("widening must be non-negative")
    base = phased_weights(arr, u, v, power)
    ax = taper_coefficient(arr, wx, gain)
    ay = taper_coefficient(arr, wy, gain)
    if ax == 0.0 and ay == 0.0:
        return replace(base, wx=wx, wy=wy, rotation=rotation)
    # axis along `rotation` is x_r: rotate the array the opposite way
    xr, yr = rotate_positions(arr, -rotation)
    taper = np.exp(1j * arr.wavenumber * (ax * xr**2 + ay * yr**2))
    return replace(base, weights=base.weights * taper, wx=wx, wy=wy, rotation=rotation)


def array_factor(beam: BeamWeights, u, v) -> np.ndarray:
    """Complex far field of ``beam`` towards directions (u, v), element pattern included."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    arr = beam.array
    field_ = np.exp(-1j * steering_phase(arr, u, v)) @ beam.weights
    theta = np.degrees(np.arcsin(np.clip(np.hypot(u, v), 0.0, 1.0)))
    return field_ * np.sqrt(element_gain(theta, arr.element_gain_dbi))


def pattern_db(beam: BeamWeights, u, v) -> np.ndarray:
    p = np.abs(array_factor(beam, u, v)) ** 2
    with np.errstate(divide="ignore"):
        return 10 * np.log10(p)


def _cut_directions(beam: BeamWeights, cut_azimuth: float, t_deg: np.ndarray):
    """Directions along the great circle through the pointing direction."""
    s = np.hypot(beam.u, beam.v)
    p = np.array([beam.u, beam.v, np.sqrt(max(1.0 - s * s, 0.0))])
    a = np.radians(cut_azimuth)
    q = np.array([np.cos(a), np.sin(a), 0.0])
    q = q - p * (q @ p)
    q /= np.linalg.norm(q)
    t = np.radians(t_deg)[:, None]
    d = np.cos(t) * p + np.sin(t) * q
    return d[:, 0], d[:, 1], d[:, 2]


def measure_beamwidth(
    beam: BeamWeights,
    cut_azimuth: float = 0.0,
    level_db: float = 3.0,
    span: float = 40.0,
    step: float = 0.01,
    tol: float = 1e-4,
    coarse: float = 0.1,
) -> float:
    """Width (deg) of the main lobe ``level_db`` below the peak along one cut.

    The cut is the great circle through the pointing direction heading
    towards ``cut_azimuth``. A ``coarse`` scan locates the peak and the
    outermost samples above the level; both are re-sampled on a ``step``
    grid and the crossings refined by bisection to ``tol``.
    """

    def level(tt: np.ndarray) -> np.ndarray:
        du, dv, dz = _cut_directions(beam, cut_azimuth, tt)
        out = np.full(tt.shape, -np.inf)
        ok = dz > 0
        out[ok] = pattern_db(beam, du[ok], dv[ok])
        return out

    t = np.arange(-span, span + coarse / 2, coarse)
    power = level(t)
    i_pk = int(np.argmax(power))
    fine = np.arange(t[i_pk] - coarse, t[i_pk] + coarse + step / 2, step)
    floor = max(power.max(), level(fine).max()) - level_db
    above = np.flatnonzero(power >= floor)
    # outermost crossings: ripple dips inside a widened main lobe do not split it
    i_lo, i_hi = above[0], above[-1]
    if t[i_lo] > 0 or t[i_hi] < 0:
        raise NoMainLobe("no lobe above the requested level around the pointing direction")
    if i_lo == 0 or i_hi == len(t) - 1:
        raise NoMainLobe("main lobe does not close within the scanned span")

    edges = []
    for inside, sign in ((t[i_hi], 1.0), (t[i_lo], -1.0)):
        tf = inside + sign * np.arange(0.0, coarse + step / 2, step)
        last = int(np.flatnonzero(level(tf) >= floor)[-1])
        inside, outside = tf[last], tf[min(last + 1, len(tf) - 1)]
        if last == len(tf) - 1:
            outside = inside + sign * step
        while abs(outside - inside) > tol:
            mid = 0.5 * (inside + outside)
            if level(np.array([mid]))[0] >= floor:
                inside = mid
            else:
                outside = mid
        edges.append(0.5 * (inside + outside))
    return float(edges[0] - edges[1])


def mean_beamwidth(beam: BeamWeights, azimuths=(0.0, 30.0, 60.0, 90.0), level_db: float = 3.0) -> float:
    return float(np.mean([measure_beamwidth(beam, a, level_db) for a in azimuths]))


def pattern_cut(beam: BeamWeights, cut_azimuth: float = 0.0, span: float = 30.0, step: float = 0.05):
    """Angles (deg) and normalised gain (dB) along a cut, for plotting or CSV export."""
    t = np.arange(-span, span + step / 2, step)
    du, dv, dz = _cut_directions(beam, cut_azimuth, t)
    g = np.full(t.shape, -np.inf)
    ok = dz > 0
    g[ok] = pattern_db(beam, du[ok], dv[ok])
    return t, g


def calibrate_taper_gain(arr: ArrayGeometry, target: float = 12.2, lo: float = 0.2, hi: float = 4.0, tol: float = 1e-5) -> float:
    """Bisect the sweep gain so a nadir beam widened to ``target`` measures ``target``.

    Returns the lower end of the final bracket, so the calibrated width never
    exceeds the target.
    """

    def width(g: float) -> float:
        beam = widened_weights(arr, 0.0, 0.0, 0.0, target, target, 1.0, gain=g)
        return mean_beamwidth(beam)

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if width(mid) < target:
            lo = mid
        else:
            hi = mid
    return lo
