"""Earth-fixed hexagonal grids of beam footprint centres (designs A, B, C, D)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array import ArrayGeometry, BeamWeights, pattern_db, widened_weights
from .errors import InvalidSpec
from .geometry import (
    GroundPoint,
    OrbitGeometry,
    destination,
    footprint_radius,
    great_circle_distance,
    ground_to_uv,
    tangent_to_ground,
)

NADIR_BEAMWIDTH_DEG = 3.64
CONTOUR_SAMPLES = 720
_TILT_TOL = 1e-9


@dataclass(frozen=True)
class LayoutSpec:
    """Which footprint design to build and its parameter.

    ``alpha`` applies to design C (fraction of the edge tilt used as the
    reference footprint). ``theta_ref`` applies to design D: the grid step is
    ``sqrt(3)`` times the nadir footprint radius of a cone ``theta_ref`` wide,
    so ``theta_ref`` equal to the nadir beamwidth reproduces design B.
    """

    design: str
    alpha: float | None = None
    theta_ref: float | None = None
    geo: OrbitGeometry = field(default_factory=OrbitGeometry)
    nadir_beamwidth: float = NADIR_BEAMWIDTH_DEG
    name: str | None = None

    def __post_init__(self):
        if self.design not in ("A", "B", "C", "D"):
            raise InvalidSpec(f"unknown design {self.design!r}")
        if self.nadir_beamwidth <= 0:
            raise InvalidSpec("nadir_beamwidth must be positive")
        if self.design == "C":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise InvalidSpec(f"design C needs 0 < alpha < 1, got {self.alpha}")
        if self.design == "D":
            upper = 2 * self.geo.edge_tilt_deg
            if self.theta_ref is None or not self.nadir_beamwidth <= self.theta_ref < upper:
                raise InvalidSpec(
                    f"design D needs {self.nadir_beamwidth} <= theta_ref < {upper:.2f}, got {self.theta_ref}"
                )

    @property
    def label(self) -> str:
        return self.name or self.design

    @property
    def reference_tilt(self) -> float | None:
        """Tilt of the footprint every widened beam is matched to (A and C only)."""
        if self.design == "A":
            return self.geo.edge_tilt_deg
        if self.design == "C":
            return self.alpha * self.geo.edge_tilt_deg
        return None


def paper_designs(geo: OrbitGeometry | None = None, nadir_beamwidth: float = NADIR_BEAMWIDTH_DEG) -> dict[str, LayoutSpec]:
    """The nine designs of the reference evaluation, keyed by name."""
    geo = geo or OrbitGeometry()
    kw = dict(geo=geo, nadir_beamwidth=nadir_beamwidth)
    specs = {
        "A": LayoutSpec("A", name="A", **kw),
        "B": LayoutSpec("B", name="B", **kw),
        "C1": LayoutSpec("C", alpha=0.5, name="C1", **kw),
        "C2": LayoutSpec("C", alpha=0.75, name="C2", **kw),
    }
    for i, th in enumerate((4.8, 6.0, 7.0, 7.5, 9.0), start=1):
        specs[f"D{i}"] = LayoutSpec("D", theta_ref=th, name=f"D{i}", **kw)
    return specs


def grid_spacing(spec: LayoutSpec) -> float:
    """Distance (km) between neighbouring footprint centres."""
    geo, bw = spec.geo, spec.nadir_beamwidth
    if spec.design == "B":
        radius = footprint_radius(0.0, bw, geo)
    elif spec.design == "D":
        radius = footprint_radius(0.0, spec.theta_ref, geo)
    else:
        radius = footprint_radius(spec.reference_tilt, bw, geo)
    return float(np.sqrt(3) * radius)


@dataclass(frozen=True)
class HexGrid:
    lat: np.ndarray
    lon: np.ndarray
    lat_index: np.ndarray
    lon_index: np.ndarray


def build_hex_grid(
    d_g: float,
    origin: GroundPoint,
    geo: OrbitGeometry,
    sat_nadir: GroundPoint | None = None,
    max_tilt: float | None = None,
) -> HexGrid:
    """Hexagonal lattice of step ``d_g`` anchored at ``origin``, clipped to the coverage.

    The lattice is laid out in the azimuthal-equidistant plane of ``origin``
    with rows running east-west; odd rows are shifted by half a step. Points
    whose tilt from ``sat_nadir`` exceeds ``max_tilt`` (default: the coverage
    edge) are dropped. Output is ordered row by row, west to east.
    """
    if d_g <= 0:
        raise ValueError("d_g must be positive")
    sat_nadir = sat_nadir or origin
    max_tilt = geo.edge_tilt_deg if max_tilt is None else max_tilt
    reach = geo.coverage_arc_km + great_circle_distance(origin.lat, origin.lon, sat_nadir.lat, sat_nadir.lon)
    n_row = int(np.ceil(reach / (d_g * np.sqrt(3) / 2))) + 1
    n_col = int(np.ceil(reach / d_g)) + 1
    rows, cols = np.meshgrid(np.arange(-n_row, n_row + 1), np.arange(-n_col, n_col + 1), indexing="ij")
    rows, cols = rows.ravel(), cols.ravel()
    x = d_g * (cols + 0.5 * (rows % 2))
    y = d_g * np.sqrt(3) / 2 * rows
    near = np.hypot(x, y) <= reach + d_g
    rows, cols, x, y = rows[near], cols[near], x[near], y[near]
    lat, lon = tangent_to_ground(origin, x, y, geo.earth_radius_km)
    gamma = great_circle_distance(sat_nadir.lat, sat_nadir.lon, lat, lon, geo.earth_radius_km)
    visible = gamma / geo.earth_radius_km < np.radians(geo.horizon_central_angle_deg)
    keep = np.zeros(len(lat), dtype=bool)
    pa = ground_to_uv(sat_nadir, lat[visible], lon[visible], geo)
    keep[np.flatnonzero(visible)] = pa.tilt <= max_tilt + _TILT_TOL
    return HexGrid(lat=lat[keep], lon=lon[keep], lat_index=rows[keep], lon_index=cols[keep])


@dataclass(frozen=True)
class BeamLayout:
    """Footprint centres plus per-beam pointing and widening.

    Angles are in degrees; ``br`` is the nominal -3 dB footprint radius (km)
    of an unwidened beam at the centre's tilt.
    """

    spec: LayoutSpec
    sat_nadir: GroundPoint
    grid_origin: GroundPoint
    d_g: float
    lat: np.ndarray
    lon: np.ndarray
    lat_index: np.ndarray
    lon_index: np.ndarray
    tilt: np.ndarray
    azimuth: np.ndarray
    u: np.ndarray
    v: np.ndarray
    wx: np.ndarray
    wy: np.ndarray
    br: np.ndarray

    @property
    def n_beams(self) -> int:
        return len(self.lat)

    @property
    def widened(self) -> np.ndarray:
        return (self.wx > 0) | (self.wy > 0)


def _ellipse_axes(sat_nadir, lat, lon, radius_km, geo, u0, v0, azimuth):
    """Radial and tangential extents (direction cosines) of a ground circle mapped to u-v."""
    bearings = np.linspace(0.0, 360.0, CONTOUR_SAMPLES, endpoint=False)
    gamma = np.degrees(radius_km / geo.earth_radius_km)
    clat, clon = destination(np.asarray(lat)[..., None], np.asarray(lon)[..., None], bearings, gamma)
    pa = ground_to_uv(sat_nadir, clat, clon, geo)
    a = np.radians(np.asarray(azimuth))[..., None]
    du = pa.u - np.asarray(u0)[..., None]
    dv = pa.v - np.asarray(v0)[..., None]
    radial = du * np.cos(a) + dv * np.sin(a)
    tangential = -du * np.sin(a) + dv * np.cos(a)
    return np.ptp(radial, axis=-1), np.ptp(tangential, axis=-1)


def widening_params(spec: LayoutSpec, sat_nadir: GroundPoint, lat, lon):
    """Widening (wx, wy) and rotation (deg) for beams centred at (lat, lon).

    ``wx`` is along the radial direction from nadir, ``wy`` across it. Beams
    that need no widening (designs B and D, or design C beyond the reference
    tilt) get (0, 0).
    """
    geo = spec.geo
    lat = np.atleast_1d(np.asarray(lat, dtype=float))
    lon = np.atleast_1d(np.asarray(lon, dtype=float))
    pa = ground_to_uv(sat_nadir, lat, lon, geo)
    azimuth = np.where(pa.tilt > 1e-9, pa.azimuth, 0.0)
    wx = np.zeros(len(lat))
    wy = np.zeros(len(lat))
    if spec.design in ("A", "C"):
        ref_tilt = spec.reference_tilt
        radius = footprint_radius(ref_tilt, spec.nadir_beamwidth, geo)
        sel = np.ones(len(lat), dtype=bool) if spec.design == "A" else pa.tilt < ref_tilt
        if sel.any():
            ext_r, ext_t = _ellipse_axes(sat_nadir, lat[sel], lon[sel], radius, geo, pa.u[sel], pa.v[sel], azimuth[sel])
            wx[sel] = 2 * np.degrees(np.arcsin(np.clip(ext_r / 2, 0, 1)))
            wy[sel] = 2 * np.degrees(np.arcsin(np.clip(ext_t / 2, 0, 1)))
    return wx, wy, azimuth


def build_layout(
    spec: LayoutSpec,
    sat_nadir: GroundPoint | None = None,
    grid_origin: GroundPoint | None = None,
) -> BeamLayout:
    """Grid spacing, centres, pointing and widening for one design.

    The grid is anchored at ``grid_origin`` (default: the sub-satellite
    point); moving ``sat_nadir`` away from it emulates a later snapshot.
    """
    sat_nadir = sat_nadir or GroundPoint(0.0, 0.0)
    grid_origin = grid_origin or sat_nadir
    geo = spec.geo
    d_g = grid_spacing(spec)
    grid = build_hex_grid(d_g, grid_origin, geo, sat_nadir)
    pa = ground_to_uv(sat_nadir, grid.lat, grid.lon, geo)
    wx, wy, azimuth = widening_params(spec, sat_nadir, grid.lat, grid.lon)
    br = np.array([footprint_radius(t, spec.nadir_beamwidth, geo) for t in pa.tilt])
    return BeamLayout(
        spec=spec,
        sat_nadir=sat_nadir,
        grid_origin=grid_origin,
        d_g=d_g,
        lat=grid.lat,
        lon=grid.lon,
        lat_index=grid.lat_index,
        lon_index=grid.lon_index,
        tilt=pa.tilt,
        azimuth=azimuth,
        u=pa.u,
        v=pa.v,
        wx=wx,
        wy=wy,
        br=br,
    )


def beam_of(layout: BeamLayout, arr: ArrayGeometry, k: int, power: float = 1.0) -> BeamWeights:
    """Widened beamformer of beam ``k``."""
    return widened_weights(
        arr,
        float(layout.u[k]),
        float(layout.v[k]),
        float(layout.azimuth[k]),
        float(layout.wx[k]),
        float(layout.wy[k]),
        power,
    )


def ground_contour_radius(
    layout: BeamLayout,
    arr: ArrayGeometry,
    k: int,
    level_db: float = 5.0,
    n_bearings: int = 8,
    max_km: float = 300.0,
    step_km: float = 2.0,
) -> np.ndarray:
    """Ground distance (km) from beam ``k``'s centre to its ``level_db`` contour.

    The pattern is sampled along ``n_bearings`` equally spaced great circles
    leaving the footprint centre and the first crossing is interpolated
    linearly in dB; the level is relative to the gain at the centre. Returns
    one radius per bearing (``nan`` if the contour is not reached within
    ``max_km``).
    """
    geo = layout.spec.geo
    beam = beam_of(layout, arr, k)
    d = np.arange(0.0, max_km + step_km / 2, step_km)
    bearings = np.arange(n_bearings) * 360.0 / n_bearings
    lat, lon = destination(layout.lat[k], layout.lon[k], bearings[:, None], np.degrees(d / geo.earth_radius_km)[None, :])
    pa = ground_to_uv(layout.sat_nadir, lat, lon, geo)
    g = pattern_db(beam, pa.u, pa.v) - pattern_db(beam, pa.u[:, :1], pa.v[:, :1]) + level_db
    below = g < 0
    hit = below.any(axis=1)
    j = np.maximum(np.argmax(below, axis=1), 1)
    rows = np.arange(n_bearings)
    g0, g1 = g[rows, j - 1], g[rows, j]
    r = d[j - 1] + step_km * g0 / (g0 - g1)
    return np.where(hit, r, np.nan)
