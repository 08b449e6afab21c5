"""Spherical-Earth geometry seen from a single satellite.

Angles cross the API in degrees; everything is computed in radians.
The antenna frame has x pointing east and y pointing north at the
sub-satellite point, so the azimuth ``phi`` is measured counter-clockwise
from east and ``u = sin(theta) cos(phi)``, ``v = sin(theta) sin(phi)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BeyondHorizon, NoIntersection

EARTH_RADIUS_KM = 6371.0
SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class OrbitGeometry:
    """Orbit and coverage parameters of the snapshot.

    Parameters
    ----------
    orbit_height_km : float
        Satellite altitude above the spherical Earth.
    min_elevation_deg : float
        Minimum user elevation defining the coverage edge.
    frequency_hz : float
        Carrier frequency.
    earth_radius_km : float
        Radius of the spherical Earth.
    """

    orbit_height_km: float = 1300.0
    min_elevation_deg: float = 30.0
    frequency_hz: float = 20e9
    earth_radius_km: float = EARTH_RADIUS_KM

    def __post_init__(self):
        if self.earth_radius_km <= 0 or self.orbit_height_km <= 0:
            raise ValueError("earth radius and orbit height must be positive")
        if not 0 < self.min_elevation_deg < 90:
            raise ValueError("min_elevation_deg must lie in (0, 90)")
        if self.frequency_hz <= 0:
            raise ValueError("frequency must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @property
    def orbit_radius_km(self) -> float:
        return self.earth_radius_km + self.orbit_height_km

    @property
    def edge_tilt_deg(self) -> float:
        """Tilt from nadir at which users see the satellite at ``min_elevation_deg``."""
        return float(tilt_from_elevation(self.min_elevation_deg, self))

    @property
    def coverage_arc_km(self) -> float:
        """Ground distance from nadir to the coverage edge."""
        gamma, _ = central_angle_and_range(self.min_elevation_deg, self)
        return float(np.radians(gamma) * self.earth_radius_km)

    @property
    def horizon_tilt_deg(self) -> float:
        return float(np.degrees(np.arcsin(self.earth_radius_km / self.orbit_radius_km)))

    @property
    def horizon_central_angle_deg(self) -> float:
        return float(np.degrees(np.arccos(self.earth_radius_km / self.orbit_radius_km)))


@dataclass(frozen=True)
class GroundPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} out of range")
        if not -180.0 < self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} out of range")


@dataclass(frozen=True)
class PointingAngles:
    """Satellite-side angles and range towards ground points (scalars or arrays)."""

    tilt: np.ndarray
    azimuth: np.ndarray
    u: np.ndarray
    v: np.ndarray
    slant_range: np.ndarray
    elevation: np.ndarray
    central_angle: np.ndarray


def tilt_from_elevation(el, geo: OrbitGeometry):
    """Tilt from nadir (deg) of a user seeing the satellite at elevation ``el`` (deg)."""
    el = np.radians(np.asarray(el, dtype=float))
    ratio = geo.earth_radius_km / geo.orbit_radius_km
    return np.degrees(np.arcsin(ratio * np.cos(el)))


def central_angle_and_range(el, geo: OrbitGeometry):
    """Earth central angle (deg) and slant range (km) for elevation ``el`` (deg).

    The spherical triangle closes as ``el + tilt + gamma = 90``.
    """
    el_arr = np.asarray(el, dtype=float)
    theta = np.radians(tilt_from_elevation(el_arr, geo))
    gamma = np.pi / 2 - np.radians(el_arr) - theta
    sin_theta = np.sin(theta)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(
            sin_theta > 1e-12,
            geo.earth_radius_km * np.sin(gamma) / np.where(sin_theta > 1e-12, sin_theta, 1.0),
            geo.orbit_height_km,
        )
    return np.degrees(gamma), r


def central_angle_from_tilt(tilt, geo: OrbitGeometry):
    """Central angle (deg) of the near intersection of a ray at ``tilt`` (deg).

    Raises
    ------
    NoIntersection
        If the ray passes above the horizon.
    """
    t = np.radians(np.asarray(tilt, dtype=float))
    s = geo.orbit_radius_km / geo.earth_radius_km * np.sin(np.abs(t))
    if np.any(s > 1.0 + 1e-12):
        raise NoIntersection("ray direction misses the Earth")
    return np.degrees(np.arcsin(np.minimum(s, 1.0)) - np.abs(t))


def tilt_from_central_angle(gamma, geo: OrbitGeometry):
    """Tilt (deg) under which the satellite sees a ground point at central angle ``gamma``."""
    g = np.radians(np.asarray(gamma, dtype=float))
    r_e = geo.earth_radius_km
    return np.degrees(np.arctan2(r_e * np.sin(g), geo.orbit_radius_km - r_e * np.cos(g)))


def effective_max_tilt(geo: OrbitGeometry, nadir_beamwidth: float) -> float:
    """Largest beam-centre tilt whose scan-broadened half-beamwidth still reaches the edge."""
    theta_edge = geo.edge_tilt_deg
    half = 0.5 * nadir_beamwidth / np.cos(np.radians(theta_edge))
    return float(max(theta_edge - half, 0.0))


def footprint_radius(tilt: float, beamwidth: float, geo: OrbitGeometry) -> float:
    """Half the ground arc (km) cut by a cone of width ``beamwidth`` pointed at ``tilt``.

    The cut is taken along the radial (azimuth-aligned) plane. When the cone
    straddles nadir the two edges lie on opposite sides of the sub-satellite
    point.
    """
    lo = tilt - 0.5 * beamwidth
    hi = tilt + 0.5 * beamwidth
    if hi > geo.horizon_tilt_deg:
        raise NoIntersection(f"cone edge at {hi:.3f} deg is beyond the horizon")
    g_hi = central_angle_from_tilt(hi, geo)
    g_lo = central_angle_from_tilt(abs(lo), geo)
    arc = g_hi - g_lo if lo >= 0 else g_hi + g_lo
    return float(np.radians(arc) * geo.earth_radius_km / 2.0)


def great_circle_distance(lat1, lon1, lat2, lon2, radius=EARTH_RADIUS_KM):
    """Haversine distance in the units of ``radius``."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dp = p2 - p1
    dl = np.radians(np.asarray(lon2) - np.asarray(lon1))
    a = np.sin(dp / 2) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dl / 2) ** 2
    return 2.0 * radius * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def initial_bearing(lat1, lon1, lat2, lon2):
    """Bearing (deg, clockwise from north) of the great circle from point 1 to point 2."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dl = np.radians(np.asarray(lon2) - np.asarray(lon1))
    y = np.sin(dl) * np.cos(p2)
    x = np.cos(p1) * np.sin(p2) - np.sin(p1) * np.cos(p2) * np.cos(dl)
    return np.degrees(np.arctan2(y, x))


def destination(lat, lon, bearing, central_angle):
    """Point reached from (lat, lon) along ``bearing`` (deg) after ``central_angle`` (deg)."""
    p1 = np.radians(lat)
    l1 = np.radians(lon)
    b = np.radians(bearing)
    d = np.radians(central_angle)
    sin_p2 = np.sin(p1) * np.cos(d) + np.cos(p1) * np.sin(d) * np.cos(b)
    p2 = np.arcsin(np.clip(sin_p2, -1.0, 1.0))
    l2 = l1 + np.arctan2(np.sin(b) * np.sin(d) * np.cos(p1), np.cos(d) - np.sin(p1) * sin_p2)
    lon2 = (np.degrees(l2) + 180.0) % 360.0 - 180.0
    lon2 = np.where(lon2 == -180.0, 180.0, lon2)
    return np.degrees(p2), lon2


def ground_to_uv(sat_nadir: GroundPoint, lat, lon, geo: OrbitGeometry) -> PointingAngles:
    """Angles and range from the satellite above ``sat_nadir`` to ground points.

    Raises
    ------
    BeyondHorizon
        If any point is not visible from the satellite.
    """
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    r_e = geo.earth_radius_km
    gamma_km = great_circle_distance(sat_nadir.lat, sat_nadir.lon, lat, lon, r_e)
    gamma = gamma_km / r_e
    if np.any(gamma >= np.radians(geo.horizon_central_angle_deg)):
        raise BeyondHorizon("ground point below the satellite horizon")
    bearing = np.radians(initial_bearing(sat_nadir.lat, sat_nadir.lon, lat, lon))
    bearing = np.where(gamma > 0, bearing, 0.0)
    theta = np.arctan2(r_e * np.sin(gamma), geo.orbit_radius_km - r_e * np.cos(gamma))
    phi = np.pi / 2 - bearing
    slant = np.sqrt(r_e**2 + geo.orbit_radius_km**2 - 2 * r_e * geo.orbit_radius_km * np.cos(gamma))
    el = np.pi / 2 - theta - gamma
    return PointingAngles(
        tilt=np.degrees(theta),
        azimuth=(np.degrees(phi) + 360.0) % 360.0,
        u=np.sin(theta) * np.cos(phi),
        v=np.sin(theta) * np.sin(phi),
        slant_range=slant,
        elevation=np.degrees(el),
        central_angle=np.degrees(gamma),
    )


def uv_to_ground(sat_nadir: GroundPoint, u, v, geo: OrbitGeometry):
    """Ground (lat, lon) hit by direction (u, v) from the satellite above ``sat_nadir``.

    Raises
    ------
    BeyondHorizon
        If a direction misses the Earth.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    s = np.hypot(u, v)
    if np.any(s >= np.sin(np.radians(geo.horizon_tilt_deg))):
        raise BeyondHorizon("direction misses the Earth")
    theta = np.arcsin(s)
    gamma = np.arcsin(geo.orbit_radius_km / geo.earth_radius_km * np.sin(theta)) - theta
    phi = np.arctan2(v, u)
    bearing = np.degrees(np.pi / 2 - phi)
    return destination(sat_nadir.lat, sat_nadir.lon, bearing, np.degrees(gamma))


def tangent_to_ground(origin: GroundPoint, x_km, y_km, radius=EARTH_RADIUS_KM):
    """Map azimuthal-equidistant plane coordinates (x east, y north) onto the sphere."""
    x_km = np.asarray(x_km, dtype=float)
    y_km = np.asarray(y_km, dtype=float)
    rho = np.hypot(x_km, y_km)
    bearing = np.degrees(np.arctan2(x_km, y_km))
    return destination(origin.lat, origin.lon, bearing, np.degrees(rho / radius))


def ground_to_tangent(origin: GroundPoint, lat, lon, radius=EARTH_RADIUS_KM):
    """Inverse of :func:`tangent_to_ground`."""
    rho = great_circle_distance(origin.lat, origin.lon, lat, lon, radius)
    b = np.radians(initial_bearing(origin.lat, origin.lon, lat, lon))
    return rho * np.sin(b), rho * np.cos(b)
