"""Downlink budget, power allocation and SINR maps over a dense sensing grid.

The receiver G/T is folded into the channel amplitude, so the noise power is
just ``k B`` and SINR follows the usual ratio of received powers. The common
propagation phase ``exp(j 2 pi r / lambda)`` is kept in :func:`channel_row`
for completeness; it drops out of every power quantity.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import Boltzmann
from scipy.spatial import cKDTree

from .array import ELEMENT_GAIN_DBI, ArrayGeometry, BeamWeights, element_gain, steering_phase
from .errors import DegenerateBeam, EmptyMap, NotAchievable
from .geometry import GroundPoint, OrbitGeometry, effective_max_tilt, ground_to_uv
from .hopping import HopPlan, plan_for_layout
from .layout import beam_of

SCHEMES = ("equal", "snr_equalizing")
SENSING_SPACING_KM = 15.0
DEFAULT_CHUNK = 2048

# equalizing wins for these designs on the reference configuration
EQUALIZING_DESIGNS = frozenset({"B", "D1", "C1", "C2"})


@dataclass(frozen=True)
class LinkBudget:
    """Downlink budget parameters.

    Tables are (elevation deg, value) pairs; values between entries are
    interpolated linearly and clamped outside the tabulated range.
    """

    frequency: float = 20e9
    bandwidth: float = 200e6
    atmospheric_loss_table: tuple = ((30.0, 1.1), (45.0, 0.71), (90.0, 0.5))
    g_over_t_table: tuple = ((30.0, 8.0), (45.0, 10.0), (90.0, 11.0))
    sinr_threshold: float = 3.0
    boltzmann: float = Boltzmann

    def __post_init__(self):
        for name in ("atmospheric_loss_table", "g_over_t_table"):
            table = tuple(sorted(tuple(map(float, row)) for row in getattr(self, name)))
            if not table:
                raise ValueError(f"{name} is empty")
            object.__setattr__(self, name, table)
        if self.bandwidth <= 0 or self.frequency <= 0:
            raise ValueError("frequency and bandwidth must be positive")

    @property
    def wavelength(self) -> float:
        return 299_792_458.0 / self.frequency

    def atmospheric_loss_db(self, el):
        el_t, val = np.array(self.atmospheric_loss_table).T
        return np.interp(el, el_t, val)

    def g_over_t_db(self, el):
        el_t, val = np.array(self.g_over_t_table).T
        return np.interp(el, el_t, val)


def fspl(r_km, wavelength: float):
    """Free-space path loss (linear) over ``r_km``."""
    return (4 * np.pi * np.asarray(r_km) * 1e3 / wavelength) ** 2


def fspl_db(r_km, wavelength: float):
    return 10 * np.log10(fspl(r_km, wavelength))


def noise_power(lb: LinkBudget) -> float:
    """Noise power ``k B`` in W per K of receiver temperature."""
    return lb.boltzmann * lb.bandwidth


def channel_amplitude(pa, lb: LinkBudget, element_gain_dbi: float = ELEMENT_GAIN_DBI):
    """Real channel amplitude for pointing angles ``pa`` (element gain, G/T, losses)."""
    g_t = element_gain(pa.tilt, element_gain_dbi)
    g_r = 10 ** (lb.g_over_t_db(pa.elevation) / 10)
    loss = fspl(pa.slant_range, lb.wavelength) * 10 ** (lb.atmospheric_loss_db(pa.elevation) / 10)
    return np.sqrt(g_t * g_r / loss)


def channel_row(
    p: GroundPoint,
    sat_nadir: GroundPoint,
    arr: ArrayGeometry,
    lb: LinkBudget,
    geo: OrbitGeometry | None = None,
) -> np.ndarray:
    """Channel from every array element to a user at ``p``.

    Raises
    ------
    BeyondHorizon
        If ``p`` is not visible from the satellite.
    """
    geo = geo or OrbitGeometry(frequency_hz=lb.frequency)
    pa = ground_to_uv(sat_nadir, p.lat, p.lon, geo)
    amp = channel_amplitude(pa, lb, arr.element_gain_dbi)
    common = np.exp(2j * np.pi * pa.slant_range * 1e3 / lb.wavelength)
    return amp * common * np.exp(-1j * steering_phase(arr, pa.u, pa.v))


@dataclass(frozen=True)
class SensingGrid:
    """Hexagonal grid of test users, each tied to its nearest footprint centre."""

    lat: np.ndarray
    lon: np.ndarray
    spacing: float
    beam_assignment: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.lat)


def _unit_vectors(lat, lon):
    la, lo = np.radians(lat), np.radians(lon)
    return np.column_stack([np.cos(la) * np.cos(lo), np.cos(la) * np.sin(lo), np.sin(la)])


def nearest_beam(lat, lon, beam_lat, beam_lon) -> np.ndarray:
    """Index of the geodetically nearest centre; ties go to the lowest index."""
    tree = cKDTree(_unit_vectors(beam_lat, beam_lon))
    k = min(2, len(beam_lat))
    d, idx = tree.query(_unit_vectors(lat, lon), k=k)
    if k == 1:
        return np.asarray(idx, dtype=np.int64)
    tie = np.abs(d[:, 1] - d[:, 0]) <= 1e-12
    return np.where(tie, idx.min(axis=1), idx[:, 0]).astype(np.int64)


def build_sensing_grid(layout, spacing: float = SENSING_SPACING_KM) -> SensingGrid:
    """Sensing points over the coverage area of ``layout``.

    The grid is hexagonal and anchored at the sub-satellite point. Points
    beyond the tilt where an edge beam's half-power contour ends are left
    out of the statistics.
    """
    # local import keeps the layout module free of link concerns
    from .layout import build_hex_grid

    geo = layout.spec.geo
    max_tilt = effective_max_tilt(geo, layout.spec.nadir_beamwidth)
    grid = build_hex_grid(spacing, layout.sat_nadir, geo, max_tilt=max_tilt)
    owner = nearest_beam(grid.lat, grid.lon, layout.lat, layout.lon)
    return SensingGrid(lat=grid.lat, lon=grid.lon, spacing=spacing, beam_assignment=owner)


def beam_weights(layout, arr: ArrayGeometry, power: float = 1.0) -> np.ndarray:
    """Unit-power (by default) beamformers of every beam, shape (N_a, K)."""
    return np.column_stack([beam_of(layout, arr, k, power).weights for k in range(layout.n_beams)])


def _chunks(n: int, size: int):
    return [(s, min(s + size, n)) for s in range(0, n, size)]


def gain_matrix(
    lat,
    lon,
    sat_nadir: GroundPoint,
    weights: np.ndarray,
    arr: ArrayGeometry,
    lb: LinkBudget,
    geo: OrbitGeometry,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> np.ndarray:
    """``|h_i w_k|^2`` for every point i and beamformer column k.

    Points are cut into fixed chunks whatever the worker count, so the
    result does not depend on ``workers``.
    """
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    pa = ground_to_uv(sat_nadir, lat, lon, geo)
    amp2 = channel_amplitude(pa, lb, arr.element_gain_dbi) ** 2
    out = np.empty((len(lat), weights.shape[1]))

    def work(span):
        s, e = span
        h = np.exp(-1j * steering_phase(arr, pa.u[s:e], pa.v[s:e]))
        out[s:e] = amp2[s:e, None] * np.abs(h @ weights) ** 2

    spans = _chunks(len(lat), chunk)
    if workers <= 1:
        for sp in spans:
            work(sp)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(work, spans))
    return out


@dataclass
class LinkModel:
    """Precomputed gains of one design: sensing points and beam centres against all beams."""

    layout: object
    grid: SensingGrid
    arr: ArrayGeometry
    lb: LinkBudget
    gains: np.ndarray
    center_gain: np.ndarray
    noise: float

    @property
    def n_beams(self) -> int:
        return self.layout.n_beams


def build_link_model(layout, arr: ArrayGeometry, lb: LinkBudget, grid: SensingGrid | None = None, workers: int = 1) -> LinkModel:
    geo = layout.spec.geo
    grid = grid or build_sensing_grid(layout)
    w = beam_weights(layout, arr)
    gains = gain_matrix(grid.lat, grid.lon, layout.sat_nadir, w, arr, lb, geo, workers)
    # reference users sit on the footprint centres; only the own-beam gain is needed
    pa = ground_to_uv(layout.sat_nadir, layout.lat, layout.lon, geo)
    amp2 = channel_amplitude(pa, lb, arr.element_gain_dbi) ** 2
    h = np.exp(-1j * steering_phase(arr, pa.u, pa.v))
    center = amp2 * np.abs(np.einsum("kn,nk->k", h, w)) ** 2
    return LinkModel(layout=layout, grid=grid, arr=arr, lb=lb, gains=gains, center_gain=center, noise=noise_power(lb))


def allocate_power(scheme: str, active, center_gain, total_power: float) -> np.ndarray:
    """Per-beam power of the active set, summing to ``total_power``.

    ``center_gain[k]`` is ``|hc_k w_k|^2`` of the unit-power beamformer at the
    reference user of beam k (used by the equalizing scheme only).
    """
    active = np.asarray(active, dtype=np.int64)
    if len(active) == 0:
        raise ValueError("active set is empty")
    if scheme == "equal":
        return np.full(len(active), total_power / len(active))
    if scheme != "snr_equalizing":
        raise ValueError(f"unknown power scheme {scheme!r}")
    g = np.asarray(center_gain, dtype=float)[active]
    if np.any(g <= 0):
        raise DegenerateBeam(f"beam {active[np.argmax(g <= 0)]} has zero gain at its reference user")
    c = g.sum() / g
    return total_power * c / c.sum()


def default_scheme(design_name: str) -> str:
    return "snr_equalizing" if design_name in EQUALIZING_DESIGNS else "equal"


@dataclass(frozen=True)
class SinrMap:
    lat: np.ndarray
    lon: np.ndarray
    sinr_db: np.ndarray
    serving_beam: np.ndarray
    hop_index: np.ndarray

    def percentile(self, p: float) -> float:
        return percentile(self, p)

    def cdf(self):
        """Sorted SINR values (dB) and their empirical CDF levels."""
        x = np.sort(self.sinr_db)
        return x, np.arange(1, len(x) + 1) / len(x)


def percentile(sinr_map: SinrMap, p: float) -> float:
    """Linear-interpolated empirical quantile (dB) of the map at fraction ``p``."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if len(sinr_map.sinr_db) == 0:
        raise EmptyMap("no covered sensing points")
    return float(np.percentile(sinr_map.sinr_db, 100 * p, method="linear"))


def evaluate_sinr(model: LinkModel, plan: HopPlan, scheme: str, workers: int = 1) -> SinrMap:
    """SINR of every sensing point in the hop that lights its serving beam.

    Interference is summed over the other beams of the same hop in ascending
    beam order, so the map is identical for any ``workers``.
    """
    total = model.arr.total_power
    owner = model.grid.beam_assignment
    point_hop = plan.index[owner]
    order = np.argsort(point_hop, kind="stable")
    bounds = np.searchsorted(point_hop[order], np.arange(plan.n_hops + 1))
    sinr = np.empty(len(owner))

    def work(ih):
        pts = order[bounds[ih] : bounds[ih + 1]]
        if len(pts) == 0:
            return
        active = plan.active_set(ih)
        p = allocate_power(scheme, active, model.center_gain, total)
        g = model.gains[np.ix_(pts, active)] * p
        own = np.searchsorted(active, owner[pts])
        rows = np.arange(len(pts))
        signal = g[rows, own]
        g[rows, own] = 0.0
        sinr[pts] = signal / (g.sum(axis=1) + model.noise)

    if workers <= 1:
        for ih in range(plan.n_hops):
            work(ih)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(work, range(plan.n_hops)))
    with np.errstate(divide="ignore"):
        sinr_db = 10 * np.log10(sinr)
    return SinrMap(
        lat=model.grid.lat,
        lon=model.grid.lon,
        sinr_db=sinr_db,
        serving_beam=owner,
        hop_index=point_hop,
    )


@dataclass(frozen=True)
class SearchPolicy:
    """How :func:`min_hops` scans the number of hops.

    ``start`` is the first value tried; it is doubled until the target is met,
    then the bracket is bisected and the result walked down until ``N - 1``
    fails.
    """

    start: int = 8
    target_percentile: float = 0.05
    threshold_db: float | None = None
    max_hops: int | None = None


@dataclass
class SearchResult:
    n_hops: int
    p5_db: float
    evaluated: dict = field(default_factory=dict)


def min_hops(model: LinkModel, scheme: str, policy: SearchPolicy | None = None, workers: int = 1) -> SearchResult:
    """Smallest number of hops whose SINR percentile reaches the threshold.

    Raises
    ------
    NotAchievable
        If even one beam per hop misses the threshold.
    """
    policy = policy or SearchPolicy()
    thr = model.lb.sinr_threshold if policy.threshold_db is None else policy.threshold_db
    k_max = model.n_beams if policy.max_hops is None else min(policy.max_hops, model.n_beams)
    seen: dict[int, float] = {}

    def score(n: int) -> float:
        if n not in seen:
            plan = plan_for_layout(model.layout, n)
            seen[n] = percentile(evaluate_sinr(model, plan, scheme, workers), policy.target_percentile)
        return seen[n]

    def ok(n: int) -> bool:
        return score(n) >= thr

    lo, hi = 0, max(1, min(policy.start, k_max))
    while not ok(hi):
        if hi == k_max:
            raise NotAchievable(f"percentile {policy.target_percentile} stays below {thr} dB up to {k_max} hops")
        lo, hi = hi, min(2 * hi, k_max)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    while hi > 1 and ok(hi - 1):
        hi -= 1
    return SearchResult(n_hops=hi, p5_db=score(hi), evaluated=dict(sorted(seen.items())))


def snapshot_snr_db(lb: LinkBudget, arr: ArrayGeometry, geo: OrbitGeometry | None = None) -> float:
    """SNR (dB) of a lone full-power beam at a nadir user."""
    geo = geo or OrbitGeometry(frequency_hz=lb.frequency)
    beam = BeamWeights(
        weights=np.full(arr.n_elements, math.sqrt(arr.total_power / arr.n_elements), dtype=complex),
        array=arr,
        power=arr.total_power,
        u=0.0,
        v=0.0,
    )
    h = channel_row(GroundPoint(0.0, 0.0), GroundPoint(0.0, 0.0), arr, lb, geo)
    return float(10 * np.log10(np.abs(h @ beam.weights) ** 2 / noise_power(lb)))
