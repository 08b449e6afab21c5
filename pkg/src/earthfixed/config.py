"""Experiment configuration: nested blocks with the reference scenario as defaults."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields, is_dataclass

from .errors import InvalidSpec
from .geometry import OrbitGeometry
from .layout import LayoutSpec

THREADS_ENV = "EARTHFIXED_THREADS"
DESIGN_NAMES = ("A", "B", "C1", "C2", "D1", "D2", "D3", "D4", "D5")


class ConfigError(InvalidSpec):
    """Invalid configuration value; the message starts with the field path."""


@dataclass
class OrbitConfig:
    orbit_height_km: float = 1300.0
    min_elevation_deg: float = 30.0
    frequency_hz: float = 20e9
    earth_radius_km: float = 6371.0


@dataclass
class ArrayConfig:
    n_elements: int = 512
    spacing_wavelengths: float = 0.65
    element_gain_dbi: float = 4.7
    power_per_element_w: float = 0.065
    nadir_beamwidth_deg: float = 3.64


@dataclass
class LinkConfig:
    bandwidth_hz: float = 200e6
    atmospheric_loss_table: list = field(default_factory=lambda: [[30.0, 1.1], [45.0, 0.71], [90.0, 0.5]])
    g_over_t_table: list = field(default_factory=lambda: [[30.0, 8.0], [45.0, 10.0], [90.0, 11.0]])
    sinr_threshold_db: float = 3.0
    target_percentile: float = 0.05
    sensing_spacing_km: float = 15.0


@dataclass
class SearchConfig:
    start: int = 8
    max_hops: int | None = None


@dataclass
class SchedulerConfig:
    ssb_period_ms: float = 20.0
    schemes: list = field(default_factory=lambda: ["HalfSlot", "FullSlot", "ExtraSweep"])
    strict: bool = False


@dataclass
class ExperimentConfig:
    orbit: OrbitConfig = field(default_factory=OrbitConfig)
    array: ArrayConfig = field(default_factory=ArrayConfig)
    link: LinkConfig = field(default_factory=LinkConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    designs: list = field(default_factory=lambda: list(DESIGN_NAMES))
    custom_designs: dict = field(default_factory=dict)
    scheme_overrides: dict = field(default_factory=dict)
    output_dir: str = "out"
    threads: int = 1

    def validate(self) -> "ExperimentConfig":
        positive = {
            "orbit.orbit_height_km": self.orbit.orbit_height_km,
            "orbit.frequency_hz": self.orbit.frequency_hz,
            "orbit.earth_radius_km": self.orbit.earth_radius_km,
            "array.n_elements": self.array.n_elements,
            "array.spacing_wavelengths": self.array.spacing_wavelengths,
            "array.power_per_element_w": self.array.power_per_element_w,
            "array.nadir_beamwidth_deg": self.array.nadir_beamwidth_deg,
            "link.bandwidth_hz": self.link.bandwidth_hz,
            "link.sensing_spacing_km": self.link.sensing_spacing_km,
            "search.start": self.search.start,
            "scheduler.ssb_period_ms": self.scheduler.ssb_period_ms,
            "threads": self.threads,
        }
        for path, value in positive.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
                raise ConfigError(f"{path}: must be a positive number, got {value!r}")
        if not 0 < self.orbit.min_elevation_deg < 90:
            raise ConfigError(f"orbit.min_elevation_deg: must lie in (0, 90), got {self.orbit.min_elevation_deg}")
        if not 0 < self.link.target_percentile < 1:
            raise ConfigError(f"link.target_percentile: must lie in (0, 1), got {self.link.target_percentile}")
        if self.search.max_hops is not None and self.search.max_hops < 1:
            raise ConfigError(f"search.max_hops: must be >= 1, got {self.search.max_hops}")
        if self.scheduler.ssb_period_ms not in (20.0, 160.0):
            raise ConfigError(f"scheduler.ssb_period_ms: must be 20 or 160, got {self.scheduler.ssb_period_ms}")
        for name, params in self.custom_designs.items():
            if not isinstance(params, dict) or set(params) - {"design", "alpha", "theta_ref"}:
                raise ConfigError(f"custom_designs.{name}: expected keys among design, alpha, theta_ref")
            try:
                o = self.orbit
                geo = OrbitGeometry(o.orbit_height_km, o.min_elevation_deg, o.frequency_hz, o.earth_radius_km)
                LayoutSpec(name=name, nadir_beamwidth=self.array.nadir_beamwidth_deg, geo=geo, **params)
            except (InvalidSpec, TypeError) as exc:
                raise ConfigError(f"custom_designs.{name}: {exc}") from None
        for k, name in enumerate(self.designs):
            if name not in DESIGN_NAMES and name not in self.custom_designs:
                raise ConfigError(f"designs[{k}]: unknown design {name!r}")
        for k, scheme in enumerate(self.scheduler.schemes):
            if scheme not in ("HalfSlot", "FullSlot", "ExtraSweep", "ExtraSweep160"):
                raise ConfigError(f"scheduler.schemes[{k}]: unknown scheme {scheme!r}")
        for name, scheme in self.scheme_overrides.items():
            if scheme not in ("equal", "snr_equalizing"):
                raise ConfigError(f"scheme_overrides.{name}: unknown power scheme {scheme!r}")
        for tab in ("atmospheric_loss_table", "g_over_t_table"):
            rows = getattr(self.link, tab)
            if not rows or any(len(r) != 2 for r in rows):
                raise ConfigError(f"link.{tab}: expected a list of [elevation, value] pairs")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form (output_dir and threads excluded)."""
        d = self.to_dict()
        d.pop("output_dir")
        d.pop("threads")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def _build(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        where = f"{path}.{key}" if path else key
        if key not in known:
            raise ConfigError(f"{where}: unknown field")
        default = known[key].default_factory() if callable(known[key].default_factory) else known[key].default
        if is_dataclass(default):
            kwargs[key] = _build(type(default), value, where)
        else:
            kwargs[key] = value
    return cls(**kwargs)


def config_from_dict(data: dict) -> ExperimentConfig:
    return _build(ExperimentConfig, data, "").validate()


def load_config(path: str | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Read a JSON config (or use defaults) and apply the thread-count env override."""
    data: dict = {}
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: not valid JSON ({exc})") from exc
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path} ({exc.strerror})") from exc
    data = dict(data)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            data["threads"] = int(env)
        except ValueError:
            raise ConfigError(f"threads: {THREADS_ENV}={env!r} is not an integer") from None
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    return config_from_dict(data)
