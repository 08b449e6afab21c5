"""CSV and JSON writers with fixed number formatting for byte-stable output."""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import numpy as np
import scipy

from . import __version__

FLOAT_FMT = "{:.8e}"


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT.format(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(path, header, columns) -> Path:
    """Write equal-length ``columns`` under ``header``; floats get 9 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = [list(c) for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_cell(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def manifest(config) -> dict:
    """Reproducibility block embedded in JSON outputs (no timestamps)."""
    return {
        "config_sha256": config.digest(),
        "package_version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def layout_csv(path, layout):
    ids = np.arange(layout.n_beams)
    return write_csv(
        path,
        ["beam_id", "lat", "lon", "theta_deg", "phi_deg", "wx_deg", "wy_deg", "br_km"],
        [ids, layout.lat, layout.lon, layout.tilt, layout.azimuth, layout.wx, layout.wy, layout.br],
    )


def hop_map_csv(path, plan):
    ids = np.arange(len(plan.index))
    return write_csv(path, ["beam_id", "i", "j", "ih"], [ids, plan.row, plan.col, plan.index])


def sinr_map_csv(path, sinr_map):
    return write_csv(
        path,
        ["lat", "lon", "beam_id", "ih", "sinr_dB"],
        [sinr_map.lat, sinr_map.lon, sinr_map.serving_beam, sinr_map.hop_index, sinr_map.sinr_db],
    )


def cdf_csv(path, sinr_map):
    x, f = sinr_map.cdf()
    return write_csv(path, ["sinr_dB", "cdf"], [x, f])


def schedule_csv(path, result):
    rows = sorted(result.allocations, key=lambda a: (a.slot, a.start_symbol, a.start_prb, a.signal))
    cols = list(zip(*[(a.slot, a.start_symbol, a.n_symbols, a.start_prb, a.n_prbs, a.signal, a.ih, a.ssbi) for a in rows]))
    if not cols:
        cols = [[] for _ in range(8)]
    return write_csv(path, ["slot", "symbol0", "nsym", "prb0", "nprb", "signal", "ih", "ssbi"], cols)
