"""Coarse-grid minimum hop-count sweep over all designs (a few seconds)."""

from __future__ import annotations

import sys
import tempfile

from earthfixed.cli import SMOKE_SPACING_KM, run_sweep
from earthfixed.config import config_from_dict


def main() -> None:
    out = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="earthfixed_")
    cfg = config_from_dict({"output_dir": out, "link": {"sensing_spacing_km": SMOKE_SPACING_KM}})
    summary = run_sweep(cfg)
    for row in summary["designs"]:
        print(f"{row['design']:>3}: N_h={row['n_hops']} ({row['scheme']})")
    print(f"outputs in {out}")


if __name__ == "__main__":
    main()
