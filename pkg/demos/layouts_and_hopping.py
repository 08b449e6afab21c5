"""Build every preset layout, print beam counts, and show hop-plan active-set spans."""

from __future__ import annotations

from earthfixed.config import config_from_dict
from earthfixed.cli import scenario
from earthfixed.hopping import plan_for_layout
from earthfixed.layout import build_layout


def main() -> None:
    sc = scenario(config_from_dict({}))
    for name, spec in sc.specs.items():
        lay = build_layout(spec)
        print(f"{name:>3}: {lay.n_beams:5d} beams")
    for name, hops in (("A", 65), ("D3", 62)):
        counts = plan_for_layout(build_layout(sc.specs[name]), hops).active_counts()
        print(f"{name} at {hops} hops: {counts.min()}..{counts.max()} beams active per hop")


if __name__ == "__main__":
    main()
