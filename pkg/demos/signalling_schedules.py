"""Compare common-signalling schemes at 62 and 107 hops."""

from __future__ import annotations

from earthfixed.scheduler import FrameConfig, build_schedule, kpis


def main() -> None:
    for n in (62, 107):
        for scheme in ("HalfSlot", "FullSlot", "ExtraSweep", "ExtraSweep160"):
            fc = FrameConfig(ssb_period_ms=160.0) if scheme == "ExtraSweep160" else FrameConfig()
            res = build_schedule(scheme, n, fc)
            k = kpis(res)
            print(f"N_h={n:3d} {scheme:>13}: CS efficiency {res.cs_efficiency_pct:5.1f}%  "
                  f"MSG4 {k.msg4_per_s:7.2f}/s  paging {k.paging_ue_per_s:6.0f} UE/s")


if __name__ == "__main__":
    main()
