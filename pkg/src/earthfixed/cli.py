"""Command-line experiment runner: layouts, hop-count sweep and CS schedules."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from . import export
from .array import build_array
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .errors import InvalidSpec, NotAchievable, SchemeInfeasible
from .geometry import OrbitGeometry, effective_max_tilt
from .hopping import plan_for_layout
from .layout import LayoutSpec, build_layout, paper_designs
from .link import (
    LinkBudget,
    SearchPolicy,
    build_link_model,
    build_sensing_grid,
    default_scheme,
    evaluate_sinr,
    min_hops,
)
from .scheduler import FrameConfig, build_schedule, kpis, timeline, validate_ra_timing

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
SMOKE_SPACING_KM = 60.0


@dataclass(frozen=True)
class Scenario:
    """Physical objects derived from a config."""

    geo: OrbitGeometry
    arr: object
    lb: LinkBudget
    specs: dict


def scenario(cfg: ExperimentConfig) -> Scenario:
    o, a, l = cfg.orbit, cfg.array, cfg.link
    geo = OrbitGeometry(o.orbit_height_km, o.min_elevation_deg, o.frequency_hz, o.earth_radius_km)
    arr = build_array(
        a.n_elements,
        a.spacing_wavelengths * geo.wavelength_m,
        geo.wavelength_m,
        element_gain_dbi=a.element_gain_dbi,
        power_per_element=a.power_per_element_w,
    )
    lb = LinkBudget(
        frequency=o.frequency_hz,
        bandwidth=l.bandwidth_hz,
        atmospheric_loss_table=tuple(map(tuple, l.atmospheric_loss_table)),
        g_over_t_table=tuple(map(tuple, l.g_over_t_table)),
        sinr_threshold=l.sinr_threshold_db,
    )
    specs = paper_designs(geo, a.nadir_beamwidth_deg)
    for name, params in cfg.custom_designs.items():
        specs[name] = LayoutSpec(geo=geo, nadir_beamwidth=a.nadir_beamwidth_deg, name=name, **params)
    return Scenario(geo, arr, lb, specs)


def _out(cfg: ExperimentConfig) -> Path:
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_run_manifest(cfg: ExperimentConfig, command: str, timings: dict) -> None:
    # wall-clock data lives here only so that result files stay byte-stable
    body = export.manifest(cfg)
    body.update(command=command, threads=cfg.threads, timings_s=timings)
    export.write_json(_out(cfg) / "run_manifest.json", body)


def run_layout(cfg: ExperimentConfig, design: str, n_hops: int | None = None) -> dict:
    """Build one design, write its layout (and optional hop map), return the summary."""
    sc = scenario(cfg)
    if design not in sc.specs:
        raise ConfigError(f"design: unknown design {design!r}")
    layout = build_layout(sc.specs[design])
    out = _out(cfg)
    export.layout_csv(out / f"layout_{design}.csv", layout)
    summary = {"design": design, "K": layout.n_beams, "d_g_km": layout.d_g}
    if n_hops is not None:
        plan = plan_for_layout(layout, n_hops)
        export.hop_map_csv(out / f"hopmap_{design}_{n_hops}.csv", plan)
        counts = plan.active_counts()
        summary.update(n_hops=n_hops, active_min=int(counts.min()), active_max=int(counts.max()))
    export.write_json(out / f"layout_{design}.json", {**summary, "manifest": export.manifest(cfg)})
    return summary


def run_sweep(cfg: ExperimentConfig, strict: bool = False) -> dict:
    """Minimum hop count per design plus SINR map and CDF files.

    Designs whose target is unreachable are reported with ``n_hops`` set to
    ``None``; with ``strict`` the first such design raises instead.
    """
    sc = scenario(cfg)
    out = _out(cfg)
    policy = SearchPolicy(
        start=cfg.search.start,
        target_percentile=cfg.link.target_percentile,
        max_hops=cfg.search.max_hops,
    )
    rows, timings = [], {}
    for name in cfg.designs:
        t0 = time.perf_counter()
        layout = build_layout(sc.specs[name])
        grid = build_sensing_grid(layout, cfg.link.sensing_spacing_km)
        model = build_link_model(layout, sc.arr, sc.lb, grid, workers=cfg.threads)
        scheme = cfg.scheme_overrides.get(name, default_scheme(name))
        row = {"design": name, "K": layout.n_beams, "scheme": scheme, "n_hops": None, "p5_dB": None}
        try:
            res = min_hops(model, scheme, policy, workers=cfg.threads)
        except NotAchievable as exc:
            if strict:
                raise
            row["error"] = str(exc)
        else:
            smap = evaluate_sinr(model, plan_for_layout(layout, res.n_hops), scheme, workers=cfg.threads)
            counts = plan_for_layout(layout, res.n_hops).active_counts()
            row.update(
                n_hops=res.n_hops,
                p5_dB=res.p5_db,
                active_min=int(counts.min()),
                active_max=int(counts.max()),
                evaluated={str(k): v for k, v in res.evaluated.items()},
            )
            export.sinr_map_csv(out / f"sinr_{name}.csv", smap)
            export.cdf_csv(out / f"cdf_{name}.csv", smap)
        rows.append(row)
        timings[name] = time.perf_counter() - t0
    summary = {
        "designs": rows,
        "sensing_spacing_km": cfg.link.sensing_spacing_km,
        "theta_max_deg": effective_max_tilt(sc.geo, cfg.array.nadir_beamwidth_deg),
        "manifest": export.manifest(cfg),
    }
    export.write_json(out / "sweep.json", summary)
    _write_run_manifest(cfg, "sweep", timings)
    return summary


def _frame(cfg: ExperimentConfig, scheme: str) -> FrameConfig:
    period = 160.0 if scheme == "ExtraSweep160" else cfg.scheduler.ssb_period_ms
    return FrameConfig(ssb_period_ms=period)


def run_schedule(cfg: ExperimentConfig, n_hops: int, strict: bool = False) -> dict:
    """Schedule every configured scheme for ``n_hops`` and write CSV/KPI/timeline files."""
    out = _out(cfg)
    strict = strict or cfg.scheduler.strict
    results = {}
    for scheme in cfg.scheduler.schemes:
        res = build_schedule(scheme, n_hops, _frame(cfg, scheme), strict=strict)
        k = kpis(res)
        viol = validate_ra_timing(res)
        tag = f"{scheme}_{n_hops}"
        export.schedule_csv(out / f"schedule_{tag}.csv", res)
        export.write_json(out / f"timeline_{tag}.json", {"half_frames": timeline(res), "manifest": export.manifest(cfg)})
        body = {
            "scheme": scheme,
            "n_hops": n_hops,
            "ssb_period_ms": res.fc.ssb_period_ms,
            **asdict(k),
            "cs_efficiency_pct": res.cs_efficiency_pct,
            "cs_ratio": res.cs_ratio,
            "ra_violations": len(viol),
        }
        export.write_json(out / f"kpis_{tag}.json", {**body, "manifest": export.manifest(cfg)})
        results[scheme] = body
    return results


def run_report(cfg: ExperimentConfig, strict: bool = False) -> dict:
    """Layout sizes, the hop-count sweep and the schedule KPIs in one JSON file."""
    sc = scenario(cfg)
    layouts = {}
    for name in cfg.designs:
        lay = build_layout(sc.specs[name])
        layouts[name] = {"K": lay.n_beams, "d_g_km": lay.d_g}
    sweep = run_sweep(cfg, strict)
    schedules = {}
    for row in sweep["designs"]:
        if row["design"] in ("D3", "B") and row["n_hops"] is not None:
            schedules[row["design"]] = run_schedule(cfg, row["n_hops"], strict)
    report = {"layouts": layouts, "sweep": sweep["designs"], "schedules": schedules, "manifest": export.manifest(cfg)}
    export.write_json(_out(cfg) / "report.json", report)
    return report


def _fmt(v, spec: str) -> str:
    return "-" if v is None else format(v, spec)


def _print_sweep(rows) -> None:
    print(f"{'design':<7}{'K':>6}{'scheme':>16}{'N_h':>6}{'p5 dB':>9}")
    for r in rows:
        print(f"{r['design']:<7}{r['K']:>6}{r['scheme']:>16}{_fmt(r['n_hops'], 'd'):>6}{_fmt(r['p5_dB'], '.2f'):>9}")


def _print_schedule(results) -> None:
    print(f"{'scheme':<15}{'cover':>7}{'CS eff %':>10}{'MSG4/s':>9}{'paging UE/s':>13}{'RA viol':>9}")
    for s, k in results.items():
        print(
            f"{s:<15}{k['coverage_ratio']:>7.3f}{k['cs_efficiency_pct']:>10.1f}"
            f"{k['msg4_per_s']:>9.2f}{k['paging_ue_per_s']:>13.1f}{k['ra_violations']:>9d}"
        )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="earthfixed", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config (defaults reproduce the reference scenario)")
    common.add_argument("--threads", type=int, help="worker threads for the link evaluation")
    common.add_argument("--output-dir", help="directory for CSV/JSON outputs")
    common.add_argument("--strict", action="store_true", help="fail (exit 3) on unreachable targets or partial coverage")
    sub = p.add_subparsers(dest="command", required=True)

    lay = sub.add_parser("layout", parents=[common], help="build one beam layout")
    lay.add_argument("design", help="design name, e.g. B or D3")
    lay.add_argument("--hops", type=int, help="also write the hop map for this many hops")

    for name, text in (("sweep", "minimum hop count per design"), ("report", "layouts, sweep and schedules")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("--designs", nargs="+", help="subset of designs")
        sp.add_argument("--sensing-spacing", type=float, help="sensing grid spacing in km")
        sp.add_argument("--smoke", action="store_true", help=f"coarse {SMOKE_SPACING_KM:g} km sensing grid")

    sch = sub.add_parser("schedule", parents=[common], help="common-signalling schedule for one hop count")
    sch.add_argument("n_hops", type=int)
    sch.add_argument("--schemes", nargs="+", help="subset of schemes")
    sch.add_argument("--ssb-period", type=float, choices=(20.0, 160.0), help="SSB period in ms")
    return p


def _config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config, {"threads": args.threads, "output_dir": args.output_dir})
    data = cfg.to_dict()
    if getattr(args, "designs", None):
        data["designs"] = args.designs
    spacing = SMOKE_SPACING_KM if getattr(args, "smoke", False) else getattr(args, "sensing_spacing", None)
    if spacing is not None:
        data["link"]["sensing_spacing_km"] = spacing
    if getattr(args, "schemes", None):
        data["scheduler"]["schemes"] = args.schemes
    if getattr(args, "ssb_period", None):
        data["scheduler"]["ssb_period_ms"] = args.ssb_period
    return config_from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        t0 = time.perf_counter()
        if args.command == "layout":
            s = run_layout(cfg, args.design, args.hops)
            print(f"design {s['design']}: K = {s['K']}, d_g = {s['d_g_km']:.2f} km")
            if "n_hops" in s:
                print(f"N_h = {s['n_hops']}: active beams per hop in [{s['active_min']}, {s['active_max']}]")
            _write_run_manifest(cfg, "layout", {"total": time.perf_counter() - t0})
        elif args.command == "sweep":
            _print_sweep(run_sweep(cfg, args.strict)["designs"])
        elif args.command == "schedule":
            res = run_schedule(cfg, args.n_hops, args.strict)
            _print_schedule(res)
            _write_run_manifest(cfg, "schedule", {"total": time.perf_counter() - t0})
        else:
            rep = run_report(cfg, args.strict)
            for name, v in rep["layouts"].items():
                print(f"layout {name}: K = {v['K']}, d_g = {v['d_g_km']:.2f} km")
            _print_sweep(rep["sweep"])
            for name, res in rep["schedules"].items():
                print(f"schedules for {name}:")
                _print_schedule(res)
    except (NotAchievable, SchemeInfeasible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, InvalidSpec) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
