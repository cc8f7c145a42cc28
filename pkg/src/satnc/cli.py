"""Command line entry point: ``satnc {propagate,code,rates,criteria}``.

Exit codes: 0 success, 1 undecodable or unreachable sinks, 2 cyclic paths
line-graph (convolutional code required), 3 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path


from . import dynamics
from .code import FieldExhaustedError, format_code
from .config import DEFAULTS, ConfigError, ScenarioConfig
from .constellation import RangeSeries, range_series
from .gf import GF
from .graph import MultiGraph
from .linkbudget import multigraph_series
from .pipeline import build_code
from .plg import format_label

log = logging.getLogger("satnc")

EXIT_OK, EXIT_UNDECODABLE, EXIT_CYCLIC, EXIT_CONFIG = 0, 1, 2, 3


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.6f}"


def load_ranges(cfg: ScenarioConfig) -> RangeSeries:
    path = cfg["io"]["range_import"]
    if path:
        log.info("replaying ranges from %s", path)
        try:
            return RangeSeries.from_csv(path)
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
    run = cfg["run"]
    return range_series(cfg.constellation(), run["duration_s"], run["dt_s"], cfg["constellation"]["grazing_radius_km"])


def scenario(cfg: ScenarioConfig, sinks: list[int] | None = None) -> dynamics.Scenario:
    rs = load_ranges(cfg)
    run = cfg["run"]
    sinks = cfg.sinks if sinks is None else sinks
    n = rs.num_nodes
    for v in [run["source"], *sinks]:
        if not 1 <= v <= n:
            raise ConfigError(f"node {v} outside 1..{n}")
    return dynamics.Scenario(
        multigraph_series(rs.ranges, cfg.link(), run["unit_bps"]),
        rs.dt_s,
        run["source"] - 1,
        tuple(t - 1 for t in sinks),
        field_m=run["field_m"],
        unit_bps=run["unit_bps"],
        threshold=run["threshold"],
    )


def _out_dir(cfg: ScenarioConfig) -> Path:
    out = Path(cfg["io"]["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_propagate(cfg: ScenarioConfig) -> int:
    rs = load_ranges(cfg)
    path = _out_dir(cfg) / "ranges.csv"
    rs.to_csv(path)
    print(f"wrote {path} ({rs.num_steps} snapshots, {rs.num_nodes} nodes)")
    return EXIT_OK


def _snapshot_graph(cfg: ScenarioConfig, t_min: float) -> MultiGraph:
    gpath = cfg["io"]["graph_import"]
    if gpath:
        try:
            return MultiGraph.from_csv(gpath)
        except OSError as exc:
            raise ConfigError(f"{gpath}: {exc.strerror}") from None
    rs = load_ranges(cfg)
    k = int(round(t_min * 60 / rs.dt_s))
    if not 0 <= k < rs.num_steps:
        raise ConfigError(f"snapshot t={t_min} min is outside the series")
    run = cfg["run"]
    return MultiGraph(multigraph_series(rs.ranges[k : k + 1], cfg.link(), run["unit_bps"])[0])


def cmd_code(cfg: ScenarioConfig, t_min: float = 0.0) -> int:
    run = cfg["run"]
    g = _snapshot_graph(cfg, t_min)
    for v in [run["source"], *cfg.sinks]:
        if not 1 <= v <= g.n:
            raise ConfigError(f"node {v} outside 1..{g.n}")
    sinks = [t - 1 for t in cfg.sinks]
    out = _out_dir(cfg)
    tag = f"t{t_min:g}"
    try:
        res = build_code(
            g,
            run["source"] - 1,
            sinks,
            field=GF(run["field_m"]),
            min_field=run["min_field"],
            retry_paths=run["retry_paths"],
            seed=run["seed"],
        )
    except FieldExhaustedError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_UNDECODABLE
    res.plg.to_csv(out / f"plg_{tag}.csv")
    if res.cyclic:
        cyc = " -> ".join(format_label(x) for x in res.cycle + res.cycle[:1])
        print(f"CNC required: the paths line-graph is cyclic: {cyc}", file=sys.stderr)
        return EXIT_CYCLIC
    with (out / f"sinks_{tag}.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sink", "max_flow", "rate", "rank", "decodable", "fallback"])
        for t in sinks:
            rank = res.report.sinks[t].rank if res.report else 0
            ok = bool(res.report and res.report.sinks[t].decodable)
            w.writerow([t + 1, res.paths.h_per_sink.get(t, 0), res.r, rank, int(ok), int(t in res.paths.fallback)])
    if res.code is None:
        print("no sink is reachable from the source", file=sys.stderr)
        return EXIT_UNDECODABLE
    (out / f"code_{tag}.txt").write_text(format_code(res.code))
    bad = [t + 1 for t, s in res.report.sinks.items() if not s.decodable]
    print(f"rate {res.r} over {res.code.field}; {len(sinks) - len(bad)}/{len(sinks)} sinks decodable")
    if bad:
        print(f"non-decodable sinks: {bad}", file=sys.stderr)
        return EXIT_UNDECODABLE
    return EXIT_OK


CRITERIA_HEADER = ["sinks", "papr", "maxRa", "rateR", "p50", "p75", "t_opt_min", "recommendation"]


def _criteria_row(rep: dynamics.CriteriaReport) -> list[str]:
    return [
        " ".join(str(t + 1) for t in rep.sinks),
        _num(rep.papr),
        _num(rep.max_ra),
        _num(rep.rate_r),
        _num(rep.p50),
        _num(rep.p75),
        _num(rep.t_opt_min),
        rep.recommendation,
    ]


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_rates(cfg: ScenarioConfig) -> int:
    sc = scenario(cfg)
    ev = dynamics.evaluate(sc)
    out = _out_dir(cfg)
    _write_csv(
        out / "rates.csv",
        ["t_min", "r_opt", "r_intersection_cum", "r_static_cum"],
        (
            [f"{t:g}", _num(a), _num(b), _num(c)]
            for t, a, b, c in zip(ev.r_opt.times_min, ev.r_opt.values, ev.r_int_cum.values, ev.r_static.values)
        ),
    )
    _write_csv(
        out / "interval_sweep.csv",
        ["T_min", "r_interval"],
        ([f"{T * sc.dt_s / 60:g}", _num(r)] for T, r in ev.sweep),
    )
    _write_csv(out / "criteria.csv", CRITERIA_HEADER, [_criteria_row(ev.report)])
    _print_report(ev.report)
    return EXIT_OK


def cmd_criteria(cfg: ScenarioConfig) -> int:
    rep = dynamics.criteria(scenario(cfg))
    _write_csv(_out_dir(cfg) / "criteria.csv", CRITERIA_HEADER, [_criteria_row(rep)])
    _print_report(rep)
    return EXIT_OK


def _print_report(rep: dynamics.CriteriaReport) -> None:
    t_opt = "none" if rep.t_opt_min is None else f"{rep.t_opt_min:g} min"
    print(
        f"maxRa={rep.max_ra:.3f} rateR={rep.rate_r:.3f} PAPR={rep.papr:.3f} "
        f"p50={rep.p50:.3f} p75={rep.p75:.3f} T_opt={t_opt} -> {rep.recommendation}"
    )
    for flag in rep.flags:
        print(f"flag: {flag}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="scenario file (INI sections)")
    common.add_argument("-v", "--verbose", action="store_true")
    keys = common.add_argument_group("config overrides")
    for section, vals in DEFAULTS.items():
        for key in vals:
            keys.add_argument(f"--{key.replace('_', '-')}", dest=f"{section}.{key}", metavar="VALUE")

    parser = argparse.ArgumentParser(prog="satnc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("propagate", parents=[common], help="write the range CSV")
    p = sub.add_parser("code", parents=[common], help="build and verify a code for one snapshot")
    p.add_argument("--t", type=float, default=0.0, help="snapshot time in minutes")
    sub.add_parser("rates", parents=[common], help="rate series, interval sweep and criteria")
    sub.add_parser("criteria", parents=[common], help="criteria report only")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    overrides = {k: v for k, v in vars(args).items() if "." in k and v is not None}
    try:
        cfg = ScenarioConfig.load(args.config, overrides)
        if args.command == "propagate":
            return cmd_propagate(cfg)
        if args.command == "code":
            return cmd_code(cfg, args.t)
        if args.command == "rates":
            return cmd_rates(cfg)
        return cmd_criteria(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
