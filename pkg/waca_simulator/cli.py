"""
命令行入口

子命令:
- cluster: 单次部署并收敛，输出状态 JSON，可选 DOT / PNG
- compare: 同一拓扑上 WACA 与 WCA 的簇头数对比
- experiment: (n, range, run) 参数扫描，输出逐行与汇总 CSV 以及趋势报告
- disseminate: 分块内容分发模拟
- events: 逐行 JSON 事件脚本驱动的增量更新时间线

退出码: 0 成功, 2 用法/配置错误, 3 输入解析错误, 4 内部错误
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .config import SimulationConfig, reload_config
from .core.dissemination import ContentJob, disseminate
from .core.netmodel import Topology
from .core.waca import Role, apply_events, chain_depth, clusters, head_changes, settle
from .core.wca_baseline import wca_elect, wca_state
from .data.serialization import (
    dumps,
    load_events,
    load_state,
    load_topology,
    save_topology,
    state_to_dict,
    write_dot,
    write_json,
    write_jsonl,
)
from .experiments.sweep import (
    SweepConfig,
    aggregate,
    deploy_instance,
    run_sweep,
    summary_report,
    trend_checks,
    write_aggregate_csv,
    write_rows_csv,
)
from .utils.errors import ConfigurationError, TopologyParseError, UnknownNodeError, WacaError
from .utils.seeding import derive_seed
from .visualization.visualizer import ClusterVisualizer, create_cluster_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INTERNAL = 4

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
MANIFEST_FILE = "manifest.json"


@dataclass
class RunManifest:
    """一次运行的完整描述：合并后的配置、输入、输出与种子"""

    command: str
    config: Dict[str, Any]
    inputs: Dict[str, Any] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": sorted(self.outputs),
            "seed": self.seed,
        }

    def write(self, output_dir: Path) -> Path:
        return write_json(output_dir / MANIFEST_FILE, self.to_dict())


# ---- 参数解析 ----


def _add_topology_args(p: argparse.ArgumentParser) -> None:
    group = p.add_argument_group("topology", "load a topology file or deploy uniformly at random")
    group.add_argument("--topology", help="topology JSON file")
    group.add_argument("--n", type=int, help="number of nodes to deploy")
    group.add_argument("--side", type=float, help="side of the deployment square")
    group.add_argument("--range", type=float, help="transmission range (overrides the file's)")
    group.add_argument("--seed", type=int, help="deployment seed; derived and printed when omitted")
    group.add_argument("--ideal-degree", type=int, help="ideal degree dd_I")
    group.add_argument("--max-rounds", type=int, help="round cap for settle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waca-simulator",
        description="WACA weighted clusterhead election simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--output-dir", help="output directory (default: $WACA_OUTPUT_DIR or .)")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("-v", "--verbose", action="store_true", help="same as --log-level INFO")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("cluster", help="settle one topology and export the state")
    _add_topology_args(p)
    p.add_argument("--dot", help="write a Graphviz DOT rendering to this path")
    p.add_argument("--png", help="write a matplotlib rendering to this path")
    p.add_argument("--quiet", action="store_true", help="do not print the cluster summary")

    p = sub.add_parser("compare", help="WACA vs WCA on one topology")
    _add_topology_args(p)

    p = sub.add_parser("experiment", help="run the (n, range, run) sweep")
    p.add_argument("--runs", type=int, help="runs per grid cell")
    p.add_argument("--n", type=int, nargs="+", dest="node_counts", help="node counts")
    p.add_argument("--range", type=float, nargs="+", dest="ranges", help="transmission ranges")
    p.add_argument("--side", type=float, help="side of the deployment square")
    p.add_argument("--base-seed", type=int, help="base seed of the per-cell seeds")
    p.add_argument("--parallel", type=int, default=1, metavar="K", help="worker processes")
    p.add_argument("--quiet", action="store_true", help="do not print the trend summary")

    p = sub.add_parser("disseminate", help="simulate chunked content dissemination")
    _add_topology_args(p)
    p.add_argument("--state", help="settled state JSON (computed when omitted)")
    p.add_argument("--chunks", type=int, required=True, help="number of chunks K")
    p.add_argument("--interested", type=int, nargs="+", required=True, help="interested node ids")
    p.add_argument("--uplink-rate", type=int, default=1, help="chunks per injection point per round")
    p.add_argument("--adhoc-rate", type=int, default=1, help="(chunk, neighbor) sends per round")
    p.add_argument("--max-injection-points", type=int, help="injection points per partition")
    p.add_argument("--relay-all", action="store_true", help="every device relays")
    p.add_argument("--trace", action="store_true", help="write trace.jsonl")

    p = sub.add_parser("events", help="apply a line-delimited JSON event script")
    _add_topology_args(p)
    p.add_argument("script", help="event script (one JSON event per line)")
    p.add_argument("--verify", action="store_true",
                   help="check each step against a from-scratch settle")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO if args.verbose and args.log_level == "WARNING" else args.log_level
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


# ---- 配置合并 ----


def _sweep_config(config: SimulationConfig, **overrides) -> SweepConfig:
    """默认值 < 配置文件 < 命令行"""
    data = config.get_sweep_settings()
    data["weight_cfg"] = config.get_weight_config()
    data["wca_cfg"] = config.get_wca_config()
    if config.get_power_model() is not None:
        data["power_model"] = config.get_power_model()
    if config.get_signal_model() is not None:
        data["signal_model"] = config.get_signal_model()
    data.update({k: v for k, v in overrides.items() if v is not None})
    return SweepConfig.from_dict(data)


def _single_config(config: SimulationConfig, args: argparse.Namespace) -> SweepConfig:
    cfg = _sweep_config(config, side=args.side, max_rounds=args.max_rounds)
    if args.ideal_degree is not None:
        cfg = replace(
            cfg,
            weight_cfg=replace(cfg.weight_cfg, ideal_degree=args.ideal_degree),
            wca_cfg=replace(cfg.wca_cfg, ideal_degree=args.ideal_degree),
        )
    return cfg


def _announce_seed(command: str, seed: int) -> None:
    print(f"{command}: no --seed given, using derived seed {seed}", file=sys.stderr)


def _resolve_topology(
    args: argparse.Namespace, cfg: SweepConfig
) -> Tuple[Topology, Dict[str, Any], int]:
    """从文件读取或按部署参数生成拓扑，返回 (拓扑, 输入描述, 种子)"""
    if args.topology:
        t = load_topology(args.topology, range=args.range)
        inputs = {"topology": args.topology, "range": t.range}
        seed = args.seed
        if seed is None:
            seed = derive_seed(args.command, dumps(_topology_fingerprint(t)))
            _announce_seed(args.command, seed)
        return t, inputs, seed

    if args.n is None or args.range is None:
        raise ConfigurationError("either --topology or both --n and --range are required")
    seed = args.seed
    if seed is None:
        seed = derive_seed(args.command, args.n, cfg.side, float(args.range))
        _announce_seed(args.command, seed)
    t = deploy_instance(args.n, cfg.side, float(args.range), seed, cfg.power_model, cfg.signal_model)
    inputs = {"n": args.n, "side": cfg.side, "range": float(args.range)}
    return t, inputs, seed


def _topology_fingerprint(t: Topology) -> List[Any]:
    return [t.range, t.side] + [[n.id, n.x, n.y, n.power_ratio, n.signal] for n in t.nodes]


def _finite(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


# ---- 子命令 ----


def cmd_cluster(args, config: SimulationConfig, output_dir: Path) -> int:
    cfg = _single_config(config, args)
    t, inputs, seed = _resolve_topology(args, cfg)
    st = settle(t, cfg.weight_cfg, cfg.max_rounds)

    manifest = RunManifest("cluster", _single_manifest_config(cfg), inputs, seed=seed)
    save_topology(output_dir / "topology.json", t)
    write_json(output_dir / "state.json", state_to_dict(st))
    manifest.outputs += ["topology.json", "state.json"]
    if args.dot:
        write_dot(args.dot, t, st)
        manifest.outputs.append(args.dot)
    if args.png:
        ClusterVisualizer().plot_topology(t, st, args.png)
        manifest.outputs.append(args.png)
    manifest.write(output_dir)

    if not args.quiet:
        create_cluster_report(t, st, wca_heads=len(wca_elect(t, cfg.wca_cfg).heads))
    return EXIT_OK


def cmd_compare(args, config: SimulationConfig, output_dir: Path) -> int:
    cfg = _single_config(config, args)
    t, inputs, seed = _resolve_topology(args, cfg)
    st = settle(t, cfg.weight_cfg, cfg.max_rounds)
    wca = wca_state(t, cfg.wca_cfg)

    report = {
        "n": len(t),
        "range": t.range,
        "waca": {
            "heads": st.count(Role.CLUSTERHEAD),
            "subheads": st.count(Role.SUBHEAD),
            "slaves": st.count(Role.SLAVE),
            "cluster_sizes": {str(h): len(m) for h, m in sorted(clusters(st).items())},
            "chain_depth": chain_depth(st),
            "settled": st.settled,
            "rounds": st.rounds,
            "beacons": st.beacon_count,
        },
        "wca": {
            "heads": wca.count(Role.CLUSTERHEAD),
            "cluster_sizes": {str(h): len(m) for h, m in sorted(clusters(wca).items())},
        },
    }
    write_json(output_dir / "compare.json", report)
    write_json(output_dir / "wca_state.json", state_to_dict(wca))
    RunManifest(
        "compare", _single_manifest_config(cfg), inputs, ["compare.json", "wca_state.json"], seed
    ).write(output_dir)
    print(f"WACA: {report['waca']['heads']} clusterheads, {report['waca']['subheads']} sub-heads; "
          f"WCA: {report['wca']['heads']} clusterheads")
    return EXIT_OK


def cmd_experiment(args, config: SimulationConfig, output_dir: Path) -> int:
    if args.parallel < 1:
        raise ConfigurationError(f"--parallel must be >= 1, got {args.parallel}")
    cfg = _sweep_config(
        config,
        runs=args.runs,
        node_counts=args.node_counts,
        ranges=args.ranges,
        side=args.side,
        base_seed=args.base_seed,
    )
    rows = run_sweep(cfg, workers=args.parallel)
    aggregates = aggregate(rows)
    trends = trend_checks(aggregates)

    write_rows_csv(output_dir / "rows.csv", rows, cfg)
    write_aggregate_csv(output_dir / "aggregate.csv", aggregates, cfg)
    write_json(
        output_dir / "trends.json",
        {str(n): {k: _finite(v) for k, v in t.items()} for n, t in trends.items()},
    )
    RunManifest(
        "experiment",
        cfg.to_dict(),
        {"cells": len(rows)},
        ["rows.csv", "aggregate.csv", "trends.json"],
        cfg.base_seed,
    ).write(output_dir)

    if not args.quiet:
        summary_report(trends)
    return EXIT_OK


def cmd_disseminate(args, config: SimulationConfig, output_dir: Path) -> int:
    cfg = _single_config(config, args)
    job = ContentJob(
        chunk_count=args.chunks,
        interested=frozenset(args.interested),
        uplink_rate=args.uplink_rate,
        adhoc_rate=args.adhoc_rate,
        max_injection_points=args.max_injection_points,
        relay_all=args.relay_all,
    )
    t, inputs, seed = _resolve_topology(args, cfg)
    if args.state:
        st = load_state(args.state)
        inputs["state"] = args.state
    else:
        st = settle(t, cfg.weight_cfg, cfg.max_rounds)

    report = disseminate(t, st, job, seed=derive_seed(seed, "chunks"), trace=args.trace)
    outputs = ["report.json"]
    write_json(output_dir / "report.json", report.to_dict())
    if args.trace:
        write_jsonl(output_dir / "trace.jsonl", report.trace)
        outputs.append("trace.jsonl")

    manifest_config = _single_manifest_config(cfg)
    manifest_config["job"] = {
        "chunk_count": job.chunk_count,
        "interested": sorted(job.interested),
        "uplink_rate": job.uplink_rate,
        "adhoc_rate": job.adhoc_rate,
        "max_injection_points": job.max_injection_points,
        "relay_all": job.relay_all,
    }
    RunManifest("disseminate", manifest_config, inputs, outputs, seed).write(output_dir)

    if report.completed:
        print(f"completed in {report.rounds} rounds "
              f"({report.uplink_transmissions} uplink, {report.adhoc_transmissions} ad-hoc)")
    else:
        print(f"incomplete: {report.incomplete}", file=sys.stderr)
    return EXIT_OK


def cmd_events(args, config: SimulationConfig, output_dir: Path) -> int:
    cfg = _single_config(config, args)
    t, inputs, seed = _resolve_topology(args, cfg)
    events = load_events(args.script)
    inputs["script"] = args.script

    st = settle(t, cfg.weight_cfg, cfg.max_rounds)
    timeline = [{"index": 0, "event": None, "head_changes": 0, "state": state_to_dict(st)}]
    mismatches = []
    prev_t, prev_st = t, st
    for i, (ev, (new_t, new_st)) in enumerate(
        zip(events, apply_events(st, t, events, cfg.weight_cfg, cfg.max_rounds)), start=1
    ):
        if args.verify:
            oracle = settle(new_t, cfg.weight_cfg, cfg.max_rounds, initial=prev_st)
            if not new_st.same_clustering(oracle):
                logger.error("event %d (%s): incremental state differs from full recomputation",
                             i, ev.kind)
                mismatches.append(i)
        timeline.append({
            "index": i,
            "event": ev.to_dict(),
            "head_changes": head_changes(prev_st, new_st),
            "state": state_to_dict(new_st),
        })
        prev_t, prev_st = new_t, new_st

    write_json(output_dir / "timeline.json", timeline)
    save_topology(output_dir / "topology.json", prev_t)
    manifest_config = _single_manifest_config(cfg)
    manifest_config["verify"] = args.verify
    RunManifest(
        "events", manifest_config, inputs, ["timeline.json", "topology.json"], seed
    ).write(output_dir)

    if mismatches:
        print(f"verification failed at events {mismatches}", file=sys.stderr)
        return EXIT_INTERNAL
    print(f"applied {len(events)} events; "
          f"{prev_st.count(Role.CLUSTERHEAD)} clusterheads at the end")
    return EXIT_OK


def _single_manifest_config(cfg: SweepConfig) -> Dict[str, Any]:
    return {
        "side": cfg.side,
        "max_rounds": cfg.max_rounds,
        "weight_cfg": cfg.weight_cfg.to_dict(),
        "wca_cfg": cfg.wca_cfg.to_dict(),
        "power_model": dict(cfg.power_model),
        "signal_model": dict(cfg.signal_model),
    }


COMMANDS = {
    "cluster": cmd_cluster,
    "compare": cmd_compare,
    "experiment": cmd_experiment,
    "disseminate": cmd_disseminate,
    "events": cmd_events,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """命令行主入口，返回退出码"""
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        config = reload_config(args.config)
        output_dir = Path(args.output_dir or config.get_output_dir())
        output_dir.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, config, output_dir)
    except TopologyParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigurationError, UnknownNodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except WacaError as e:
        logger.exception("unexpected simulator error")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
