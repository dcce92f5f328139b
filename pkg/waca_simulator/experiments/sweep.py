"""
参数扫描实验模块

部署 → 收敛 → 统计簇头/子簇头数量，WACA 与 WCA 在同一拓扑实例上成对比较，
按 (n, range) 汇总均值与总体标准差，并输出固定格式的 CSV。
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from ..core.netmodel import Topology, assign_power, assign_signal, deploy_uniform
from ..core.waca import DEFAULT_MAX_ROUNDS, Role, settle
from ..core.wca_baseline import WcaConfig, wca_elect
from ..core.weight import WeightConfig
from ..data.models import build_model
from ..utils.errors import ConfigurationError
from ..utils.seeding import derive_seed

logger = logging.getLogger(__name__)

ROW_COLUMNS = [
    "n", "range", "run", "waca_heads", "waca_subheads", "wca_heads", "settled", "settle_rounds",
]
METRICS = ["waca_heads", "waca_subheads", "wca_heads"]
AGGREGATE_COLUMNS = ["n", "range"] + [f"{m}_{s}" for m in METRICS for s in ("mean", "sd")]
FLOAT_FORMAT = "%.6f"


def _default_ranges() -> Tuple[float, ...]:
    return tuple(float(r) for r in range(10, 71, 5))


@dataclass(frozen=True)
class SweepConfig:
    """
    扫描配置

    Args:
        side: 部署正方形边长
        node_counts: 节点数网格
        ranges: 传输范围网格
        runs: 每个网格点的重复次数
        base_seed: 基础种子，单元种子 = hash(base_seed, n, range, run)
        weight_cfg / wca_cfg: 两种算法的参数
        power_model / signal_model: P(d) 与 s 的属性模型配置
        max_rounds: settle 的轮数上限
    """

    side: float = 100.0
    node_counts: Tuple[int, ...] = (20, 30, 40, 50, 60)
    ranges: Tuple[float, ...] = field(default_factory=_default_ranges)
    runs: int = 30
    base_seed: int = 1
    weight_cfg: WeightConfig = field(default_factory=WeightConfig)
    wca_cfg: WcaConfig = field(default_factory=WcaConfig)
    power_model: Mapping[str, Any] = field(
        default_factory=lambda: {"kind": "uniform", "low": 0.7, "high": 4.0}
    )
    signal_model: Mapping[str, Any] = field(
        default_factory=lambda: {"kind": "uniform", "low": 0.0, "high": 1.0}
    )
    max_rounds: int = DEFAULT_MAX_ROUNDS

    def __post_init__(self):
        object.__setattr__(self, "node_counts", tuple(int(n) for n in self.node_counts))
        object.__setattr__(self, "ranges", tuple(float(r) for r in self.ranges))
        if not self.node_counts or not self.ranges:
            raise ConfigurationError("node_counts and ranges must be non-empty")
        if any(n < 1 for n in self.node_counts):
            raise ConfigurationError(f"node counts must be >= 1, got {self.node_counts}")
        if any(not (r > 0 and math.isfinite(r)) for r in self.ranges):
            raise ConfigurationError(f"ranges must be finite and > 0, got {self.ranges}")
        if self.runs < 1:
            raise ConfigurationError(f"runs must be >= 1, got {self.runs}")
        if not self.side > 0:
            raise ConfigurationError(f"side must be > 0, got {self.side}")
        if self.max_rounds < 1:
            raise ConfigurationError(f"max_rounds must be >= 1, got {self.max_rounds}")
        # 提前校验属性模型
        build_model(self.power_model).check_attribute("power_ratio")
        build_model(self.signal_model).check_attribute("signal")

    def cells(self) -> List[Tuple[int, float, int]]:
        return [(n, r, run) for n in self.node_counts for r in self.ranges for run in range(self.runs)]

    def to_dict(self) -> Dict[str, Any]:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["node_counts"] = list(self.node_counts)
        data["ranges"] = list(self.ranges)
        data["weight_cfg"] = self.weight_cfg.to_dict()
        data["wca_cfg"] = self.wca_cfg.to_dict()
        data["power_model"] = dict(self.power_model)
        data["signal_model"] = dict(self.signal_model)
        return data

    @classmethod
    def from_dict(cls, data: Optional[Mapping[str, Any]]) -> "SweepConfig":
        data = dict(data or {})
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigurationError(f"unknown sweep settings: {sorted(unknown)}")
        if "weight_cfg" in data and not isinstance(data["weight_cfg"], WeightConfig):
            data["weight_cfg"] = WeightConfig.from_dict(data["weight_cfg"])
        if "wca_cfg" in data and not isinstance(data["wca_cfg"], WcaConfig):
            data["wca_cfg"] = WcaConfig.from_dict(data["wca_cfg"])
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigurationError(str(e)) from None


@dataclass(frozen=True)
class ExperimentRow:
    """单个 (n, range, run) 单元的结果"""

    n: int
    range: float
    run: int
    waca_heads: int
    waca_subheads: int
    wca_heads: int
    settled: bool
    settle_rounds: int


def cell_seed(base_seed: int, n: int, r: float, run: int) -> int:
    return derive_seed(int(base_seed), int(n), float(r), int(run))


def deploy_instance(
    n: int,
    side: float,
    r: float,
    seed: int,
    power_model: Mapping[str, Any],
    signal_model: Mapping[str, Any],
) -> Topology:
    """坐标、电量和信号分别使用由 seed 派生的独立子种子"""
    deployment = deploy_uniform(n, side, derive_seed(seed, "positions"))
    deployment = assign_power(deployment, build_model(power_model), derive_seed(seed, "power"))
    deployment = assign_signal(deployment, build_model(signal_model), derive_seed(seed, "signal"))
    return deployment.with_range(r)


def build_topology(cfg: SweepConfig, n: int, r: float, run: int) -> Topology:
    """按单元种子生成部署并赋予属性，WACA 和 WCA 共用这一实例"""
    seed = cell_seed(cfg.base_seed, n, r, run)
    return deploy_instance(n, cfg.side, r, seed, cfg.power_model, cfg.signal_model)


def run_cell(cfg: SweepConfig, n: int, r: float, run: int) -> ExperimentRow:
    t = build_topology(cfg, n, r, run)
    st = settle(t, cfg.weight_cfg, cfg.max_rounds)
    wca = wca_elect(t, cfg.wca_cfg)
    row = ExperimentRow(
        n=n,
        range=r,
        run=run,
        waca_heads=st.count(Role.CLUSTERHEAD),
        waca_subheads=st.count(Role.SUBHEAD),
        wca_heads=len(wca.heads),
        settled=st.settled,
        settle_rounds=st.rounds,
    )
    logger.debug("cell n=%d range=%g run=%d -> %s", n, r, run, row)
    return row


def _run_cell_packed(args) -> ExperimentRow:
    cfg, n, r, run = args
    return run_cell(cfg, n, r, run)


def run_sweep(cfg: SweepConfig, workers: int = 1) -> List[ExperimentRow]:
    """
    执行完整扫描

    Args:
        cfg: 扫描配置
        workers: 并行进程数，1 表示在当前进程顺序执行

    Returns:
        按 (n, range, run) 排序的结果行，与执行顺序无关
    """
    cells = cfg.cells()
    logger.info("running %d cells with %d worker(s)", len(cells), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell_packed, [(cfg,) + c for c in cells], chunksize=16))
    else:
        rows = [run_cell(cfg, *c) for c in cells]
    rows.sort(key=lambda row: (row.n, row.range, row.run))
    unsettled = sum(1 for row in rows if not row.settled)
    if unsettled:
        logger.warning("%d of %d cells did not settle", unsettled, len(rows))
    return rows


def rows_to_frame(rows: Iterable[ExperimentRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(row) for row in rows], columns=ROW_COLUMNS)


def aggregate(rows: Union[Iterable[ExperimentRow], pd.DataFrame]) -> pd.DataFrame:
    """
    按 (n, range) 计算各指标的均值与总体标准差 (ddof=0)

    Returns:
        列为 AGGREGATE_COLUMNS 的 DataFrame，按 n、range 升序
    """
    df = rows if isinstance(rows, pd.DataFrame) else rows_to_frame(rows)
    if df.empty:
        raise ConfigurationError("cannot aggregate an empty set of rows")
    grouped = df.groupby(["n", "range"], sort=True)[METRICS]
    means = grouped.mean().add_suffix("_mean")
    sds = grouped.std(ddof=0).fillna(0.0).add_suffix("_sd")
    out = pd.concat([means, sds], axis=1).reset_index()
    return out[AGGREGATE_COLUMNS]


def _rank_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) < 2 or np.ptp(y) == 0:
        return float("nan")
    return float(stats.spearmanr(x, y)[0])


def trend_checks(aggregates: pd.DataFrame) -> Dict[int, Dict[str, float]]:
    """
    对每个 n 计算三项趋势统计

    - head_rank_correlation: 传输范围与 WACA 平均簇头数的秩相关
    - waca_le_wca_fraction: WACA 平均簇头数 <= WCA 的范围点比例
    - subhead_peak_range: 平均子簇头数最大时的传输范围（并列取较小者）

    以及辅助量：两端范围的簇头比、WACA 与 WCA 的平均差、两端与峰值处的子簇头数。
    """
    report: Dict[int, Dict[str, float]] = {}
    for n, group in aggregates.groupby("n", sort=True):
        group = group.sort_values("range")
        ranges = group["range"].to_numpy(dtype=float)
        heads = group["waca_heads_mean"].to_numpy(dtype=float)
        wca = group["wca_heads_mean"].to_numpy(dtype=float)
        subs = group["waca_subheads_mean"].to_numpy(dtype=float)
        peak = int(np.argmax(subs))
        report[int(n)] = {
            "head_rank_correlation": _rank_correlation(ranges, heads),
            "waca_le_wca_fraction": float(np.mean(heads <= wca)),
            "waca_minus_wca_mean": float(np.mean(heads - wca)),
            "head_ratio_low_high": float(heads[0] / heads[-1]) if heads[-1] else float("inf"),
            "subhead_peak_range": float(ranges[peak]),
            "subhead_peak": float(subs[peak]),
            "subhead_at_min_range": float(subs[0]),
            "subhead_at_max_range": float(subs[-1]),
        }
    return report


def _flatten(prefix: str, value: Any, out: List[str]) -> None:
    if isinstance(value, Mapping):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else str(key), value[key], out)
    elif isinstance(value, (list, tuple)):
        out.append(f"{prefix}={','.join(_format_scalar(v) for v in value)}")
    else:
        out.append(f"{prefix}={_format_scalar(value)}")


def _format_scalar(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_format_scalar(v) for v in value) + "]"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_echo(cfg: SweepConfig) -> List[str]:
    """配置回显块：每行 # key=value"""
    lines: List[str] = []
    _flatten("", cfg.to_dict(), lines)
    return [f"# {line}" for line in lines]


def _write_frame(path: Union[str, Path], df: pd.DataFrame, cfg: SweepConfig) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        for line in config_echo(cfg):
            f.write(line + "\n")
        df.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_rows_csv(path: Union[str, Path], rows: Iterable[ExperimentRow], cfg: SweepConfig) -> Path:
    return _write_frame(path, rows_to_frame(rows), cfg)


def write_aggregate_csv(path: Union[str, Path], aggregates: pd.DataFrame, cfg: SweepConfig) -> Path:
    return _write_frame(path, aggregates[AGGREGATE_COLUMNS], cfg)


def summary_report(trends: Mapping[int, Mapping[str, float]]) -> None:
    """打印趋势摘要"""
    print("\n" + "=" * 60)
    print("WACA / WCA 扫描结果摘要")
    print("=" * 60)
    for n, t in sorted(trends.items()):
        print(f"N = {n}:")
        print(f"  • 范围-簇头数秩相关: {t['head_rank_correlation']:.3f}")
        print(f"  • WACA <= WCA 的范围点比例: {t['waca_le_wca_fraction']:.2f}")
        print(f"  • 子簇头峰值位置: r = {t['subhead_peak_range']:g} "
              f"(均值 {t['subhead_peak']:.2f})")
    print("=" * 60)
