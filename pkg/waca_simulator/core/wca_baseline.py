"""
WCA 基线算法
一次性的加权簇头选举，生成以簇头为中心的单跳簇，用于与 WACA 对比簇头数量
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Dict, FrozenSet, Mapping, Optional

from ..utils.errors import ConfigurationError
from .netmodel import Topology
from .waca import ClusteringState


@dataclass(frozen=True)
class WcaConfig:
    """
    WCA 组合权重参数

    W = c1·|deg - δ| + c2·Σdist + c3·speed + c4·service_time，权重越小越适合当簇头。
    """

    c1: float = 0.7
    c2: float = 0.2
    c3: float = 0.05
    c4: float = 0.05
    ideal_degree: int = 7

    def __post_init__(self):
        factors = (self.c1, self.c2, self.c3, self.c4)
        if any(c < 0 for c in factors):
            raise ConfigurationError(f"WCA factors must be >= 0, got {factors}")
        if int(self.ideal_degree) != self.ideal_degree or self.ideal_degree < 1:
            raise ConfigurationError(
                f"ideal_degree must be an integer >= 1, got {self.ideal_degree}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Optional[Mapping[str, Any]]) -> "WcaConfig":
        data = dict(data or {})
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigurationError(f"unknown WCA settings: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class WcaResult:
    """WCA 选举结果：簇头集合、节点到簇头的分配以及组合权重"""

    heads: FrozenSet[int]
    assignment: Dict[int, int]
    weights: Dict[int, float]


def wca_weight(
    d: int,
    t: Topology,
    cfg: WcaConfig,
    speed: float = 0.0,
    service_time: float = 0.0,
) -> float:
    """
    节点的 WCA 组合权重

    Args:
        d: 节点 id
        t: 拓扑
        cfg: WCA 参数
        speed: 平均移动速度，静态场景为 0
        service_time: 已担任簇头的累计时间，静态场景为 0
    """
    nbrs = t.neighbors(d)
    distance_sum = sum(t.distance(d, n) for n in sorted(nbrs))
    return (
        cfg.c1 * abs(len(nbrs) - cfg.ideal_degree)
        + cfg.c2 * distance_sum
        + cfg.c3 * speed
        + cfg.c4 * service_time
    )


def wca_elect(
    t: Topology,
    cfg: WcaConfig,
    speeds: Optional[Mapping[int, float]] = None,
    service_times: Optional[Mapping[int, float]] = None,
) -> WcaResult:
    """
    贪心支配集选举

    反复选取未被覆盖节点中权重最小者（权重相同取 id 最小）为簇头，
    它覆盖自身及未被覆盖的邻居，直到所有节点都被覆盖。
    """
    speeds = speeds or {}
    service_times = service_times or {}
    weights = {
        d: wca_weight(d, t, cfg, speeds.get(d, 0.0), service_times.get(d, 0.0))
        for d in t.ids
    }
    assignment: Dict[int, int] = {}
    for d in sorted(t.ids, key=lambda n: (weights[n], n)):
        if d in assignment:
            continue
        assignment[d] = d
        for n in sorted(t.neighbors(d)):
            if n not in assignment:
                assignment[n] = d
    heads = frozenset(d for d, h in assignment.items() if h == d)
    return WcaResult(heads=heads, assignment=dict(sorted(assignment.items())), weights=weights)


def wca_state(t: Topology, cfg: WcaConfig) -> ClusteringState:
    """把 WCA 结果包装成 ClusteringState，供统一的 JSON/DOT 导出使用"""
    result = wca_elect(t, cfg)
    return ClusteringState(
        weight=result.weights,
        head=result.assignment,
        beacon_count=len(t),
        settled=True,
        rounds=1,
    )
