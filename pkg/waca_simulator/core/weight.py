"""
WACA 权重函数模块
实现功率适宜度、信号强度、传播度、局部聚类系数与稳定系数的加权组合
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import AbstractSet, Any, Dict, Mapping, NamedTuple, Optional

from ..utils.errors import ConfigurationError
from .netmodel import Topology


@dataclass(frozen=True)
class WeightConfig:
    """
    权重函数参数

    Args:
        wf1..wf5: P_A, s, c_L, Δdd, ΔN 的加权系数
        ideal_degree: 理想度数 dd_I
        log_base: 功率适宜度的对数底
        pa_floor: P(d) <= pa_threshold 时的取值，也是 P_A 的下限
        pa_offset, pa_scale, pa_threshold: 功率适宜度公式中的常数 3/2, 1/2, 3/5
    """

    wf1: float = 0.9
    wf2: float = 1.0
    wf3: float = 0.85
    wf4: float = 0.65
    wf5: float = 0.6
    ideal_degree: int = 7
    log_base: float = 10.0
    pa_floor: float = 0.0
    pa_offset: float = 1.5
    pa_scale: float = 0.5
    pa_threshold: float = 0.6

    def __post_init__(self):
        factors = (self.wf1, self.wf2, self.wf3, self.wf4, self.wf5)
        if any(f < 0 for f in factors):
            raise ConfigurationError(f"weighing factors must be >= 0, got {factors}")
        if int(self.ideal_degree) != self.ideal_degree or self.ideal_degree < 1:
            raise ConfigurationError(
                f"ideal_degree must be an integer >= 1, got {self.ideal_degree}"
            )
        if not self.log_base > 1:
            raise ConfigurationError(f"log_base must be > 1, got {self.log_base}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Optional[Mapping[str, Any]]) -> "WeightConfig":
        data = dict(data or {})
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigurationError(f"unknown weight settings: {sorted(unknown)}")
        return cls(**data)


class WeightTerms(NamedTuple):
    """单个节点权重的五个分量"""

    power: float
    signal: float
    clustering: float
    degree: float
    stability: float

    def combine(self, cfg: WeightConfig) -> float:
        return (
            cfg.wf1 * self.power
            + cfg.wf2 * self.signal
            + cfg.wf3 * self.clustering
            + cfg.wf4 * self.degree
            + cfg.wf5 * self.stability
        )


def power_appropriateness(p: float, cfg: WeightConfig) -> float:
    """
    功率适宜度 P_A = 3/2 + 1/2 · log(P(d) - 3/5)

    P(d) <= 3/5 时公式无定义，返回 pa_floor；其余情况结果不低于 pa_floor。
    """
    if p <= cfg.pa_threshold:
        return cfg.pa_floor
    x = p - cfg.pa_threshold
    log = math.log10(x) if cfg.log_base == 10 else math.log(x, cfg.log_base)
    return max(cfg.pa_floor, cfg.pa_offset + cfg.pa_scale * log)


def degree_term(deg: int, cfg: WeightConfig) -> float:
    """Δdd = 1 - |deg - dd_I| / dd_I，不截断"""
    return 1.0 - abs(deg - cfg.ideal_degree) / cfg.ideal_degree


def stability_term(
    prev: Optional[AbstractSet[int]],
    curr: AbstractSet[int],
    is_current_head: bool,
) -> float:
    """
    稳定系数 ΔN

    Args:
        prev: 成为簇头时记录的邻居集合 N'(d)，从未当选时为 None
        curr: 当前邻居集合 N(d)
        is_current_head: d 当前是否为簇头

    Returns:
        非簇头或无记录时为 0；两集合都为空时为 1
    """
    if not is_current_head or prev is None:
        return 0.0
    total = len(prev) + len(curr)
    if total == 0:
        return 1.0
    return 1.0 - len(set(prev) ^ set(curr)) / total


def weight_terms(
    d: int,
    t: Topology,
    is_current_head: bool,
    prev: Optional[AbstractSet[int]],
    cfg: WeightConfig,
) -> WeightTerms:
    node = t.node(d)
    nbrs = t.neighbors(d)
    return WeightTerms(
        power=power_appropriateness(node.power_ratio, cfg),
        signal=node.signal,
        clustering=t.clustering[d],
        degree=degree_term(len(nbrs), cfg),
        stability=stability_term(prev, nbrs, is_current_head),
    )


def node_weight(d: int, t: Topology, st, cfg: WeightConfig) -> float:
    """
    设备总权重 W_d = wf1·P_A + wf2·s + wf3·c_L + wf4·Δdd + wf5·ΔN

    Args:
        d: 节点 id
        t: 当前拓扑
        st: ClusteringState（提供上一轮的簇头与 N'(d)），冷启动时可为 None
        cfg: 权重参数
    """
    if st is None:
        return weight_terms(d, t, False, None, cfg).combine(cfg)
    is_head = st.head.get(d) == d
    return weight_terms(d, t, is_head, st.prev_neighborhood.get(d), cfg).combine(cfg)
