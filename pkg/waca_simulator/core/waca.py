"""
WACA 簇头选举模块
本地选举、角色推导、同步轮次收敛与拓扑事件的增量更新
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from ..utils.errors import UnknownNodeError
from .netmodel import Node, Topology
from .weight import WeightConfig, weight_terms

logger = logging.getLogger(__name__)

DEFAULT_MAX_ROUNDS = 32


class Role(str, Enum):
    """节点角色，值为导出时使用的短码"""

    CLUSTERHEAD = "CH"
    SUBHEAD = "SH"
    SLAVE = "SL"


def derive_roles(head: Mapping[int, int]) -> Dict[int, Role]:
    """
    仅由簇头指针推导角色

    head(d)=d 为簇头；被其他节点选中且自身选择他人为子簇头；其余为从节点。
    """
    elected = {h for d, h in head.items() if h != d}
    roles = {}
    for d, h in head.items():
        if h == d:
            roles[d] = Role.CLUSTERHEAD
        elif d in elected:
            roles[d] = Role.SUBHEAD
        else:
            roles[d] = Role.SLAVE
    return roles


@dataclass(frozen=True)
class ClusteringState:
    """
    选举状态

    Args:
        weight: 节点权重 w(d)
        head: 选中的簇头 c(d)
        prev_neighborhood: 节点最近一次成为簇头时的邻居快照 N'(d)
        beacon_count: 累计发送的信标数
        settled: 最近一次收敛过程是否到达不动点
        rounds: 最近一次收敛过程执行的轮数
    """

    weight: Mapping[int, float] = field(default_factory=dict)
    head: Mapping[int, int] = field(default_factory=dict)
    prev_neighborhood: Mapping[int, FrozenSet[int]] = field(default_factory=dict)
    beacon_count: int = 0
    settled: bool = True
    rounds: int = 0

    @cached_property
    def roles(self) -> Dict[int, Role]:
        return derive_roles(self.head)

    def count(self, role: Role) -> int:
        return sum(1 for r in self.roles.values() if r is role)

    @property
    def clusterheads(self) -> List[int]:
        return sorted(d for d, h in self.head.items() if h == d)

    def same_clustering(self, other: "ClusteringState") -> bool:
        """权重、簇头、N'(d) 与信标数完全一致"""
        return (
            dict(self.weight) == dict(other.weight)
            and dict(self.head) == dict(other.head)
            and dict(self.prev_neighborhood) == dict(other.prev_neighborhood)
            and self.beacon_count == other.beacon_count
        )


def choose_head(d: int, t: Topology, weight: Mapping[int, float]) -> int:
    """
    在 N(d) ∪ {d} 中选出权重最大的节点

    只有严格更大的邻居才能取代自身；多个严格更大且权重相同的邻居中取 id 最大者。
    """
    best = d
    for n in sorted(t.neighbors(d)):
        if weight[n] > weight[best] or (best != d and weight[n] == weight[best]):
            best = n
    return best


def _update_memory(
    t: Topology,
    nodes: Iterable[int],
    old_head: Mapping[int, int],
    new_head: Mapping[int, int],
    memory: Dict[int, FrozenSet[int]],
) -> None:
    # 进入簇头角色时记录 N'(d)，离开时丢弃
    for d in nodes:
        if new_head[d] == d:
            if old_head.get(d) != d or d not in memory:
                memory[d] = t.neighbors(d)
        else:
            memory.pop(d, None)


def compute_weights(
    t: Topology, st: Optional[ClusteringState], cfg: WeightConfig
) -> Dict[int, float]:
    """按上一轮角色计算全部节点的权重"""
    head = st.head if st is not None else {}
    memory = st.prev_neighborhood if st is not None else {}
    return {
        d: weight_terms(d, t, head.get(d) == d, memory.get(d), cfg).combine(cfg)
        for d in t.ids
    }


def elect(t: Topology, st: ClusteringState, cfg: WeightConfig) -> ClusteringState:
    """
    一轮选举：每个设备选择 N(d) ∪ {d} 中权重最大者为簇头

    Args:
        t: 拓扑
        st: 已填充全部节点权重的状态，其 head 视为上一轮的选择
        cfg: 权重参数（选举本身不使用，保持统一签名）

    Returns:
        新状态，信标数增加 n
    """
    missing = [d for d in t.ids if d not in st.weight]
    if missing:
        raise UnknownNodeError(missing[0])
    head = {d: choose_head(d, t, st.weight) for d in t.ids}
    memory = {d: m for d, m in st.prev_neighborhood.items() if d in t}
    _update_memory(t, t.ids, st.head, head, memory)
    return ClusteringState(
        weight={d: st.weight[d] for d in t.ids},
        head=head,
        prev_neighborhood=memory,
        beacon_count=st.beacon_count + len(t),
        settled=st.settled,
        rounds=st.rounds,
    )


def settle(
    t: Topology,
    cfg: WeightConfig,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    initial: Optional[ClusteringState] = None,
) -> ClusteringState:
    """
    同步轮次迭代直到簇头分配不再变化

    每轮先用上一轮的角色重新计算权重，再执行一次选举。

    Args:
        t: 拓扑
        cfg: 权重参数
        max_rounds: 最大轮数
        initial: 起始状态（簇头与 N'(d) 记忆），None 表示冷启动

    Returns:
        最终状态；未收敛时 settled=False
    """
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be >= 1, got {max_rounds}")
    state = initial if initial is not None else ClusteringState()
    previous = {d: state.head[d] for d in t.ids if d in state.head}
    settled = False
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        weights = compute_weights(t, state, cfg)
        state = elect(t, replace(state, weight=weights), cfg)
        if state.head == previous:
            settled = True
            break
        previous = state.head
    if not settled:
        logger.warning("settle did not converge within %d rounds (n=%d)", max_rounds, len(t))
    return replace(state, settled=settled, rounds=rounds)


# ---- 拓扑事件 ----


class TopologyEvent(ABC):
    """拓扑事件基类"""

    kind: str = ""

    @abstractmethod
    def apply_to(self, t: Topology) -> Topology:
        """返回事件发生后的拓扑"""

    @abstractmethod
    def touched(self, old: Topology, new: Topology) -> Set[int]:
        """权重输入可能变化的节点（新拓扑中的 id）"""

    @abstractmethod
    def to_dict(self) -> dict:
        """Line-delimited JSON form of the event."""


def _around(t: Topology, node_id: int) -> Set[int]:
    if node_id not in t:
        return set()
    return {node_id} | set(t.neighbors(node_id))


@dataclass(frozen=True)
class NodeMoved(TopologyEvent):
    node_id: int
    x: float
    y: float
    kind = "node-moved"

    def apply_to(self, t: Topology) -> Topology:
        return t.replace_node(self.node_id, x=float(self.x), y=float(self.y))

    def touched(self, old: Topology, new: Topology) -> Set[int]:
        return _around(old, self.node_id) | _around(new, self.node_id)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "id": self.node_id, "x": self.x, "y": self.y}


@dataclass(frozen=True)
class NodeRemoved(TopologyEvent):
    node_id: int
    kind = "node-removed"

    def apply_to(self, t: Topology) -> Topology:
        return t.without_node(self.node_id)

    def touched(self, old: Topology, new: Topology) -> Set[int]:
        return _around(old, self.node_id) - {self.node_id}

    def to_dict(self) -> dict:
        return {"kind": self.kind, "id": self.node_id}


@dataclass(frozen=True)
class NodeAdded(TopologyEvent):
    node: Node
    kind = "node-added"

    def apply_to(self, t: Topology) -> Topology:
        return t.with_node(self.node)

    def touched(self, old: Topology, new: Topology) -> Set[int]:
        return _around(new, self.node.id)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "id": self.node.id,
            "x": self.node.x,
            "y": self.node.y,
            "power_ratio": self.node.power_ratio,
            "signal": self.node.signal,
        }


@dataclass(frozen=True)
class AttributeChanged(TopologyEvent):
    node_id: int
    power_ratio: Optional[float] = None
    signal: Optional[float] = None
    kind = "attribute-changed"

    def apply_to(self, t: Topology) -> Topology:
        changes = {}
        if self.power_ratio is not None:
            changes["power_ratio"] = float(self.power_ratio)
        if self.signal is not None:
            changes["signal"] = float(self.signal)
        return t.replace_node(self.node_id, **changes)

    def touched(self, old: Topology, new: Topology) -> Set[int]:
        return {self.node_id}

    def to_dict(self) -> dict:
        data = {"kind": self.kind, "id": self.node_id}
        if self.power_ratio is not None:
            data["power_ratio"] = self.power_ratio
        if self.signal is not None:
            data["signal"] = self.signal
        return data


EVENT_REGISTRY = {
    cls.kind: cls for cls in (NodeMoved, NodeRemoved, NodeAdded, AttributeChanged)
}


def step(
    st: ClusteringState,
    t: Topology,
    ev: TopologyEvent,
    cfg: WeightConfig,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> Tuple[Topology, ClusteringState]:
    """
    应用一个拓扑事件并增量地重新收敛

    只重新计算邻居集合或信标数据发生变化的节点，再按与 settle 相同的
    同步轮次推进，结果与 settle(new_t, initial=st) 一致。

    Returns:
        (新拓扑, 新状态)
    """
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be >= 1, got {max_rounds}")
    new_t = ev.apply_to(t)
    if not st.settled:
        # 未收敛的状态中存储的权重与角色不一致，只能整体重算
        return new_t, settle(new_t, cfg, max_rounds, initial=st)

    ids = new_t.ids
    weights = {d: st.weight[d] for d in ids if d in st.weight}
    previous = {d: st.head[d] for d in ids if d in st.head}
    memory = {d: m for d, m in st.prev_neighborhood.items() if d in new_t}
    touched = ev.touched(t, new_t) & set(ids)
    logger.debug("%s: %d of %d nodes touched", ev.kind, len(touched), len(ids))

    weight_dirty = set(touched)
    head_dirty = set(touched)
    beacons = st.beacon_count
    settled = False
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        for d in sorted(weight_dirty):
            w = weight_terms(d, new_t, previous.get(d) == d, memory.get(d), cfg).combine(cfg)
            if weights.get(d) != w:
                weights[d] = w
                head_dirty.add(d)
                head_dirty.update(new_t.neighbors(d))

        current = dict(previous)
        for d in sorted(head_dirty):
            current[d] = choose_head(d, new_t, weights)
        _update_memory(new_t, head_dirty, previous, current, memory)
        beacons += len(ids)

        if current == previous:
            settled = True
            break
        # 角色变化的节点下一轮 ΔN 改变
        weight_dirty = {
            d for d in head_dirty if (current[d] == d) != (previous.get(d) == d)
        }
        head_dirty = set()
        previous = current

    if not settled:
        logger.warning("incremental update did not converge within %d rounds", max_rounds)
    state = ClusteringState(
        weight=weights,
        head=current,
        prev_neighborhood=memory,
        beacon_count=beacons,
        settled=settled,
        rounds=rounds,
    )
    return new_t, state


def apply_event(
    st: ClusteringState,
    t: Topology,
    ev: TopologyEvent,
    cfg: WeightConfig,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> ClusteringState:
    """应用拓扑事件，返回重新收敛后的状态"""
    return step(st, t, ev, cfg, max_rounds)[1]


def apply_events(
    st: ClusteringState,
    t: Topology,
    events: Iterable[TopologyEvent],
    cfg: WeightConfig,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> List[Tuple[Topology, ClusteringState]]:
    """依次应用事件，返回每个事件之后的 (拓扑, 状态)"""
    timeline = []
    for ev in events:
        t, st = step(st, t, ev, cfg, max_rounds)
        timeline.append((t, st))
    return timeline


# ---- 簇结构查询 ----


def chain_of(st: ClusteringState, d: int) -> List[int]:
    """从 d 沿簇头指针走到簇头的链（含两端）"""
    if d not in st.head:
        raise UnknownNodeError(d)
    chain = [d]
    while st.head[chain[-1]] != chain[-1]:
        chain.append(st.head[chain[-1]])
        if len(chain) > len(st.head) + 1:
            raise RuntimeError(f"head chain from {d} does not terminate")
    return chain


def clusters(st: ClusteringState) -> Dict[int, List[int]]:
    """簇头 → 沿簇头链到达它的全部成员（含簇头本身）"""
    members: Dict[int, List[int]] = {h: [] for h in st.clusterheads}
    for d in sorted(st.head):
        members[chain_of(st, d)[-1]].append(d)
    return members


def chain_depth(st: ClusteringState) -> int:
    """最长簇头链的跳数"""
    return max((len(chain_of(st, d)) - 1 for d in st.head), default=0)


def head_changes(a: ClusteringState, b: ClusteringState) -> int:
    """两个状态之间簇头选择不同的节点数"""
    return sum(1 for d, h in b.head.items() if a.head.get(d) != h)
