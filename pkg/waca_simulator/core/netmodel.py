"""
几何网络模型
节点部署、邻居计算、局部聚类系数与连通分区
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Tuple

import networkx as nx
import numpy as np
from scipy.spatial.distance import pdist, squareform

from ..utils.errors import ConfigurationError, UnknownNodeError
from ..utils.seeding import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Node:
    """
    网络中的一个设备

    Args:
        id: 节点标识，拓扑内唯一
        x, y: 部署平面上的坐标
        power_ratio: 可用电量 / 注入点任务所需电量估计 P(d)
        signal: 骨干网信号强度 s，取值 [0, 1]
    """

    id: int
    x: float
    y: float
    power_ratio: float = 1.0
    signal: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.signal <= 1.0:
            raise ConfigurationError(
                f"node {self.id}: signal must lie in [0, 1], got {self.signal}"
            )
        if self.power_ratio < 0.0:
            raise ConfigurationError(
                f"node {self.id}: power_ratio must be >= 0, got {self.power_ratio}"
            )

    @property
    def pos(self) -> Tuple[float, float]:
        return (self.x, self.y)


def _sorted_nodes(nodes: Iterable[Node]) -> Tuple[Node, ...]:
    ordered = tuple(sorted(nodes, key=lambda n: n.id))
    ids = [n.id for n in ordered]
    if len(set(ids)) != len(ids):
        raise ConfigurationError("node ids must be unique within a topology")
    return ordered


@dataclass(frozen=True)
class Deployment:
    """尚未指定传输范围的节点部署"""

    nodes: Tuple[Node, ...]
    side: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "nodes", _sorted_nodes(self.nodes))

    @property
    def positions(self) -> np.ndarray:
        return np.array([n.pos for n in self.nodes], dtype=float).reshape(-1, 2)

    def with_range(self, range: float) -> "Topology":
        return Topology(self.nodes, range, side=self.side)


@dataclass(frozen=True)
class Topology:
    """
    节点集合加传输范围 r，诱导出对称的邻接关系

    构造后不可变；邻接、距离矩阵和聚类系数按需计算并缓存，
    可以在并发的实验进程之间共享。
    """

    nodes: Tuple[Node, ...]
    range: float
    side: float = 100.0

    def __post_init__(self):
        if not (self.range > 0 and math.isfinite(self.range)):
            raise ConfigurationError(f"range must be a finite value > 0, got {self.range}")
        object.__setattr__(self, "nodes", _sorted_nodes(self.nodes))

    # ---- 基本查询 ----

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node_id) -> bool:
        return node_id in self._index

    @cached_property
    def ids(self) -> Tuple[int, ...]:
        return tuple(n.id for n in self.nodes)

    @cached_property
    def _index(self) -> Dict[int, int]:
        return {n.id: i for i, n in enumerate(self.nodes)}

    def node(self, node_id: int) -> Node:
        try:
            return self.nodes[self._index[node_id]]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    @cached_property
    def positions(self) -> np.ndarray:
        if not self.nodes:
            return np.zeros((0, 2))
        return np.array([n.pos for n in self.nodes], dtype=float)

    @cached_property
    def distances(self) -> np.ndarray:
        """精确欧氏距离矩阵（按 id 升序排列）"""
        n = len(self.nodes)
        if n < 2:
            return np.zeros((n, n))
        return squareform(pdist(self.positions, metric="euclidean"))

    @cached_property
    def adjacency(self) -> Dict[int, FrozenSet[int]]:
        # 严格不等式 dist < r，距离恰好为 r 的节点不是邻居
        within = self.distances < self.range
        np.fill_diagonal(within, False)
        ids = self.ids
        return {
            ids[i]: frozenset(ids[j] for j in np.flatnonzero(within[i]))
            for i in range(len(ids))
        }

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.ids)
        for d, nbrs in self.adjacency.items():
            g.add_edges_from((d, e) for e in nbrs if e > d)
        return g

    @cached_property
    def clustering(self) -> Dict[int, float]:
        # nx.clustering 对度数 < 2 的节点返回 0
        return {d: float(c) for d, c in nx.clustering(self.graph).items()}

    def neighbors(self, node_id: int) -> FrozenSet[int]:
        try:
            return self.adjacency[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def degree(self, node_id: int) -> int:
        return len(self.neighbors(node_id))

    def distance(self, a: int, b: int) -> float:
        ia, ib = self._index.get(a), self._index.get(b)
        if ia is None:
            raise UnknownNodeError(a)
        if ib is None:
            raise UnknownNodeError(b)
        return float(self.distances[ia, ib])

    def min_pairwise_distance(self) -> float:
        if len(self.nodes) < 2:
            return math.inf
        return float(pdist(self.positions).min())

    # ---- 不可变更新 ----

    def with_range(self, range: float) -> "Topology":
        return Topology(self.nodes, range, side=self.side)

    def with_nodes(self, nodes: Iterable[Node]) -> "Topology":
        return Topology(tuple(nodes), self.range, side=self.side)

    def replace_node(self, node_id: int, **changes) -> "Topology":
        current = self.node(node_id)
        return self.with_nodes(
            replace(current, **changes) if n.id == node_id else n for n in self.nodes
        )

    def without_node(self, node_id: int) -> "Topology":
        self.node(node_id)
        return self.with_nodes(n for n in self.nodes if n.id != node_id)

    def with_node(self, node: Node) -> "Topology":
        if node.id in self:
            raise ConfigurationError(f"node id {node.id} already present")
        return self.with_nodes(self.nodes + (node,))


def deploy_uniform(n: int, side: float, seed: int) -> Deployment:
    """
    在 [0, side]² 内均匀随机部署 n 个节点

    Args:
        n: 节点数 (>= 1)
        side: 正方形边长 (> 0)
        seed: 随机种子，相同种子得到逐位相同的坐标

    Returns:
        id 为 0..n-1 的 Deployment
    """
    if int(n) != n or n < 1:
        raise ConfigurationError(f"n must be an integer >= 1, got {n}")
    if not (side > 0 and math.isfinite(side)):
        raise ConfigurationError(f"side must be a finite value > 0, got {side}")
    logger.debug("deploying %d nodes on a %.1f square (seed=%d)", n, side, seed)
    rng = make_rng(seed)
    coords = rng.uniform(0.0, side, size=(int(n), 2))
    nodes = tuple(Node(i, float(x), float(y)) for i, (x, y) in enumerate(coords))
    return Deployment(nodes, side=float(side))


def neighbors(t: Topology, d: int) -> FrozenSet[int]:
    """N(d)：与 d 距离严格小于 r 的其他节点"""
    return t.neighbors(d)


def local_clustering_coefficient(t: Topology, d: int) -> float:
    """
    局部聚类系数 c_L

    邻居之间实际存在的链路数 / k(k-1)/2，k = |N(d)|；k < 2 时为 0。
    """
    t.node(d)
    return t.clustering[d]


def partitions(t: Topology) -> List[FrozenSet[int]]:
    """连通分区，按各分区最小 id 排序"""
    parts = [frozenset(c) for c in nx.connected_components(t.graph)]
    return sorted(parts, key=min)


def partition_of(t: Topology) -> Dict[int, int]:
    """节点 id → 分区序号"""
    return {d: i for i, part in enumerate(partitions(t)) for d in part}


def _assign(t, model, seed: int, attribute: str):
    model.check_attribute(attribute)
    values = model.sample(t.positions, make_rng(seed))
    nodes = [
        replace(node, **{attribute: float(v)}) for node, v in zip(t.nodes, values)
    ]
    if isinstance(t, Deployment):
        return Deployment(tuple(nodes), side=t.side)
    return t.with_nodes(nodes)


def assign_signal(t, model, seed: int):
    """
    按信号模型为每个节点设置骨干信号强度 s

    Args:
        t: Topology 或 Deployment
        model: 属性模型（见 ``waca_simulator.data.models``）
        seed: 随机种子

    Returns:
        与输入同类型的新对象
    """
    return _assign(t, model, seed, "signal")


def assign_power(t, model, seed: int):
    """按电量模型为每个节点设置 P(d)"""
    return _assign(t, model, seed, "power_ratio")
