"""
分块内容分发模型

骨干网把文件切成若干块，并发注入同一分区内的多个簇头（注入点），
再沿簇头链和邻居交换把数据块传给感兴趣的设备。按同步轮次模拟。
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from ..utils.errors import ConfigurationError, UnknownNodeError
from ..utils.seeding import make_rng
from .netmodel import Topology, partitions
from .waca import ClusteringState, chain_of

logger = logging.getLogger(__name__)

BACKBONE = "backbone"
UNREACHABLE_ROUNDS = -1


@dataclass(frozen=True)
class ContentJob:
    """
    一次分发任务

    Args:
        chunk_count: 数据块数量 K
        interested: 感兴趣的设备集合
        uplink_rate: 每个注入点每轮可接收的数据块数 U
        adhoc_rate: 每个设备每轮可发送的 (块, 邻居) 对数 A
        max_injection_points: 每个分区最多使用的注入点数，None 表示不限
        relay_all: 所有设备都参与转发；默认只有感兴趣设备、注入点，
            以及连接二者的路径和这些路径节点的簇头链参与转发
    """

    chunk_count: int
    interested: FrozenSet[int]
    uplink_rate: int = 1
    adhoc_rate: int = 1
    max_injection_points: Optional[int] = None
    relay_all: bool = False

    def __post_init__(self):
        object.__setattr__(self, "interested", frozenset(self.interested))
        if self.chunk_count < 1:
            raise ConfigurationError(f"chunk_count must be >= 1, got {self.chunk_count}")
        if not self.interested:
            raise ConfigurationError("a content job needs at least one interested device")
        if self.uplink_rate < 1 or self.adhoc_rate < 1:
            raise ConfigurationError("uplink_rate and adhoc_rate must be >= 1")
        if self.max_injection_points is not None and self.max_injection_points < 1:
            raise ConfigurationError("max_injection_points must be >= 1")


@dataclass
class DisseminationReport:
    """分发结果统计"""

    rounds: int
    uplink_transmissions: int
    adhoc_transmissions: int
    injection_points: FrozenSet[int]
    injection_rounds: int = 0
    completed: bool = True
    incomplete: List[int] = field(default_factory=list)
    trace: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "uplink_transmissions": self.uplink_transmissions,
            "adhoc_transmissions": self.adhoc_transmissions,
            "injection_points": sorted(self.injection_points),
            "injection_rounds": self.injection_rounds,
            "completed": self.completed,
            "incomplete": list(self.incomplete),
        }


def _check_ids(t: Topology, ids: Iterable[int]) -> None:
    for d in ids:
        if d not in t:
            raise UnknownNodeError(d)


def _injection_points_by_partition(
    st: ClusteringState, t: Topology, job: ContentJob
) -> List[Tuple[FrozenSet[int], List[int]]]:
    """每个含感兴趣设备的分区 → (分区, 按 id 排序的注入点)；没有簇头的分区跳过"""
    _check_ids(t, job.interested)
    groups = []
    for part in partitions(t):
        if not part & job.interested:
            continue
        heads = [d for d in part if st.head.get(d) == d]
        # 按权重降序、id 升序排名，截断后再按 id 排序用于轮转分配
        heads.sort(key=lambda d: (-st.weight.get(d, 0.0), d))
        if job.max_injection_points is not None:
            heads = heads[: job.max_injection_points]
        if heads:
            groups.append((frozenset(part), sorted(heads)))
    return groups


def select_injection_points(
    st: ClusteringState, t: Topology, job: ContentJob
) -> FrozenSet[int]:
    """
    选择注入点

    所有所在分区内至少有一个感兴趣设备的簇头；同一分区的多个簇头全部保留。
    """
    return frozenset(d for _, heads in _injection_points_by_partition(st, t, job) for d in heads)


def _relays(
    st: ClusteringState,
    t: Topology,
    job: ContentJob,
    groups: List[Tuple[FrozenSet[int], List[int]]],
) -> Set[int]:
    if job.relay_all:
        return set(t.ids)
    relays: Set[int] = set()
    for part, heads in groups:
        wanted = sorted(part & job.interested)
        relays.update(heads)
        relays.update(wanted)
        for ip in heads:
            # 每个注入点都必须连到分区内每个感兴趣设备
            paths = nx.single_source_shortest_path(t.graph, ip)
            for d in wanted:
                for x in paths[d]:
                    relays.add(x)
                    if x in st.head:
                        relays.update(chain_of(st, x))
    return relays


def disseminate(
    t: Topology,
    st: ClusteringState,
    job: ContentJob,
    seed: int = 0,
    trace: bool = False,
) -> DisseminationReport:
    """
    模拟分块分发

    每轮先由骨干网向每个注入点推送至多 U 个尚未注入的数据块（块在同一分区的
    注入点之间轮转分配，分配顺序由 seed 决定），再由持有数据块的设备向缺少该块
    的参与转发邻居发送至多 A 个 (块, 邻居) 对，顺序按 (发送者, 接收者, 块号)。

    Args:
        t: 拓扑
        st: 已收敛的选举状态
        job: 分发任务
        seed: 决定数据块注入顺序的随机种子
        trace: 是否记录逐轮事件

    Returns:
        DisseminationReport；无法完成的设备记录在 incomplete 中，rounds 为 -1
    """
    groups = _injection_points_by_partition(st, t, job)
    ips = sorted(d for _, heads in groups for d in heads)
    relays = _relays(st, t, job, groups)
    K = job.chunk_count

    rng = make_rng(seed)
    queues: Dict[int, List[int]] = {d: [] for d in ips}
    for _, heads in groups:
        order = [int(c) for c in rng.permutation(K)]
        for i, chunk in enumerate(order):
            queues[heads[i % len(heads)]].append(chunk)

    targets = sorted(job.interested)
    holdings: Dict[int, Set[int]] = {d: set() for d in t.ids}
    events: List[dict] = []
    uplink = adhoc = rounds = injection_rounds = 0

    def done() -> bool:
        return all(len(holdings[d]) == K for d in targets)

    while not done():
        rounds += 1
        progress = False

        injected = False
        for ip in ips:
            batch, queues[ip] = queues[ip][: job.uplink_rate], queues[ip][job.uplink_rate:]
            for chunk in batch:
                holdings[ip].add(chunk)
                uplink += 1
                injected = True
                if trace:
                    events.append(
                        {"round": rounds, "kind": "inject", "from": BACKBONE, "to": ip, "chunk": chunk}
                    )
        if injected:
            injection_rounds = rounds
            progress = True

        scheduled: Set[Tuple[int, int]] = set()
        transfers: List[Tuple[int, int, int]] = []
        for sender in sorted(d for d in t.ids if holdings[d]):
            budget = job.adhoc_rate
            for receiver in sorted(t.neighbors(sender)):
                if budget == 0:
                    break
                if receiver not in relays:
                    continue
                for chunk in sorted(holdings[sender] - holdings[receiver]):
                    if (receiver, chunk) in scheduled:
                        continue
                    scheduled.add((receiver, chunk))
                    transfers.append((sender, receiver, chunk))
                    budget -= 1
                    if budget == 0:
                        break
        for sender, receiver, chunk in transfers:
            holdings[receiver].add(chunk)
            adhoc += 1
            if trace:
                events.append(
                    {"round": rounds, "kind": "forward", "from": sender, "to": receiver, "chunk": chunk}
                )
        if transfers:
            progress = True

        if not progress:
            break

    incomplete = sorted(d for d in job.interested if len(holdings[d]) < K)
    completed = not incomplete
    if not completed:
        logger.warning("%d interested devices could not be completed: %s", len(incomplete), incomplete)
        rounds = UNREACHABLE_ROUNDS
    return DisseminationReport(
        rounds=rounds,
        uplink_transmissions=uplink,
        adhoc_transmissions=adhoc,
        injection_points=frozenset(ips),
        injection_rounds=injection_rounds,
        completed=completed,
        incomplete=incomplete,
        trace=events,
    )


def injection_lower_bound(chunk_count: int, injection_points: int, uplink_rate: int) -> int:
    """注入阶段至少需要的轮数 ceil(K / (m·U))"""
    return math.ceil(chunk_count / (injection_points * uplink_rate))
