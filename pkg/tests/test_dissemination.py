"""
分块内容分发测试
"""

import pytest

from waca_simulator.core.dissemination import (
    BACKBONE,
    UNREACHABLE_ROUNDS,
    ContentJob,
    disseminate,
    injection_lower_bound,
    select_injection_points,
)
from waca_simulator.core.netmodel import Node, Topology, assign_signal, deploy_uniform, partitions
from waca_simulator.core.waca import settle
from waca_simulator.core.weight import WeightConfig
from waca_simulator.data.models import UniformModel
from waca_simulator.utils.errors import ConfigurationError, UnknownNodeError
from waca_simulator.utils.seeding import derive_seed, make_rng

CFG = WeightConfig()


def two_heads():
    """路径 0-1-2：两端是同一分区的两个簇头，中间节点感兴趣"""
    nodes = (Node(0, 0.0, 0.0, signal=0.9), Node(1, 10.0, 0.0, signal=0.1), Node(2, 20.0, 0.0, signal=0.9))
    t = Topology(nodes, 15.0)
    return t, settle(t, CFG)


def star(leaves=4):
    """中心 0 感兴趣，叶子互不相邻且都是簇头"""
    offsets = [(9.0, 0.0), (-9.0, 0.0), (0.0, 9.0), (0.0, -9.0)][:leaves]
    nodes = (Node(0, 50.0, 50.0, signal=0.0),) + tuple(
        Node(i + 1, 50.0 + dx, 50.0 + dy, signal=1.0) for i, (dx, dy) in enumerate(offsets)
    )
    t = Topology(nodes, 10.0)
    return t, settle(t, CFG)


def split_line():
    """路径 0-1-2-3-4，簇头为 0 和 4，节点 2 经 3 挂在 4 下"""
    signals = [1.0, 0.05, 0.0, 0.05, 0.9]
    t = Topology(tuple(Node(i, 10.0 * i, 0.0, signal=s) for i, s in enumerate(signals)), 15.0)
    return t, settle(t, CFG)


class TestContentJob:
    """测试分发任务参数"""

    @pytest.mark.parametrize("kwargs", [
        {"chunk_count": 0, "interested": {1}},
        {"chunk_count": 1, "interested": set()},
        {"chunk_count": 1, "interested": {1}, "uplink_rate": 0},
        {"chunk_count": 1, "interested": {1}, "adhoc_rate": 0},
        {"chunk_count": 1, "interested": {1}, "max_injection_points": 0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            ContentJob(**kwargs)

    def test_interested_frozen(self):
        job = ContentJob(chunk_count=2, interested=[3, 1, 3])
        assert job.interested == frozenset({1, 3})


class TestInjectionPoints:
    """测试注入点选择"""

    def test_single_cluster(self):
        t = Topology((Node(0, 0.0, 0.0, signal=0.1), Node(1, 5.0, 0.0, signal=0.9)), 10.0)
        st = settle(t, CFG)
        assert select_injection_points(st, t, ContentJob(1, {0})) == {1}

    def test_two_heads_same_partition(self):
        t, st = two_heads()
        assert st.clusterheads == [0, 2]
        assert select_injection_points(st, t, ContentJob(4, {1})) == {0, 2}

    def test_isolated_interested_node(self):
        t = Topology((Node(0, 0.0, 0.0), Node(1, 5.0, 0.0), Node(2, 90.0, 90.0)), 10.0)
        st = settle(t, CFG)
        assert select_injection_points(st, t, ContentJob(1, {2})) == {2}

    def test_partitions_without_interest_skipped(self):
        t = Topology((Node(0, 0.0, 0.0), Node(1, 90.0, 90.0)), 10.0)
        st = settle(t, CFG)
        assert select_injection_points(st, t, ContentJob(1, {0})) == {0}

    def test_max_injection_points_ranking(self):
        t, st = split_line()
        assert select_injection_points(st, t, ContentJob(1, {2})) == {0, 4}
        # 权重更高的 0 保留
        assert select_injection_points(st, t, ContentJob(1, {2}, max_injection_points=1)) == {0}

    def test_unknown_interested(self):
        t, st = two_heads()
        with pytest.raises(UnknownNodeError):
            select_injection_points(st, t, ContentJob(1, {42}))


class TestDisseminate:
    """测试同步轮次分发"""

    def test_single_node(self):
        t = Topology((Node(0, 1.0, 1.0),), 5.0)
        report = disseminate(t, settle(t, CFG), ContentJob(1, {0}))
        assert report.rounds == 1
        assert report.uplink_transmissions == 1
        assert report.adhoc_transmissions == 0
        assert report.completed

    def test_concurrent_injection(self):
        t, st = two_heads()
        job = ContentJob(chunk_count=4, interested={1}, uplink_rate=1)
        report = disseminate(t, st, job, seed=5)
        assert report.injection_points == {0, 2}
        assert report.injection_rounds == injection_lower_bound(4, 2, 1) == 2
        assert report.rounds == 2
        assert report.uplink_transmissions == 4
        # 第 2 轮节点 1 还会把 0 缺少的块回传给 0
        assert report.adhoc_transmissions == 5

        single = disseminate(t, st, ContentJob(4, {1}, max_injection_points=1), seed=5)
        assert single.injection_points == {0}
        assert single.rounds == 4
        assert single.rounds >= report.rounds

    def test_star_concurrency_benefit(self):
        t, st = star()
        assert st.clusterheads == [1, 2, 3, 4]
        rounds = []
        for m in (1, 2, 4):
            report = disseminate(t, st, ContentJob(8, {0}, max_injection_points=m), seed=1)
            assert report.completed
            assert report.uplink_transmissions >= 8
            rounds.append(report.rounds)
        assert rounds == sorted(rounds, reverse=True)
        assert rounds == [8, 4, 2]

    def test_path_to_other_cluster_relays(self):
        """注入点 0 与节点 2 不在同一条簇头链上，连接路径上的 1 仍参与转发"""
        t, st = split_line()
        assert st.head[2] == 3 and st.head[3] == 4
        single = disseminate(t, st, ContentJob(3, {2}, max_injection_points=1))
        assert single.injection_points == {0}
        assert single.completed
        # 最后一块第 3 轮注入，再经 1 转发一跳
        assert single.rounds == injection_lower_bound(3, 1, 1) + 1 == 4

        both = disseminate(t, st, ContentJob(3, {2}))
        assert both.injection_points == {0, 4}
        assert both.completed

    def test_unreachable_reported(self, caplog):
        """状态早于节点 9 加入，它所在的分区没有簇头"""
        line, st = split_line()
        t = line.with_node(Node(9, 90.0, 90.0))
        report = disseminate(t, st, ContentJob(3, {2, 9}))
        assert report.injection_points == {0, 4}
        assert not report.completed
        assert report.incomplete == [9]
        assert report.rounds == UNREACHABLE_ROUNDS
        assert "could not be completed" in caplog.text

    def test_head_chain_relays(self):
        """两个簇的簇头链覆盖整条路径"""
        t, st = split_line()
        report = disseminate(t, st, ContentJob(3, {1, 2}))
        assert report.completed
        assert report.injection_points == {0, 4}
        assert report.rounds >= injection_lower_bound(3, 2, 1)

    def test_trace_events(self):
        t, st = two_heads()
        report = disseminate(t, st, ContentJob(2, {1}), seed=3, trace=True)
        kinds = [e["kind"] for e in report.trace]
        assert kinds.count("inject") == report.uplink_transmissions
        assert kinds.count("forward") == report.adhoc_transmissions
        assert all(e["from"] == BACKBONE for e in report.trace if e["kind"] == "inject")
        assert disseminate(t, st, ContentJob(2, {1}), seed=3).trace == []

    def test_deterministic_per_seed(self):
        t = deploy_uniform(25, 100.0, 8).with_range(35.0)
        t = assign_signal(t, UniformModel(0.0, 1.0), 9)
        st = settle(t, CFG)
        job = ContentJob(6, {0, 5, 10}, relay_all=True)
        a = disseminate(t, st, job, seed=11, trace=True)
        b = disseminate(t, st, job, seed=11, trace=True)
        assert a == b

    def test_report_dict(self):
        t, st = two_heads()
        data = disseminate(t, st, ContentJob(4, {1})).to_dict()
        assert data["injection_points"] == [0, 2]
        assert data["completed"] is True
        assert data["incomplete"] == []

    def test_completion_on_connected_instances(self):
        """全部设备转发时，连通分区中的感兴趣设备都能收齐"""
        rng = make_rng(31)
        for case in range(200):
            n = int(rng.integers(2, 31))
            t = deploy_uniform(n, 100.0, derive_seed("dissem", case)).with_range(45.0)
            t = assign_signal(t, UniformModel(0.0, 1.0), derive_seed("dissem-signal", case))
            part = max(partitions(t), key=len)
            t = t.with_nodes(node for node in t.nodes if node.id in part)
            st = settle(t, CFG)
            ids = list(t.ids)
            k = int(rng.integers(1, len(ids) + 1))
            interested = set(int(x) for x in rng.choice(ids, size=k, replace=False))
            K = int(rng.integers(1, 6))
            U = int(rng.integers(1, 3))
            job = ContentJob(K, interested, uplink_rate=U, adhoc_rate=int(rng.integers(1, 3)),
                             relay_all=True)
            report = disseminate(t, st, job, seed=case)
            assert report.completed
            assert report.uplink_transmissions >= K
            m = len(report.injection_points)
            assert set(report.injection_points) <= set(st.clusterheads)
            assert report.rounds >= injection_lower_bound(K, m, U)

    def test_completion_with_default_relays(self):
        """默认转发集合下，连通分区中的感兴趣设备也都能收齐"""
        rng = make_rng(47)
        for case in range(200):
            n = int(rng.integers(2, 41))
            t = deploy_uniform(n, 100.0, derive_seed("relay", case)).with_range(30.0)
            t = assign_signal(t, UniformModel(0.0, 1.0), derive_seed("relay-signal", case))
            part = max(partitions(t), key=len)
            t = t.with_nodes(node for node in t.nodes if node.id in part)
            st = settle(t, CFG)
            ids = list(t.ids)
            k = int(rng.integers(1, min(len(ids), 4) + 1))
            interested = set(int(x) for x in rng.choice(ids, size=k, replace=False))
            limit = [None, 1, 2][int(rng.integers(0, 3))]
            job = ContentJob(int(rng.integers(1, 6)), interested, max_injection_points=limit)
            report = disseminate(t, st, job, seed=case)
            assert report.completed, (case, sorted(interested), st.clusterheads)
            assert report.rounds >= injection_lower_bound(
                job.chunk_count, len(report.injection_points), job.uplink_rate
            )


if __name__ == "__main__":
    pytest.main([__file__])
