"""File formats: topology/state JSON, DOT graphs, line-delimited event scripts."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Union

from ..core.netmodel import Node, Topology
from ..core.waca import (
    EVENT_REGISTRY,
    AttributeChanged,
    ClusteringState,
    NodeAdded,
    NodeMoved,
    NodeRemoved,
    Role,
    TopologyEvent,
)
from ..utils.errors import TopologyParseError, WacaError

PathLike = Union[str, Path]

# Graphviz 颜色：簇头、子簇头、从节点
ROLE_COLORS = {
    Role.CLUSTERHEAD: "#d62728",
    Role.SUBHEAD: "#ff7f0e",
    Role.SLAVE: "#1f77b4",
}


def dumps(data: Any) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: PathLike, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data), encoding="utf-8")
    return path


def _read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise TopologyParseError(f"cannot read file: {e.strerror}", source=str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise TopologyParseError(e.msg, source=str(path), line=e.lineno) from None


# ---- 拓扑 ----


def topology_to_dict(t: Topology) -> Dict[str, Any]:
    return {
        "side": t.side,
        "range": t.range,
        "nodes": [
            {"id": n.id, "x": n.x, "y": n.y, "power_ratio": n.power_ratio, "signal": n.signal}
            for n in t.nodes
        ],
    }


def _node_from_dict(item: Mapping[str, Any]) -> Node:
    return Node(
        id=int(item["id"]),
        x=float(item["x"]),
        y=float(item["y"]),
        power_ratio=float(item.get("power_ratio", 1.0)),
        signal=float(item.get("signal", 1.0)),
    )


def topology_from_dict(
    data: Mapping[str, Any],
    source: Optional[str] = None,
    range: Optional[float] = None,
) -> Topology:
    """
    解析拓扑 JSON 文档

    Args:
        data: {side, range, nodes: [{id, x, y, power_ratio, signal}]}
        source: 来源文件名，用于错误信息
        range: 覆盖文档中的传输范围
    """
    if not isinstance(data, Mapping):
        raise TopologyParseError("topology document must be a JSON object", source=source)
    try:
        nodes = [_node_from_dict(item) for item in data["nodes"]]
        r = float(range if range is not None else data["range"])
        return Topology(tuple(nodes), r, side=float(data.get("side", 100.0)))
    except KeyError as e:
        raise TopologyParseError(f"missing field {e}", source=source) from None
    except (TypeError, ValueError) as e:
        raise TopologyParseError(str(e), source=source) from None


def save_topology(path: PathLike, t: Topology) -> Path:
    return write_json(path, topology_to_dict(t))


def load_topology(path: PathLike, range: Optional[float] = None) -> Topology:
    return topology_from_dict(_read_json(path), source=str(path), range=range)


# ---- 选举状态 ----


def state_to_dict(st: ClusteringState) -> Dict[str, Any]:
    """{weights, heads, roles, beacons} 加上复现增量更新所需的 N'(d) 记忆"""
    return {
        "weights": {str(d): w for d, w in sorted(st.weight.items())},
        "heads": {str(d): h for d, h in sorted(st.head.items())},
        "roles": {str(d): r.value for d, r in sorted(st.roles.items())},
        "beacons": st.beacon_count,
        "settled": st.settled,
        "rounds": st.rounds,
        "prev_neighborhood": {
            str(d): sorted(m) for d, m in sorted(st.prev_neighborhood.items())
        },
    }


def state_from_dict(data: Mapping[str, Any], source: Optional[str] = None) -> ClusteringState:
    try:
        return ClusteringState(
            weight={int(d): float(w) for d, w in data["weights"].items()},
            head={int(d): int(h) for d, h in data["heads"].items()},
            prev_neighborhood={
                int(d): frozenset(int(x) for x in m)
                for d, m in data.get("prev_neighborhood", {}).items()
            },
            beacon_count=int(data.get("beacons", 0)),
            settled=bool(data.get("settled", True)),
            rounds=int(data.get("rounds", 0)),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise TopologyParseError(f"malformed state: {e}", source=source) from None


def save_state(path: PathLike, st: ClusteringState) -> Path:
    return write_json(path, state_to_dict(st))


def load_state(path: PathLike) -> ClusteringState:
    return state_from_dict(_read_json(path), source=str(path))


# ---- DOT ----


def to_dot(t: Topology, st: Optional[ClusteringState] = None, name: str = "topology") -> str:
    """
    生成 Graphviz DOT 文本

    节点标签为 id；给出状态时按角色着色，并用带箭头的粗边画出 d → c(d)。
    """
    roles = st.roles if st is not None else {}
    lines = [f"graph {name} {{", "  node [shape=circle, style=filled, fontsize=10];"]
    for n in t.nodes:
        attrs = [f'label="{n.id}"', f'pos="{n.x:.3f},{n.y:.3f}!"']
        role = roles.get(n.id)
        if role is not None:
            attrs.append(f'fillcolor="{ROLE_COLORS[role]}"')
            attrs.append(f'xlabel="{role.value}"')
        else:
            attrs.append('fillcolor="#dddddd"')
        lines.append(f"  {n.id} [{', '.join(attrs)}];")
    heads = st.head if st is not None else {}
    for d in t.ids:
        for e in sorted(t.neighbors(d)):
            if e <= d:
                continue
            if heads.get(d) == e:
                lines.append(f"  {d} -- {e} [dir=forward, penwidth=2.5];")
            elif heads.get(e) == d:
                lines.append(f"  {e} -- {d} [dir=forward, penwidth=2.5];")
            else:
                lines.append(f"  {d} -- {e} [color=gray70];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(path: PathLike, t: Topology, st: Optional[ClusteringState] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_dot(t, st), encoding="utf-8")
    return path


# ---- 事件脚本 ----


def event_from_dict(item: Mapping[str, Any]) -> TopologyEvent:
    kind = item.get("kind")
    if kind not in EVENT_REGISTRY:
        raise ValueError(f"unknown event kind {kind!r}")
    if kind == NodeMoved.kind:
        return NodeMoved(int(item["id"]), float(item["x"]), float(item["y"]))
    if kind == NodeRemoved.kind:
        return NodeRemoved(int(item["id"]))
    if kind == NodeAdded.kind:
        return NodeAdded(_node_from_dict(item))
    power = item.get("power_ratio")
    signal = item.get("signal")
    if power is None and signal is None:
        raise ValueError("attribute-changed needs power_ratio and/or signal")
    return AttributeChanged(
        int(item["id"]),
        power_ratio=None if power is None else float(power),
        signal=None if signal is None else float(signal),
    )


def parse_events(lines: Iterable[str], source: Optional[str] = None) -> List[TopologyEvent]:
    """
    解析逐行 JSON 事件脚本，空行和 # 开头的行被忽略

    Raises:
        TopologyParseError: 指出出错的行号
    """
    events = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            events.append(event_from_dict(json.loads(text)))
        except json.JSONDecodeError as e:
            raise TopologyParseError(e.msg, source=source, line=lineno) from None
        except KeyError as e:
            raise TopologyParseError(f"missing field {e}", source=source, line=lineno) from None
        except (TypeError, ValueError, AttributeError, WacaError) as e:
            raise TopologyParseError(str(e), source=source, line=lineno) from None
    return events


def load_events(path: PathLike) -> List[TopologyEvent]:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return parse_events(f, source=str(path))
    except OSError as e:
        raise TopologyParseError(f"cannot read file: {e.strerror}", source=str(path)) from None


def write_jsonl(path: PathLike, records: Iterable[Mapping[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True) + "\n")
    return path
