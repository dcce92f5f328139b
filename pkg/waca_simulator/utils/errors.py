"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations

from typing import Optional


class WacaError(Exception):
    """Base class for every error raised by waca_simulator."""


class ConfigurationError(WacaError, ValueError):
    """参数、网格或属性模型配置不合法"""


class UnknownNodeError(WacaError, KeyError):
    """拓扑中不存在的节点 id"""

    def __init__(self, node_id):
        super().__init__(node_id)
        self.node_id = node_id

    def __str__(self) -> str:
        return f"unknown node id: {self.node_id!r}"


class TopologyParseError(WacaError, ValueError):
    """拓扑、状态或事件脚本无法解析

    Args:
        message: 错误描述
        source: 输入文件名（可选）
        line: 出错的行号，从 1 开始（可选）
    """

    def __init__(
        self,
        message: str,
        source: Optional[str] = None,
        line: Optional[int] = None,
    ):
        self.message = message
        self.source = source
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.source or "<input>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        return f"{where}: {self.message}"
