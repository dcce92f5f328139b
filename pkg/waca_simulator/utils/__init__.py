"""
工具函数模块

包含异常类型和可复现随机种子的派生工具
"""

from .errors import (
    WacaError,
    ConfigurationError,
    UnknownNodeError,
    TopologyParseError,
)
from .seeding import derive_seed, make_rng

__all__ = [
    'WacaError',
    'ConfigurationError',
    'UnknownNodeError',
    'TopologyParseError',
    'derive_seed',
    'make_rng',
]
