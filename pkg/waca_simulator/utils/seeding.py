"""
可复现随机数工具

所有随机过程都使用 numpy 的 PCG64 生成器，种子由 SHA-256 派生，
因此同一组参数在任何平台上得到相同的子流。
"""

from __future__ import annotations

import hashlib

import numpy as np

_SEED_MASK = (1 << 63) - 1


def derive_seed(*parts) -> int:
    """
    由任意参数组合派生一个 63 位种子

    Args:
        *parts: 参与哈希的参数，例如 (base_seed, n, range, run)

    Returns:
        非负整数种子
    """
    payload = "|".join(repr(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "big") & _SEED_MASK


def make_rng(seed: int) -> np.random.Generator:
    """创建 PCG64 生成器"""
    return np.random.Generator(np.random.PCG64(seed))
