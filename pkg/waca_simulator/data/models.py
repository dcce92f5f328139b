"""Attribute models that generate P(d) and backbone signal strength per node."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Dict, Mapping, Sequence, Tuple

import numpy as np

from ..utils.errors import ConfigurationError


class BaseAttributeModel(ABC):
    """Abstract base class for per-node attribute generators."""

    kind: str = ""
    # 该模型可以生成的节点属性
    attributes: Tuple[str, ...] = ("signal", "power_ratio")

    @abstractmethod
    def sample(self, positions: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Return one value per row of ``positions``."""

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """Return the settings dict this model can be rebuilt from."""

    def check_attribute(self, attribute: str) -> None:
        if attribute not in self.attributes:
            raise ConfigurationError(
                f"attribute model '{self.kind}' cannot generate '{attribute}'"
            )
        if attribute == "signal":
            low, high = self.bounds()
            if low < 0.0 or high > 1.0:
                raise ConfigurationError(
                    f"signal model '{self.kind}' produces values outside [0, 1]"
                )

    def bounds(self) -> Tuple[float, float]:
        """Closed interval that contains every sampled value."""
        return (0.0, 1.0)

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.describe().items() if k != "kind")
        return f"{type(self).__name__}({params})"


class ConstantModel(BaseAttributeModel):
    """Every node gets the same value."""

    kind = "constant"

    def __init__(self, value: float = 1.0):
        if value < 0:
            raise ConfigurationError(f"constant value must be >= 0, got {value}")
        self.value = float(value)

    def sample(self, positions: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return np.full(len(positions), self.value)

    def bounds(self) -> Tuple[float, float]:
        return (self.value, self.value)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "value": self.value}


class UniformModel(BaseAttributeModel):
    """i.i.d. uniform values in [low, high]."""

    kind = "uniform"

    def __init__(self, low: float = 0.0, high: float = 1.0):
        if not 0 <= low <= high:
            raise ConfigurationError(
                f"uniform model needs 0 <= low <= high, got low={low}, high={high}"
            )
        self.low = float(low)
        self.high = float(high)

    def sample(self, positions: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=len(positions))

    def bounds(self) -> Tuple[float, float]:
        return (self.low, self.high)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "low": self.low, "high": self.high}


class BaseStationModel(BaseAttributeModel):
    """
    基站信号模型

    s = max over stations of max(0, 1 - dist / bs_range)，结果截断到 [0, 1]。
    """

    kind = "base-stations"
    attributes = ("signal",)

    def __init__(self, stations: Sequence[Sequence[float]], bs_range: float):
        if bs_range <= 0:
            raise ConfigurationError(f"bs_range must be > 0, got {bs_range}")
        self.stations = np.asarray(stations, dtype=float).reshape(-1, 2)
        if len(self.stations) == 0:
            raise ConfigurationError("base-stations model needs at least one station")
        self.bs_range = float(bs_range)

    def sample(self, positions: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if len(positions) == 0:
            return np.zeros(0)
        diff = positions[:, None, :] - self.stations[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=2))
        strength = np.maximum(0.0, 1.0 - dist / self.bs_range).max(axis=1)
        return np.clip(strength, 0.0, 1.0)

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "stations": self.stations.tolist(),
            "bs_range": self.bs_range,
        }


ATTRIBUTE_MODEL_REGISTRY = {
    "constant": ConstantModel,
    "uniform": UniformModel,
    "uniform-random": UniformModel,
    "base-stations": BaseStationModel,
}


def build_model(settings: Mapping[str, Any]) -> BaseAttributeModel:
    """
    由配置字典构造属性模型

    Args:
        settings: 形如 {"kind": "uniform", "low": 0.7, "high": 4.0} 的字典

    Returns:
        对应的模型实例
    """
    if isinstance(settings, BaseAttributeModel):
        return settings
    params = dict(settings)
    kind = params.pop("kind", None)
    if kind not in ATTRIBUTE_MODEL_REGISTRY:
        raise ConfigurationError(f"Unsupported attribute model: {kind}")
    try:
        return ATTRIBUTE_MODEL_REGISTRY[kind](**params)
    except TypeError as e:
        raise ConfigurationError(f"bad parameters for '{kind}' model: {e}") from None
