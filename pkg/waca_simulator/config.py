"""配置管理模块"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .core.wca_baseline import WcaConfig
from .core.weight import WeightConfig
from .utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "WACA_OUTPUT_DIR"


class SimulationConfig:
    """仿真配置管理类"""

    def __init__(self, config_file: Optional[str] = None, search: bool = True):
        """
        初始化配置管理器

        Parameters
        ----------
        config_file : Optional[str]
            配置文件路径，如果不指定则按优先级查找默认配置文件
        search : bool
            未指定路径时是否查找默认配置文件
        """
        if config_file and not os.path.exists(config_file):
            raise ConfigurationError(f"配置文件不存在: {config_file}")
        self.config_file = self._find_config_file(config_file) if (config_file or search) else None
        self.config = self._load_config()

    def _find_config_file(self, config_file: Optional[str] = None) -> Optional[str]:
        """查找配置文件"""
        if config_file and os.path.exists(config_file):
            return config_file

        # 按优先级查找配置文件
        possible_files = [
            "waca_config.yaml",
            "waca_config.yml",
            "config.yaml",
            "config.yml",
            "local_config.yaml",
            "local_config.yml",
        ]

        # 在当前目录和项目根目录查找
        search_dirs = [
            os.getcwd(),
            Path(__file__).parent.parent,  # 项目根目录
        ]

        for search_dir in search_dirs:
            for filename in possible_files:
                filepath = os.path.join(search_dir, filename)
                if os.path.exists(filepath):
                    return filepath

        return None

    def _load_config(self) -> Dict[str, Any]:
        """加载配置文件"""
        if not self.config_file:
            return {}

        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"无法加载配置文件 {self.config_file}: {e}") from None
        if not isinstance(data, dict):
            raise ConfigurationError(f"配置文件顶层必须是映射: {self.config_file}")
        logger.info("loaded configuration from %s", self.config_file)
        return data

    def get_weight_config(self) -> WeightConfig:
        """获取 WACA 权重参数"""
        return WeightConfig.from_dict(self.config.get('weights'))

    def get_wca_config(self) -> WcaConfig:
        """获取 WCA 基线参数，未指定 ideal_degree 时与 WACA 的 dd_I 保持一致"""
        data = dict(self.config.get('wca') or {})
        data.setdefault('ideal_degree', self.get_weight_config().ideal_degree)
        return WcaConfig.from_dict(data)

    def get_sweep_settings(self) -> Dict[str, Any]:
        """获取扫描网格的覆盖项"""
        return dict(self.config.get('sweep') or {})

    def get_power_model(self) -> Optional[Dict[str, Any]]:
        return self.config.get('power_model')

    def get_signal_model(self) -> Optional[Dict[str, Any]]:
        return self.config.get('signal_model')

    def get_output_dir(self) -> str:
        """输出目录：环境变量优先，其次配置文件，最后当前目录"""
        return os.environ.get(OUTPUT_DIR_ENV) or self.config.get('output_dir') or "."

    def has_config(self) -> bool:
        """检查是否有有效的配置文件"""
        return self.config_file is not None and bool(self.config)

    def get_config_file_path(self) -> Optional[str]:
        """获取当前配置文件路径"""
        return self.config_file

    def get_full_config(self) -> Dict[str, Any]:
        """获取完整配置"""
        return self.config.copy()


# 全局配置实例
_global_config = None

def get_global_config() -> SimulationConfig:
    """获取全局配置实例"""
    global _global_config
    if _global_config is None:
        _global_config = SimulationConfig()
    return _global_config

def reload_config(config_file: Optional[str] = None) -> SimulationConfig:
    """重新加载配置"""
    global _global_config
    _global_config = SimulationConfig(config_file)
    return _global_config
