"""
WACA 加权簇头选举仿真系统

本包实现了混合无线网络中基于加权分簇 (WACA) 的簇头选举、
WCA 基线对比、分块内容分发模型以及可复现的参数扫描实验。

主要模块:
- core: 核心算法模块 (几何网络模型, 权重函数, WACA 选举, WCA 基线, 内容分发)
- data: 属性模型与文件格式模块
- experiments: 参数扫描与趋势检验
- visualization: 可视化模块
- utils: 工具函数模块 (异常, 种子派生)

基本使用:
    from waca_simulator.core.netmodel import deploy_uniform
    from waca_simulator.core.waca import settle
    from waca_simulator.core.weight import WeightConfig
"""

__version__ = "1.0.0"

# 导入主要类和函数
from .core.netmodel import Node, Topology, deploy_uniform
from .core.weight import WeightConfig
from .core.waca import ClusteringState, Role, settle, apply_event
from .core.wca_baseline import WcaConfig, wca_elect
from .core.dissemination import ContentJob, disseminate
from .experiments import SweepConfig, run_sweep
from .visualization.visualizer import ClusterVisualizer, create_cluster_report

__all__ = [
    'Node',
    'Topology',
    'deploy_uniform',
    'WeightConfig',
    'ClusteringState',
    'Role',
    'settle',
    'apply_event',
    'WcaConfig',
    'wca_elect',
    'ContentJob',
    'disseminate',
    'SweepConfig',
    'run_sweep',
    'ClusterVisualizer',
    'create_cluster_report',
]
