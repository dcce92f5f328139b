"""
核心算法模块

包含几何网络模型、WACA 权重函数与选举、WCA 基线和分块内容分发的实现
"""

from .netmodel import Node, Deployment, Topology, deploy_uniform, partitions
from .weight import WeightConfig, node_weight
from .waca import ClusteringState, Role, elect, settle, apply_event, apply_events
from .wca_baseline import WcaConfig, WcaResult, wca_elect
from .dissemination import ContentJob, DisseminationReport, disseminate

__all__ = [
    'Node',
    'Deployment',
    'Topology',
    'deploy_uniform',
    'partitions',
    'WeightConfig',
    'node_weight',
    'ClusteringState',
    'Role',
    'elect',
    'settle',
    'apply_event',
    'apply_events',
    'WcaConfig',
    'WcaResult',
    'wca_elect',
    'ContentJob',
    'DisseminationReport',
    'disseminate',
]
