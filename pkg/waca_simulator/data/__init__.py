"""
数据模块

包含节点属性模型（信号强度、电量）和拓扑/状态/事件的文件格式
"""

from .models import BaseAttributeModel, ATTRIBUTE_MODEL_REGISTRY, build_model
from .serialization import load_topology, save_topology, load_state, save_state, load_events

__all__ = [
    'BaseAttributeModel',
    'ATTRIBUTE_MODEL_REGISTRY',
    'build_model',
    'load_topology',
    'save_topology',
    'load_state',
    'save_state',
    'load_events',
]
