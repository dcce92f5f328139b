"""
可视化模块

包含分簇拓扑的图表展示与结果摘要
"""

from .visualizer import ClusterVisualizer, create_cluster_report

__all__ = ['ClusterVisualizer', 'create_cluster_report']
