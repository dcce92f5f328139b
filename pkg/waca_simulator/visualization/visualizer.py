"""
可视化模块
绘制分簇后的拓扑：邻接边、簇头指针与按角色着色的节点
"""

from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from ..core.netmodel import Topology
from ..core.waca import ClusteringState, Role, chain_depth, clusters
from ..data.serialization import ROLE_COLORS

# 设置matplotlib参数
plt.rcParams['font.family'] = 'sans-serif'
plt.rcParams['figure.dpi'] = 110

ROLE_LABELS = {
    Role.CLUSTERHEAD: 'Clusterhead (CH)',
    Role.SUBHEAD: 'Sub-head (SH)',
    Role.SLAVE: 'Slave (SL)',
}


class ClusterVisualizer:
    """分簇拓扑可视化器"""

    def __init__(self, figsize: tuple = (8, 8)):
        """
        初始化可视化器

        Args:
            figsize: 图表尺寸
        """
        self.figsize = figsize

    def plot_topology(self,
                      topology: Topology,
                      state: Optional[ClusteringState] = None,
                      path: Optional[Union[str, Path]] = None,
                      title: Optional[str] = None) -> plt.Figure:
        """
        绘制拓扑与选举结果

        Args:
            topology: 拓扑
            state: 选举状态，为 None 时只画部署与邻接
            path: 输出图片路径，为 None 时只返回 Figure
            title: 图表标题

        Returns:
            matplotlib Figure
        """
        fig, ax = plt.subplots(figsize=self.figsize)
        pos = {n.id: n.pos for n in topology.nodes}

        # 邻接边
        for d in topology.ids:
            for e in topology.neighbors(d):
                if e > d:
                    ax.plot([pos[d][0], pos[e][0]], [pos[d][1], pos[e][1]],
                            color='lightgray', linewidth=0.8, zorder=1)

        if state is None:
            ax.scatter([p[0] for p in pos.values()], [p[1] for p in pos.values()],
                       s=60, color='gray', zorder=3)
        else:
            # 簇头指针 d → c(d)
            for d, h in state.head.items():
                if h != d and d in pos and h in pos:
                    ax.annotate('', xy=pos[h], xytext=pos[d],
                                arrowprops=dict(arrowstyle='->', color='black', lw=1.4),
                                zorder=2)
            for role in Role:
                members = [d for d, r in state.roles.items() if r is role and d in pos]
                if members:
                    ax.scatter([pos[d][0] for d in members], [pos[d][1] for d in members],
                               s=90 if role is Role.CLUSTERHEAD else 60,
                               color=ROLE_COLORS[role], label=ROLE_LABELS[role],
                               edgecolors='black', zorder=3)
            ax.legend(loc='upper right', fontsize=9, framealpha=0.9)

        for d, (x, y) in pos.items():
            ax.annotate(str(d), (x, y), textcoords='offset points', xytext=(4, 4), fontsize=7)

        ax.set_xlim(0, topology.side)
        ax.set_ylim(0, topology.side)
        ax.set_aspect('equal', adjustable='box')
        ax.set_title(title or f"n={len(topology)}, r={topology.range:g}", fontsize=12)
        ax.grid(True, alpha=0.3, linestyle='--')
        fig.tight_layout()

        if path is not None:
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(path)
            plt.close(fig)
        return fig


def create_cluster_report(topology: Topology,
                          state: ClusteringState,
                          wca_heads: Optional[int] = None) -> None:
    """
    打印分簇结果摘要

    Args:
        topology: 拓扑
        state: WACA 选举状态
        wca_heads: WCA 基线的簇头数（可选）
    """
    sizes = sorted((len(m) for m in clusters(state).values()), reverse=True)
    print("\n" + "=" * 60)
    print(f"WACA 分簇结果摘要 - n={len(topology)}, r={topology.range:g}")
    print("=" * 60)
    print(f"  • 簇头 (CH):    {state.count(Role.CLUSTERHEAD)}")
    print(f"  • 子簇头 (SH):  {state.count(Role.SUBHEAD)}")
    print(f"  • 从节点 (SL):  {state.count(Role.SLAVE)}")
    print(f"  • 簇大小:       {sizes}")
    print(f"  • 最长簇头链:   {chain_depth(state)} 跳")
    print(f"  • 收敛轮数:     {state.rounds} ({'已收敛' if state.settled else '未收敛'})")
    if wca_heads is not None:
        print(f"  • WCA 簇头数:   {wca_heads}")
    print("=" * 60)
