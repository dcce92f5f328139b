"""
实验模块

参数扫描、结果汇总与趋势检验
"""

from .sweep import (
    SweepConfig,
    ExperimentRow,
    run_sweep,
    run_cell,
    build_topology,
    deploy_instance,
    cell_seed,
    rows_to_frame,
    config_echo,
    aggregate,
    trend_checks,
    write_rows_csv,
    write_aggregate_csv,
    summary_report,
)

__all__ = [
    'SweepConfig',
    'ExperimentRow',
    'run_sweep',
    'run_cell',
    'build_topology',
    'deploy_instance',
    'cell_seed',
    'rows_to_frame',
    'config_echo',
    'aggregate',
    'trend_checks',
    'write_rows_csv',
    'write_aggregate_csv',
    'summary_report',
]
