# 配置模块
from .settings import (
    OracleConfig,
    SolverConfig,
    RunConfig,
    load_solver_config,
    default_threads,
    DEFAULT_SOLVER_CONFIG,
    DEFAULT_TOLERANCES,
    MAX_TOTAL_DIM,
)

__all__ = [
    "OracleConfig",
    "SolverConfig",
    "RunConfig",
    "load_solver_config",
    "default_threads",
    "DEFAULT_SOLVER_CONFIG",
    "DEFAULT_TOLERANCES",
    "MAX_TOTAL_DIM",
]
