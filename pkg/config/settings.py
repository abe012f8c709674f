"""求解器配置模块"""
import json
import math
import os
from pathlib import Path
from typing import Literal, Optional

import dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

dotenv.load_dotenv()


def _env_int(name: str, default: int) -> int:
    """读取整数环境变量，格式错误时回退默认值"""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"环境变量 {name} 必须是整数，当前值：{raw!r}")
    if value <= 0:
        raise ValueError(f"环境变量 {name} 必须为正整数，当前值：{value}")
    return value


def default_threads() -> int:
    """oracle 多起点并行的线程数，SEPARABILITY_THREADS 覆盖"""
    return _env_int("SEPARABILITY_THREADS", 1)


# MN 上限（n = M²N² ≤ 1296）
MAX_TOTAL_DIM = _env_int("SEPARABILITY_MAX_DIM", 36)

# 数值容差；各函数也接受同名关键字参数覆盖
DEFAULT_TOLERANCES = {
    "eps_herm": 1e-10,     # 厄米性，逐元素
    "eps_psd": 1e-8,       # 最小特征值
    "eps_trace": 1e-8,     # 迹为 1
    "eps_eig": 1e-9,       # 特征对残差
    "eps_center": 1e-9,    # 与最大混态的距离
    "eps_newton": 1e-8,    # 解析中心梯度范数
}


class OracleConfig(BaseModel):
    """oracle（乘积态上的全局最大化）参数"""
    backend: Literal["seesaw", "grid"] = Field(
        "grid", description="seesaw：仅启发式多起点；grid：另加网格 + Lipschitz 认证上界"
    )
    starts: Optional[int] = Field(None, gt=0, description="多起点个数，默认 8k")
    tol: float = Field(1e-10, gt=0, description="see-saw 每轮提升量的收敛阈值")
    max_sweeps: int = Field(200, gt=0, description="see-saw 最大轮数")
    grid_h: float = Field(0.02, gt=0, lt=1.0, description="认证网格初始步长（弧度）")
    max_grid_points: int = Field(2_000_000, gt=0, description="单次网格认证的点数上限")
    max_evaluations: Optional[int] = Field(None, gt=0, description="单次 maximize 的函数求值上限")
    seed: int = Field(0, description="随机起点的种子")
    threads: int = Field(default_factory=default_threads, gt=0, description="多起点并行线程数")


class SolverConfig(BaseModel):
    """割平面求解器参数"""
    delta: float = Field(0.01, gt=0, lt=1, description="精度 δ")
    cap_factor: float = Field(4.0, gt=0, description="迭代上限 N_max = ⌈c·n·ln(1/δ)⌉ 中的 c")
    max_oracle_calls: Optional[int] = Field(None, gt=0, description="oracle 调用上限，默认 50·n")
    validation_policy: Literal["polish", "accept"] = Field(
        "polish", description="候选见证无法认证时：polish 尝试 Frank–Wolfe 对偶见证；accept 直接返回启发式见证"
    )
    fw_check_every: int = Field(5, gt=0, description="每隔多少次割平面迭代推进一次 Frank–Wolfe")
    fw_steps_per_check: int = Field(10, gt=0, description="每次推进的 Frank–Wolfe 步数")
    fw_starts: int = Field(4, gt=0, description="Frank–Wolfe 线性子问题的随机起点数（原点、活跃原子与特征向量起点之外）")
    fw_final_calls: int = Field(
        200, ge=0, description="区域耗尽判为 SEPARABLE 前，继续 Frank–Wolfe 的 oracle 调用上限"
    )
    newton_max_steps: int = Field(100, gt=0)
    armijo_slope: float = Field(0.25, gt=0, lt=0.5)
    backtrack_factor: float = Field(0.5, gt=0, lt=1)
    warm_pull: float = Field(0.5, gt=0, lt=1, description="热启动时向新割平面可行侧移动的比例")
    degenerate_perturbation: float = Field(1e-6, gt=0)
    eps_newton: float = Field(DEFAULT_TOLERANCES["eps_newton"], gt=0)
    eps_center: float = Field(DEFAULT_TOLERANCES["eps_center"], gt=0)
    require_local: bool = Field(False, description="部分信息模式：只接受乘积形式的可观测量")
    oracle: OracleConfig = Field(default_factory=OracleConfig)

    def iteration_cap(self, n: int) -> int:
        """N_max = ⌈c·n·ln(1/δ)⌉"""
        return int(math.ceil(self.cap_factor * n * math.log(1.0 / self.delta)))

    def oracle_call_cap(self, n: int) -> int:
        """oracle 调用上限，默认 50·n"""
        return self.max_oracle_calls if self.max_oracle_calls is not None else 50 * n


class RunConfig(BaseModel):
    """命令行单次运行的参数"""
    subcommand: Literal[
        "solve", "ppt", "witness-check", "partial", "nearest-sep", "generate", "bench"
    ]
    input: Optional[str] = None
    output: Optional[str] = None
    delta: float = Field(0.01, gt=0, lt=1)
    seed: int = 0

    @field_validator("input")
    @classmethod
    def _input_exists(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value != "-" and not Path(value).is_file():
            raise ValueError(f"输入文件不存在：{value}")
        return value

    @field_validator("output")
    @classmethod
    def _output_dir_exists(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            parent = Path(value).resolve().parent
            if not parent.is_dir():
                raise ValueError(f"输出目录不存在：{parent}")
        return value


def load_solver_config(path: Optional[str] = None, **overrides) -> SolverConfig:
    """
    读取 JSON 配置文件并应用覆盖项

    Args:
        path: 配置文件路径，None 表示使用默认值
        **overrides: 顶层字段覆盖；oracle 子字段用 oracle={...}

    Returns:
        SolverConfig

    Raises:
        ValueError: 文件不存在、JSON 格式错误或字段不合法
    """
    data: dict = {}
    if path:
        config_path = Path(path)
        if not config_path.is_file():
            raise ValueError(f"配置文件不存在：{path}")
        try:
            data = json.loads(config_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ValueError(f"配置文件 JSON 格式错误：{e}")
        if not isinstance(data, dict):
            raise ValueError("配置文件顶层必须是对象")

    oracle_overrides = overrides.pop("oracle", None) or {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    if oracle_overrides:
        merged = dict(data.get("oracle") or {})
        merged.update({k: v for k, v in oracle_overrides.items() if v is not None})
        data["oracle"] = merged

    try:
        return SolverConfig.model_validate(data)
    except ValidationError as e:
        raise ValueError(f"配置不合法：{e}")


# 默认求解配置
DEFAULT_SOLVER_CONFIG = SolverConfig().model_dump()
