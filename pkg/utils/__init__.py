"""
工具模块包
"""
from .validators import (
    validate_dims,
    validate_delta,
    validate_probability,
    validate_positive_int,
    validate_density_payload,
    validate_pauli_string,
)
from .logger import setup_logger, level_from_env
from .jsonio import dumps, write_json, format_float

__all__ = [
    # 验证工具
    "validate_dims",
    "validate_delta",
    "validate_probability",
    "validate_positive_int",
    "validate_density_payload",
    "validate_pauli_string",
    # 日志工具
    "setup_logger",
    "level_from_env",
    # JSON 输出
    "dumps",
    "write_json",
    "format_float",
]
