"""
验证工具模块 - 输入验证和数据校验

所有 validate_* 函数返回 (是否有效, 错误信息)，由调用方决定抛异常还是返回错误 JSON。
"""
import math
import re
from typing import Any, Optional, Tuple

# 单个子系统维度上限；MN 的上限由配置决定
MAX_LOCAL_DIM = 36


# ============ 维度验证 ============

def validate_dims(M: Any, N: Any, max_total: Optional[int] = None) -> Tuple[bool, str]:
    """
    验证二分系统维度 M×N

    Args:
        M: 第一个子系统维度
        N: 第二个子系统维度
        max_total: MN 的上限（可选）

    Returns:
        (是否有效，错误信息)
    """
    for label, value in (("M", M), ("N", N)):
        if isinstance(value, bool) or not isinstance(value, int):
            return False, f"维度 {label} 必须是整数，收到：{value!r}"
        if value < 2:
            return False, f"维度 {label} 必须 ≥ 2，收到：{value}"
        if value > MAX_LOCAL_DIM:
            return False, f"维度 {label}={value} 超过单个子系统上限 {MAX_LOCAL_DIM}"

    if max_total is not None and M * N > max_total:
        return False, f"总维度 MN={M * N} 超过上限 {max_total}（n=M²N²={(M * N) ** 2}）"

    return True, ""


# ============ 数值验证 ============

def validate_delta(delta: Any) -> Tuple[bool, str]:
    """
    验证精度参数 δ

    Returns:
        (是否有效，错误信息)
    """
    if isinstance(delta, bool) or not isinstance(delta, (int, float)):
        return False, f"精度 delta 必须是数值，收到：{delta!r}"
    if not math.isfinite(delta) or delta <= 0:
        return False, f"精度 delta 必须为正数，收到：{delta}"
    if delta >= 1:
        return False, f"精度 delta 必须小于 1，收到：{delta}"
    return True, ""


def validate_probability(p: Any, field_name: str = "p") -> Tuple[bool, str]:
    """
    验证 [0, 1] 区间内的参数

    Returns:
        (是否有效，错误信息)
    """
    if isinstance(p, bool) or not isinstance(p, (int, float)):
        return False, f"{field_name} 必须是数值"
    if not math.isfinite(p) or p < 0 or p > 1:
        return False, f"{field_name} 必须在 [0, 1] 区间内，收到：{p}"
    return True, ""


def validate_positive_int(value: Optional[int], field_name: str) -> Tuple[bool, str]:
    """
    验证正整数

    Args:
        value: 整数值
        field_name: 字段名称

    Returns:
        (是否有效，错误信息)
    """
    if value is None:
        return True, ""  # 可选参数

    if isinstance(value, bool):
        return False, f"{field_name}必须是整数"

    if not isinstance(value, int):
        try:
            value = int(value)
        except (TypeError, ValueError):
            return False, f"{field_name}必须是整数"

    if value <= 0:
        return False, f"{field_name}必须是正整数"

    return True, ""


# ============ 输入格式验证 ============

def validate_density_payload(payload: Any) -> Tuple[bool, str]:
    """
    验证密度矩阵 JSON 结构：{"M": int, "N": int, "matrix": [[[re, im], ...], ...]}

    只检查结构，不检查物理性质（厄米、迹、半正定由 qstate 负责）。

    Returns:
        (是否有效，错误信息)
    """
    if not isinstance(payload, dict):
        return False, "密度矩阵 JSON 顶层必须是对象"

    for key in ("M", "N", "matrix"):
        if key not in payload:
            return False, f"密度矩阵 JSON 缺少字段：{key}"

    valid, err = validate_dims(payload["M"], payload["N"])
    if not valid:
        return False, err

    d = payload["M"] * payload["N"]
    matrix = payload["matrix"]
    if not isinstance(matrix, list) or len(matrix) != d:
        return False, f"matrix 必须是 {d} 行的列表"

    for i, row in enumerate(matrix):
        if not isinstance(row, list) or len(row) != d:
            return False, f"matrix 第 {i} 行必须有 {d} 个元素"
        for j, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != 2:
                return False, f"matrix[{i}][{j}] 必须是 [re, im]"
            if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry):
                return False, f"matrix[{i}][{j}] 必须是数值对"
            if not all(math.isfinite(x) for x in entry):
                return False, f"matrix[{i}][{j}] 含有非有限数值"

    return True, ""


_PAULI_PATTERN = re.compile(r'^[IXYZ]{2}$')


def validate_pauli_string(label: Any) -> Tuple[bool, str]:
    """
    验证两比特泡利串，如 'XX'、'ZI'

    Returns:
        (是否有效，错误信息)
    """
    if not isinstance(label, str) or not label:
        return False, "泡利串不能为空"
    if not _PAULI_PATTERN.match(label.upper()):
        return False, f"泡利串格式错误：{label}，应为两个 I/X/Y/Z 字符，如 XX"
    return True, ""
