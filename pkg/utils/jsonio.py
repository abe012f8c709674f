"""
JSON 输出工具 - 浮点数统一按 17 位有效数字输出

标准库 json 只用最短 repr，无法指定位数，这里按相同缩进规则手写序列化。
"""
import json
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np


def format_float(value: float) -> str:
    """17 位有效数字；非有限值按 JSON 习惯输出为 null"""
    if not math.isfinite(value):
        return "null"
    text = format(value, ".17g")
    # 保证读回后仍是浮点数
    if all(ch not in text for ch in ".eE"):
        text += ".0"
    return text


def _normalize(obj: Any) -> Any:
    """把 numpy 标量/数组转成 Python 原生类型"""
    if isinstance(obj, np.ndarray):
        return [_normalize(x) for x in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj: Any, indent: Optional[int] = 2, _level: int = 0) -> str:
    """
    序列化为 JSON 字符串

    Args:
        obj: dict / list / 标量（支持 numpy 类型）
        indent: 缩进空格数，None 表示单行

    Returns:
        JSON 字符串（键顺序保持插入顺序，不含时间戳，可逐字节复现）
    """
    obj = _normalize(obj)

    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)

    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [dumps(x, indent, _level + 1) for x in obj]
        if indent is None:
            return "[" + ", ".join(items) + "]"
        # 纯数值的短列表放在一行，矩阵更易读
        if all(not isinstance(_normalize(x), (list, tuple, dict)) for x in obj):
            return "[" + ", ".join(items) + "]"
        pad = " " * (indent * (_level + 1))
        end_pad = " " * (indent * _level)
        return "[\n" + ",\n".join(pad + item for item in items) + "\n" + end_pad + "]"

    if isinstance(obj, dict):
        if not obj:
            return "{}"
        pairs = [
            f"{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
            for k, v in obj.items()
        ]
        if indent is None:
            return "{" + ", ".join(pairs) + "}"
        pad = " " * (indent * (_level + 1))
        end_pad = " " * (indent * _level)
        return "{\n" + ",\n".join(pad + p for p in pairs) + "\n" + end_pad + "}"

    raise TypeError(f"无法序列化类型：{type(obj).__name__}")


def write_json(obj: Any, path: Optional[str] = None) -> str:
    """序列化并（可选）写入文件，返回 JSON 文本"""
    text = dumps(obj)
    if path:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
    return text
