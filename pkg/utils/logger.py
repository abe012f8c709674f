"""
日志配置

stdout 只输出命令行的 JSON 结果，日志一律写 stderr。
级别与日志文件由环境变量 SEPARABILITY_LOG_LEVEL / SEPARABILITY_LOG_FILE 控制。
"""
import logging
import os
import sys
from pathlib import Path
from typing import Optional

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s:%(lineno)d | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def level_from_env(default: int = logging.INFO) -> int:
    """未设置或无法识别时返回 default"""
    name = os.getenv("SEPARABILITY_LOG_LEVEL", "").strip().upper()
    if not name:
        return default
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else default


def setup_logger(
    name: str,
    level: Optional[int] = None,
    log_file: Optional[str] = None,
) -> logging.Logger:
    """
    返回带 stderr handler 的日志记录器

    同名记录器只配置一次；后续调用只更新级别。

    Args:
        name: 通常为 __name__
        level: 日志级别，None 时读取 SEPARABILITY_LOG_LEVEL
        log_file: 额外写入的日志文件，None 时读取 SEPARABILITY_LOG_FILE
    """
    logger = logging.getLogger(name)
    level = level_from_env() if level is None else level
    logger.setLevel(level)
    if logger.handlers:
        return logger

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)
    handlers = [logging.StreamHandler(sys.stderr)]

    log_file = log_file or os.getenv("SEPARABILITY_LOG_FILE")
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))

    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    return logger
