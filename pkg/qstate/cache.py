"""
算符基缓存模块 - 每个维度的正交基只构造一次
"""
from functools import wraps
from typing import Any, Callable, Hashable, Optional

from cachetools import LRUCache

from utils.logger import setup_logger

logger = setup_logger(__name__)

# 正交基按 (函数名, 维度) 缓存；MN ≤ 36 时最多几十种维度组合
_basis_cache: LRUCache = LRUCache(maxsize=32)


def _get_cache_key(method_name: str, key: Hashable) -> tuple:
    """
    生成缓存键

    Args:
        method_name: 被缓存的函数名
        key: 维度等可哈希参数

    Returns:
        (函数名, 参数) 元组
    """
    return (method_name, key)


def cached_by_dims(func: Callable) -> Callable:
    """
    按第一个位置参数（Dims）缓存结果的装饰器

    Usage:
        @cached_by_dims
        def get_basis(dims):
            ...
    """
    @wraps(func)
    def wrapper(dims: Hashable, *args, **kwargs) -> Any:
        cache_key = _get_cache_key(func.__name__, dims)

        if cache_key in _basis_cache:
            logger.debug(f"缓存命中：{func.__name__} - {dims}")
            return _basis_cache[cache_key]

        result = func(dims, *args, **kwargs)
        if result is not None:
            _basis_cache[cache_key] = result
            logger.debug(f"缓存已设置：{func.__name__} - {dims}")
        return result

    return wrapper


def clear_cache(method_name: Optional[str] = None) -> int:
    """
    清空缓存

    Args:
        method_name: 可选，只清空特定函数的缓存

    Returns:
        清除的缓存条目数量
    """
    if method_name:
        keys_to_delete = [key for key in list(_basis_cache.keys()) if key[0] == method_name]
        for key in keys_to_delete:
            del _basis_cache[key]
        logger.info(f"已清除 {len(keys_to_delete)} 条 {method_name} 的缓存")
        return len(keys_to_delete)

    count = len(_basis_cache)
    _basis_cache.clear()
    logger.info(f"已清除所有缓存 ({count}条)")
    return count


def get_cache_info() -> dict:
    """获取缓存信息"""
    return {
        "size": len(_basis_cache),
        "maxsize": _basis_cache.maxsize,
        "keys": [str(key[1]) for key in _basis_cache.keys()],
        "currsize_bytes": sum(
            getattr(v, "nbytes", 0) for v in _basis_cache.values()
        ),
    }


def cache_stats() -> dict:
    """获取缓存统计数据"""
    info = get_cache_info()
    return {
        "entries": info["size"],
        "max_entries": info["maxsize"],
        "size_mb": info["currsize_bytes"] / (1024 * 1024),
    }
