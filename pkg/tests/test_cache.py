"""
正交基缓存单元测试
"""
import pytest
import sys
from pathlib import Path

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from qstate.cache import (
    _get_cache_key,
    cached_by_dims,
    clear_cache,
    get_cache_info,
    cache_stats,
)
from qstate.hermitian import DimensionError, Dims, build_basis


class TestCacheKeyGeneration:
    """测试缓存键生成"""

    def test_same_dims_same_key(self):
        """相同维度生成相同键"""
        assert _get_cache_key("build_basis", Dims(2, 3)) == _get_cache_key("build_basis", Dims(2, 3))

    def test_dims_order_matters(self):
        """2×3 与 3×2 是不同的系统"""
        assert _get_cache_key("build_basis", Dims(2, 3)) != _get_cache_key("build_basis", Dims(3, 2))

    def test_method_name_in_key(self):
        """不同函数不共享键"""
        assert _get_cache_key("a", Dims(2, 2)) != _get_cache_key("b", Dims(2, 2))


class TestCacheDecorator:
    """测试缓存装饰器"""

    def setup_method(self):
        """每个测试前清空缓存"""
        clear_cache()

    def test_caching_basic(self):
        """第二次调用命中缓存"""
        call_count = [0]

        @cached_by_dims
        def make(dims):
            call_count[0] += 1
            return f"basis_{dims}"

        assert make(Dims(2, 2)) == "basis_2x2"
        assert make(Dims(2, 2)) == "basis_2x2"
        assert call_count[0] == 1

    def test_different_dims_different_cache(self):
        """不同维度分别构造"""
        call_count = [0]

        @cached_by_dims
        def make(dims):
            call_count[0] += 1
            return str(dims)

        make(Dims(2, 2))
        make(Dims(2, 3))
        assert call_count[0] == 2

    def test_none_not_cached(self):
        """返回 None 时不缓存"""
        call_count = [0]

        @cached_by_dims
        def make(dims):
            call_count[0] += 1
            return None

        make(Dims(2, 2))
        make(Dims(2, 2))
        assert call_count[0] == 2

    def test_build_basis_returns_same_object(self):
        """正交基只构造一次"""
        first = build_basis(Dims(2, 2))
        second = build_basis(Dims(2, 2))
        assert first is second

    def test_dimension_limit_checked_on_hit(self):
        """已缓存的维度也按本次调用的上限检查"""
        build_basis(Dims(2, 3))
        with pytest.raises(DimensionError):
            build_basis(Dims(2, 3), max_total=4)
        assert build_basis(Dims(2, 3), max_total=6) is build_basis(Dims(2, 3))


class TestCacheOperations:
    """测试缓存操作"""

    def setup_method(self):
        """每个测试前清空缓存"""
        clear_cache()

    def test_clear_cache(self):
        """清空全部缓存"""
        build_basis(Dims(2, 2))
        build_basis(Dims(2, 3))

        assert get_cache_info()["size"] == 2
        assert clear_cache() == 2
        assert get_cache_info()["size"] == 0

    def test_clear_by_method(self):
        """只清空指定函数的缓存"""
        @cached_by_dims
        def other(dims):
            return 1

        build_basis(Dims(2, 2))
        other(Dims(2, 2))
        assert clear_cache("other") == 1
        assert get_cache_info()["size"] == 1

    def test_get_cache_info(self):
        """缓存信息包含键与字节数"""
        basis = build_basis(Dims(2, 2))
        info = get_cache_info()

        assert info["maxsize"] == 32
        assert info["keys"] == ["2x2"]
        assert info["currsize_bytes"] == basis.nbytes

    def test_cache_stats(self):
        """缓存统计"""
        build_basis(Dims(3, 3))
        stats = cache_stats()

        assert stats["entries"] == 1
        assert stats["max_entries"] == 32
        assert stats["size_mb"] > 0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
