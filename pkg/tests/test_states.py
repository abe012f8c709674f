"""
量子态模块单元测试
"""
import pytest
import sys
from pathlib import Path

import numpy as np

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from qstate.hermitian import Dims, DimensionError, StateValidationError, inner
from qstate.states import (
    ProductState,
    SeparableDecomposition,
    bell_state,
    density_from_payload,
    density_to_payload,
    factor_from_chart,
    isotropic,
    maximally_mixed,
    mix,
    params_roundtrip,
    pauli_string,
    random_chart_params,
    random_product_state,
    random_separable,
    random_state,
    werner,
    wrap_phase,
)


class TestChart:
    """测试乘积态坐标图"""

    def test_zero_params_is_basis_state(self):
        """零参数对应 |00⟩"""
        state = params_roundtrip(Dims(2, 3), np.zeros(6))
        assert np.allclose(state.vector, np.eye(6)[0])

    @pytest.mark.parametrize("M,N", [(2, 2), (2, 3), (3, 3)])
    def test_interior_params_roundtrip(self, M, N):
        """图内部参数可精确恢复"""
        dims = Dims(M, N)
        rng = np.random.default_rng(3)
        for _ in range(10):
            params = random_chart_params(dims, rng)
            params = np.clip(params, -np.pi + 1e-3, np.pi - 1e-3)
            state = params_roundtrip(dims, params)
            assert np.allclose(state.params, params, atol=1e-9)

    def test_vectors_are_unit(self):
        """批量生成的因子向量均为单位向量"""
        rng = np.random.default_rng(4)
        theta = rng.uniform(0, np.pi / 2, (50, 2))
        phi = rng.uniform(-np.pi, np.pi, (50, 2))
        vectors = factor_from_chart(theta, phi)
        assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0)

    def test_wrap_phase_interval(self):
        """相位折回 (−π, π]"""
        wrapped = wrap_phase(np.array([np.pi, -np.pi, 3 * np.pi, 0.5]))
        assert np.allclose(wrapped, [np.pi, np.pi, np.pi, 0.5])

    def test_wrong_param_count(self):
        """参数个数必须等于 k"""
        with pytest.raises(DimensionError):
            params_roundtrip(Dims(2, 2), np.zeros(3))


class TestProductState:
    """测试纯乘积态"""

    def test_gauge_fixed(self):
        """全局相位被去掉"""
        state = ProductState.from_vectors(np.array([1j, 0]), np.array([0, -1]))
        assert np.allclose(state.alpha, [1, 0])
        assert np.allclose(state.beta, [0, 1])

    def test_coeffs_match_operator(self):
        """张量结构给出的系数与矩阵投影一致"""
        state = random_product_state(Dims(2, 3), 5)
        assert np.allclose(state.coeffs, state.operator().coeffs, atol=1e-12)

    def test_density_is_pure(self):
        """纯态：tr(σ²) = 1"""
        rho = random_product_state(Dims(3, 2), 6).density()
        assert inner(rho, rho) == pytest.approx(1.0)

    def test_rejects_non_unit(self):
        """直接构造时要求单位向量"""
        with pytest.raises(StateValidationError):
            ProductState(np.array([1.0, 1.0]), np.array([1.0, 0.0]))


class TestSeparableDecomposition:
    """测试可分分解"""

    def test_weights_sum_to_one(self):
        """权重和必须为 1"""
        states = (ProductState.basis_state(Dims(2, 2), 0, 0),)
        with pytest.raises(StateValidationError):
            SeparableDecomposition(((0.5, states[0]),))

    def test_from_weights_drops_and_renormalizes(self):
        """丢弃零权重后重新归一化"""
        dims = Dims(2, 2)
        states = [ProductState.basis_state(dims, 0, 0), ProductState.basis_state(dims, 1, 1)]
        decomp = SeparableDecomposition.from_weights([0.0, 2.0], states)
        assert len(decomp) == 1
        assert decomp.weights[0] == pytest.approx(1.0)

    def test_mix_of_basis_states(self):
        """四个计算基乘积态均匀混合得到最大混态"""
        dims = Dims(2, 2)
        states = [ProductState.basis_state(dims, i, j) for i in range(2) for j in range(2)]
        rho = mix(SeparableDecomposition.from_weights([0.25] * 4, states))
        assert np.allclose(rho.matrix, np.eye(4) / 4)

    def test_too_many_terms(self):
        """项数不能超过 n"""
        dims = Dims(2, 2)
        state = ProductState.basis_state(dims)
        with pytest.raises(StateValidationError):
            SeparableDecomposition.from_weights([1.0] * 17, [state] * 17)


class TestFamilies:
    """测试标准测试族"""

    def test_werner_endpoints(self):
        """p=0 为最大混态，p=1 为单态"""
        assert np.allclose(werner(0).matrix, np.eye(4) / 4)
        singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
        assert np.allclose(werner(1).matrix, np.outer(singlet, singlet))

    def test_werner_invalid_p(self):
        """p 越界"""
        with pytest.raises(ValueError):
            werner(1.5)

    def test_bell_states(self):
        """四个 Bell 态互相正交"""
        labels = ["phi+", "phi-", "psi+", "psi-"]
        for i, a in enumerate(labels):
            for j, b in enumerate(labels):
                expected = 1.0 if i == j else 0.0
                assert inner(bell_state(a), bell_state(b)) == pytest.approx(expected, abs=1e-12)
        with pytest.raises(ValueError):
            bell_state("omega")

    def test_isotropic_dims(self):
        """d×d 各向同性态"""
        rho = isotropic(3, 0.8)
        assert rho.dims == Dims(3, 3)
        assert np.real(np.trace(rho.matrix)) == pytest.approx(1.0)

    def test_random_state_reproducible(self):
        """相同种子得到相同的态"""
        assert np.allclose(random_state(Dims(2, 2), 7).matrix, random_state(Dims(2, 2), 7).matrix)

    def test_random_separable(self):
        """植入分解与返回的密度矩阵一致"""
        rho, decomp = random_separable(Dims(2, 3), 5, seed=1)
        assert len(decomp) == 5
        assert np.allclose(mix(decomp).matrix, rho.matrix)
        with pytest.raises(ValueError):
            random_separable(Dims(2, 2), 17, seed=1)

    def test_maximally_mixed(self):
        """I/(MN)"""
        assert np.allclose(maximally_mixed(Dims(2, 3)).matrix, np.eye(6) / 6)

    def test_pauli_string(self):
        """泡利串 ⟨ZZ⟩ 在 |Φ+⟩ 上为 1"""
        assert inner(pauli_string("ZZ"), bell_state("phi+")) == pytest.approx(1.0)
        assert inner(pauli_string("xx"), bell_state("phi+")) == pytest.approx(1.0)
        assert inner(pauli_string("YY"), bell_state("phi+")) == pytest.approx(-1.0)


class TestPayload:
    """测试密度矩阵 JSON 编解码"""

    def test_roundtrip(self):
        """编码后再解码保持不变"""
        rho = random_state(Dims(2, 3), 11)
        restored = density_from_payload(density_to_payload(rho))
        assert restored.dims == rho.dims
        assert np.allclose(restored.matrix, rho.matrix, atol=1e-15)

    def test_structure_error(self):
        """结构错误抛 StateValidationError"""
        with pytest.raises(StateValidationError):
            density_from_payload({"M": 2, "N": 2})

    def test_physical_error(self):
        """迹不为 1"""
        payload = density_to_payload(maximally_mixed(Dims(2, 2)))
        payload["matrix"][0][0] = [1.0, 0.0]
        with pytest.raises(StateValidationError):
            density_from_payload(payload)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
