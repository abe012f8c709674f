"""
厄米算符空间单元测试
"""
import pytest
import sys
from pathlib import Path

import numpy as np

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from qstate.hermitian import (
    Dims,
    DensityMatrix,
    DimensionError,
    HermitianOp,
    StateValidationError,
    build_basis,
    conditional_operator,
    gauge_fix,
    gell_mann_basis,
    identity_op,
    inner,
    mirrored_conditional_operator,
    norm_distance,
    operator_norm,
    partial_transpose,
    top_eigenpair,
)


def _random_hermitian(d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


class TestDims:
    """测试维度对象"""

    def test_derived_sizes(self):
        """n = M²N²，k = 2(M+N)−4"""
        dims = Dims(2, 3)
        assert dims.d == 6
        assert dims.n == 36
        assert dims.k == 6

    def test_invalid(self):
        """非法维度"""
        with pytest.raises(DimensionError):
            Dims(1, 2)

    def test_budget(self):
        """超过 MN 上限"""
        with pytest.raises(DimensionError):
            Dims(6, 7).check_budget(36)


class TestOperatorBasis:
    """测试正交基"""

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_gell_mann_orthonormal(self, d):
        """单系统基正交归一"""
        basis = gell_mann_basis(d)
        gram = np.einsum("aij,bji->ab", basis, basis)
        assert np.allclose(gram, np.eye(d * d), atol=1e-12)

    def test_gell_mann_order(self):
        """d=2 时顺序为 I, Z, X, Y（归一化）"""
        basis = gell_mann_basis(2) * np.sqrt(2)
        assert np.allclose(basis[0], np.eye(2))
        assert np.allclose(basis[1], np.diag([1, -1]))
        assert np.allclose(basis[2], [[0, 1], [1, 0]])
        assert np.allclose(basis[3], [[0, -1j], [1j, 0]])

    @pytest.mark.parametrize("M,N", [(2, 2), (2, 3), (3, 3)])
    def test_bipartite_orthonormal(self, M, N):
        """Kronecker 积基正交归一，元素 0 为 I/√(MN)"""
        basis = build_basis(Dims(M, N))
        assert np.allclose(basis.gram(), np.eye(M * M * N * N), atol=1e-10)
        assert np.allclose(basis.elements[0], np.eye(M * N) / np.sqrt(M * N))

    def test_factor_a_major(self):
        """下标 a·N² + b 对应 G_a ⊗ G_b"""
        dims = Dims(2, 3)
        basis = build_basis(dims)
        a, b = 2, 5
        expected = np.kron(basis.local_a[a], basis.local_b[b])
        assert np.allclose(basis.elements[a * 9 + b], expected)

    def test_coefficient_roundtrip(self):
        """系数 → 矩阵 → 系数"""
        dims = Dims(2, 3)
        X = HermitianOp.from_matrix(dims, _random_hermitian(6, 1))
        rebuilt = HermitianOp.from_coeffs(dims, X.coeffs)
        assert np.allclose(rebuilt.matrix, X.matrix, atol=1e-12)

    def test_inner_is_dot_of_coefficients(self):
        """tr(XY) = c_X · c_Y"""
        dims = Dims(2, 2)
        X = HermitianOp.from_matrix(dims, _random_hermitian(4, 2))
        Y = HermitianOp.from_matrix(dims, _random_hermitian(4, 3))
        assert inner(X, Y) == pytest.approx(float(X.coeffs @ Y.coeffs), abs=1e-12)

    def test_reconstruct_wrong_length(self):
        """系数长度错误"""
        with pytest.raises(DimensionError):
            build_basis(Dims(2, 2)).reconstruct(np.zeros(5))


class TestHermitianOp:
    """测试厄米算符"""

    def test_rejects_non_hermitian(self):
        """非厄米矩阵被拒绝"""
        with pytest.raises(StateValidationError):
            HermitianOp.from_matrix(Dims(2, 2), np.triu(np.ones((4, 4))))

    def test_rejects_wrong_shape(self):
        """形状不符"""
        with pytest.raises(DimensionError):
            HermitianOp.from_matrix(Dims(2, 2), np.eye(3))

    def test_traceless_part(self):
        """去迹后迹为零，且与单位算符系数无关"""
        X = HermitianOp.from_matrix(Dims(2, 2), _random_hermitian(4, 4))
        T = X.traceless_part()
        assert T.trace == pytest.approx(0.0, abs=1e-12)
        assert T.coeffs[0] == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(T.coeffs[1:], X.coeffs[1:])

    def test_norm_and_distance(self):
        """Frobenius 范数"""
        dims = Dims(2, 2)
        X = identity_op(dims)
        assert X.norm == pytest.approx(2.0)
        assert norm_distance(X, X * 0.5) == pytest.approx(1.0)
        assert operator_norm(X * -3) == pytest.approx(3.0)

    def test_dimension_mismatch(self):
        """维度不同的内积"""
        with pytest.raises(DimensionError):
            inner(identity_op(Dims(2, 2)), identity_op(Dims(2, 3)))


class TestDensityMatrix:
    """测试密度矩阵校验"""

    def test_valid(self):
        """最大混态"""
        rho = DensityMatrix.from_matrix(Dims(2, 2), np.eye(4) / 4)
        assert rho.coeffs[0] == pytest.approx(0.5)

    def test_trace_not_one(self):
        """迹不为 1"""
        with pytest.raises(StateValidationError):
            DensityMatrix.from_matrix(Dims(2, 2), np.eye(4) / 2)

    def test_not_psd(self):
        """非半正定"""
        with pytest.raises(StateValidationError):
            DensityMatrix.from_matrix(Dims(2, 2), np.diag([0.6, 0.6, 0.1, -0.3]))


class TestPartialTranspose:
    """测试部分转置"""

    def test_involution(self):
        """两次部分转置还原"""
        X = HermitianOp.from_matrix(Dims(2, 3), _random_hermitian(6, 5))
        for side in ("A", "B"):
            twice = partial_transpose(partial_transpose(X, side), side)
            assert np.allclose(twice.matrix, X.matrix)

    def test_trace_preserved(self):
        """迹不变"""
        X = HermitianOp.from_matrix(Dims(3, 2), _random_hermitian(6, 6))
        assert partial_transpose(X, "B").trace == pytest.approx(X.trace)

    def test_product_operator(self):
        """PT_B(P⊗Q) = P⊗Qᵀ"""
        P = _random_hermitian(2, 7)
        Q = _random_hermitian(3, 8)
        X = HermitianOp.from_matrix(Dims(2, 3), np.kron(P, Q))
        assert np.allclose(partial_transpose(X, "B").matrix, np.kron(P, Q.T))
        assert np.allclose(partial_transpose(X, "A").matrix, np.kron(P.T, Q))

    def test_bad_subsystem(self):
        """非法子系统名"""
        with pytest.raises(ValueError):
            partial_transpose(identity_op(Dims(2, 2)), "C")


class TestConditionalOperator:
    """测试条件算符"""

    def test_expectation_identity(self):
        """⟨α|H_β|α⟩ = ⟨αβ|A|αβ⟩ = ⟨β|H'_α|β⟩"""
        dims = Dims(2, 3)
        A = HermitianOp.from_matrix(dims, _random_hermitian(6, 9))
        rng = np.random.default_rng(10)
        alpha = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        beta = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        alpha /= np.linalg.norm(alpha)
        beta /= np.linalg.norm(beta)
        psi = np.kron(alpha, beta)
        expected = np.real(psi.conj() @ A.matrix @ psi)

        H = conditional_operator(A, beta)
        H_mirror = mirrored_conditional_operator(A, alpha)
        assert H.shape == (2, 2)
        assert H_mirror.shape == (3, 3)
        assert np.real(alpha.conj() @ H @ alpha) == pytest.approx(expected, abs=1e-12)
        assert np.real(beta.conj() @ H_mirror @ beta) == pytest.approx(expected, abs=1e-12)

    def test_requires_unit_vector(self):
        """β 必须是单位向量"""
        with pytest.raises(ValueError):
            conditional_operator(identity_op(Dims(2, 2)), np.array([1.0, 1.0]))


class TestTopEigenpair:
    """测试最大特征对"""

    def test_simple(self):
        """非简并情形"""
        value, vector = top_eigenpair(np.diag([1.0, 3.0, 2.0]))
        assert value == pytest.approx(3.0)
        assert np.allclose(vector, [0, 1, 0])

    def test_degenerate_tie_break(self):
        """简并时取最低下标标准基向量的投影"""
        value, vector = top_eigenpair(np.diag([2.0, 2.0, 1.0]))
        assert value == pytest.approx(2.0)
        assert np.allclose(vector, [1, 0, 0])

    def test_gauge(self):
        """第一个非零分量为非负实数"""
        H = np.array([[0, 1j], [-1j, 0]])
        _, vector = top_eigenpair(H)
        first = vector[np.flatnonzero(np.abs(vector) > 1e-10)[0]]
        assert abs(first.imag) < 1e-12 and first.real > 0

    def test_rejects_non_hermitian(self):
        """非厄米矩阵"""
        with pytest.raises(ValueError):
            top_eigenpair(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_gauge_fix_zero(self):
        """零向量无法固定规范"""
        with pytest.raises(ValueError):
            gauge_fix(np.zeros(3))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
