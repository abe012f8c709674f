"""
厄米算符空间模块

C^M ⊗ C^N 上的厄米算符构成 n = M²N² 维实向量空间，内积 ⟨X, Y⟩ = tr(XY)。
本模块提供正交基（广义 Gell-Mann 矩阵的张量积）、内积与距离、部分转置、
条件算符（see-saw 用）以及带确定性平局规则的最大特征对。
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple, Union

import numpy as np

from config.settings import DEFAULT_TOLERANCES, MAX_TOTAL_DIM
from utils.logger import setup_logger
from utils.validators import validate_dims

from .cache import cached_by_dims

logger = setup_logger(__name__)


class DimensionError(ValueError):
    """维度不合法、超限或不匹配"""


class StateValidationError(ValueError):
    """矩阵不满足厄米 / 迹 / 半正定等要求"""


# ============ 维度 ============

@dataclass(frozen=True)
class Dims:
    """二分系统维度；n = M²N² 为算符空间维数，k = 2(M+N)−4 为纯乘积态的实参数个数"""
    M: int
    N: int

    def __post_init__(self):
        valid, err = validate_dims(self.M, self.N)
        if not valid:
            raise DimensionError(err)

    @property
    def d(self) -> int:
        return self.M * self.N

    @property
    def n(self) -> int:
        return self.d * self.d

    @property
    def k(self) -> int:
        return 2 * (self.M + self.N) - 4

    def check_budget(self, max_total: int = MAX_TOTAL_DIM) -> None:
        """MN 超过上限时抛 DimensionError"""
        valid, err = validate_dims(self.M, self.N, max_total=max_total)
        if not valid:
            raise DimensionError(err)

    def __str__(self) -> str:
        return f"{self.M}x{self.N}"


# ============ 正交基 ============

def gell_mann_basis(d: int) -> np.ndarray:
    """
    单系统归一化广义 Gell-Mann 基，tr(G_a G_b) = δ_ab

    顺序：I/√d；对角元 l = 1..d−1；再对每对 j<k 依次给出对称、反对称元素。

    Returns:
        形状 (d², d, d) 的复数组
    """
    elements = [np.eye(d, dtype=complex) / np.sqrt(d)]

    for l in range(1, d):
        diag = np.zeros(d, dtype=complex)
        diag[:l] = 1.0
        diag[l] = -l
        elements.append(np.diag(diag) / np.sqrt(l * (l + 1)))

    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            elements.append(sym / np.sqrt(2))

            anti = np.zeros((d, d), dtype=complex)
            anti[j, k] = -1j
            anti[k, j] = 1j
            elements.append(anti / np.sqrt(2))

    return np.array(elements)


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """H_{M,N} 的有序正交厄米基；元素 0 为 I/√(MN)，其余无迹"""
    dims: Dims
    elements: np.ndarray
    local_a: np.ndarray
    local_b: np.ndarray

    @cached_property
    def _flat(self) -> np.ndarray:
        return self.elements.reshape(self.dims.n, -1)

    @property
    def nbytes(self) -> int:
        return int(self.elements.nbytes)

    def __len__(self) -> int:
        return self.dims.n

    def coefficients(self, matrix: np.ndarray) -> np.ndarray:
        """c_i = tr(B_i X)，返回长度 n 的实向量"""
        return np.real(self._flat @ matrix.T.reshape(-1))

    def reconstruct(self, coeffs: np.ndarray) -> np.ndarray:
        """X = Σ c_i B_i"""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.dims.n,):
            raise DimensionError(f"系数向量长度应为 {self.dims.n}，收到 {coeffs.shape}")
        return (coeffs @ self._flat).reshape(self.dims.d, self.dims.d)

    def gram(self) -> np.ndarray:
        """Gram 矩阵 tr(B_i B_j)，正交基下为单位阵"""
        flat = self._flat
        transposed = np.transpose(self.elements, (0, 2, 1)).reshape(self.dims.n, -1)
        return np.real(flat @ transposed.T)


def build_basis(dims: Dims, max_total: int = MAX_TOTAL_DIM) -> OperatorBasis:
    """
    构造 H_{M,N} 的正交厄米基

    两个子系统的 Gell-Mann 基做 Kronecker 积，A 因子在外层（下标 a·N² + b）。
    维度上限每次调用都检查，基本身按维度缓存。

    Args:
        dims: 维度
        max_total: MN 上限

    Returns:
        OperatorBasis

    Raises:
        DimensionError: n 超出上限
    """
    dims.check_budget(max_total)
    return _product_basis(dims)


@cached_by_dims
def _product_basis(dims: Dims) -> OperatorBasis:
    local_a = gell_mann_basis(dims.M)
    local_b = gell_mann_basis(dims.N)
    elements = np.einsum('aij,bkl->abikjl', local_a, local_b).reshape(
        dims.n, dims.d, dims.d
    )
    for arr in (elements, local_a, local_b):
        arr.setflags(write=False)
    logger.debug(f"构造 {dims} 正交基：n={dims.n}")
    return OperatorBasis(dims=dims, elements=elements, local_a=local_a, local_b=local_b)


# ============ 厄米算符 ============

def _readonly(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=complex, copy=True)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class HermitianOp:
    """厄米算符，矩阵与基系数双重表示（系数惰性计算）"""
    dims: Dims
    matrix: np.ndarray

    @classmethod
    def from_matrix(
        cls,
        dims: Dims,
        matrix,
        eps_herm: float = DEFAULT_TOLERANCES["eps_herm"],
    ) -> "HermitianOp":
        """
        从矩阵构造，校验形状与厄米性后做对称化

        Raises:
            DimensionError: 形状不符
            StateValidationError: 非厄米
        """
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (dims.d, dims.d):
            raise DimensionError(f"矩阵形状应为 {(dims.d, dims.d)}，收到 {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise StateValidationError("矩阵含有非有限数值")
        deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
        if deviation > eps_herm:
            raise StateValidationError(f"矩阵不是厄米矩阵：max|X − X†| = {deviation:.3e}")
        return cls(dims, _readonly((matrix + matrix.conj().T) / 2))

    @classmethod
    def from_coeffs(cls, dims: Dims, coeffs) -> "HermitianOp":
        """从基系数重建"""
        basis = build_basis(dims)
        matrix = basis.reconstruct(coeffs)
        return cls(dims, _readonly((matrix + matrix.conj().T) / 2))

    @cached_property
    def coeffs(self) -> np.ndarray:
        coeffs = build_basis(self.dims).coefficients(self.matrix)
        coeffs.setflags(write=False)
        return coeffs

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def norm(self) -> float:
        """‖X‖ = √tr(X²)"""
        return float(np.linalg.norm(self.matrix))

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def traceless_part(self) -> "HermitianOp":
        """X − tr(X)/(MN)·I"""
        shift = self.trace / self.dims.d
        return HermitianOp(self.dims, _readonly(self.matrix - shift * np.eye(self.dims.d)))

    def normalized(self) -> "HermitianOp":
        norm = self.norm
        if norm == 0:
            raise StateValidationError("零算符无法归一化")
        return self / norm

    def _check(self, other: "HermitianOp") -> None:
        if self.dims != other.dims:
            raise DimensionError(f"维度不匹配：{self.dims} vs {other.dims}")

    def __add__(self, other: "HermitianOp") -> "HermitianOp":
        other = as_op(other)
        self._check(other)
        return HermitianOp(self.dims, _readonly(self.matrix + other.matrix))

    def __sub__(self, other: "HermitianOp") -> "HermitianOp":
        other = as_op(other)
        self._check(other)
        return HermitianOp(self.dims, _readonly(self.matrix - other.matrix))

    def __mul__(self, scalar: float) -> "HermitianOp":
        return HermitianOp(self.dims, _readonly(self.matrix * float(scalar)))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "HermitianOp":
        return HermitianOp(self.dims, _readonly(self.matrix / float(scalar)))

    def __neg__(self) -> "HermitianOp":
        return HermitianOp(self.dims, _readonly(-self.matrix))


def identity_op(dims: Dims) -> HermitianOp:
    return HermitianOp(dims, _readonly(np.eye(dims.d)))


def zero_op(dims: Dims) -> HermitianOp:
    return HermitianOp(dims, _readonly(np.zeros((dims.d, dims.d))))


# ============ 密度矩阵 ============

@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """迹为 1、半正定（容差内）的厄米算符"""
    op: HermitianOp
    eps_trace: float = field(default=DEFAULT_TOLERANCES["eps_trace"], repr=False)
    eps_psd: float = field(default=DEFAULT_TOLERANCES["eps_psd"], repr=False)

    def __post_init__(self):
        trace = self.op.trace
        if abs(trace - 1.0) > self.eps_trace:
            raise StateValidationError(f"密度矩阵的迹必须为 1，当前：{trace:.12g}")
        min_eig = float(self.op.eigvalsh()[0])
        if min_eig < -self.eps_psd:
            raise StateValidationError(f"密度矩阵不是半正定：最小特征值 {min_eig:.3e}")

    @classmethod
    def from_matrix(cls, dims: Dims, matrix, **tolerances) -> "DensityMatrix":
        eps_herm = tolerances.pop("eps_herm", DEFAULT_TOLERANCES["eps_herm"])
        return cls(HermitianOp.from_matrix(dims, matrix, eps_herm=eps_herm), **tolerances)

    @property
    def dims(self) -> Dims:
        return self.op.dims

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def coeffs(self) -> np.ndarray:
        return self.op.coeffs


Operand = Union[HermitianOp, DensityMatrix]


def as_op(x: Operand) -> HermitianOp:
    """DensityMatrix 解包为 HermitianOp"""
    if isinstance(x, DensityMatrix):
        return x.op
    if isinstance(x, HermitianOp):
        return x
    raise TypeError(f"需要 HermitianOp 或 DensityMatrix，收到 {type(x).__name__}")


def maximally_mixed_op(dims: Dims) -> HermitianOp:
    """I/(MN)"""
    return HermitianOp(dims, _readonly(np.eye(dims.d) / dims.d))


# ============ 内积与距离 ============

def inner(X: Operand, Y: Operand) -> float:
    """
    ⟨X, Y⟩ = tr(XY)

    Raises:
        DimensionError: 维度不匹配
    """
    X, Y = as_op(X), as_op(Y)
    if X.dims != Y.dims:
        raise DimensionError(f"维度不匹配：{X.dims} vs {Y.dims}")
    return float(np.real(np.sum(X.matrix * Y.matrix.T)))


def norm_distance(X: Operand, Y: Operand) -> float:
    """‖X − Y‖ = √tr((X−Y)²)"""
    X, Y = as_op(X), as_op(Y)
    if X.dims != Y.dims:
        raise DimensionError(f"维度不匹配：{X.dims} vs {Y.dims}")
    return float(np.linalg.norm(X.matrix - Y.matrix))


def operator_norm(X: Operand) -> float:
    """谱范数 max|λ|"""
    eigs = as_op(X).eigvalsh()
    return float(max(abs(eigs[0]), abs(eigs[-1])))


# ============ 张量结构 ============

def partial_transpose(X: Operand, subsystem: str = "B") -> HermitianOp:
    """
    对指定张量因子做部分转置

    Args:
        X: 算符
        subsystem: 'A' 或 'B'

    Returns:
        部分转置后的 HermitianOp（迹不变，两次作用还原）
    """
    X = as_op(X)
    M, N = X.dims.M, X.dims.N
    tensor = X.matrix.reshape(M, N, M, N)
    side = str(subsystem).upper()
    if side == "B":
        swapped = tensor.transpose(0, 3, 2, 1)
    elif side == "A":
        swapped = tensor.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"subsystem 必须是 'A' 或 'B'，收到：{subsystem!r}")
    return HermitianOp(X.dims, _readonly(swapped.reshape(X.dims.d, X.dims.d)))


def _check_unit(vector: np.ndarray, expected_dim: int, name: str, tol: float = 1e-9) -> np.ndarray:
    vector = np.asarray(vector, dtype=complex).reshape(-1)
    if vector.shape != (expected_dim,):
        raise DimensionError(f"{name} 维度应为 {expected_dim}，收到 {vector.shape[0]}")
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"{name} 必须是单位向量，当前范数 {norm:.12g}")
    return vector


def conditional_operator(A: Operand, beta) -> np.ndarray:
    """
    (I ⊗ ⟨β|) A (I ⊗ |β⟩)，M×M 厄米矩阵

    满足 ⟨α|·|α⟩ = ⟨αβ|A|αβ⟩；see-saw 中 α 取它的最大特征向量。
    """
    A = as_op(A)
    beta = _check_unit(beta, A.dims.N, "β")
    tensor = A.matrix.reshape(A.dims.M, A.dims.N, A.dims.M, A.dims.N)
    result = np.einsum('j,ijkl,l->ik', beta.conj(), tensor, beta)
    return (result + result.conj().T) / 2


def mirrored_conditional_operator(A: Operand, alpha) -> np.ndarray:
    """(⟨α| ⊗ I) A (|α⟩ ⊗ I)，N×N 厄米矩阵"""
    A = as_op(A)
    alpha = _check_unit(alpha, A.dims.M, "α")
    tensor = A.matrix.reshape(A.dims.M, A.dims.N, A.dims.M, A.dims.N)
    result = np.einsum('i,ijkl,k->jl', alpha.conj(), tensor, alpha)
    return (result + result.conj().T) / 2


# ============ 特征工具 ============

def gauge_fix(vector, tol: float = 1e-10) -> np.ndarray:
    """归一化，并令第一个非零分量为非负实数"""
    vector = np.array(vector, dtype=complex).reshape(-1)
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise ValueError("零向量无法固定规范")
    vector = vector / norm
    nonzero = np.flatnonzero(np.abs(vector) > tol)
    first = int(nonzero[0])
    phase = vector[first] / abs(vector[first])
    vector = vector * np.conj(phase)
    vector[first] = abs(vector[first])
    return vector


def top_eigenpair(
    H,
    eps_herm: float = DEFAULT_TOLERANCES["eps_herm"],
    eps_eig: float = DEFAULT_TOLERANCES["eps_eig"],
    degeneracy_tol: float = 1e-9,
) -> Tuple[float, np.ndarray]:
    """
    最大特征值及其单位特征向量

    简并时在最大特征子空间内取投影最大的最低下标标准基向量 e_i 的投影
    （第一个投影范数 ≥ 1e-3 的 i），再固定规范。

    Raises:
        ValueError: 非方阵或非厄米
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"需要方阵，收到形状 {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H))) if H.size else 1.0)
    if float(np.max(np.abs(H - H.conj().T))) > eps_herm * scale:
        raise ValueError("top_eigenpair 需要厄米矩阵")

    H = (H + H.conj().T) / 2
    eigenvalues, eigenvectors = np.linalg.eigh(H)
    top = float(eigenvalues[-1])
    tol = degeneracy_tol * max(1.0, float(np.max(np.abs(eigenvalues))))
    space = eigenvectors[:, eigenvalues >= top - tol]

    if space.shape[1] == 1:
        vector = space[:, 0]
    else:
        projections = space @ space.conj().T
        norms = np.linalg.norm(projections, axis=0)
        first = int(np.flatnonzero(norms >= 1e-3)[0])
        vector = projections[:, first]

    vector = gauge_fix(vector)
    residual = float(np.linalg.norm(H @ vector - top * vector))
    if residual > eps_eig * scale * 10:
        logger.warning(f"最大特征对残差偏大：{residual:.3e}")
    return top, vector
