"""
量子态模块 - 密度矩阵、纯乘积态及其参数化、标准测试族

纯乘积态 |α⟩⊗|β⟩ 用 k = 2(M+N)−4 个实参数描述。每个因子 C^d 上的坐标：
    振幅  r_0 = cos θ_1, r_1 = sin θ_1 cos θ_2, ..., r_{d−1} = sin θ_1 ⋯ sin θ_{d−1}，θ ∈ [0, π/2]^{d−1}
    相位  v_j = r_j·e^{iφ_j}（j = 1..d−1），φ ∈ (−π, π]^{d−1}，v_0 为非负实数（规范）
参数顺序 [θ_α, φ_α, θ_β, φ_β]。图外的参数先按公式生成向量再重新固定规范，
所以 ProductState.params 总是规范坐标（相位落在 (−π, π]）。
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Tuple, Union

import numpy as np

from utils.logger import setup_logger
from utils.validators import (
    validate_density_payload,
    validate_pauli_string,
    validate_positive_int,
    validate_probability,
)

from .hermitian import (
    DensityMatrix,
    Dims,
    DimensionError,
    HermitianOp,
    StateValidationError,
    build_basis,
    gauge_fix,
)

logger = setup_logger(__name__)

SeedLike = Union[None, int, np.random.Generator]


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ============ 坐标图 ============

def wrap_phase(phi):
    """相位折回 (−π, π]"""
    phi = np.asarray(phi, dtype=float)
    return phi - 2 * np.pi * np.ceil((phi - np.pi) / (2 * np.pi))


def factor_from_chart(theta, phi) -> np.ndarray:
    """
    单因子坐标 → 单位向量，支持批量（最后一维为 d−1）

    Returns:
        形状 (..., d) 的复数组
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ones = np.ones(theta.shape[:-1] + (1,))
    prefix = np.concatenate([ones, np.cumprod(np.sin(theta), axis=-1)], axis=-1)
    cosines = np.concatenate([np.cos(theta), ones], axis=-1)
    phases = np.concatenate([np.zeros_like(ones), phi], axis=-1)
    return prefix * cosines * np.exp(1j * phases)


def factor_to_chart(vector, tol: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
    """单位向量（已固定规范）→ (θ, φ)"""
    vector = np.asarray(vector, dtype=complex)
    amps = np.abs(vector)
    tails = np.sqrt(np.cumsum((amps ** 2)[::-1])[::-1])
    theta = np.arctan2(tails[1:], amps[:-1])
    phi = np.where(amps[1:] > tol, np.angle(vector[1:]), 0.0)
    return theta, wrap_phase(phi)


def split_params(dims: Dims, params) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """按 [θ_α, φ_α, θ_β, φ_β] 切分参数向量"""
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.shape != (dims.k,):
        raise DimensionError(f"参数个数应为 k={dims.k}，收到 {params.shape[0]}")
    a, b = dims.M - 1, dims.N - 1
    return params[:a], params[a:2 * a], params[2 * a:2 * a + b], params[2 * a + b:]


def random_chart_params(dims: Dims, rng: np.random.Generator) -> np.ndarray:
    """在坐标图上均匀采样：θ ~ U[0, π/2]，φ ~ U(−π, π]"""
    parts = []
    for d in (dims.M, dims.N):
        parts.append(rng.uniform(0.0, np.pi / 2, d - 1))
        parts.append(wrap_phase(rng.uniform(-np.pi, np.pi, d - 1)))
    return np.concatenate(parts)


def local_coefficients(local_basis: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """
    单因子投影 |v⟩⟨v| 在单系统基下的系数 ⟨v|G_a|v⟩

    Args:
        local_basis: (d², d, d)
        vectors: (d,) 或 (m, d)

    Returns:
        (d²,) 或 (m, d²)
    """
    vectors = np.asarray(vectors, dtype=complex)
    single = vectors.ndim == 1
    vectors = np.atleast_2d(vectors)
    coeffs = np.real(np.einsum('ni,aij,nj->na', vectors.conj(), local_basis, vectors))
    return coeffs[0] if single else coeffs


# ============ 纯乘积态 ============

@dataclass(frozen=True, eq=False)
class ProductState:
    """规范固定的纯乘积态 |α⟩⊗|β⟩"""
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        for name, vector in (("α", self.alpha), ("β", self.beta)):
            norm = float(np.linalg.norm(vector))
            if abs(norm - 1.0) > 1e-10:
                raise StateValidationError(f"{name} 必须是单位向量，当前范数 {norm:.12g}")

    @classmethod
    def from_vectors(cls, alpha, beta) -> "ProductState":
        """归一化并固定两个因子的规范"""
        alpha, beta = gauge_fix(alpha), gauge_fix(beta)
        for arr in (alpha, beta):
            arr.setflags(write=False)
        return cls(alpha, beta)

    @classmethod
    def from_params(cls, dims: Dims, params) -> "ProductState":
        theta_a, phi_a, theta_b, phi_b = split_params(dims, params)
        return cls.from_vectors(
            factor_from_chart(theta_a, phi_a), factor_from_chart(theta_b, phi_b)
        )

    @classmethod
    def basis_state(cls, dims: Dims, i: int = 0, j: int = 0) -> "ProductState":
        """|i⟩⊗|j⟩"""
        alpha = np.zeros(dims.M, dtype=complex)
        beta = np.zeros(dims.N, dtype=complex)
        alpha[i] = 1.0
        beta[j] = 1.0
        return cls.from_vectors(alpha, beta)

    @cached_property
    def dims(self) -> Dims:
        return Dims(len(self.alpha), len(self.beta))

    @cached_property
    def params(self) -> np.ndarray:
        theta_a, phi_a = factor_to_chart(self.alpha)
        theta_b, phi_b = factor_to_chart(self.beta)
        params = np.concatenate([theta_a, phi_a, theta_b, phi_b])
        params.setflags(write=False)
        return params

    @property
    def vector(self) -> np.ndarray:
        return np.kron(self.alpha, self.beta)

    @cached_property
    def coeffs(self) -> np.ndarray:
        """基系数，利用张量结构 c = c_α ⊗ c_β"""
        basis = build_basis(self.dims)
        return np.kron(
            local_coefficients(basis.local_a, self.alpha),
            local_coefficients(basis.local_b, self.beta),
        )

    def operator(self) -> HermitianOp:
        v = self.vector
        return HermitianOp.from_matrix(self.dims, np.outer(v, v.conj()))

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.operator())

    def to_dict(self) -> dict:
        return {"alpha": list(self.alpha), "beta": list(self.beta)}


def params_roundtrip(dims: Dims, params) -> ProductState:
    """
    参数向量 → ProductState

    零向量对应 (|0⟩, |0⟩)；图内部的参数可由 .params 精确恢复。
    """
    return ProductState.from_params(dims, params)


# ============ 可分分解 ============

@dataclass(frozen=True, eq=False)
class SeparableDecomposition:
    """纯乘积态的凸组合 Σ w_i |α_iβ_i⟩⟨α_iβ_i|"""
    terms: Tuple[Tuple[float, ProductState], ...]

    def __post_init__(self):
        if not self.terms:
            raise StateValidationError("可分分解至少需要一项")
        dims = self.terms[0][1].dims
        weights = np.array([w for w, _ in self.terms], dtype=float)
        if np.any(weights <= 0) or np.any(weights > 1 + 1e-12):
            raise StateValidationError("分解权重必须落在 (0, 1] 内")
        if abs(float(weights.sum()) - 1.0) > 1e-10:
            raise StateValidationError(f"分解权重之和必须为 1，当前：{weights.sum():.12g}")
        if any(state.dims != dims for _, state in self.terms):
            raise DimensionError("分解中各乘积态维度不一致")
        if len(self.terms) > dims.n:
            raise StateValidationError(f"分解项数 {len(self.terms)} 超过 n={dims.n}")

    @classmethod
    def from_weights(
        cls, weights: Sequence[float], states: Sequence[ProductState], floor: float = 0.0
    ) -> "SeparableDecomposition":
        """丢弃不超过 floor 的权重后重新归一化"""
        kept = [(float(w), s) for w, s in zip(weights, states) if w > floor]
        if not kept:
            raise StateValidationError("可分分解至少需要一项正权重")
        total = sum(w for w, _ in kept)
        return cls(tuple((w / total, s) for w, s in kept))

    @property
    def dims(self) -> Dims:
        return self.terms[0][1].dims

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.terms])

    @property
    def states(self) -> Tuple[ProductState, ...]:
        return tuple(s for _, s in self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"weight": w, "alpha": list(s.alpha), "beta": list(s.beta)}
                for w, s in self.terms
            ]
        }


def mix(decomp: SeparableDecomposition) -> DensityMatrix:
    """Σ w_i |α_iβ_i⟩⟨α_iβ_i|"""
    vectors = np.array([s.vector for s in decomp.states])
    weights = decomp.weights
    matrix = np.einsum('t,ti,tj->ij', weights, vectors, vectors.conj())
    return DensityMatrix(HermitianOp.from_matrix(decomp.dims, (matrix + matrix.conj().T) / 2))


# ============ 标准测试族 ============

_SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)

_BELL_VECTORS = {
    "phi+": np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2),
    "phi-": np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
    "psi-": _SINGLET,
}


def _check_probability(p: float) -> float:
    valid, err = validate_probability(p)
    if not valid:
        raise ValueError(err)
    return float(p)


def pure_density(dims: Dims, psi) -> DensityMatrix:
    """|ψ⟩⟨ψ|（ψ 会被归一化）"""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (dims.d,):
        raise DimensionError(f"态向量长度应为 {dims.d}，收到 {psi.shape[0]}")
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise StateValidationError("零向量不是量子态")
    psi = psi / norm
    return DensityMatrix(HermitianOp.from_matrix(dims, np.outer(psi, psi.conj())))


def product_density(alpha, beta) -> DensityMatrix:
    return ProductState.from_vectors(alpha, beta).density()


def maximally_mixed(dims: Dims) -> DensityMatrix:
    """I/(MN)"""
    return DensityMatrix(HermitianOp.from_matrix(dims, np.eye(dims.d) / dims.d))


def maximally_mixed_decomposition(dims: Dims) -> SeparableDecomposition:
    """I/(MN) = 计算基乘积态 |ij⟩⟨ij| 的均匀混合"""
    states = [ProductState.basis_state(dims, i, j) for i in range(dims.M) for j in range(dims.N)]
    return SeparableDecomposition.from_weights(np.full(dims.d, 1.0 / dims.d), states)


def bell_state(which: str = "phi+") -> DensityMatrix:
    """两比特 Bell 态：phi+ / phi- / psi+ / psi-"""
    key = which.lower()
    if key not in _BELL_VECTORS:
        raise ValueError(f"未知 Bell 态：{which}，可选：{list(_BELL_VECTORS)}")
    return pure_density(Dims(2, 2), _BELL_VECTORS[key])


def werner(p: float) -> DensityMatrix:
    """p|Ψ−⟩⟨Ψ−| + (1−p)I/4；p > 1/3 时纠缠"""
    p = _check_probability(p)
    matrix = p * np.outer(_SINGLET, _SINGLET.conj()) + (1 - p) * np.eye(4) / 4
    return DensityMatrix(HermitianOp.from_matrix(Dims(2, 2), matrix))


def isotropic(d: int, p: float) -> DensityMatrix:
    """d×d 各向同性态 p|Φ+⟩⟨Φ+| + (1−p)I/d²；p > 1/(d+1) 时纠缠"""
    p = _check_probability(p)
    dims = Dims(d, d)
    phi = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    matrix = p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(dims.d) / dims.d
    return DensityMatrix(HermitianOp.from_matrix(dims, matrix))


def random_state(dims: Dims, seed: SeedLike = None) -> DensityMatrix:
    """Hilbert–Schmidt 测度下的随机态：ρ = GG†/tr(GG†)，G 为复 Ginibre 矩阵"""
    rng = _rng(seed)
    ginibre = rng.standard_normal((dims.d, dims.d)) + 1j * rng.standard_normal((dims.d, dims.d))
    matrix = ginibre @ ginibre.conj().T
    matrix = matrix / np.real(np.trace(matrix))
    return DensityMatrix(HermitianOp.from_matrix(dims, (matrix + matrix.conj().T) / 2))


def random_product_state(dims: Dims, rng: SeedLike = None) -> ProductState:
    """两个因子分别按 Haar 测度采样"""
    rng = _rng(rng)
    alpha = rng.standard_normal(dims.M) + 1j * rng.standard_normal(dims.M)
    beta = rng.standard_normal(dims.N) + 1j * rng.standard_normal(dims.N)
    return ProductState.from_vectors(alpha, beta)


def random_separable(
    dims: Dims, r: int, seed: SeedLike = None
) -> Tuple[DensityMatrix, SeparableDecomposition]:
    """
    r 个 Haar 随机乘积态的 Dirichlet 加权混合

    Returns:
        (密度矩阵, 植入的分解)
    """
    valid, err = validate_positive_int(r, "项数 r")
    if not valid:
        raise ValueError(err)
    if r > dims.n:
        raise ValueError(f"项数 r={r} 不能超过 n={dims.n}")
    rng = _rng(seed)
    states = [random_product_state(dims, rng) for _ in range(r)]
    weights = rng.dirichlet(np.ones(r))
    decomp = SeparableDecomposition.from_weights(weights, states)
    return mix(decomp), decomp


# ============ 泡利串 ============

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_string(label: str) -> HermitianOp:
    """'XZ' → X⊗Z（两比特）"""
    valid, err = validate_pauli_string(label)
    if not valid:
        raise ValueError(err)
    first, second = label.upper()
    return HermitianOp.from_matrix(Dims(2, 2), np.kron(_PAULI[first], _PAULI[second]))


# ============ JSON 编解码 ============

def density_to_payload(rho: DensityMatrix) -> dict:
    """{"M", "N", "matrix": [[[re, im], ...], ...]}"""
    return {
        "M": rho.dims.M,
        "N": rho.dims.N,
        "matrix": [
            [[float(z.real), float(z.imag)] for z in row] for row in rho.matrix
        ],
    }


def density_from_payload(payload: dict, **tolerances) -> DensityMatrix:
    """
    解析密度矩阵 JSON

    Raises:
        StateValidationError: 结构或物理性质不合法
        DimensionError: 维度超限
    """
    valid, err = validate_density_payload(payload)
    if not valid:
        raise StateValidationError(err)
    dims = Dims(payload["M"], payload["N"])
    dims.check_budget()
    entries = np.array(payload["matrix"], dtype=float)
    matrix = entries[..., 0] + 1j * entries[..., 1]
    return DensityMatrix.from_matrix(dims, matrix, **tolerances)

