"""
乘积态上的全局最大化（oracle）

f(σ) = tr(Aσ) 在纯乘积态 σ = |αβ⟩⟨αβ| 上取最大。

- 启发式：多起点 see-saw。固定 β 时关于 α 的最优解是条件算符的最大特征向量，反之亦然，
  每半步都精确最大化，因此 f 单调不减。
- 上界：λ_max(A) 总是合法上界；grid 后端另给出网格 + Lipschitz 填充的认证上界。

网格认证只在较小因子（维度 d_s）的坐标图上枚举，较大因子直接取条件算符的最大特征值，
g(α) = max_β f(α, β) = λ_max((⟨α|⊗I) A (|α⟩⊗I))。
对单位向量 α, α'：|g(α) − g(α')| ≤ (λ_max(A) − λ_min(A))·‖α − α'‖，
坐标图的 Jacobian 各列两两正交且范数 ≤ 1，所以映射是 1-Lipschitz；
网格覆盖半径为 (h/2)·√k_grid，k_grid = 2(d_s − 1)。于是
    f* ≤ grid_best + (λ_max − λ_min)·√k_grid/2 · h
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from config.settings import OracleConfig
from qstate.hermitian import (
    DimensionError,
    HermitianOp,
    as_op,
    conditional_operator,
    mirrored_conditional_operator,
    top_eigenpair,
)
from qstate.states import (
    ProductState,
    factor_from_chart,
    random_chart_params,
    wrap_phase,
)
from utils.logger import setup_logger

logger = setup_logger(__name__)

# 每批网格点数，控制批量 eigvalsh 的内存
GRID_CHUNK = 50_000

# 认证需要上界严格低于阈值这么多，排除舍入误差造成的假证明
CERTIFY_MARGIN = 1e-12

# 特征向量起点个数
EIGEN_SEEDS = 3

# 细化网格时，目标步长只用掉剩余间隙的这一比例
REFINE_SAFETY = 0.9


class GridBudgetError(RuntimeError):
    """网格分辨率超出点数预算"""

    def __init__(self, message: str, estimated_points: int):
        super().__init__(message)
        self.estimated_points = estimated_points


class OracleBudgetError(RuntimeError):
    """预算内无法完成任何一次求值"""


class OracleStatus(str, Enum):
    CUT_READY = "CutReady"
    WITNESS_CERTIFIED = "WitnessCertified"
    WITNESS_CANDIDATE = "WitnessCandidate"
    EXHAUSTED = "Exhausted"


@dataclass
class OracleReport:
    """一次 maximize 的结果"""
    incumbent: ProductState
    f_lower: float
    f_upper: float
    status: OracleStatus
    evaluations: int
    bound_source: str = "spectral"
    grid_h: Optional[float] = None
    starts_run: int = 0

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "f_lower": self.f_lower,
            "f_upper": self.f_upper,
            "bound_source": self.bound_source,
            "grid_h": self.grid_h,
            "evaluations": self.evaluations,
            "incumbent": self.incumbent.to_dict(),
        }


class SearchResult(NamedTuple):
    state: ProductState
    value: float
    evaluations: int


class GridCertificate(NamedTuple):
    f_upper: float
    grid_best: float
    best_state: ProductState
    points: int
    h: float


# ============ 求值与局部上升 ============

def evaluate(A: HermitianOp, s: ProductState) -> float:
    """⟨αβ|A|αβ⟩"""
    A = as_op(A)
    if A.dims != s.dims:
        raise DimensionError(f"维度不匹配：{A.dims} vs {s.dims}")
    v = s.vector
    return float(np.real(v.conj() @ A.matrix @ v))


def _ascend(
    A: HermitianOp,
    start: ProductState,
    tol: float,
    max_sweeps: int,
    max_evaluations: Optional[int] = None,
) -> SearchResult:
    alpha, beta = start.alpha, start.beta
    value = evaluate(A, start)
    evaluations = 1

    for _ in range(max_sweeps):
        if max_evaluations is not None and evaluations + 2 > max_evaluations:
            break
        _, alpha = top_eigenpair(conditional_operator(A, beta))
        top, beta = top_eigenpair(mirrored_conditional_operator(A, alpha))
        evaluations += 2
        improvement = top - value
        value = top
        if improvement < tol:
            break

    return SearchResult(ProductState.from_vectors(alpha, beta), value, evaluations)


def seesaw_ascent(
    A: HermitianOp,
    start: ProductState,
    tol: float = 1e-10,
    max_sweeps: int = 200,
) -> ProductState:
    """
    交替最大化：α ← 条件算符的最大特征向量，β ← 镜像条件算符的最大特征向量

    直到单轮提升 < tol 或达到 max_sweeps；输出值 ≥ 起点值 − 1e−12。
    """
    A = as_op(A)
    if A.dims != start.dims:
        raise DimensionError(f"维度不匹配：{A.dims} vs {start.dims}")
    return _ascend(A, start, tol, max_sweeps).state


# ============ 起点 ============

def eigen_seeded_starts(A: HermitianOp, count: int = EIGEN_SEEDS) -> List[ProductState]:
    """A 的前几个最大特征向量，各取 Schmidt 分解的主项"""
    A = as_op(A)
    _, vectors = np.linalg.eigh(A.matrix)
    starts = []
    for idx in range(1, min(count, A.dims.d) + 1):
        psi = vectors[:, -idx].reshape(A.dims.M, A.dims.N)
        u, _, vh = np.linalg.svd(psi)
        starts.append(ProductState.from_vectors(u[:, 0], vh[0, :]))
    return starts


def multistart_points(
    A: HermitianOp,
    count: int,
    seed: int = 0,
    extra: Sequence[ProductState] = (),
) -> List[ProductState]:
    """
    起点序列：坐标原点 (|0⟩,|0⟩)、额外起点、特征向量起点，其余为坐标图上的均匀随机点
    """
    A = as_op(A)
    starts = [ProductState.basis_state(A.dims)]
    starts.extend(extra)
    starts.extend(eigen_seeded_starts(A))
    rng = np.random.default_rng(seed)
    while len(starts) < count:
        starts.append(ProductState.from_params(A.dims, random_chart_params(A.dims, rng)))
    return starts[:max(count, 1)]


def _run_starts(A, starts, config: OracleConfig, threshold=None, budget=None):
    """
    按起点顺序归约；threshold 给定时第一个达到阈值的起点立即停止

    Returns:
        (best SearchResult, evaluations, starts_run, halted, exhausted)
    """
    best: Optional[SearchResult] = None
    evaluations = 0
    starts_run = 0

    def consume(result: SearchResult) -> bool:
        nonlocal best, evaluations, starts_run
        evaluations += result.evaluations
        starts_run += 1
        if best is None or result.value > best.value:
            best = result
        return threshold is not None and best.value >= threshold

    if budget is not None or config.threads <= 1:
        for start in starts:
            remaining = None if budget is None else budget - evaluations
            if remaining is not None and remaining < 1:
                return best, evaluations, starts_run, False, True
            result = _ascend(A, start, config.tol, config.max_sweeps, remaining)
            if consume(result):
                return best, evaluations, starts_run, True, False
        return best, evaluations, starts_run, False, False

    with ThreadPoolExecutor(max_workers=config.threads) as executor:
        for offset in range(0, len(starts), config.threads):
            batch = starts[offset:offset + config.threads]
            results = list(executor.map(
                lambda s: _ascend(A, s, config.tol, config.max_sweeps), batch
            ))
            for result in results:
                if consume(result):
                    return best, evaluations, starts_run, True, False
    return best, evaluations, starts_run, False, False


def search(
    A: HermitianOp,
    config: Optional[OracleConfig] = None,
    extra_starts: Sequence[ProductState] = (),
    starts: Optional[int] = None,
    seed: Optional[int] = None,
) -> SearchResult:
    """
    不提前停止的多起点 see-saw（Frank–Wolfe 的线性子问题）

    starts 只计随机起点：原点、extra_starts 与特征向量起点之外，总会再跑 starts 个随机点。

    Args:
        A: 目标算符
        config: oracle 配置
        extra_starts: 额外起点（如上一轮的最优乘积态）
        starts: 随机起点数，默认 config.starts 或 8k
        seed: 随机起点的种子，默认 config.seed
    """
    A = as_op(A)
    config = config or OracleConfig()
    count = starts or config.starts or 8 * A.dims.k
    seed = config.seed if seed is None else seed
    fixed = 1 + len(extra_starts) + min(EIGEN_SEEDS, A.dims.d)
    points = multistart_points(A, fixed + count, seed, extra_starts)
    best, evaluations, _, _, _ = _run_starts(A, points, config)
    return SearchResult(best.state, best.value, evaluations)


# ============ 网格认证 ============

def theta_grid(h: float) -> np.ndarray:
    """{jh : jh < π/2} ∪ {π/2}"""
    half_pi = np.pi / 2
    values = np.arange(0.0, half_pi, h)
    values = values[values < half_pi - 1e-12]
    return np.append(values, half_pi)


def phi_grid(h: float) -> np.ndarray:
    """{jh : |jh| < π} ∪ {π}"""
    j_max = int(math.floor(np.pi / h))
    values = np.arange(-j_max, j_max + 1) * h
    values = values[np.abs(values) < np.pi - 1e-12]
    return np.append(values, np.pi)


def grid_size(d: int, h: float) -> int:
    """单因子（维度 d）坐标图网格的点数"""
    return (len(theta_grid(h)) * len(phi_grid(h))) ** (d - 1)


def chart_grid_vectors(d: int, h: float) -> np.ndarray:
    thetas, phis = theta_grid(h), phi_grid(h)
    axes = [thetas] * (d - 1) + [phis] * (d - 1)
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2 * (d - 1))
    return factor_from_chart(mesh[:, :d - 1], wrap_phase(mesh[:, d - 1:]))


def lipschitz_constant(A: HermitianOp, k_grid: int) -> float:
    """L = (λ_max(A) − λ_min(A))·√k_grid / 2，填充量为 L·h"""
    eigs = as_op(A).eigvalsh()
    return float(eigs[-1] - eigs[0]) * math.sqrt(k_grid) / 2


def grid_certify(
    A: HermitianOp,
    h: float,
    max_points: Optional[int] = None,
    threads: int = 1,
) -> GridCertificate:
    """
    网格枚举较小因子的坐标图，给出认证上界

    Raises:
        GridBudgetError: 点数超过 max_points，附估计点数
    """
    A = as_op(A)
    dims = A.dims
    small_is_a = dims.M <= dims.N
    d_small = dims.M if small_is_a else dims.N
    k_grid = 2 * (d_small - 1)

    points = grid_size(d_small, h)
    if max_points is not None and points > max_points:
        raise GridBudgetError(
            f"网格步长 h={h:.4g} 需要 {points} 个点，超过上限 {max_points}", points
        )

    vectors = chart_grid_vectors(d_small, h)
    tensor = A.matrix.reshape(dims.M, dims.N, dims.M, dims.N)
    pattern = 'ni,ijkl,nk->njl' if small_is_a else 'nj,ijkl,nl->nik'

    def chunk_max(chunk: np.ndarray) -> np.ndarray:
        blocks = np.einsum(pattern, chunk.conj(), tensor, chunk)
        blocks = (blocks + np.conj(np.swapaxes(blocks, 1, 2))) / 2
        return np.linalg.eigvalsh(blocks)[:, -1]

    chunks = [vectors[i:i + GRID_CHUNK] for i in range(0, len(vectors), GRID_CHUNK)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            values = np.concatenate(list(executor.map(chunk_max, chunks)))
    else:
        values = np.concatenate([chunk_max(c) for c in chunks])

    best_idx = int(np.argmax(values))
    grid_best = float(values[best_idx])
    small = vectors[best_idx] / np.linalg.norm(vectors[best_idx])
    if small_is_a:
        _, other = top_eigenpair(mirrored_conditional_operator(A, small))
        state = ProductState.from_vectors(small, other)
    else:
        _, other = top_eigenpair(conditional_operator(A, small))
        state = ProductState.from_vectors(other, small)

    f_upper = grid_best + lipschitz_constant(A, k_grid) * h
    logger.debug(f"网格认证 {dims} h={h:.4g}: {points} 点, best={grid_best:.6f}, upper={f_upper:.6f}")
    return GridCertificate(f_upper, grid_best, state, points, h)


def affordable_resolution(d_small: int, h: float, max_points: int) -> float:
    """从 h 开始加倍，直到网格点数不超过 max_points"""
    while grid_size(d_small, h) > max_points:
        h *= 2
        if h > np.pi / 2:
            raise GridBudgetError(
                f"最粗网格也超过 {max_points} 点", grid_size(d_small, np.pi / 2)
            )
    return h


# ============ oracle 主入口 ============

def maximize(
    A: HermitianOp,
    threshold: float,
    delta: float = 0.0,
    config: Optional[OracleConfig] = None,
    budget: Optional[int] = None,
    extra_starts: Sequence[ProductState] = (),
) -> OracleReport:
    """
    oracle O(A)：在乘积态上最大化 tr(Aσ)，支持两种提前停止

    - f_lower ≥ threshold：CutReady（找到违反的可分态，可以切割）
    - 认证上界 f_upper < threshold：WitnessCertified

    其余情况：起点全部跑完为 WitnessCandidate，预算用尽为 Exhausted。
    grid 后端在未下结论时把网格步长减半，直到证明、找到割平面、
    认证间隙 f_upper − f_lower ≤ delta 或点数超限。

    Args:
        A: ‖A‖ ≤ 1 的算符
        threshold: t = tr(Aρ)
        delta: 精度
        config: oracle 配置
        budget: 目标函数求值次数上限，覆盖 config.max_evaluations

    Raises:
        OracleBudgetError: 预算内无法做任何求值
    """
    A = as_op(A)
    config = config or OracleConfig()
    if A.norm > 1 + 1e-9:
        raise ValueError(f"oracle 需要 ‖A‖ ≤ 1，当前 {A.norm:.12g}")
    budget = budget if budget is not None else config.max_evaluations
    if budget is not None and budget < 1:
        raise OracleBudgetError("oracle 预算为 0，无法求值")

    eigs = A.eigvalsh()
    spectral_upper = float(eigs[-1])
    count = config.starts or 8 * A.dims.k
    starts = multistart_points(A, count + len(extra_starts), config.seed, extra_starts)

    best, evaluations, starts_run, halted, exhausted = _run_starts(
        A, starts, config, threshold=threshold, budget=budget
    )
    if best is None:
        raise OracleBudgetError("预算内没有完成任何起点")

    report = OracleReport(
        incumbent=best.state,
        f_lower=best.value,
        f_upper=max(spectral_upper, best.value),
        status=OracleStatus.WITNESS_CANDIDATE,
        evaluations=evaluations,
        starts_run=starts_run,
    )

    if halted:
        report.status = OracleStatus.CUT_READY
        return report
    if spectral_upper < threshold - CERTIFY_MARGIN:
        report.status = OracleStatus.WITNESS_CERTIFIED
        return report

    if config.backend == "grid":
        _refine_with_grid(A, threshold, delta, config, report)
        if report.status != OracleStatus.WITNESS_CANDIDATE:
            return report

    if exhausted:
        report.status = OracleStatus.EXHAUSTED
    return report


def _refine_with_grid(
    A: HermitianOp,
    threshold: float,
    delta: float,
    config: OracleConfig,
    report: OracleReport,
) -> None:
    """
    逐级加细网格直到下结论

    每级步长取 h/2 与 REFINE_SAFETY·(t − f̲)/L 中较小者，直接跳到足以认证的分辨率；
    所需网格超过点数上限时停止，不再做无法认证的细化。
    """
    d_small = min(A.dims.M, A.dims.N)
    try:
        h = affordable_resolution(d_small, config.grid_h, config.max_grid_points)
    except GridBudgetError as e:
        logger.warning(f"网格认证不可用：{e}")
        return
    lipschitz = lipschitz_constant(A, 2 * (d_small - 1))

    while True:
        cert = grid_certify(A, h, config.max_grid_points, config.threads)
        report.evaluations += cert.points
        report.grid_h = h
        if cert.grid_best > report.f_lower:
            report.f_lower = cert.grid_best
            report.incumbent = cert.best_state
        if cert.f_upper < report.f_upper:
            report.f_upper = cert.f_upper
            report.bound_source = "grid"

        if report.f_lower >= threshold:
            report.status = OracleStatus.CUT_READY
            return
        if report.f_upper < threshold - CERTIFY_MARGIN:
            report.status = OracleStatus.WITNESS_CERTIFIED
            return
        if report.f_upper - report.f_lower <= delta:
            return
        next_h = h / 2
        if lipschitz > 0:
            next_h = min(next_h, REFINE_SAFETY * (threshold - report.f_lower) / lipschitz)
        # 每个因子约 π²/h² 个点；先粗估，避免为极小步长生成网格坐标
        rough = (np.pi / next_h) ** (2 * (d_small - 1))
        if rough > 4 * config.max_grid_points or grid_size(d_small, next_h) > config.max_grid_points:
            logger.debug(f"认证需要步长 {next_h:.3g}，超出网格点数上限，停止细化")
            return
        h = next_h
