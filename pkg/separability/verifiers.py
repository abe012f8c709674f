"""
独立验证工具

- PPT 判据（MN ≤ 6 时充要）及由负特征向量构造的见证
- Frank–Wolfe 最近可分态：线性子问题就是 oracle，输出 ≤ n 项的可分分解
- 见证校验：用 oracle 检查 tr(Aσ) < tr(Aρ) + δ
- 基础算法：有限乘积态网格上的全修正条件梯度
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import nnls

from config.settings import DEFAULT_TOLERANCES, OracleConfig
from qstate.hermitian import (
    DensityMatrix,
    HermitianOp,
    as_op,
    build_basis,
    inner,
    partial_transpose,
    top_eigenpair,
)
from qstate.states import (
    ProductState,
    SeparableDecomposition,
    local_coefficients,
    maximally_mixed_decomposition,
)
from utils.logger import setup_logger

from .frame import Frame
from .oracle import (
    GridBudgetError,
    GridCertificate,
    OracleStatus,
    affordable_resolution,
    chart_grid_vectors,
    grid_certify,
    grid_size,
    lipschitz_constant,
    maximize,
    search,
)
from .verdict import Verdict, VerdictKind, Witness

logger = setup_logger(__name__)

# nnls 中“权重和为 1”这一行的放大系数
SUM_ROW_WEIGHT = 1e3


# ============ PPT ============

class PptVerdict(str, Enum):
    PPT_POSITIVE = "PPT_POSITIVE"
    PPT_NEGATIVE = "PPT_NEGATIVE"


@dataclass
class PptReport:
    min_eigenvalue: float
    verdict: PptVerdict
    eigenvalues: np.ndarray
    eigenvector: Optional[np.ndarray] = None
    exact: bool = False

    def to_dict(self) -> dict:
        result = {
            "verdict": self.verdict.value,
            "min_eigenvalue": self.min_eigenvalue,
            "eigenvalues": list(self.eigenvalues),
            "exact": self.exact,
        }
        if self.eigenvector is not None:
            result["eigenvector"] = list(self.eigenvector)
        return result


def ppt_test(rho: DensityMatrix, eps_psd: float = DEFAULT_TOLERANCES["eps_psd"]) -> PptReport:
    """
    对 PT_B(ρ) 做特征分解；exact 表示 MN ≤ 6，此时 PPT 等价于可分
    """
    pt = partial_transpose(rho, "B")
    eigenvalues = pt.eigvalsh()
    min_eig = float(eigenvalues[0])
    negative = min_eig < -eps_psd
    eigenvector = None
    if negative:
        _, eigenvector = top_eigenpair(-pt.matrix)
    return PptReport(
        min_eigenvalue=min_eig,
        verdict=PptVerdict.PPT_NEGATIVE if negative else PptVerdict.PPT_POSITIVE,
        eigenvalues=eigenvalues,
        eigenvector=eigenvector,
        exact=rho.dims.d <= 6,
    )


def ppt_witness(rho: DensityMatrix) -> HermitianOp:
    """
    由 PT_B(ρ) 的负特征向量 η 构造见证：A ∝ −PT_B(|η⟩⟨η|) 去迹后归一

    对可分 σ 有 tr(PT_B(|η⟩⟨η|)σ) ≥ 0 > ⟨η|PT_B(ρ)|η⟩，因此 tr(Aσ) < tr(Aρ)。

    Raises:
        ValueError: ρ 是 PPT 的
    """
    report = ppt_test(rho)
    if report.verdict != PptVerdict.PPT_NEGATIVE:
        raise ValueError("ppt_witness 只适用于部分转置非正的态")
    eta = report.eigenvector
    projector = HermitianOp.from_matrix(rho.dims, np.outer(eta, eta.conj()))
    return (-partial_transpose(projector, "B")).traceless_part().normalized()


# ============ Frank–Wolfe ============

# 间隙不超过此值视为线性子问题没有改进方向
GAP_TOL = 1e-12

# 线性子问题额外起点：权重最大的几个活跃原子
WARM_ATOMS = 2


def _caratheodory(points: np.ndarray, weights: np.ndarray, limit: int) -> np.ndarray:
    """
    把凸组合的支撑缩减到至多 limit 个点：沿 [P; 1] 的零空间方向移动权重直到某项归零

    Returns:
        新权重（零权重表示删除）
    """
    weights = weights.copy()
    while np.count_nonzero(weights) > limit:
        active = np.flatnonzero(weights)
        system = np.vstack([points[active].T, np.ones((1, len(active)))])
        basis = null_space(system)
        if basis.shape[1] == 0:
            break
        z = basis[:, 0]
        if not np.any(z > 1e-14):
            z = -z
        positive = z > 1e-14
        tau = np.min(weights[active][positive] / z[positive])
        updated = weights[active] - tau * z
        updated[updated < 1e-14] = 0.0
        weights[active] = updated
    total = weights.sum()
    return weights / total if total > 0 else weights


def _simplex_least_squares(points: np.ndarray, target: np.ndarray) -> np.ndarray:
    """min ‖Pᵀw − target‖，w ≥ 0，Σw = 1（求和约束作为加权行）"""
    system = np.vstack([points.T, SUM_ROW_WEIGHT * np.ones((1, len(points)))])
    rhs = np.concatenate([target, [SUM_ROW_WEIGHT]])
    weights, _ = nnls(system, rhs)
    total = weights.sum()
    return weights / total if total > 0 else weights


class FrankWolfeSession:
    """
    坐标系内求 target 到可分集合投影的最近点，可分多次推进

    每步：线性子问题 O(r)（r = target − x），精确线搜索，再在活跃原子上做全修正重加权
    （只在距离不增时接受），最后做 Carathéodory 缩减。

    线性子问题是启发式的。see-saw 找不到正间隙时先用 8k 个随机起点重试，
    grid 后端再做网格认证；仍无改进时本次推进停滞（stalled）。
    lower_bound 只来自网格认证的上界：对任意可分 s 有 ‖t − s‖ ≥ ⟨r̂, t⟩ − f̄(r̂)。
    dual_estimate 用 see-saw 的最优值代替 f̄，只作参考。
    """

    def __init__(
        self,
        frame: Frame,
        target: np.ndarray,
        oracle_config: Optional[OracleConfig] = None,
        fw_starts: int = 4,
    ):
        self.frame = frame
        self.target = np.asarray(target, dtype=float)
        self.oracle_config = oracle_config or OracleConfig()
        self.fw_starts = fw_starts
        self.atoms: List[ProductState] = []
        self.points = np.zeros((0, frame.size))
        self.weights = np.zeros(0)
        self.x = np.zeros(frame.size)
        self.steps = 0
        self.oracle_calls = 0
        self.lower_bound = 0.0
        self.dual_estimate = 0.0
        self.stalled = False
        self.history: List[float] = []

    @property
    def distance(self) -> float:
        if not self.atoms:
            return float("inf")
        return float(np.linalg.norm(self.target - self.x))

    def _lmo(self, direction: np.ndarray, starts: Optional[int] = None) -> ProductState:
        warm = [self.atoms[i] for i in np.argsort(-self.weights)[:WARM_ATOMS]]
        result = search(
            self.frame.operator(direction),
            self.oracle_config,
            extra_starts=warm,
            starts=starts or self.fw_starts,
            seed=self.oracle_config.seed + self.oracle_calls,
        )
        self.oracle_calls += 1
        return result.state

    def _certify(self, direction: np.ndarray) -> Optional[GridCertificate]:
        """
        网格认证 max_σ ⟨r̂, σ⟩ 并更新 lower_bound；非 grid 后端或网格超限时返回 None
        """
        if self.oracle_config.backend != "grid":
            return None
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            return None
        unit = direction / norm
        config = self.oracle_config
        d_small = min(self.frame.dims.M, self.frame.dims.N)
        try:
            h = affordable_resolution(d_small, config.grid_h, config.max_grid_points)
            cert = grid_certify(self.frame.operator(unit), h, config.max_grid_points, config.threads)
        except GridBudgetError as e:
            logger.warning(f"Frank–Wolfe 下界无法认证：{e}")
            return None
        self.oracle_calls += 1
        bound = float(unit @ self.target) - cert.f_upper
        self.lower_bound = max(self.lower_bound, bound)
        return cert

    def certify_lower_bound(self) -> float:
        """在当前残差方向上做一次网格认证，返回目前最好的可靠距离下界"""
        self._certify(self.target - self.x)
        return self.lower_bound

    def _improving_atom(
        self, residual: np.ndarray, budget: Optional[int]
    ) -> Tuple[Optional[ProductState], float]:
        """
        线性子问题：间隙 ⟨r, p − x⟩ 为正的乘积态

        依次尝试 fw_starts 个随机起点、8k 个随机起点、网格认证（受 budget 限制）。

        Returns:
            (乘积态, 间隙)；都找不到正间隙时乘积态为 None
        """
        offset = float(residual @ self.x)

        def gap_of(state: ProductState) -> float:
            return float(residual @ self.frame.product_coords(state)) - offset

        state = self._lmo(residual)
        gap = gap_of(state)
        if gap > GAP_TOL:
            return state, gap

        if budget is None or budget >= 2:
            full = self.oracle_config.starts or 8 * self.frame.dims.k
            logger.debug(f"线性子问题间隙 {gap:.3e} 不为正，用 {full} 个随机起点重试")
            retry = self._lmo(residual, starts=full)
            retry_gap = gap_of(retry)
            if retry_gap > gap:
                state, gap = retry, retry_gap
            if gap > GAP_TOL:
                return state, gap

        if budget is None or budget >= 3:
            cert = self._certify(residual)
            if cert is not None and gap_of(cert.best_state) > GAP_TOL:
                return cert.best_state, gap_of(cert.best_state)
        return None, gap

    def _add_atom(self, state: ProductState, point: np.ndarray, weight: float) -> None:
        if len(self.points):
            gaps = np.linalg.norm(self.points - point, axis=1)
            idx = int(np.argmin(gaps))
            if gaps[idx] < 1e-12:
                self.weights[idx] += weight
                return
        self.atoms.append(state)
        self.points = np.vstack([self.points, point])
        self.weights = np.append(self.weights, weight)

    def _prune(self, weights: np.ndarray) -> None:
        keep = weights > 1e-13
        self.atoms = [a for a, k in zip(self.atoms, keep) if k]
        self.points = self.points[keep]
        self.weights = weights[keep] / weights[keep].sum()
        self.x = self.weights @ self.points

    def _correct(self) -> None:
        weights = _simplex_least_squares(self.points, self.target)
        if weights.sum() <= 0:
            return
        candidate = weights @ self.points
        if np.linalg.norm(self.target - candidate) <= self.distance + 1e-15:
            self._prune(weights)

    def _reduce(self) -> None:
        limit = self.frame.size + 1
        if len(self.atoms) > limit:
            self._prune(_caratheodory(self.points, self.weights, limit))

    def step(self, budget: Optional[int] = None) -> None:
        """推进一步；budget 为本步可用的 oracle 调用次数（含重试与认证）"""
        self.steps += 1
        if not self.atoms:
            state = self._lmo(self.target)
            self._add_atom(state, self.frame.product_coords(state), 1.0)
            self.x = self.points[0].copy()
            self.history.append(self.distance)
            return

        residual = self.target - self.x
        dist = float(np.linalg.norm(residual))
        if dist == 0.0:
            self.stalled = True
            return
        state, gap = self._improving_atom(residual, budget)
        self.dual_estimate = (dist ** 2 - gap) / dist
        if state is None:
            logger.debug(f"Frank–Wolfe 停滞：距离 {dist:.6g}，间隙 {gap:.3e}")
            self.stalled = True
            self.history.append(self.distance)
            return

        point = self.frame.product_coords(state)
        direction = point - self.x
        length_sq = float(direction @ direction)
        if length_sq > 1e-30:
            gamma = min(max(gap / length_sq, 0.0), 1.0)
            self.weights = self.weights * (1 - gamma)
            self._add_atom(state, point, gamma)
            self.x = self.weights @ self.points
            self._correct()
            self._reduce()
        self.history.append(self.distance)

    def run(self, calls: int, target_distance: Optional[float] = None) -> int:
        """
        至多用 calls 次 oracle 调用推进；达到 target_distance 或停滞时提前结束

        Returns:
            实际使用的 oracle 调用次数
        """
        start = self.oracle_calls
        self.stalled = False
        while not self.stalled:
            remaining = calls - (self.oracle_calls - start)
            if remaining < 1:
                break
            if target_distance is not None and self.distance <= target_distance:
                break
            self.step(remaining)
        return self.oracle_calls - start

    def dual_witness(self) -> np.ndarray:
        """(target − x)/‖target − x‖，分离 target 与当前可分近似的方向"""
        residual = self.target - self.x
        return residual / np.linalg.norm(residual)

    def decomposition(self) -> SeparableDecomposition:
        self._reduce()
        return SeparableDecomposition.from_weights(self.weights, self.atoms)


class FrankWolfeResult(NamedTuple):
    distance: float
    decomposition: SeparableDecomposition
    converged: bool
    steps: int
    lower_bound: float
    history: List[float]
    dual_estimate: float = 0.0


def frank_wolfe_nearest(
    rho: DensityMatrix,
    delta: float = 0.01,
    budget: int = 200,
    oracle_config: Optional[OracleConfig] = None,
    fw_starts: int = 4,
) -> FrankWolfeResult:
    """
    ρ 到可分集合的距离（上界）及 ≤ n 项分解

    budget 为 oracle 调用次数；用尽时 converged=False，返回当前最好结果。
    未收敛时另做一次网格认证，lower_bound 为可靠下界（seesaw 后端为 0）。
    budget = 0 时以最大混态（计算基乘积态的均匀混合）作为当前最好结果。
    """
    frame = Frame.full(rho.dims)
    session = FrankWolfeSession(frame, frame.coords(rho), oracle_config, fw_starts)
    session.run(budget, target_distance=delta)
    if session.atoms:
        distance = session.distance
        decomposition = session.decomposition()
    else:
        distance = float(np.linalg.norm(session.target))
        decomposition = maximally_mixed_decomposition(rho.dims)

    converged = distance <= delta
    if not converged:
        session.certify_lower_bound()
        logger.info(f"Frank–Wolfe 预算用尽：距离 {distance:.6g}，认证下界 {session.lower_bound:.6g}")
    return FrankWolfeResult(
        distance=distance,
        decomposition=decomposition,
        converged=converged,
        steps=session.steps,
        lower_bound=min(session.lower_bound, distance),
        history=list(session.history),
        dual_estimate=session.dual_estimate,
    )


# ============ 见证校验 ============

class WitnessValidity(str, Enum):
    VALID_CERTIFIED = "valid_certified"
    VALID_HEURISTIC = "valid_heuristic"
    INVALID = "invalid"


class WitnessCheck(NamedTuple):
    validity: WitnessValidity
    reason: str
    threshold: float
    f_lower: Optional[float] = None
    f_upper: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "validity": self.validity.value,
            "reason": self.reason,
            "threshold": self.threshold,
            "f_lower": self.f_lower,
            "f_upper": self.f_upper,
        }


def validate_witness(
    A: HermitianOp,
    rho: DensityMatrix,
    delta: float = 0.01,
    config: Optional[OracleConfig] = None,
) -> WitnessCheck:
    """
    检查 tr(Aσ) < tr(Aρ) + δ 对所有可分 σ 是否成立

    valid_certified：认证上界满足；valid_heuristic：只有启发式最优值满足；
    invalid：找到违反的乘积态，或 A 不是无迹且 ‖A‖ ≤ 1 的非零算符。
    """
    A = as_op(A)
    threshold = inner(A, rho)
    if A.norm < 1e-12:
        return WitnessCheck(WitnessValidity.INVALID, "零算符不是见证", threshold)
    if abs(A.trace) > 1e-9:
        return WitnessCheck(WitnessValidity.INVALID, f"见证必须无迹：tr(A) = {A.trace:.3e}", threshold)
    if A.norm > 1 + 1e-9:
        return WitnessCheck(WitnessValidity.INVALID, f"见证范数超过 1：{A.norm:.12g}", threshold)

    config = config or OracleConfig()
    report = maximize(A, threshold + delta, delta, config)
    if report.status == OracleStatus.CUT_READY:
        reason = f"乘积态取值 {report.f_lower:.6g} ≥ tr(Aρ) + δ = {threshold + delta:.6g}"
        return WitnessCheck(WitnessValidity.INVALID, reason, threshold, report.f_lower, report.f_upper)
    if report.status == OracleStatus.WITNESS_CERTIFIED:
        reason = f"认证上界 {report.f_upper:.6g}（{report.bound_source}）< tr(Aρ) + δ"
        return WitnessCheck(WitnessValidity.VALID_CERTIFIED, reason, threshold, report.f_lower, report.f_upper)
    return WitnessCheck(
        WitnessValidity.VALID_HEURISTIC,
        "多起点最优值满足条件，但上界未能认证",
        threshold,
        report.f_lower,
        report.f_upper,
    )


# ============ 基础算法 ============

def _chart_grid(d: int, h: float) -> Tuple[np.ndarray, int]:
    vectors = chart_grid_vectors(d, h)
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True), len(vectors)


def basic_algorithm(
    rho: DensityMatrix,
    delta: float = 0.01,
    h: float = 0.1,
    max_points: int = 2_000_000,
    max_steps: int = 500,
) -> Verdict:
    """
    在乘积态网格的凸包上求 min ‖ρ − σ‖

    网格为两个因子坐标图的乘积（步长 h）。每步用张量结构给所有网格点打分：
    乘积态系数为 c(α)⊗c(β)，方向 r 的得分矩阵为 C_α R C_βᵀ。
    活跃原子上用带求和行的 nnls 做全修正。

    判为 SEPARABLE 当网格距离 ≤ δ + k·h²/4（网格粗糙度的经验填充）；
    严格的粗糙度界 h·√k 一并报告。ENTANGLED 时附带分离方向作为见证。

    Raises:
        GridBudgetError: 网格点数超过 max_points
    """
    dims = rho.dims
    total = grid_size(dims.M, h) * grid_size(dims.N, h)
    if total > max_points:
        raise GridBudgetError(f"基础算法网格需要 {total} 个乘积态，超过上限 {max_points}", total)

    basis = build_basis(dims)
    vectors_a, count_a = _chart_grid(dims.M, h)
    vectors_b, count_b = _chart_grid(dims.N, h)
    coeffs_a = local_coefficients(basis.local_a, vectors_a)
    coeffs_b = local_coefficients(basis.local_b, vectors_b)
    shape = (dims.M ** 2, dims.N ** 2)
    target = rho.coeffs

    def best_atom(direction: np.ndarray) -> Tuple[int, int, float]:
        scores = coeffs_a @ direction.reshape(shape) @ coeffs_b.T
        i, j = np.unravel_index(int(np.argmax(scores)), scores.shape)
        return int(i), int(j), float(scores[i, j])

    def atom_point(i: int, j: int) -> np.ndarray:
        return np.kron(coeffs_a[i], coeffs_b[j])

    i, j, _ = best_atom(target)
    active = [(i, j)]
    points = atom_point(i, j)[None, :]
    weights = np.ones(1)
    x = points[0].copy()
    steps = 0

    for steps in range(1, max_steps + 1):
        residual = target - x
        i, j, score = best_atom(residual)
        gap = score - float(residual @ x)
        if gap <= 1e-12:
            break
        if (i, j) not in active:
            active.append((i, j))
            points = np.vstack([points, atom_point(i, j)])
        weights = _simplex_least_squares(points, target)
        keep = weights > 1e-13
        active = [a for a, k in zip(active, keep) if k]
        points, weights = points[keep], weights[keep] / weights[keep].sum()
        x = weights @ points

    distance = float(np.linalg.norm(target - x))
    padding = dims.k * h ** 2 / 4
    details = {
        "grid_distance": distance,
        "coarseness_bound": h * np.sqrt(dims.k),
        "padding": padding,
        "grid_points": total,
        "h": h,
    }
    logger.info(f"基础算法 {dims} h={h}: 网格距离 {distance:.6g}，{steps} 步，{len(active)} 个原子")

    if distance <= delta + padding:
        decomposition = None
        if distance <= delta:
            reduced = _caratheodory(points, weights, dims.n)
            states = [ProductState.from_vectors(vectors_a[a], vectors_b[b]) for a, b in active]
            decomposition = SeparableDecomposition.from_weights(reduced, states)
        return Verdict(
            kind=VerdictKind.SEPARABLE,
            decomposition=decomposition,
            distance=distance,
            iterations=steps,
            termination="basic_grid",
            details=details,
        )

    residual = target - x
    norm = float(np.linalg.norm(residual))
    witness_op = HermitianOp.from_coeffs(dims, residual / norm).traceless_part()
    witness_op = witness_op.normalized()
    _, _, score = best_atom(witness_op.coeffs)
    # 两个因子同时离散，乘积映射的 Lipschitz 常数多一个 √2
    f_upper = score + np.sqrt(2) * lipschitz_constant(witness_op, dims.k) * h
    threshold = inner(witness_op, rho)
    witness = Witness(
        operator=witness_op,
        threshold=threshold,
        f_lower=score,
        f_upper=f_upper,
        certified=f_upper < threshold,
        source="basic_grid",
    )
    return Verdict(
        kind=VerdictKind.ENTANGLED,
        witness=witness,
        distance=distance,
        iterations=steps,
        termination="basic_grid",
        details=details,
    )
