"""
割平面求解器

候选见证集合 K = W ∩ ∩_i {X : ⟨K_i, X⟩ ≥ 0}，W 为无迹且 tr(X²) ≤ 1 的算符球。
每轮取 K 的解析中心 C（对数障碍 F 的极小点）作为测试见证 A = C/‖C‖，询问 oracle：

- 找到可分 σ 使 tr(Aσ) ≥ tr(Aρ)：加入过原点且与 A 正交的割平面，重新求中心
- 认证 max_σ tr(Aσ) < tr(Aρ)：A 就是纠缠见证
- 只得到未认证候选：按 validation_policy 处理

在中心处 ∇F(C) = 0 给出 C = (1 − ‖C‖²)/2 · Σ K_i/⟨K_i, C⟩，
系数全为正，所以 W_ρ 中的每个 W 都满足 ⟨W, C⟩ ≥ 0，新割平面不会切掉 W_ρ。

SEPARABLE 的判定：Frank–Wolfe 找到距离 ≤ δ 的可分态（带分解），或迭代次数达到
N_max = ⌈c·n·ln(1/δ)⌉，或可行域为空 / 割平面退化 / 解析中心无法收敛（区域内不可能有见证）。
后几种情况判定前先用剩余预算继续 Frank–Wolfe，尽量附上 δ 内的分解。

求解在无迹算符的一个正交坐标系里进行：完整模式为全部 n−1 个无迹方向，
部分信息模式为测量张成的子空间（见 partial_info）。
"""
from typing import List, NamedTuple, Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError
from scipy.optimize import linprog

from config.settings import DEFAULT_TOLERANCES, SolverConfig
from qstate.hermitian import (
    DensityMatrix,
    HermitianOp,
    as_op,
    maximally_mixed_op,
)
from qstate.states import ProductState, maximally_mixed_decomposition
from utils.logger import setup_logger
from utils.validators import validate_delta

from .frame import Frame
from .oracle import OracleReport, OracleStatus, maximize
from .verdict import Verdict, VerdictKind, Witness
from .verifiers import FrankWolfeSession

logger = setup_logger(__name__)

# ‖K‖ 低于此值视为退化割平面
DEGENERATE_CUT_NORM = 1e-10


class DegenerateCutError(ArithmeticError):
    """ρ − σ_A 与 A 平行，割平面退化为零"""


class RegionEmptyError(ArithmeticError):
    """当前割平面集合没有严格可行点"""


class CenteringError(RegionEmptyError):
    """牛顿法无法把 ‖∇F‖ 降到 ε_newton 以下：区域已窄到数值上退化"""

    def __init__(self, message: str, gradient_norm: float):
        super().__init__(message)
        self.gradient_norm = gradient_norm


class MaximallyMixedError(ValueError):
    """ρ 与最大混态的距离不超过 ε_center，初始割平面无定义"""


class BudgetExhaustedError(RuntimeError):
    """oracle 调用次数达到上限；verdict 保存到目前为止的运行记录"""

    def __init__(self, message: str, verdict: Verdict):
        super().__init__(message)
        self.verdict = verdict


# ============ 割平面 ============

def initial_cut(rho: DensityMatrix, eps_center: float = DEFAULT_TOLERANCES["eps_center"]) -> HermitianOp:
    """
    K₁ = (ρ − I/MN)/‖ρ − I/MN‖

    Raises:
        MaximallyMixedError: ρ 与 I/MN 的距离 ≤ eps_center
    """
    direction = as_op(rho) - maximally_mixed_op(rho.dims)
    if direction.norm <= eps_center:
        raise MaximallyMixedError(f"ρ 与最大混态的距离 {direction.norm:.3e} 不超过 {eps_center:g}")
    return direction.normalized()


def cut_direction(a: np.ndarray, target: np.ndarray, sample: np.ndarray) -> np.ndarray:
    """
    坐标形式的割平面：r = target − sample，K = r − (⟨a, r⟩/‖a‖²)·a，归一化

    Raises:
        DegenerateCutError: ‖K‖ < 1e−10
    """
    residual = target - sample
    k = residual - (a @ residual) / (a @ a) * a
    norm = float(np.linalg.norm(k))
    if norm < DEGENERATE_CUT_NORM:
        raise DegenerateCutError(f"割平面退化：‖K‖ = {norm:.3e}")
    return k / norm


def make_cut(A: HermitianOp, rho: DensityMatrix, sigma: ProductState) -> HermitianOp:
    """
    K = (ρ − σ_A) − [⟨A, ρ − σ_A⟩/tr(A²)]·A，归一化；⟨K, A⟩ = 0

    Raises:
        ValueError: tr(Aσ_A) < tr(Aρ)，σ_A 不违反 A
        DegenerateCutError: ρ − σ_A 与 A 平行
    """
    A = as_op(A)
    frame = Frame.full(A.dims)
    a = frame.coords(A)
    sample = frame.product_coords(sigma)
    target = frame.coords(rho)
    if a @ sample < a @ target - 1e-12:
        raise ValueError("make_cut 需要 tr(Aσ) ≥ tr(Aρ)")
    return frame.operator(cut_direction(a, target, sample))


# ============ 解析中心 ============

class CenterResult(NamedTuple):
    x: np.ndarray
    steps: int
    gradient_norm: float


def barrier_value(cuts: np.ndarray, x: np.ndarray) -> float:
    """F(x) = −Σ log⟨K_i, x⟩ − log(1 − ‖x‖²)，不可行时为 +∞"""
    slacks = cuts @ x
    room = 1.0 - x @ x
    if room <= 0 or np.any(slacks <= 0):
        return np.inf
    return float(-np.sum(np.log(slacks)) - np.log(room))


def barrier_gradient(cuts: np.ndarray, x: np.ndarray) -> np.ndarray:
    slacks = cuts @ x
    room = 1.0 - x @ x
    return -cuts.T @ (1.0 / slacks) + 2.0 * x / room


def barrier_hessian(cuts: np.ndarray, x: np.ndarray) -> np.ndarray:
    slacks = cuts @ x
    room = 1.0 - x @ x
    hessian = (cuts.T * (1.0 / slacks ** 2)) @ cuts
    hessian += (2.0 / room) * np.eye(len(x))
    hessian += (4.0 / room ** 2) * np.outer(x, x)
    return hessian


def newton_center(
    cuts: np.ndarray,
    x0: np.ndarray,
    eps: float = 1e-8,
    max_steps: int = 100,
    slope: float = 0.25,
    factor: float = 0.5,
) -> CenterResult:
    """
    阻尼牛顿法最小化 F，Cholesky 求解牛顿方向，回溯线搜索保持严格可行

    x0 必须严格可行。只返回 ‖∇F‖ ≤ eps 的点。

    Raises:
        RegionEmptyError: x0 不可行
        CenteringError: Hessian 数值上不正定，或 max_steps 步内未收敛
    """
    x = np.asarray(x0, dtype=float).copy()
    value = barrier_value(cuts, x)
    if not np.isfinite(value):
        raise RegionEmptyError("牛顿法起点不是严格可行点")

    grad = barrier_gradient(cuts, x)
    steps = 0
    while np.linalg.norm(grad) > eps and steps < max_steps:
        steps += 1
        hessian = barrier_hessian(cuts, x)
        try:
            dx = -cho_solve(cho_factor(hessian), grad)
        except (LinAlgError, ValueError):
            # 含 inf/nan 时 cho_factor 抛 ValueError
            grad_norm = float(np.linalg.norm(grad))
            raise CenteringError(f"Hessian 数值上不正定：‖∇F‖ = {grad_norm:.3e}", grad_norm)
        decrement = float(grad @ dx)

        t = 1.0
        while True:
            candidate = x + t * dx
            new_value = barrier_value(cuts, candidate)
            if np.isfinite(new_value) and (
                new_value <= value + slope * t * decrement or -decrement < 1e-14
            ):
                break
            t *= factor
            if t < 1e-14:
                break
        if t < 1e-14:
            logger.debug(f"牛顿线搜索停滞：‖∇F‖ = {np.linalg.norm(grad):.3e}")
            break
        x, value = candidate, new_value
        grad = barrier_gradient(cuts, x)

    grad_norm = float(np.linalg.norm(grad))
    if not grad_norm <= eps:
        raise CenteringError(f"解析中心未收敛：{steps} 步后 ‖∇F‖ = {grad_norm:.3e}", grad_norm)
    return CenterResult(x, steps, grad_norm)


def phase_one(cuts: np.ndarray, size: int) -> np.ndarray:
    """
    线性规划找严格可行点：max s，s.t. Kx ≥ s，−1 ≤ x ≤ 1

    Raises:
        RegionEmptyError: s ≤ 1e−12
    """
    if len(cuts) == 0:
        return np.zeros(size)
    objective = np.zeros(size + 1)
    objective[-1] = -1.0
    a_ub = np.hstack([-cuts, np.ones((len(cuts), 1))])
    bounds = [(-1.0, 1.0)] * size + [(None, 1.0)]
    result = linprog(objective, A_ub=a_ub, b_ub=np.zeros(len(cuts)), bounds=bounds, method="highs")
    if not result.success or result.x[-1] <= 1e-12:
        raise RegionEmptyError("割平面集合没有严格可行点")
    x = result.x[:-1]
    return 0.5 * x / np.linalg.norm(x)


class CutSet:
    """累积的割平面法向量 {K_i} 与缓存的解析中心"""

    def __init__(self, frame: Frame, config: Optional[SolverConfig] = None):
        self.frame = frame
        self.config = config or SolverConfig()
        self._cuts: List[np.ndarray] = []
        self.center = np.zeros(frame.size)
        self.gradient_norm = 0.0
        self.newton_steps = 0

    @property
    def dims(self):
        return self.frame.dims

    @property
    def h(self) -> int:
        return len(self._cuts)

    @property
    def matrix(self) -> np.ndarray:
        if not self._cuts:
            return np.zeros((0, self.frame.size))
        return np.vstack(self._cuts)

    @property
    def cuts(self) -> List[HermitianOp]:
        return [self.frame.operator(k) for k in self._cuts]

    @property
    def center_op(self) -> HermitianOp:
        return self.frame.operator(self.center)

    def add(self, k) -> None:
        """加入割平面（坐标或算符），归一化"""
        if isinstance(k, HermitianOp):
            k = self.frame.coords(k)
        k = np.asarray(k, dtype=float)
        self._cuts.append(k / np.linalg.norm(k))

    def strictly_feasible(self, x: np.ndarray) -> bool:
        return np.isfinite(barrier_value(self.matrix, x))

    def warm_start(self, previous: np.ndarray, new_cut: np.ndarray) -> np.ndarray:
        """上一个中心沿新割平面法向量移动 warm_pull·d_min"""
        old = self.matrix[:-1]
        d_min = 1.0 - float(np.linalg.norm(previous))
        if len(old):
            d_min = min(d_min, float(np.min(old @ previous)))
        return previous + self.config.warm_pull * max(d_min, 0.0) * new_cut

    def recenter(self, warm_start: Optional[np.ndarray] = None) -> CenterResult:
        """
        从 warm_start 出发求解析中心；起点不可行时先做 phase-1，
        从热启动点出发不收敛时再从 phase-1 点重试一次。失败时保留原中心。

        Raises:
            RegionEmptyError: 可行域为空
            CenteringError: 牛顿法无法收敛到 ‖∇F‖ ≤ eps_newton
        """
        cuts = self.matrix
        x0 = self.center if warm_start is None else np.asarray(warm_start, dtype=float)
        from_phase_one = not np.isfinite(barrier_value(cuts, x0))
        if from_phase_one:
            logger.debug("热启动点不可行，转入 phase-1")
            x0 = phase_one(cuts, self.frame.size)
        try:
            result = self._newton(cuts, x0)
        except CenteringError as e:
            if from_phase_one:
                raise
            logger.debug(f"热启动牛顿法失败（{e}），从 phase-1 点重试")
            result = self._newton(cuts, phase_one(cuts, self.frame.size))
        self.center = result.x
        self.gradient_norm = result.gradient_norm
        self.newton_steps = result.steps
        return result

    def _newton(self, cuts: np.ndarray, x0: np.ndarray) -> CenterResult:
        return newton_center(
            cuts,
            x0,
            eps=self.config.eps_newton,
            max_steps=self.config.newton_max_steps,
            slope=self.config.armijo_slope,
            factor=self.config.backtrack_factor,
        )

    def multipliers(self) -> np.ndarray:
        """中心条件中的组合系数 (1 − ‖C‖²)/(2⟨K_i, C⟩)，应全为正"""
        if not self._cuts:
            return np.zeros(0)
        room = 1.0 - self.center @ self.center
        return room / (2.0 * (self.matrix @ self.center))


def analytic_center(cs: CutSet, warm_start: Optional[HermitianOp] = None) -> HermitianOp:
    """
    求 cs 的解析中心并缓存

    Raises:
        RegionEmptyError: 无法得到严格可行起点
    """
    x0 = None if warm_start is None else cs.frame.coords(warm_start)
    cs.recenter(x0)
    return cs.center_op


# ============ 主循环 ============

class CuttingPlaneEngine:
    """
    一次求解会话（单线程修改 CutSet）

    Args:
        frame: 无迹算符坐标系
        target: ρ 在坐标系中的坐标（部分信息模式下由测量值得到）
        config: 求解配置
        subspace: True 时永不返回 SEPARABLE，改为 INCONCLUSIVE
    """

    def __init__(
        self,
        frame: Frame,
        target: np.ndarray,
        config: Optional[SolverConfig] = None,
        subspace: bool = False,
    ):
        self.frame = frame
        self.target = np.asarray(target, dtype=float)
        self.config = config or SolverConfig()
        self.subspace = subspace
        self.cutset = CutSet(frame, self.config)
        self.fw = FrankWolfeSession(frame, self.target, self.config.oracle, self.config.fw_starts)
        self.fw_active = True
        self.oracle_calls = 0
        self.iterations = 0
        self.trace: List[dict] = []
        n = frame.dims.n
        self.iteration_cap = self.config.iteration_cap(n)
        self.call_cap = self.config.oracle_call_cap(n)
        self._last_state: Optional[ProductState] = None

    # ---------- verdict helpers ----------

    def _verdict(self, kind: VerdictKind, termination: str, **kwargs) -> Verdict:
        verdict = Verdict(
            kind=kind,
            oracle_calls=self.oracle_calls,
            iterations=self.iterations,
            termination=termination,
            trace=self.trace,
            cuts=self.cutset.cuts,
            **kwargs,
        )
        logger.info(
            f"判定 {kind.value}（{termination}）：{self.iterations} 轮，{self.oracle_calls} 次 oracle 调用"
        )
        return verdict

    def _no_witness(self, termination: str) -> Verdict:
        """
        区域内不存在见证：完整模式 SEPARABLE，部分信息模式 INCONCLUSIVE

        完整模式下先用剩余预算继续 Frank–Wolfe（至多 fw_final_calls 次），尽量附上 δ 内的分解。
        """
        if self.subspace:
            distance = self.fw.distance if self.fw.atoms else None
            return self._verdict(VerdictKind.INCONCLUSIVE, termination, distance=distance)

        if self.fw_active and self.fw.distance > self.config.delta:
            self._advance_frank_wolfe(self.config.fw_final_calls)
        decomposition = None
        distance = None
        if self.fw.atoms:
            distance = self.fw.distance
            if distance <= self.config.delta:
                decomposition = self.fw.decomposition()
            else:
                logger.warning(f"{termination}：Frank–Wolfe 距离 {distance:.4g} 仍大于 δ，判定不附分解")
        return self._verdict(VerdictKind.SEPARABLE, termination, decomposition=decomposition, distance=distance)

    def _entangled(self, a: np.ndarray, threshold: float, report: OracleReport,
                   certified: bool, source: str) -> Verdict:
        witness = Witness(
            operator=self.frame.operator(a),
            threshold=threshold,
            f_lower=report.f_lower,
            f_upper=report.f_upper,
            certified=certified,
            source=source,
        )
        return self._verdict(VerdictKind.ENTANGLED, f"witness_{source}", witness=witness)

    # ---------- oracle ----------

    def _query(self, a: np.ndarray) -> OracleReport:
        if self.oracle_calls >= self.call_cap:
            partial = Verdict(
                kind=VerdictKind.INCONCLUSIVE,
                oracle_calls=self.oracle_calls,
                iterations=self.iterations,
                termination="budget_exhausted",
                trace=self.trace,
                cuts=self.cutset.cuts,
            )
            raise BudgetExhaustedError(f"oracle 调用次数达到上限 {self.call_cap}", partial)
        self.oracle_calls += 1
        extra = (self._last_state,) if self._last_state is not None else ()
        return maximize(
            self.frame.operator(a),
            float(a @ self.target),
            self.config.delta,
            self.config.oracle,
            extra_starts=extra,
        )

    def _advance_frank_wolfe(self, calls: int) -> None:
        calls = min(calls, self.call_cap - self.oracle_calls)
        if calls > 0:
            self.oracle_calls += self.fw.run(calls, target_distance=self.config.delta)

    def _check_frank_wolfe(self, entry: dict) -> Optional[Verdict]:
        """
        推进 Frank–Wolfe；距离 ≤ δ 时给出判定

        只有认证下界 > δ 才停止后续检查；启发式的对偶估计只决定是否值得做认证。
        """
        cfg = self.config
        self._advance_frank_wolfe(cfg.fw_steps_per_check)
        entry["fw_distance"] = self.fw.distance
        if self.fw.distance <= cfg.delta:
            return self._consistent_with_separable()

        if (self.fw.stalled or self.fw.dual_estimate > cfg.delta) and self.oracle_calls < self.call_cap:
            calls = self.fw.oracle_calls
            bound = self.fw.certify_lower_bound()
            self.oracle_calls += self.fw.oracle_calls - calls
            entry["fw_lower_bound"] = bound
            if bound > cfg.delta:
                logger.debug(f"Frank–Wolfe 认证距离下界 {bound:.4g} > δ，停止检查")
                self.fw_active = False
        return None

    # ---------- 主循环 ----------

    def _center_entry(self) -> dict:
        """当前中心的记录：‖C‖、‖∇F(C)‖、中心条件的最小系数"""
        multipliers = self.cutset.multipliers()
        return {
            "iteration": self.iterations,
            "cuts": self.cutset.h,
            "center_norm": float(np.linalg.norm(self.cutset.center)),
            "gradient_norm": self.cutset.gradient_norm,
            "newton_steps": self.cutset.newton_steps,
            "min_multiplier": float(np.min(multipliers)),
        }

    def run(self) -> Verdict:
        cfg = self.config
        norm = float(np.linalg.norm(self.target))
        if norm <= cfg.eps_center:
            return self._near_maximally_mixed()

        first = self.target / norm
        self.cutset.add(first)
        try:
            self.cutset.recenter(0.5 * first)
        except RegionEmptyError:
            return self._no_witness("region_exhausted")

        while self.iterations < self.iteration_cap:
            self.iterations += 1
            center = self.cutset.center
            a = center / np.linalg.norm(center)
            threshold = float(a @ self.target)
            entry = self._center_entry()
            report = self._query(a)
            entry.update({
                "threshold": threshold,
                "status": report.status.value,
                "f_lower": report.f_lower,
                "f_upper": report.f_upper,
            })
            self.trace.append(entry)
            logger.debug(
                f"第 {self.iterations} 轮：t={threshold:.6f} f̲={report.f_lower:.6f} "
                f"f̄={report.f_upper:.6f} {report.status.value}"
            )

            if report.status == OracleStatus.WITNESS_CERTIFIED:
                return self._entangled(a, threshold, report, True, "analytic_center")
            if report.status != OracleStatus.CUT_READY:
                return self._resolve_candidate(a, threshold, report)

            outcome = self._cut(a, report, entry)
            if outcome is not None:
                return outcome

            if self.fw_active and (self.iterations == 1 or self.iterations % cfg.fw_check_every == 0):
                outcome = self._check_frank_wolfe(entry)
                if outcome is not None:
                    return outcome

        return self._no_witness("iteration_cap")

    def _cut(self, a: np.ndarray, report: OracleReport, entry: dict) -> Optional[Verdict]:
        """加入割平面并重新求中心；区域内无见证或转为见证时返回判定"""
        self._last_state = report.incumbent
        sample = self.frame.product_coords(report.incumbent)
        try:
            k = cut_direction(a, self.target, sample)
        except DegenerateCutError:
            retry = self._retry_degenerate(a, sample)
            if isinstance(retry, Verdict):
                return retry
            if retry is None:
                entry["degenerate"] = True
                return self._no_witness("region_exhausted")
            k = retry

        previous = self.cutset.center
        self.cutset.add(k)
        try:
            self.cutset.recenter(self.cutset.warm_start(previous, self.cutset.matrix[-1]))
        except CenteringError as e:
            entry["centering_failed"] = e.gradient_norm
            logger.info(f"解析中心无法收敛（{e}），可行域已退化")
            return self._no_witness("region_exhausted")
        except RegionEmptyError:
            return self._no_witness("region_empty")

        multipliers = self.cutset.multipliers()
        if np.any(multipliers <= 0):
            logger.warning(f"中心条件系数出现非正值：{float(np.min(multipliers)):.3e}")
        return None

    def _retry_degenerate(self, a: np.ndarray, sample: np.ndarray):
        """
        退化割平面：A 向 −(ρ − σ_A) 方向扰动后重新询问一次

        Returns:
            新割平面坐标；None 表示仍退化；或直接得到的 Verdict
        """
        residual = self.target - sample
        norm = float(np.linalg.norm(residual))
        logger.warning(f"割平面退化（‖ρ − σ_A‖ = {norm:.3e}），扰动后重试")
        if norm < DEGENERATE_CUT_NORM:
            return None
        perturbed = a - self.config.degenerate_perturbation * residual / norm
        perturbed /= np.linalg.norm(perturbed)
        threshold = float(perturbed @ self.target)
        report = self._query(perturbed)
        if report.status == OracleStatus.WITNESS_CERTIFIED:
            return self._entangled(perturbed, threshold, report, True, "perturbed_center")
        if report.status != OracleStatus.CUT_READY:
            return self._resolve_candidate(perturbed, threshold, report)
        try:
            return cut_direction(perturbed, self.target, self.frame.product_coords(report.incumbent))
        except DegenerateCutError:
            return None

    def _resolve_candidate(self, a: np.ndarray, threshold: float, report: OracleReport) -> Verdict:
        """未认证候选：polish 策略先尝试 Frank–Wolfe 的对偶见证"""
        if self.config.validation_policy == "polish":
            self._advance_frank_wolfe(self.config.fw_steps_per_check)
            if self.fw.atoms and self.fw.distance <= self.config.delta:
                return self._consistent_with_separable()
            if self.fw.atoms and self.fw.distance > 0:
                dual = self.fw.dual_witness()
                dual_threshold = float(dual @ self.target)
                dual_report = self._query(dual)
                if dual_report.status == OracleStatus.WITNESS_CERTIFIED:
                    return self._entangled(dual, dual_threshold, dual_report, True, "frank_wolfe")
        logger.warning(f"见证未能认证：f̄ = {report.f_upper:.6g} ≥ t = {threshold:.6g}")
        return self._entangled(a, threshold, report, False, "analytic_center")

    def _consistent_with_separable(self) -> Verdict:
        if self.subspace:
            return self._verdict(VerdictKind.INCONCLUSIVE, "frank_wolfe", distance=self.fw.distance)
        return self._verdict(
            VerdictKind.SEPARABLE,
            "frank_wolfe",
            decomposition=self.fw.decomposition(),
            distance=self.fw.distance,
        )

    def _near_maximally_mixed(self) -> Verdict:
        """ρ 与 I/MN 几乎重合：I/MN 是计算基乘积态的均匀混合"""
        if self.subspace:
            return self._verdict(VerdictKind.INCONCLUSIVE, "maximally_mixed")
        return self._verdict(
            VerdictKind.SEPARABLE,
            "maximally_mixed",
            decomposition=maximally_mixed_decomposition(self.frame.dims),
            distance=float(np.linalg.norm(self.target)),
        )


def solve(
    rho: DensityMatrix,
    delta: Optional[float] = None,
    config: Optional[SolverConfig] = None,
) -> Verdict:
    """
    纠缠见证问题：返回 SEPARABLE，或 ENTANGLED 并附见证 A（‖A‖ = 1，无迹）

    Args:
        rho: 密度矩阵
        delta: 精度，覆盖 config.delta
        config: 求解配置

    Raises:
        ValueError: delta 不合法
        BudgetExhaustedError: oracle 调用次数达到上限
    """
    config = config or SolverConfig()
    if delta is not None:
        valid, err = validate_delta(delta)
        if not valid:
            raise ValueError(err)
        config = config.model_copy(update={"delta": float(delta)})

    frame = Frame.full(rho.dims)
    logger.info(f"开始求解 {rho.dims}：δ={config.delta}，迭代上限 {config.iteration_cap(rho.dims.n)}")
    engine = CuttingPlaneEngine(frame, frame.coords(rho), config)
    return engine.run()
