"""
割平面求解器单元测试
"""
import pytest
import sys
from pathlib import Path

import numpy as np

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import SolverConfig
from qstate.hermitian import DensityMatrix, Dims, inner, norm_distance
from qstate.states import ProductState, bell_state, maximally_mixed, mix, werner
import separability.cutting_plane as cutting_plane
from separability.cutting_plane import (
    BudgetExhaustedError,
    CenteringError,
    CutSet,
    DegenerateCutError,
    MaximallyMixedError,
    RegionEmptyError,
    analytic_center,
    barrier_gradient,
    barrier_value,
    cut_direction,
    initial_cut,
    make_cut,
    newton_center,
    solve,
)
from separability.frame import Frame
from separability.oracle import search
from separability.verdict import VerdictKind
from separability.verifiers import validate_witness, WitnessValidity
from utils.jsonio import dumps

DIMS = Dims(2, 2)


def _unit(i: int, size: int = 15) -> np.ndarray:
    e = np.zeros(size)
    e[i] = 1.0
    return e


class TestInitialCut:
    """测试第一个割平面"""

    def test_direction(self):
        """K₁ ∝ ρ − I/4，无迹且单位范数"""
        rho = bell_state("phi+")
        K1 = initial_cut(rho)
        assert K1.norm == pytest.approx(1.0)
        assert K1.trace == pytest.approx(0.0, abs=1e-12)
        assert inner(K1, rho) == pytest.approx(np.sqrt(3) / 2)

    def test_maximally_mixed(self):
        """最大混态没有方向"""
        with pytest.raises(MaximallyMixedError):
            initial_cut(maximally_mixed(DIMS))


class TestMakeCut:
    """测试割平面构造"""

    def test_cut_properties(self):
        """⟨K, A⟩ = 0，‖K‖ = 1，⟨K, ρ − σ⟩ > 0"""
        rho = werner(0.2)
        A = initial_cut(rho)
        sigma = search(A).state
        assert inner(A, sigma.operator()) >= inner(A, rho)

        K = make_cut(A, rho, sigma)
        assert K.norm == pytest.approx(1.0)
        assert inner(K, A) == pytest.approx(0.0, abs=1e-10)
        assert inner(K, rho.op - sigma.operator()) > 0

    def test_requires_violation(self):
        """σ 不违反 A 时拒绝"""
        rho = bell_state("phi+")
        A = initial_cut(rho)
        with pytest.raises(ValueError):
            make_cut(A, rho, ProductState.basis_state(DIMS))

    def test_degenerate(self):
        """ρ − σ 与 A 平行"""
        a = _unit(0, 3)
        with pytest.raises(DegenerateCutError):
            cut_direction(a, 2 * a, a)


class TestAnalyticCenter:
    """测试解析中心"""

    def setup_method(self):
        self.cs = CutSet(Frame.full(DIMS))

    def test_no_cuts(self):
        """没有割平面时中心为 0"""
        self.cs.recenter(np.zeros(15))
        assert np.linalg.norm(self.cs.center) <= 1e-10

    def test_one_cut(self):
        """一个割平面：C = K₁/√3"""
        self.cs.add(_unit(0))
        result = self.cs.recenter(0.5 * _unit(0))
        assert np.linalg.norm(self.cs.center - _unit(0) / np.sqrt(3)) <= 1e-6
        assert result.gradient_norm <= 1e-8

    def test_two_orthonormal_cuts(self):
        """两个正交割平面：C = (K₁ + K₂)/2"""
        self.cs.add(_unit(0))
        self.cs.add(_unit(1))
        result = self.cs.recenter(0.3 * (_unit(0) + _unit(1)))
        assert np.linalg.norm(self.cs.center - (_unit(0) + _unit(1)) / 2) <= 1e-6
        assert result.gradient_norm <= 1e-8

    def test_phase_one_fallback(self):
        """热启动不可行时仍能找到中心"""
        self.cs.add(_unit(0))
        self.cs.add(_unit(1))
        self.cs.recenter(-0.5 * _unit(0))
        assert np.linalg.norm(self.cs.center - (_unit(0) + _unit(1)) / 2) <= 1e-6

    def test_center_condition(self):
        """C = Σ μ_i K_i，μ_i > 0"""
        rng = np.random.default_rng(0)
        base = _unit(0)
        for _ in range(4):
            k = base + 0.5 * rng.standard_normal(15)
            self.cs.add(k)
        self.cs.recenter(0.1 * base)
        multipliers = self.cs.multipliers()
        assert np.all(multipliers > 0)
        assert np.allclose(multipliers @ self.cs.matrix, self.cs.center, atol=1e-7)

    def test_empty_region(self):
        """相反的两个割平面没有严格可行点"""
        self.cs.add(_unit(0))
        self.cs.add(-_unit(0))
        with pytest.raises(RegionEmptyError):
            self.cs.recenter()

    def test_returns_operator(self):
        """analytic_center 返回无迹算符"""
        self.cs.add(_unit(2))
        C = analytic_center(self.cs)
        assert C.trace == pytest.approx(0.0, abs=1e-12)
        assert C.norm == pytest.approx(1 / np.sqrt(3), abs=1e-6)

    def test_barrier_gradient(self):
        """梯度与数值差分一致"""
        cuts = np.vstack([_unit(0, 3), np.array([0.6, 0.8, 0.0])])
        x = np.array([0.2, 0.1, -0.1])
        step = 1e-6
        numeric = np.array([
            (barrier_value(cuts, x + step * e) - barrier_value(cuts, x - step * e)) / (2 * step)
            for e in np.eye(3)
        ])
        assert np.allclose(barrier_gradient(cuts, x), numeric, atol=1e-6)
        assert barrier_value(cuts, -x) == np.inf

    def test_singular_hessian_raises(self):
        """Hessian 溢出时抛 CenteringError，不泄漏 LinAlgError"""
        cuts = np.vstack([_unit(0, 3), _unit(1, 3)])
        x0 = np.array([1e-200, 0.5, 0.0])
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            with pytest.raises(CenteringError) as exc:
                newton_center(cuts, x0)
        assert exc.value.gradient_norm > 1e-8

    def test_not_converged_raises(self):
        """步数用尽仍未收敛的点不返回"""
        cuts = _unit(0, 3)[None, :]
        with pytest.raises(CenteringError) as exc:
            newton_center(cuts, 0.01 * _unit(0, 3), max_steps=1)
        assert isinstance(exc.value, RegionEmptyError)
        assert exc.value.gradient_norm > 1e-8

    def test_failed_recenter_keeps_center(self):
        """热启动与 phase-1 重试都失败时保留原中心"""
        cs = CutSet(Frame.full(DIMS), SolverConfig(newton_max_steps=1))
        cs.add(_unit(0))
        with pytest.raises(CenteringError):
            cs.recenter(0.01 * _unit(0))
        assert np.all(cs.center == 0)


class TestSolve:
    """测试完整求解"""

    def test_bell_entangled(self):
        """Bell 态：第一轮即得到认证见证"""
        rho = bell_state("phi+")
        verdict = solve(rho, delta=0.01)
        assert verdict.kind == VerdictKind.ENTANGLED
        assert verdict.oracle_calls == 1
        witness = verdict.witness
        assert witness.certified
        assert witness.margin >= -1e-8
        assert witness.operator.norm == pytest.approx(1.0)
        assert witness.operator.trace == pytest.approx(0.0, abs=1e-12)
        assert witness.threshold == pytest.approx(np.sqrt(3) / 2)
        check = validate_witness(witness.operator, rho, 0.01)
        assert check.validity == WitnessValidity.VALID_CERTIFIED

    def test_werner_entangled_margin(self):
        """p = 0.37 的 Werner 态：阈值与乘积态最大值之差约 0.0317"""
        verdict = solve(werner(0.37))
        assert verdict.kind == VerdictKind.ENTANGLED
        gap = verdict.witness.threshold - verdict.witness.f_lower
        assert gap == pytest.approx(0.37 * np.sqrt(3) / 2 - 1 / (2 * np.sqrt(3)), abs=1e-6)

    def test_maximally_mixed(self):
        """最大混态：计算基乘积态均匀混合"""
        rho = maximally_mixed(DIMS)
        verdict = solve(rho)
        assert verdict.kind == VerdictKind.SEPARABLE
        assert verdict.termination == "maximally_mixed"
        assert verdict.oracle_calls == 0
        assert np.allclose(mix(verdict.decomposition).matrix, rho.matrix)

    def test_invalid_delta(self):
        """δ 必须在 (0, 1)"""
        with pytest.raises(ValueError):
            solve(bell_state(), delta=0)

    def test_budget_exhausted(self):
        """oracle 调用上限：附带部分运行记录"""
        config = SolverConfig(max_oracle_calls=1)
        with pytest.raises(BudgetExhaustedError) as exc:
            solve(werner(0.2), config=config)
        partial = exc.value.verdict
        assert partial.kind == VerdictKind.INCONCLUSIVE
        assert partial.termination == "budget_exhausted"
        assert partial.oracle_calls == 1
        assert len(partial.trace) == 1

    def test_deterministic(self):
        """相同输入得到逐字节相同的 JSON"""
        config = SolverConfig(max_oracle_calls=6)

        def partial_json():
            try:
                return dumps(solve(werner(0.25), config=config).to_dict())
            except BudgetExhaustedError as e:
                return dumps(e.verdict.to_dict())

        assert partial_json() == partial_json()

    def test_trace_fields(self):
        """每轮记录阈值、oracle 状态与中心梯度"""
        config = SolverConfig(max_oracle_calls=4)
        try:
            verdict = solve(werner(0.25), config=config)
        except BudgetExhaustedError as e:
            verdict = e.verdict
        first = verdict.trace[0]
        assert first["iteration"] == 1
        assert first["status"] == "CutReady"
        assert first["gradient_norm"] <= 1e-8
        assert first["min_multiplier"] > 0
        for K in verdict.cuts:
            assert K.norm == pytest.approx(1.0)

    def test_trace_first_center(self):
        """第一个中心也记录梯度与系数"""
        verdict = solve(bell_state())
        assert len(verdict.trace) == 1
        first = verdict.trace[0]
        assert first["gradient_norm"] <= 1e-8
        assert first["min_multiplier"] > 0
        assert first["cuts"] == 1

    @pytest.mark.parametrize("p", [0.2, 0.3])
    def test_werner_separable(self, p):
        """可分 Werner 态：SEPARABLE，附 δ 内的分解，每个中心都已收敛"""
        rho = werner(p)
        verdict = solve(rho)
        assert verdict.kind == VerdictKind.SEPARABLE
        assert verdict.oracle_calls <= 800
        assert verdict.decomposition is not None
        assert norm_distance(mix(verdict.decomposition), rho) <= 0.01 + 1e-9
        for record in verdict.trace:
            assert record["gradient_norm"] <= 1e-8
            assert record["min_multiplier"] > 0

    def test_centering_failure_is_region_exhausted(self, monkeypatch):
        """中心无法收敛：按区域耗尽处理，先用 Frank–Wolfe 补出分解"""
        original = cutting_plane.newton_center

        def failing(cuts, x0, **kwargs):
            if len(cuts) >= 2:
                raise CenteringError("测试：Hessian 不正定", 1.0)
            return original(cuts, x0, **kwargs)

        monkeypatch.setattr(cutting_plane, "newton_center", failing)
        rho = werner(0.2)
        verdict = solve(rho)
        assert verdict.kind == VerdictKind.SEPARABLE
        assert verdict.termination == "region_exhausted"
        assert verdict.iterations == 1
        assert verdict.trace[-1]["centering_failed"] == 1.0
        assert verdict.decomposition is not None
        assert norm_distance(mix(verdict.decomposition), rho) <= 0.01 + 1e-9

    @pytest.mark.parametrize("p", [0.2, 0.5])
    def test_decision_stable_under_perturbation(self, p):
        """ρ 扰动 1e-10 不改变判定"""
        rho = werner(p)
        rng = np.random.default_rng(7)
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = g + g.conj().T
        h -= np.trace(h) / 4 * np.eye(4)
        h /= np.linalg.norm(h)
        perturbed = DensityMatrix.from_matrix(DIMS, rho.matrix + 1e-10 * h)
        assert solve(perturbed).kind == solve(rho).kind


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
