"""
部分信息模式

只测得 j < n 个期望值时，在测量可观测量张成的子空间里运行割平面：
测试见证 A 在子空间内，tr(Aρ) 只需期望值即可算出，oracle 仍在全部乘积态上最大化。
找到认证见证即可断言纠缠；否则只能给出 INCONCLUSIVE，永不断言可分。

单位算符分量总是隐式已知（tr ρ = 1），所以空测量集的 j = 1。
"""
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from config.settings import SolverConfig
from qstate.hermitian import (
    DensityMatrix,
    Dims,
    DimensionError,
    HermitianOp,
    as_op,
    inner,
)
from qstate.states import pauli_string
from utils.logger import setup_logger
from utils.validators import validate_delta

from .cutting_plane import CuttingPlaneEngine
from .frame import Frame
from .verdict import Verdict, VerdictKind

logger = setup_logger(__name__)

# 投影残差低于此值（相对 ‖X‖）视为线性相关
DEPENDENCE_TOL = 1e-8


class InconsistentMeasurementError(ValueError):
    """期望值超出谱范围，或与已测量张成的隐含值矛盾"""


def is_local(X: HermitianOp, tol: float = 1e-10) -> bool:
    """算符 Schmidt 秩为 1（重排矩阵只有一个非零奇异值）"""
    M, N = X.dims.M, X.dims.N
    realigned = X.matrix.reshape(M, N, M, N).transpose(0, 2, 1, 3).reshape(M * M, N * N)
    singular = np.linalg.svd(realigned, compute_uv=False)
    return singular[0] > 0 and singular[1] <= tol * singular[0]


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """
    已测量的 (可观测量, 期望值) 及其正交化结果

    rows 为基系数空间中的正交向量，第 0 行是单位算符方向 I/√(MN)；
    values[i] = tr(ρ · rows[i])，由原始期望值经 Gram–Schmidt 同步变换得到。
    """
    dims: Dims
    rows: np.ndarray
    values: np.ndarray
    entries: Tuple[Tuple[HermitianOp, float], ...] = ()
    require_local: bool = False
    tolerance: float = field(default=1e-8, repr=False)

    @classmethod
    def empty(cls, dims: Dims, require_local: bool = False, tolerance: float = 1e-8) -> "MeasurementSet":
        rows = np.zeros((1, dims.n))
        rows[0, 0] = 1.0
        return cls(dims, rows, np.array([1.0 / np.sqrt(dims.d)]), (), require_local, tolerance)

    @classmethod
    def from_density(
        cls,
        rho: DensityMatrix,
        observables: Sequence[HermitianOp],
        require_local: bool = False,
    ) -> "MeasurementSet":
        """已知 ρ 时按给定可观测量生成精确期望值"""
        ms = cls.empty(rho.dims, require_local)
        for X in observables:
            ms = ms.add(X, inner(X, rho))
        return ms

    @property
    def j(self) -> int:
        return len(self.rows)

    def __len__(self) -> int:
        return self.j

    def add(self, X: HermitianOp, value: float) -> "MeasurementSet":
        """
        加入一次测量；与已有张成相关时只检查一致性，j 不变

        Raises:
            DimensionError: 维度不符
            ValueError: require_local 下 X 不是乘积形式
            InconsistentMeasurementError: 期望值越界或与隐含值矛盾
        """
        X = as_op(X)
        value = float(value)
        if X.dims != self.dims:
            raise DimensionError(f"可观测量维度 {X.dims} 与测量集 {self.dims} 不符")
        if self.require_local and not is_local(X):
            raise ValueError("require_local 模式只接受乘积形式的可观测量")

        eigs = X.eigvalsh()
        if value < eigs[0] - self.tolerance or value > eigs[-1] + self.tolerance:
            raise InconsistentMeasurementError(
                f"期望值 {value:.12g} 超出可观测量谱范围 [{eigs[0]:.6g}, {eigs[-1]:.6g}]"
            )

        coeffs = X.coeffs
        scale = max(1.0, float(np.linalg.norm(coeffs)))
        projection = self.rows @ coeffs
        residual = coeffs - projection @ self.rows
        correction = self.rows @ residual
        residual = residual - correction @ self.rows
        projection = projection + correction
        implied = float(projection @ self.values)
        residual_norm = float(np.linalg.norm(residual))

        entries = self.entries + ((X, value),)
        if residual_norm < DEPENDENCE_TOL * scale:
            if abs(value - implied) > self.tolerance * scale:
                raise InconsistentMeasurementError(
                    f"可观测量与已测量张成线性相关，隐含值 {implied:.12g}，收到 {value:.12g}"
                )
            return MeasurementSet(self.dims, self.rows, self.values, entries,
                                  self.require_local, self.tolerance)

        new_row = residual / residual_norm
        new_value = (value - implied) / residual_norm
        rows = np.vstack([self.rows, new_row])
        values = np.append(self.values, new_value)
        return MeasurementSet(self.dims, rows, values, entries, self.require_local, self.tolerance)

    def frame(self) -> Frame:
        """测量张成中与单位算符正交的部分"""
        return Frame.from_rows(self.dims, self.rows[1:])

    def target(self) -> np.ndarray:
        return self.values[1:].copy()


def add_measurement(ms: MeasurementSet, X: HermitianOp, value: float) -> MeasurementSet:
    return ms.add(X, value)


# ============ 测量流 ============

def parse_measurement(record: dict, dims: Dims) -> Tuple[HermitianOp, float]:
    """
    {"observable": "XX" 或 [基系数...], "value": 实数}

    Raises:
        ValueError: 字段缺失或格式错误
    """
    if not isinstance(record, dict) or "observable" not in record or "value" not in record:
        raise ValueError("测量记录必须包含 observable 和 value")
    value = record["value"]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"value 必须是数值，收到：{value!r}")

    observable = record["observable"]
    if isinstance(observable, str):
        if dims != Dims(2, 2):
            raise DimensionError("泡利串只适用于 2×2 系统")
        return pauli_string(observable), float(value)
    if isinstance(observable, list):
        if len(observable) != dims.n:
            raise DimensionError(f"基系数个数应为 {dims.n}，收到 {len(observable)}")
        return HermitianOp.from_coeffs(dims, np.array(observable, dtype=float)), float(value)
    raise ValueError("observable 必须是泡利串或基系数列表")


def read_measurements(
    lines: Iterable[str],
    dims: Optional[Dims] = None,
    require_local: bool = False,
) -> MeasurementSet:
    """
    解析 JSON Lines 测量流；首行可以是 {"M": .., "N": ..} 声明维度，默认 2×2

    Raises:
        ValueError: JSON 格式错误（附行号）
    """
    ms: Optional[MeasurementSet] = None
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise ValueError(f"第 {lineno} 行 JSON 格式错误：{e}")
        if ms is None and isinstance(record, dict) and "observable" not in record and "M" in record:
            dims = Dims(record["M"], record["N"])
            continue
        if ms is None:
            ms = MeasurementSet.empty(dims or Dims(2, 2), require_local)
        try:
            ms = ms.add(*parse_measurement(record, ms.dims))
        except (InconsistentMeasurementError, DimensionError):
            raise
        except ValueError as e:
            raise ValueError(f"第 {lineno} 行：{e}")
    if ms is None:
        ms = MeasurementSet.empty(dims or Dims(2, 2), require_local)
    return ms


# ============ 子空间求解 ============

def subspace_solve(
    ms: MeasurementSet,
    delta: Optional[float] = None,
    config: Optional[SolverConfig] = None,
) -> Verdict:
    """
    在测量张成内寻找见证

    Returns:
        ENTANGLED（见证系数只在张成内非零）或 INCONCLUSIVE
    """
    config = config or SolverConfig()
    if delta is not None:
        valid, err = validate_delta(delta)
        if not valid:
            raise ValueError(err)
        config = config.model_copy(update={"delta": float(delta)})
    if config.require_local and not ms.require_local:
        for X, _ in ms.entries:
            if not is_local(X):
                raise ValueError("配置要求乘积形式的可观测量")

    if ms.j <= 1:
        logger.info("测量集只有单位算符分量，无法判定")
        return Verdict(kind=VerdictKind.INCONCLUSIVE, termination="no_measurements")

    logger.info(f"部分信息求解 {ms.dims}：j={ms.j}，δ={config.delta}")
    engine = CuttingPlaneEngine(ms.frame(), ms.target(), config, subspace=True)
    verdict = engine.run()
    verdict.details["j"] = ms.j
    return verdict
