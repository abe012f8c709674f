"""
子命令处理函数

每个函数接收解析后的参数和求解配置，返回可序列化的 dict；
异常原样抛出，由 main.run 统一映射为退出码和错误 JSON。
"""
import json
import sys
from argparse import Namespace
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from config.settings import SolverConfig
from qstate.hermitian import DensityMatrix, Dims, DimensionError, HermitianOp
from qstate.states import (
    bell_state,
    density_from_payload,
    density_to_payload,
    isotropic,
    maximally_mixed,
    pauli_string,
    random_separable,
    random_state,
    werner,
)
from separability.bench import bench_records, print_bench, run_bench
from separability.cutting_plane import solve
from separability.partial_info import MeasurementSet, read_measurements, subspace_solve
from separability.verifiers import frank_wolfe_nearest, ppt_test, validate_witness
from utils.logger import setup_logger

logger = setup_logger(__name__)


# ============ 输入读取 ============

def _read_text(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _load_json(path: Optional[str], what: str) -> dict:
    """
    Raises:
        ValueError: JSON 格式错误
    """
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"{what} JSON 格式错误：{e}")


def load_density(path: Optional[str]) -> DensityMatrix:
    return density_from_payload(_load_json(path, "密度矩阵"))


def load_witness(path: str, dims: Dims) -> HermitianOp:
    """
    见证文件：{"coefficients": [...]} 或 {"matrix": [[[re, im], ...], ...]}；
    solve 输出的 Verdict JSON 也可直接使用（读取其中的 witness 字段）
    """
    payload = _load_json(path, "见证")
    if isinstance(payload, dict) and isinstance(payload.get("witness"), dict):
        payload = payload["witness"]
    if not isinstance(payload, dict):
        raise ValueError("见证 JSON 顶层必须是对象")
    if "coefficients" in payload:
        coeffs = np.asarray(payload["coefficients"], dtype=float)
        if coeffs.shape != (dims.n,):
            raise DimensionError(f"见证系数个数应为 {dims.n}，收到 {coeffs.size}")
        return HermitianOp.from_coeffs(dims, coeffs)
    if "matrix" in payload:
        entries = np.asarray(payload["matrix"], dtype=float)
        if entries.shape != (dims.d, dims.d, 2):
            raise DimensionError(f"见证矩阵应为 {dims.d}×{dims.d} 的 [re, im] 数组")
        return HermitianOp.from_matrix(dims, entries[..., 0] + 1j * entries[..., 1])
    raise ValueError("见证 JSON 需要 coefficients 或 matrix 字段")


# ============ 子命令 ============

def cmd_solve(args: Namespace, config: SolverConfig) -> dict:
    rho = load_density(args.input)
    verdict = solve(rho, config=config)
    return verdict.to_dict(include_trace=not args.no_trace)


def cmd_ppt(args: Namespace, config: SolverConfig) -> dict:
    return ppt_test(load_density(args.input)).to_dict()


def cmd_witness_check(args: Namespace, config: SolverConfig) -> dict:
    rho = load_density(args.input)
    A = load_witness(args.witness, rho.dims)
    return validate_witness(A, rho, config.delta, config.oracle).to_dict()


def _partial_measurements(args: Namespace, require_local: bool) -> MeasurementSet:
    if args.from_state:
        rho = load_density(args.from_state)
        labels = [label.strip() for label in (args.observables or "").split(",") if label.strip()]
        if not labels:
            raise ValueError("--from-state 需要配合 --observables，如 XX,YY,ZZ")
        return MeasurementSet.from_density(rho, [pauli_string(label) for label in labels], require_local)
    return read_measurements(_read_text(args.input).splitlines(), require_local=require_local)


def cmd_partial(args: Namespace, config: SolverConfig) -> dict:
    ms = _partial_measurements(args, config.require_local)
    verdict = subspace_solve(ms, config=config)
    return verdict.to_dict(include_trace=not args.no_trace)


def cmd_nearest_sep(args: Namespace, config: SolverConfig) -> dict:
    rho = load_density(args.input)
    result = frank_wolfe_nearest(
        rho,
        delta=config.delta,
        budget=args.budget or config.oracle_call_cap(rho.dims.n),
        oracle_config=config.oracle,
        fw_starts=config.fw_starts,
    )
    return {
        "distance": result.distance,
        "lower_bound": result.lower_bound,
        "dual_estimate": result.dual_estimate,
        "converged": result.converged,
        "steps": result.steps,
        "decomposition": result.decomposition.to_dict(),
    }


_FAMILIES: Dict[str, Callable[[Namespace], DensityMatrix]] = {
    "werner": lambda a: werner(a.p),
    "isotropic": lambda a: isotropic(a.d, a.p),
    "bell": lambda a: bell_state(a.which),
    "maximally-mixed": lambda a: maximally_mixed(Dims(a.M, a.N)),
    "random": lambda a: random_state(Dims(a.M, a.N), a.seed or 0),
    "random-separable": lambda a: random_separable(Dims(a.M, a.N), a.r, a.seed or 0)[0],
}


def cmd_generate(args: Namespace, config: SolverConfig) -> dict:
    return density_to_payload(_FAMILIES[args.family](args))


def cmd_bench(args: Namespace, config: SolverConfig) -> List[dict]:
    df = run_bench(config, seed=args.seed or 0)
    print_bench(df)
    return bench_records(df)


COMMANDS: Dict[str, Callable[[Namespace, SolverConfig], object]] = {
    "solve": cmd_solve,
    "ppt": cmd_ppt,
    "witness-check": cmd_witness_check,
    "partial": cmd_partial,
    "nearest-sep": cmd_nearest_sep,
    "generate": cmd_generate,
    "bench": cmd_bench,
}

FAMILIES = tuple(_FAMILIES)
