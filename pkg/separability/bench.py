"""
基准实例：记录每个实例的判定、oracle 调用次数与耗时

MN ≤ 6 时以 PPT 判据作为真值，其余实例只记录判定。
"""
import sys
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
import pandas as pd

from config.settings import SolverConfig
from qstate.hermitian import DensityMatrix, Dims
from qstate.states import bell_state, random_separable, random_state, werner
from utils.logger import setup_logger

from .cutting_plane import BudgetExhaustedError, solve
from .verifiers import PptVerdict, ppt_test

logger = setup_logger(__name__)

WERNER_SWEEP = (0.0, 0.2, 0.30, 0.37, 0.5, 1.0)


@dataclass
class BenchInstance:
    name: str
    build: Callable[[], DensityMatrix]


def default_instances(seed: int = 0, random_count: int = 5) -> List[BenchInstance]:
    """Werner 扫描、Bell 态、随机态与植入可分态"""
    instances = [BenchInstance(f"werner(p={p:g})", lambda p=p: werner(p)) for p in WERNER_SWEEP]
    instances.append(BenchInstance("bell(phi+)", lambda: bell_state("phi+")))
    for i in range(random_count):
        instances.append(
            BenchInstance(f"random(2x2, seed={seed + i})", lambda s=seed + i: random_state(Dims(2, 2), s))
        )
    instances.append(
        BenchInstance(f"separable(2x3, seed={seed})", lambda: random_separable(Dims(2, 3), 6, seed)[0])
    )
    return instances


def _expected(rho: DensityMatrix) -> Optional[str]:
    if rho.dims.d > 6:
        return None
    report = ppt_test(rho)
    return "ENTANGLED" if report.verdict == PptVerdict.PPT_NEGATIVE else "SEPARABLE"


def run_instance(instance: BenchInstance, config: SolverConfig) -> dict:
    rho = instance.build()
    start = time.perf_counter()
    try:
        verdict = solve(rho, config=config)
    except BudgetExhaustedError as e:
        verdict = e.verdict
    seconds = time.perf_counter() - start

    expected = _expected(rho)
    record = {
        "instance": instance.name,
        "dims": str(rho.dims),
        "verdict": verdict.kind.value,
        "expected": expected,
        "agree": None if expected is None else expected == verdict.kind.value,
        "termination": verdict.termination,
        "oracle_calls": verdict.oracle_calls,
        "call_cap": config.oracle_call_cap(rho.dims.n),
        "iterations": verdict.iterations,
        "seconds": round(seconds, 3),
    }
    if verdict.witness is not None:
        record["margin"] = verdict.witness.margin
    return record


def run_bench(
    config: Optional[SolverConfig] = None,
    instances: Optional[Sequence[BenchInstance]] = None,
    seed: int = 0,
) -> pd.DataFrame:
    """逐个实例求解，失败的实例记录错误后继续"""
    config = config or SolverConfig()
    instances = instances if instances is not None else default_instances(seed)
    records = []
    for instance in instances:
        logger.info(f"基准实例 {instance.name}")
        try:
            records.append(run_instance(instance, config))
        except (ValueError, RuntimeError) as e:
            logger.warning(f"实例 {instance.name} 失败：{e}")
            records.append({"instance": instance.name, "error": str(e)})
    return pd.DataFrame(records)


def print_bench(df: pd.DataFrame, stream=None) -> None:
    """表格打印到 stderr，stdout 只留给 JSON"""
    stream = stream or sys.stderr
    cols = ["instance", "dims", "verdict", "expected", "agree", "oracle_calls", "call_cap", "iterations", "seconds"]
    print("=" * 70, file=stream)
    print("基准结果", file=stream)
    print("=" * 70, file=stream)
    if len(df) > 0:
        print(df[[c for c in cols if c in df.columns]].to_string(index=False), file=stream)
        if "agree" in df.columns:
            checked = df["agree"].dropna()
            if len(checked) > 0:
                print(f"\n与 PPT 一致：{int(checked.sum())}/{len(checked)}", file=stream)
    else:
        print("无有效结果", file=stream)


def bench_records(df: pd.DataFrame) -> List[dict]:
    """DataFrame → 可序列化记录（NaN 转 None）"""
    cleaned = df.astype(object).where(pd.notna(df), None)
    return [
        {k: (v.item() if isinstance(v, np.generic) else v) for k, v in row.items()}
        for row in cleaned.to_dict(orient="records")
    ]
