"""判定结果"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from qstate.hermitian import HermitianOp
from qstate.states import SeparableDecomposition


class VerdictKind(str, Enum):
    SEPARABLE = "SEPARABLE"
    ENTANGLED = "ENTANGLED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Witness:
    """纠缠见证：tr(Aσ) ≤ f_upper < tr(Aρ) 对所有可分 σ（certified 时）"""
    operator: HermitianOp
    threshold: float
    f_lower: float
    f_upper: float
    certified: bool
    source: str = "analytic_center"

    @property
    def margin(self) -> float:
        """tr(Aρ) − f_upper"""
        return self.threshold - self.f_upper

    def to_dict(self) -> dict:
        return {
            "coefficients": list(self.operator.coeffs),
            "matrix": [list(row) for row in self.operator.matrix],
            "threshold": self.threshold,
            "f_lower": self.f_lower,
            "f_upper": self.f_upper,
            "margin": self.margin,
            "certified": self.certified,
            "source": self.source,
        }


@dataclass
class Verdict:
    kind: VerdictKind
    witness: Optional[Witness] = None
    decomposition: Optional[SeparableDecomposition] = None
    distance: Optional[float] = None
    oracle_calls: int = 0
    iterations: int = 0
    termination: str = ""
    trace: List[dict] = field(default_factory=list)
    cuts: List[HermitianOp] = field(default_factory=list, repr=False)
    details: dict = field(default_factory=dict)

    @property
    def is_entangled(self) -> bool:
        return self.kind == VerdictKind.ENTANGLED

    def to_dict(self, include_trace: bool = True) -> dict:
        result = {
            "verdict": self.kind.value,
            "termination": self.termination,
            "oracle_calls": self.oracle_calls,
            "iterations": self.iterations,
            "cuts": len(self.cuts),
        }
        if self.witness is not None:
            result["witness"] = self.witness.to_dict()
        if self.distance is not None:
            result["distance"] = self.distance
        if self.decomposition is not None:
            result["decomposition"] = self.decomposition.to_dict()
        result.update(self.details)
        if include_trace:
            result["trace"] = self.trace
        return result
