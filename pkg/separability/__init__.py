# 可分性判定算法
from .oracle import (
    OracleStatus,
    OracleReport,
    GridBudgetError,
    OracleBudgetError,
    evaluate,
    seesaw_ascent,
    search,
    maximize,
    grid_certify,
)
from .frame import Frame
from .verdict import Verdict, VerdictKind, Witness
from .verifiers import (
    PptVerdict,
    PptReport,
    WitnessValidity,
    WitnessCheck,
    FrankWolfeSession,
    FrankWolfeResult,
    ppt_test,
    ppt_witness,
    frank_wolfe_nearest,
    validate_witness,
    basic_algorithm,
)
from .cutting_plane import (
    CutSet,
    CuttingPlaneEngine,
    BudgetExhaustedError,
    DegenerateCutError,
    initial_cut,
    make_cut,
    analytic_center,
    solve,
)
from .partial_info import (
    MeasurementSet,
    InconsistentMeasurementError,
    add_measurement,
    read_measurements,
    subspace_solve,
)

__all__ = [
    "OracleStatus",
    "OracleReport",
    "GridBudgetError",
    "OracleBudgetError",
    "evaluate",
    "seesaw_ascent",
    "search",
    "maximize",
    "grid_certify",
    "Frame",
    "Verdict",
    "VerdictKind",
    "Witness",
    "PptVerdict",
    "PptReport",
    "WitnessValidity",
    "WitnessCheck",
    "FrankWolfeSession",
    "FrankWolfeResult",
    "ppt_test",
    "ppt_witness",
    "frank_wolfe_nearest",
    "validate_witness",
    "basic_algorithm",
    "CutSet",
    "CuttingPlaneEngine",
    "BudgetExhaustedError",
    "DegenerateCutError",
    "initial_cut",
    "make_cut",
    "analytic_center",
    "solve",
    "MeasurementSet",
    "InconsistentMeasurementError",
    "add_measurement",
    "read_measurements",
    "subspace_solve",
]
