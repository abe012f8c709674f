# 量子态数据层
from .hermitian import (
    Dims,
    OperatorBasis,
    HermitianOp,
    DensityMatrix,
    DimensionError,
    StateValidationError,
    build_basis,
    identity_op,
    maximally_mixed_op,
    as_op,
    inner,
    norm_distance,
    operator_norm,
    partial_transpose,
    conditional_operator,
    mirrored_conditional_operator,
    top_eigenpair,
    gauge_fix,
)
from .states import (
    ProductState,
    SeparableDecomposition,
    params_roundtrip,
    random_chart_params,
    mix,
    werner,
    isotropic,
    bell_state,
    maximally_mixed,
    maximally_mixed_decomposition,
    pure_density,
    product_density,
    random_state,
    random_separable,
    random_product_state,
    pauli_string,
    density_to_payload,
    density_from_payload,
)
from .cache import clear_cache, get_cache_info, cache_stats

__all__ = [
    "Dims",
    "OperatorBasis",
    "HermitianOp",
    "DensityMatrix",
    "DimensionError",
    "StateValidationError",
    "build_basis",
    "identity_op",
    "maximally_mixed_op",
    "as_op",
    "inner",
    "norm_distance",
    "operator_norm",
    "partial_transpose",
    "conditional_operator",
    "mirrored_conditional_operator",
    "top_eigenpair",
    "gauge_fix",
    "ProductState",
    "SeparableDecomposition",
    "params_roundtrip",
    "random_chart_params",
    "mix",
    "werner",
    "isotropic",
    "bell_state",
    "maximally_mixed",
    "maximally_mixed_decomposition",
    "pure_density",
    "product_density",
    "random_state",
    "random_separable",
    "random_product_state",
    "pauli_string",
    "density_to_payload",
    "density_from_payload",
    "clear_cache",
    "get_cache_info",
    "cache_stats",
]
