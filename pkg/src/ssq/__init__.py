"""Generalized spin-squeezing inequalities: detection of genuine 2- and
3-qubit entanglement in N-qubit states via collective-spin moments, with a
partial-transpose oracle and a P-representation separability certificate."""

__version__ = "0.1.0"

from .criteria import (
    CriterionReport,
    KTensor,
    bipartite_margin,
    bipartite_margin_general,
    bipartite_raw,
    is_symmetric_moments,
    k_tensor,
    k_tensor_cyclic_average,
    margin_verdict,
    ss_value,
    tripartite_margin,
    witness_matrix,
    xi_squared,
)
from .lorentz import Frame, lorentz_from_sl2c
from .oracle import OracleVerdict, RandomStateSpec, generate, ppt_verdict
from .prep import p_expand, p_reconstruct, separability_certificate, witness_polynomial
from .search import (
    OptimizationResult,
    SearchConfig,
    optimize_direction,
    optimize_frame,
    optimize_lorentz,
)
from .spin import MomentTensors, SpinOperators, collective_spin, moments, rotated_component
from .states import (
    DensityMatrix,
    DickeCoefficients,
    PureState,
    build_named_state,
    expectation,
    load_state,
    partial_trace,
    partial_transpose,
    save_state,
)

__all__ = [
    "__version__",
    "CriterionReport",
    "KTensor",
    "Frame",
    "DensityMatrix",
    "DickeCoefficients",
    "PureState",
    "MomentTensors",
    "SpinOperators",
    "OptimizationResult",
    "SearchConfig",
    "OracleVerdict",
    "RandomStateSpec",
    "bipartite_margin",
    "bipartite_margin_general",
    "bipartite_raw",
    "build_named_state",
    "is_symmetric_moments",
    "margin_verdict",
    "collective_spin",
    "expectation",
    "generate",
    "k_tensor",
    "k_tensor_cyclic_average",
    "load_state",
    "lorentz_from_sl2c",
    "moments",
    "optimize_direction",
    "optimize_frame",
    "optimize_lorentz",
    "p_expand",
    "p_reconstruct",
    "partial_trace",
    "partial_transpose",
    "ppt_verdict",
    "rotated_component",
    "save_state",
    "separability_certificate",
    "ss_value",
    "tripartite_margin",
    "witness_matrix",
    "witness_polynomial",
    "xi_squared",
]
