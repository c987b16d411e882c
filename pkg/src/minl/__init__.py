"""Measurement-induced nonlocality of bipartite quantum states."""

from types import ModuleType as _ModuleType

from .config import TOL, Tolerances
from .measurement import InvariantMeasurement, pinch, random_invariant_measurement, realize, spectral_blocks
from .nonlocality import (
    OptimizationReport,
    OptimizerConfig,
    avg_conditional_entropy,
    n_geo,
    n_re,
    n_re_bell_diagonal,
    n_re_pure,
    qubit_grid_oracle,
)
from .qstate import (
    BellDiagonalParams,
    DensityMatrix,
    PureState,
    StateValidationError,
    bell_diagonal,
    bell_state,
    entropy,
    mutual_information,
    product,
    random_density,
    random_pure,
    relative_entropy,
    werner,
)
from .tradeoffs import (
    coherent_info_identity,
    dilate,
    max_missing_information,
    min_side_information,
    missing_information,
    side_information,
    tripartite_mixed_inequality,
    tripartite_tradeoff,
)
from .verify import run_suite

__all__ = [k for k, v in dict(globals()).items() if not k.startswith("_") and not isinstance(v, _ModuleType)]
