"""Canonical Wiener-Hopf factorization of matrix functions on the unit circle."""

from .core import (
    DEFAULT_TOL,
    DimensionError,
    InvalidRepresentationError,
    NotDichotomousError,
    SingularMatrixError,
    SpectraOverlapError,
    Tolerances,
    Verdict,
    WienerHopfError,
)
from .factorization import (
    FactorPair,
    Realization,
    dichot_left_factors,
    dichot_right_factors,
    left_factors,
    right_factors,
    verify_factorization,
)
from .leftright import LeftRightReport, block_diagonalize, left_exists_given_right, lyapunov_z
from .representation import (
    DichotomousRealization,
    StableRepresentation,
    dichotomous_to_stable,
    eval_R,
    eval_R0,
    stable_to_dichotomous,
)
from .riccati import (
    NoStabilizingSolution,
    RiccatiCertificate,
    circ_operators,
    solve_left_stabilizing,
    solve_right_stabilizing,
)
from .solset import classify, scalar_solution_sets
from .subspaces import matching_left, matching_right
from .toeplitz import toeplitz_q_oracle

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "DichotomousRealization",
    "DimensionError",
    "FactorPair",
    "InvalidRepresentationError",
    "LeftRightReport",
    "NoStabilizingSolution",
    "NotDichotomousError",
    "Realization",
    "RiccatiCertificate",
    "SingularMatrixError",
    "SpectraOverlapError",
    "StableRepresentation",
    "Tolerances",
    "Verdict",
    "WienerHopfError",
    "block_diagonalize",
    "circ_operators",
    "classify",
    "dichot_left_factors",
    "dichot_right_factors",
    "dichotomous_to_stable",
    "eval_R",
    "eval_R0",
    "left_exists_given_right",
    "left_factors",
    "lyapunov_z",
    "matching_left",
    "matching_right",
    "right_factors",
    "scalar_solution_sets",
    "solve_left_stabilizing",
    "solve_right_stabilizing",
    "stable_to_dichotomous",
    "toeplitz_q_oracle",
    "verify_factorization",
]
