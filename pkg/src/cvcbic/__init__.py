"""Enumeration of maximal biclusters with constant values on columns."""
from .core import (
    Bicluster,
    BiclusterSolution,
    ColumnKind,
    ConfigError,
    CVCError,
    DataError,
    EnumParams,
    NumericMatrix,
    admissible_columns,
    column_residue,
    coverage,
    is_correct,
    is_maximal,
    maximality_violation,
)
from .enumerator import (
    EnumStats,
    enumerate_biclusters,
    enumerate_cvc3,
    enumerate_cvc_legacy,
    enumerate_cvcp,
)
from .oracle import brute_force, verify

__version__ = "0.1.0"
