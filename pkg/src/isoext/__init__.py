"""Finite extensions of metric spaces in which partial isometries become total."""

from .metric_core import (
    Dist,
    FiniteMetricSpace,
    Isometry,
    IsoextError,
    PartialIsometry,
    compose_partial,
    distance_set,
    enumerate_partial_isometries,
    validate_metric,
)
from .group_core import FiniteQuotient, GenSet, StabilizerGens, Word, evaluate_word, stabilizer_generators
from .s_extension import (
    SearchBudget,
    SExtension,
    build_extension_from_quotient,
    condition_instances,
    extend_space,
    find_admissible_quotient,
    isomorphism_check,
    minimalize,
    verify_s_extension,
)

__all__ = [name for name in dir() if not name.startswith("_")]
