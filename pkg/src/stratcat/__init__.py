"""Exact combinatorics of stratified simplicial sets, cube quotients and
Morse complexes with functor coefficients."""

from .errors import (CoefficientError, DataError, SchemaError, StratcatError,
                     StratificationError, UsageError)
from .poset_core import (DeltaAMorphism, FinitePoset, IncreasingSequence, StrictSequence,
                         condense, cube_poset, path_compose, path_compose_condense, path_hom,
                         sequence_maps, validate_poset)

__all__ = [
    "CoefficientError", "DataError", "SchemaError", "StratcatError", "StratificationError",
    "UsageError", "DeltaAMorphism", "FinitePoset", "IncreasingSequence", "StrictSequence",
    "condense", "cube_poset", "path_compose", "path_compose_condense", "path_hom",
    "sequence_maps", "validate_poset",
]
__version__ = "0.1.0"
