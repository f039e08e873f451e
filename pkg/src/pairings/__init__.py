"""Pairing combinatorics and certification of the Dyson-expansion bounds."""

from src.pairings.bounds import HKind, named_h, verify_combinatorial_bounds
from src.pairings.chi import ChiMethod, chi
from src.pairings.pairing import (
    count_irreducible,
    decompose_irreducible,
    enumerate_pairings,
    is_irreducible,
    minimal_irreducible,
    reassemble,
    zeta_weight,
)

__all__ = [
    "enumerate_pairings",
    "is_irreducible",
    "decompose_irreducible",
    "reassemble",
    "minimal_irreducible",
    "count_irreducible",
    "zeta_weight",
    "chi",
    "ChiMethod",
    "HKind",
    "named_h",
    "verify_combinatorial_bounds",
]
