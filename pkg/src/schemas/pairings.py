"""Pydantic schemas for pairings and the combinatorial bound report."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, model_validator


class Side(str, Enum):
    """Left/right label of a time coordinate."""

    LEFT = "L"
    RIGHT = "R"


class Pairing(BaseModel):
    """Pairs (r_i, s_i) with r_i < s_i, r_i increasing and all indices distinct."""

    model_config = ConfigDict(frozen=True)

    pairs: tuple[tuple[int, int], ...]

    @model_validator(mode="after")
    def check_pairs(self) -> Pairing:
        indices = [i for pair in self.pairs for i in pair]
        if any(r >= s for r, s in self.pairs):
            raise ValueError(f"every pair needs r < s: {self.pairs}")
        if any(a[0] >= b[0] for a, b in zip(self.pairs, self.pairs[1:], strict=False)):
            raise ValueError(f"left indices must increase: {self.pairs}")
        if len(set(indices)) != len(indices) or any(i < 1 for i in indices):
            raise ValueError(f"indices must be distinct natural numbers: {self.pairs}")
        return self

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def is_complete(self) -> bool:
        """Member of P_n: the indices are exactly {1, …, 2n}."""
        return sorted(i for pair in self.pairs for i in pair) == list(range(1, 2 * self.n + 1))


class IrreducibleDecomposition(BaseModel):
    """Ordered irreducible components, each re-indexed to {1, …, 2n_i}, with start offsets."""

    model_config = ConfigDict(frozen=True)

    components: tuple[Pairing, ...]
    offsets: tuple[int, ...]


class ChiEstimate(BaseModel):
    value: float
    error: float
    method: str
    points: int


class BoundTerm(BaseModel):
    n: int
    lhs: float
    rhs: float


class BoundCheck(BaseModel):
    """One inequality LHS ≤ RHS·(1 + 1e−8)."""

    name: str
    lhs: float
    rhs: float
    passed: bool
    terms: list[BoundTerm] = []


class CombinatorialReport(BaseModel):
    n_max: int
    t: float
    z: float
    h: str
    mode: str
    irreducible_counts: dict[int, int]
    irreducible_sum: BoundCheck
    laplace: list[BoundCheck]

    @property
    def passed(self) -> bool:
        return self.irreducible_sum.passed and all(b.passed for b in self.laplace)
