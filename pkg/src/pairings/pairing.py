"""Pairing enumeration, irreducibility and irreducible decomposition.

A pairing is irreducible when it cannot be split into two non-empty sub-pairings with
every index of the first below every index of the second. Sweeping the indices in order
while counting open pairs, such a split exists exactly when the count returns to zero
before the last index.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator, Sequence
from functools import lru_cache

from src.errors import ConfigurationError, DomainError
from src.schemas.pairings import IrreducibleDecomposition, Pairing, Side

MAX_ENUMERATION_N = 8


def _pairs_of(indices: list[int]) -> Iterator[list[tuple[int, int]]]:
    """Pair the smallest index with each later one in turn: lexicographic order."""
    if not indices:
        yield []
        return
    first, rest = indices[0], indices[1:]
    for position, partner in enumerate(rest):
        remaining = rest[:position] + rest[position + 1 :]
        for tail in _pairs_of(remaining):
            yield [(first, partner), *tail]


def enumerate_pairings(n: int) -> list[Pairing]:
    """All (2n−1)!! pairings of {1, …, 2n}, lexicographically ordered.

    Raises:
        ConfigurationError: n outside 1..8.
    """
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise ConfigurationError(f"Pairing enumeration supports 1 <= n <= {MAX_ENUMERATION_N}, got {n}")
    return [Pairing(pairs=tuple(p)) for p in _pairs_of(list(range(1, 2 * n + 1)))]


def double_factorial(n: int) -> int:
    """(2n−1)!!"""
    return math.prod(range(1, 2 * n, 2))


def _open_counts(pairing: Pairing) -> list[tuple[int, int]]:
    """(index, open pairs after it) in increasing index order."""
    events = sorted([(r, 1) for r, _ in pairing.pairs] + [(s, -1) for _, s in pairing.pairs])
    counts = []
    running = 0
    for index, delta in events:
        running += delta
        counts.append((index, running))
    return counts


def is_irreducible(pairing: Pairing) -> bool:
    """True iff the open-pair count never returns to zero before the last index."""
    counts = _open_counts(pairing)
    return all(running > 0 for _, running in counts[:-1])


def _reindex(pairs: Sequence[tuple[int, int]]) -> Pairing:
    """Monotone relabelling of the used indices onto {1, …, 2m}."""
    order = {index: rank for rank, index in enumerate(sorted(i for p in pairs for i in p), start=1)}
    return Pairing(pairs=tuple(sorted((order[r], order[s]) for r, s in pairs)))


def decompose_irreducible(pairing: Pairing) -> IrreducibleDecomposition:
    """Split a pairing of P_n into its ordered irreducible components.

    Raises:
        DomainError: pairing is not a member of P_n.
    """
    if not pairing.is_complete:
        raise DomainError(f"Decomposition needs a pairing of {{1..2n}}, got {pairing.pairs}")

    components: list[Pairing] = []
    offsets: list[int] = []
    start = 1
    for index, running in _open_counts(pairing):
        if running == 0:
            block = [(r, s) for r, s in pairing.pairs if start <= r <= index]
            components.append(_reindex(block))
            offsets.append(start - 1)
            start = index + 1
    return IrreducibleDecomposition(components=tuple(components), offsets=tuple(offsets))


def reassemble(decomposition: IrreducibleDecomposition) -> Pairing:
    """Inverse of decompose_irreducible."""
    pairs = [
        (r + offset, s + offset)
        for component, offset in zip(decomposition.components, decomposition.offsets, strict=True)
        for r, s in component.pairs
    ]
    return Pairing(pairs=tuple(sorted(pairs)))


def minimal_irreducible(n: int) -> Pairing:
    """(1,3), (2,5), (4,7), …, (2n−2, 2n); (1,2) for n = 1."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if n == 1:
        return Pairing(pairs=((1, 2),))
    pairs = [(1, 3)] + [(2 * i, 2 * i + 3) for i in range(1, n - 1)] + [(2 * n - 2, 2 * n)]
    return Pairing(pairs=tuple(pairs))


def remove_pair(pairing: Pairing, position: int) -> Pairing:
    """Drop the pair at `position` and relabel the rest onto {1, …, 2n−2}."""
    return _reindex([p for i, p in enumerate(pairing.pairs) if i != position])


def interior_pairs_essential(pairing: Pairing) -> bool:
    """True iff removing any pair other than the one with r = 1 or s = 2n breaks irreducibility."""
    last = 2 * pairing.n
    for position, (r, s) in enumerate(pairing.pairs):
        if r == 1 or s == last:
            continue
        if is_irreducible(remove_pair(pairing, position)):
            return False
    return True


@lru_cache(maxsize=None)
def irreducible_pairings(n: int) -> tuple[Pairing, ...]:
    return tuple(p for p in enumerate_pairings(n) if is_irreducible(p))


def count_irreducible(n: int) -> int:
    return len(irreducible_pairings(n))


def zeta_weight(
    pairing: Pairing,
    times: Sequence[float],
    sites: Sequence[int],
    sides: Sequence[Side | str],
    psi_hat: Callable[[float], complex],
) -> complex:
    """∏_{(r,s)} δ(x_r, x_s)·ψ̂(±(t_s − t_r)), sign + for l_r = L and − for l_r = R.

    Coordinates are indexed by pairing index (1-based).

    Raises:
        DomainError: coordinate sequences do not match the pairing.
    """
    needed = max(s for _, s in pairing.pairs)
    if not (len(times) == len(sites) == len(sides)) or len(times) < needed:
        raise DomainError(
            f"Coordinates of lengths {len(times)}, {len(sites)}, {len(sides)} do not cover index {needed}"
        )
    weight = complex(1.0)
    for r, s in pairing.pairs:
        if sites[r - 1] != sites[s - 1]:
            return 0j
        lag = times[s - 1] - times[r - 1]
        weight *= psi_hat(lag) if Side(sides[r - 1]) == Side.LEFT else psi_hat(-lag)
    return weight
