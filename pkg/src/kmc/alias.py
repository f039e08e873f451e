"""Vose alias tables for O(1) jump-target sampling."""

from __future__ import annotations

from collections import deque

import numpy as np

from src.schemas.boltzmann import RateKernel
from src.schemas.kmc import AliasTables


def create_alias(probabilities: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Build (threshold, alias) for a probability vector summing to 1."""
    size = probabilities.size
    scaled = probabilities * size
    threshold = np.ones(size)
    alias = np.arange(size)

    smaller: deque[int] = deque()
    larger: deque[int] = deque()
    for index, value in enumerate(scaled):
        (smaller if value < 1.0 else larger).append(index)

    while smaller and larger:
        small = smaller.pop()
        large = larger.pop()
        threshold[small] = scaled[small]
        alias[small] = large
        scaled[large] = (scaled[large] + scaled[small]) - 1.0
        (smaller if scaled[large] < 1.0 else larger).append(large)

    # leftovers are 1 up to rounding
    return threshold, alias


def build_jump_tables(kernel: RateKernel) -> AliasTables:
    """Alias tables for each state's jump law w·r(k,·)/R(k); frozen states jump to themselves."""
    n = kernel.grid.size
    threshold = np.ones((n, n))
    alias = np.tile(np.arange(n), (n, 1))
    for state in range(n):
        total = kernel.total_rate[state]
        if total <= 0:
            threshold[state] = 0.0
            alias[state] = state
            continue
        row = kernel.grid.weight * kernel.rates[state] / total
        threshold[state], alias[state] = create_alias(row / row.sum())
    threshold.setflags(write=False)
    alias.setflags(write=False)
    return AliasTables(probability=threshold, alias=alias)


def draw_targets(tables: AliasTables, states: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Jump targets for each state, one uniform per draw."""
    n = tables.probability.shape[1]
    scaled = uniforms * n
    column = np.minimum(scaled.astype(np.int64), n - 1)
    accept = (scaled - column) < tables.probability[states, column]
    return np.where(accept, column, tables.alias[states, column])  # type: ignore[no-any-return]
