"""χ_t(π): integral of ∏_{(r,s)∈π} h(t_s − t_r) over the ordered simplex.

The simplex is 0 = t_1 ≤ t_2 ≤ … ≤ t_{2n} = t, with t_2 … t_{2n−1} integrated.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from enum import Enum

import numpy as np
from scipy.stats import qmc

from src.errors import DomainError
from src.schemas.pairings import ChiEstimate, Pairing

logger = logging.getLogger(__name__)

HFunction = Callable[[np.ndarray], np.ndarray]

MAX_QUADRATURE_N = 4
_QUADRATURE_ORDERS = (16, 12, 8, 6)
_MAX_POINTS = 1_000_000
_QMC_POINTS_LOG2 = 12
_QMC_REPLICATES = 8


class ChiMethod(str, Enum):
    QUADRATURE = "quadrature"
    QMC = "qmc"


def _integrand(pairing: Pairing, times: np.ndarray, h: HFunction) -> np.ndarray:
    """∏ h(t_s − t_r) for each row of times (columns t_1 … t_{2n})."""
    product = np.ones(times.shape[0])
    for r, s in pairing.pairs:
        product *= h(times[:, s - 1] - times[:, r - 1])
    return product


def _order_for(dimension: int, max_points: int) -> int:
    for order in _QUADRATURE_ORDERS:
        if order**dimension <= max_points:
            return order
    return _QUADRATURE_ORDERS[-1]


def _simplex_rule(dimension: int, t: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nested Gauss–Legendre rule: t_{j+1} ∈ [t_j, t] for each level."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    points = np.zeros((1, 0))
    total = np.ones(1)
    for _ in range(dimension):
        lower = points[:, -1] if points.shape[1] else np.zeros(points.shape[0])
        half = 0.5 * (t - lower)
        new = lower[:, None] + half[:, None] * (nodes[None, :] + 1.0)  # (P, order)
        total = (total[:, None] * half[:, None] * weights[None, :]).ravel()
        points = np.concatenate([np.repeat(points, order, axis=0), new.reshape(-1, 1)], axis=1)
    return points, total


def _with_endpoints(inner: np.ndarray, t: float) -> np.ndarray:
    rows = inner.shape[0]
    return np.concatenate([np.zeros((rows, 1)), inner, np.full((rows, 1), t)], axis=1)


def _quadrature(pairing: Pairing, t: float, h: HFunction, max_points: int) -> ChiEstimate:
    dimension = 2 * pairing.n - 2
    order = _order_for(dimension, max_points)
    estimates = []
    for q in (order, order - 4):
        inner, weights = _simplex_rule(dimension, t, q)
        estimates.append(float(weights @ _integrand(pairing, _with_endpoints(inner, t), h)))
    logger.debug("χ quadrature n=%d order=%d: %.12g", pairing.n, order, estimates[0])
    return ChiEstimate(
        value=estimates[0],
        error=abs(estimates[0] - estimates[1]),
        method=ChiMethod.QUADRATURE.value,
        points=order**dimension,
    )


def _quasi_monte_carlo(pairing: Pairing, t: float, h: HFunction, seed: int) -> ChiEstimate:
    """Sorted scrambled Sobol points are uniform on the ordered simplex of volume t^m/m!."""
    dimension = 2 * pairing.n - 2
    volume = t**dimension / math.factorial(dimension)
    replicates = []
    for child in np.random.SeedSequence(seed).spawn(_QMC_REPLICATES):
        sampler = qmc.Sobol(d=dimension, scramble=True, seed=np.random.default_rng(child))
        inner = np.sort(sampler.random_base2(_QMC_POINTS_LOG2), axis=1) * t
        replicates.append(volume * float(_integrand(pairing, _with_endpoints(inner, t), h).mean()))
    samples = np.asarray(replicates)
    return ChiEstimate(
        value=float(samples.mean()),
        error=float(samples.std(ddof=1) / math.sqrt(samples.size)),
        method=ChiMethod.QMC.value,
        points=samples.size << _QMC_POINTS_LOG2,
    )


def chi(
    pairing: Pairing,
    t: float,
    h: HFunction,
    method: ChiMethod | str = ChiMethod.QUADRATURE,
    *,
    seed: int = 0,
    max_points: int = _MAX_POINTS,
) -> ChiEstimate:
    """Estimate χ_t(π) with an error bar.

    Args:
        pairing: Member of P_n.
        t: Final time, t ≥ 0.
        h: Nonnegative vectorized function on [0, ∞).
        method: Nested Gauss–Legendre (n ≤ 4) or scrambled-Sobol quasi-Monte Carlo.
        seed: Scrambling seed for the quasi-Monte Carlo replicates.
        max_points: Cap on quadrature nodes when choosing the Gauss order.

    Raises:
        DomainError: t < 0, π not in P_n, or quadrature requested for n > 4.
    """
    method = ChiMethod(method)
    if t < 0:
        raise DomainError(f"χ_t needs t >= 0, got {t}")
    if not pairing.is_complete:
        raise DomainError(f"χ_t needs a pairing of {{1..2n}}, got {pairing.pairs}")

    if pairing.n == 1:
        value = float(np.asarray(h(np.array([t])))[0])
        return ChiEstimate(value=value, error=0.0, method=method.value, points=1)
    if t == 0:
        return ChiEstimate(value=0.0, error=0.0, method=method.value, points=0)

    if method == ChiMethod.QUADRATURE:
        if pairing.n > MAX_QUADRATURE_N:
            raise DomainError(f"Quadrature supports n <= {MAX_QUADRATURE_N}, got n={pairing.n}; use qmc")
        return _quadrature(pairing, t, h, max_points)
    return _quasi_monte_carlo(pairing, t, h, seed)
