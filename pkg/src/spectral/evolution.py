"""Semigroup evolution e^{tM}θ and the central-limit comparison."""

from __future__ import annotations

import logging
import math
from enum import Enum

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import expm_multiply

from src.boltzmann.fiber import build_M, gibbs_from_energy
from src.errors import DomainError
from src.schemas.boltzmann import FiberOperator, RateKernel
from src.schemas.spectral import CltComparison, DiffusionTensor
from src.spectral.diffusion import diffusion_resolvent
from src.spectral.eigen import certified_radius

logger = logging.getLogger(__name__)


class EvolutionMethod(str, Enum):
    DENSE = "dense"  # scaling-and-squaring expm
    TAYLOR = "taylor"  # truncated Taylor action, never forms e^{tM}


def evolve_fiber(
    operator: FiberOperator,
    theta0: np.ndarray,
    t: float,
    method: EvolutionMethod | str = EvolutionMethod.DENSE,
) -> np.ndarray:
    """Return e^{tM}θ₀.

    Raises:
        DomainError: t < 0.
    """
    if t < 0 or not math.isfinite(t):
        raise DomainError(f"Evolution time must be finite and nonnegative, got {t}")
    theta = np.asarray(theta0, dtype=complex)
    if t == 0:
        return theta.copy()

    method = EvolutionMethod(method)
    if method == EvolutionMethod.DENSE:
        return scipy.linalg.expm(t * operator.matrix) @ theta  # type: ignore[no-any-return]
    return expm_multiply(t * operator.matrix, theta)  # type: ignore[no-any-return]


def clt_check(
    kernel: RateKernel,
    q: np.ndarray | list[float],
    t: float,
    diffusion: DiffusionTensor | None = None,
    *,
    radius: float | None = None,
) -> CltComparison:
    """Compare ⟨1, e^{tM^{q/√t}} ζ⟩ with e^{−½(q, D q)}.

    Args:
        kernel: Rate kernel.
        q: Real d-vector.
        t: Time, > 0.
        diffusion: Precomputed tensor; the resolvent route is used when omitted.
        radius: Precomputed certified κ radius.

    Raises:
        DomainError: t ≤ 0 or |q|/√t beyond the certified radius.
    """
    if t <= 0:
        raise DomainError(f"CLT time must be positive, got {t}")
    q_vec = np.asarray(q, dtype=float).reshape(-1)
    kappa = q_vec / math.sqrt(t)
    radius = certified_radius(kernel) if radius is None else radius
    if float(np.linalg.norm(kappa)) > radius:
        raise DomainError(f"|q|/sqrt(t) = {np.linalg.norm(kappa):.4g} exceeds the certified radius {radius:.4g}")

    diffusion = diffusion_resolvent(kernel) if diffusion is None else diffusion
    weight = kernel.grid.weight
    zeta = gibbs_from_energy(kernel.dispersion.energy, weight, kernel.spec.beta).values
    evolved = evolve_fiber(build_M(kernel, kappa), zeta, t)
    lhs = complex(weight * evolved.sum())
    rhs = math.exp(-0.5 * float(q_vec @ diffusion.D @ q_vec))
    logger.debug("CLT q=%s t=%g: lhs=%s rhs=%.12g", q_vec.tolist(), t, lhs, rhs)
    return CltComparison(q=q_vec, t=float(t), lhs=lhs, rhs=rhs)
