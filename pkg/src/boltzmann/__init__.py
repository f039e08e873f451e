"""Linear Boltzmann fibers: rate kernel, generator M^κ and the one-loop kernel."""

from src.boltzmann.fiber import (
    build_M,
    first_order_residual,
    gibbs_state,
    kinetic_drift,
    stationary_projector,
    symmetrize,
)
from src.boltzmann.kernel import detailed_balance_residual, rate_kernel, scale_kernel
from src.boltzmann.one_loop import build_L_fiber

__all__ = [
    "rate_kernel",
    "scale_kernel",
    "detailed_balance_residual",
    "build_M",
    "gibbs_state",
    "symmetrize",
    "stationary_projector",
    "kinetic_drift",
    "first_order_residual",
    "build_L_fiber",
]
