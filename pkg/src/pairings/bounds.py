"""Numerical certification of the two pairing-combinatorics inequalities.

Irreducible sum, truncated at n_max:
    Σ_{π irr, |π| ≤ n_max} χ_t(π) ≤ (Σ_{n ≤ n_max} χ_t(π_n^min)) · exp(t ∫_0^∞ h)

Laplace bound for the minimally irreducible π_n^min:
    ∫_0^∞ e^{−tz} χ_t(π_n^min) dt ≤ (∫_0^∞ h(w) e^{−wz} dw) · (∫_0^∞ h(u) (1 − e^{−uz})/z du)^{n−1}

The last factor is ∫∫_{R+²} h(y+w) e^{−wz} dy dw in closed form; it reads ∫ u h(u) du at z = 0.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from enum import Enum

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from src.errors import ConfigurationError, DomainError
from src.pairings.chi import MAX_QUADRATURE_N, ChiMethod, HFunction, chi
from src.pairings.pairing import count_irreducible, irreducible_pairings, minimal_irreducible
from src.reservoir.correlation import certified_strip, correlation_function
from src.schemas.pairings import BoundCheck, BoundTerm, CombinatorialReport
from src.schemas.reservoir import SpectralDensity

logger = logging.getLogger(__name__)

BOUND_RTOL = 1e-8
MAX_QMC_N = 5
_LAPLACE_MAX_POINTS = 70_000
_QUAD_LIMIT = 200
_QUAD_RTOL = 1e-6
_ENVELOPE_SAMPLES = 1025
_ENVELOPE_LOG_RANGE = math.log(1e15)


class HKind(str, Enum):
    EXPONENTIAL = "exponential"
    GAUSSIAN = "gaussian"
    CORRELATION = "correlation"


def correlation_envelope(spec: SpectralDensity) -> tuple[HFunction, float]:
    """|ψ̂(u)| tabulated up to the certified decay horizon, zero beyond.

    Returns:
        (h, decay rate g_R_hat).
    """
    rate = 2.0 * certified_strip(spec)
    horizon = _ENVELOPE_LOG_RANGE / rate
    grid = np.linspace(0.0, horizon, _ENVELOPE_SAMPLES)
    table = PchipInterpolator(grid, np.abs(np.asarray(correlation_function(grid, spec))), extrapolate=False)

    def h(u: np.ndarray) -> np.ndarray:
        values = table(np.asarray(u, dtype=float))
        return np.nan_to_num(values, nan=0.0)  # type: ignore[no-any-return]

    return h, rate


def named_h(kind: HKind | str, rate: float = 1.0, spec: SpectralDensity | None = None) -> tuple[HFunction, float]:
    """Preset h functions with their exponential decay rate (∞ for super-exponential decay).

    Raises:
        ConfigurationError: rate ≤ 0, or the correlation preset without a spectral density.
    """
    kind = HKind(kind)
    if kind == HKind.CORRELATION:
        if spec is None:
            raise ConfigurationError("h=correlation needs a spectral density")
        return correlation_envelope(spec)
    if rate <= 0:
        raise ConfigurationError(f"h rate must be positive, got {rate}")
    if kind == HKind.EXPONENTIAL:
        return (lambda u: np.exp(-rate * np.asarray(u, dtype=float))), rate
    return (lambda u: np.exp(-((rate * np.asarray(u, dtype=float)) ** 2))), math.inf


def _scalar(h: HFunction) -> Callable[[float], float]:
    return lambda u: float(np.asarray(h(np.array([u])))[0])


def _half_line_integral(integrand: Callable[[float], float], name: str) -> float:
    """∫_0^∞ integrand, refusing results quad cannot certify as finite."""
    result = integrate.quad(integrand, 0.0, math.inf, limit=_QUAD_LIMIT, full_output=1)
    value, error = float(result[0]), float(result[1])
    if not math.isfinite(value) or (len(result) > 3 and error > _QUAD_RTOL * max(abs(value), 1.0)):
        raise DomainError(f"{name} does not converge (value={value:.6g}, error={error:.3g})")
    return value


def laplace_factors(h: HFunction, z: float) -> tuple[float, float]:
    """(∫ h(w) e^{−wz} dw, ∫∫ h(y+w) e^{−wz} dy dw) on the positive half-line."""
    hs = _scalar(h)
    first = _half_line_integral(lambda w: hs(w) * math.exp(-w * z), "∫ h(w) e^{-wz} dw")
    if z == 0:
        second = _half_line_integral(lambda u: u * hs(u), "∫ u h(u) du")
    else:
        second = _half_line_integral(lambda u: hs(u) * -math.expm1(-u * z) / z, "∫∫ h(y+w) e^{-wz} dy dw")
    return first, second


def _check(name: str, lhs: float, rhs: float, terms: list[BoundTerm] | None = None) -> BoundCheck:
    passed = lhs <= rhs * (1.0 + BOUND_RTOL)
    logger.info("%s: lhs=%.12g rhs=%.12g %s", name, lhs, rhs, "pass" if passed else "FAIL")
    return BoundCheck(name=name, lhs=lhs, rhs=rhs, passed=passed, terms=terms or [])


def irreducible_sum_bound(
    n_max: int, h: HFunction, t: float, method: ChiMethod = ChiMethod.QUADRATURE, seed: int = 0
) -> BoundCheck:
    """Truncated irreducible-sum inequality with a per-order table.

    Term n compares Σ_{π irr ∈ P_n} χ_t(π) with Σ_{m ≤ n} χ_t(π_m^min) (tH)^{n−m}/(n−m)!,
    H = ∫h; summed over n ≤ n_max the right column stays below the total right-hand side.
    """
    growth = t * _half_line_integral(_scalar(h), "∫ h(w) dw")
    minimal = [chi(minimal_irreducible(n), t, h, method, seed=seed).value for n in range(1, n_max + 1)]

    terms = []
    for n in range(1, n_max + 1):
        lhs_n = sum(chi(p, t, h, method, seed=seed).value for p in irreducible_pairings(n))
        rhs_n = sum(minimal[m - 1] * growth ** (n - m) / math.factorial(n - m) for m in range(1, n + 1))
        terms.append(BoundTerm(n=n, lhs=lhs_n, rhs=rhs_n))

    lhs = sum(term.lhs for term in terms)
    rhs = sum(minimal) * math.exp(growth)
    return _check("irreducible-sum", lhs, rhs, terms)


def laplace_bound(
    n: int, h: HFunction, z: float, method: ChiMethod = ChiMethod.QUADRATURE, seed: int = 0
) -> BoundCheck:
    """Laplace-transform inequality for the minimally irreducible pairing of order n."""
    pairing = minimal_irreducible(n)
    first, second = laplace_factors(h, z)
    lhs = _half_line_integral(
        lambda s: math.exp(-s * z) * chi(pairing, s, h, method, seed=seed, max_points=_LAPLACE_MAX_POINTS).value,
        f"Laplace transform of χ (n={n})",
    )
    return _check(f"laplace-n{n}", lhs, first * second ** (n - 1))


def verify_combinatorial_bounds(
    n_max: int,
    h: HFunction,
    t: float,
    z: float,
    *,
    method: ChiMethod | str = ChiMethod.QUADRATURE,
    h_name: str = "custom",
    decay_rate: float | None = None,
    seed: int = 0,
) -> CombinatorialReport:
    """Evaluate both inequalities up to order n_max and report LHS, RHS and pass/fail.

    Args:
        n_max: Truncation order (≤ 4 for quadrature, ≤ 5 for quasi-Monte Carlo).
        h: Nonnegative vectorized function on [0, ∞).
        t: Time for the irreducible-sum inequality.
        z: Real Laplace variable.
        method: χ evaluation method.
        h_name: Label echoed in the report.
        decay_rate: Known exponential decay rate of h, used to refuse z ≤ −rate up front.
        seed: Seed for quasi-Monte Carlo replicates.

    Raises:
        ConfigurationError: n_max out of range for the method.
        DomainError: t < 0 or a right-hand-side integral diverges.
    """
    method = ChiMethod(method)
    limit = MAX_QUADRATURE_N if method == ChiMethod.QUADRATURE else MAX_QMC_N
    if not 1 <= n_max <= limit:
        raise ConfigurationError(f"n_max must be in 1..{limit} for {method.value}, got {n_max}")
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    if decay_rate is not None and z <= -decay_rate:
        raise DomainError(f"Laplace integrals diverge for z={z} with h decaying at rate {decay_rate}")

    logger.info("Certifying pairing bounds: n_max=%d t=%g z=%g h=%s (%s)", n_max, t, z, h_name, method.value)
    return CombinatorialReport(
        n_max=n_max,
        t=t,
        z=z,
        h=h_name,
        mode=method.value,
        irreducible_counts={n: count_irreducible(n) for n in range(1, n_max + 1)},
        irreducible_sum=irreducible_sum_bound(n_max, h, t, method, seed),
        laplace=[laplace_bound(n, h, z, method, seed) for n in range(1, n_max + 1)],
    )
