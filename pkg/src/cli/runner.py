"""Command dispatch: build the model objects a RunConfig describes and run one command."""

from __future__ import annotations

import logging
import math
import platform
from collections.abc import Callable
from importlib.metadata import PackageNotFoundError, version
from typing import Any

import numpy as np
import scipy

from src.boltzmann import (
    build_L_fiber,
    build_M,
    detailed_balance_residual,
    first_order_residual,
    gibbs_state,
    kinetic_drift,
    rate_kernel,
    symmetrize,
)
from src.cli.config import RunConfig, dump_config
from src.errors import CertificationError, ConfigurationError
from src.kmc import ensemble_stats, green_kubo, msd_diffusion, total_variation, vacf_decay_rate
from src.pairings import HKind, named_h, verify_combinatorial_bounds
from src.reservoir import (
    certify_decay,
    check_kms,
    correlation_function,
    half_transforms,
    named_form_factor_density,
    ohmic_gaussian_density,
    spectral_density,
    tabulated_density,
)
from src.schemas.boltzmann import RateKernel
from src.schemas.reservoir import DensityFamily, SpectralDensity
from src.schemas.run import RunReport, Table
from src.schemas.spectral import DiffusionTensor
from src.schemas.torus import DispersionKind, DispersionLaw
from src.spectral import (
    certified_radius,
    clt_check,
    diffusion_green_kubo_exact,
    diffusion_hessian,
    diffusion_resolvent,
    leading_eigen,
    spectral_gap,
)
from src.torus import build_grid, cosine_law, trigonometric_law

logger = logging.getLogger(__name__)

COMMANDS = ("operator", "spectrum", "diffuse", "simulate", "clt", "pairings", "correlate")

# result flags that certify a command's output; a false flag is a certification failure
_CERTIFICATES: dict[str, tuple[str, ...]] = {"correlate": ("certified",), "pairings": ("passed",)}


# ── Model construction ───────────────────────────────────────────────


def build_law(cfg: RunConfig) -> DispersionLaw:
    if cfg.dispersion.kind == DispersionKind.COSINE:
        return cosine_law(cfg.grid.d)
    return trigonometric_law(cfg.grid.d, cfg.dispersion.coefficients)


def build_density(cfg: RunConfig) -> SpectralDensity:
    res = cfg.reservoir
    if res.family == DensityFamily.OHMIC_GAUSSIAN:
        return ohmic_gaussian_density(cfg.beta, res.coupling, res.exponent, res.cutoff)
    if res.family == DensityFamily.TABULATED:
        return tabulated_density(cfg.beta, res.table_xi, res.table_psi)
    return named_form_factor_density(res.omega, res.form_factor, cfg.beta, res.reservoir_dim, res.width)


def build_kernel(cfg: RunConfig, n: int | None = None) -> RateKernel:
    grid = build_grid(cfg.grid.d, n or cfg.grid.N)
    return rate_kernel(grid, build_law(cfg), build_density(cfg))


def _kappas(cfg: RunConfig) -> list[np.ndarray]:
    if not cfg.spectral.kappa:
        return [np.zeros(cfg.grid.d, dtype=complex)]
    return [np.asarray(k, dtype=complex) for k in cfg.spectral.kappa]


def _wave_vectors(cfg: RunConfig) -> list[np.ndarray]:
    if not cfg.clt.q:
        return [np.eye(cfg.grid.d)[0]]
    return [np.asarray(q, dtype=float) for q in cfg.clt.q]


# ── JSON helpers ─────────────────────────────────────────────────────


def _plain(value: Any) -> Any:
    """Convert numpy and complex values to JSON-ready Python objects; non-finite floats become strings."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, complex):
        return {"re": _plain(value.real), "im": _plain(value.imag)}
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def _tensor(tensor: DiffusionTensor) -> dict[str, Any]:
    return {
        "route": tensor.route.value,
        "D": _plain(tensor.D),
        "uncertainty": _plain(tensor.uncertainty),
        "converged": tensor.converged,
    }


def _vector_columns(prefix: str, d: int, complex_valued: bool) -> list[str]:
    if not complex_valued:
        return [f"{prefix}_{i}" for i in range(d)]
    return [f"{prefix}_{i}_{part}" for i in range(d) for part in ("re", "im")]


def _vector_cells(vector: np.ndarray) -> list[float]:
    if np.iscomplexobj(vector):
        return [float(x) for c in vector for x in (c.real, c.imag)]
    return [float(c) for c in vector]


# ── Commands ─────────────────────────────────────────────────────────


def _operator(cfg: RunConfig, threads: int | None) -> tuple[dict[str, Any], dict[str, Table]]:
    """Algebraic invariants of M^0 and the spectra of M^κ."""
    kernel = build_kernel(cfg)
    grid = kernel.grid
    gibbs = gibbs_state(grid, kernel.law, cfg.beta)
    m0 = build_M(kernel)

    zeta = gibbs.values
    stationarity = float(np.linalg.norm(m0.matrix @ zeta) / np.linalg.norm(zeta))
    rng = np.random.default_rng(cfg.kmc.seed)
    thetas = rng.standard_normal((grid.size, cfg.operator.random_vectors))
    mass = np.abs(grid.weight * (m0.matrix @ thetas).sum(axis=0)) / np.linalg.norm(thetas, axis=0)

    sym = symmetrize(m0)
    asymmetry = float(np.linalg.norm(sym.matrix - sym.matrix.T) / np.linalg.norm(sym.matrix))
    sym_spectrum = np.linalg.eigvalsh(0.5 * (sym.matrix + sym.matrix.T))

    result: dict[str, Any] = {
        "states": grid.size,
        "stationarity_residual": stationarity,
        "mass_conservation_residual": float(mass.max()),
        "detailed_balance_residual": detailed_balance_residual(kernel),
        "symmetry_residual": asymmetry,
        "symmetrized_top_eigenvalues": _plain(sym_spectrum[::-1][:3]),
        "first_order_residual": _plain(first_order_residual(kernel, gibbs)),
        "drift": _plain(kinetic_drift(kernel, gibbs)),
    }
    if cfg.operator.one_loop:
        one_loop = build_L_fiber(grid, kernel.law, kernel.spec, 0.0)
        result["one_loop_residual"] = float(np.linalg.norm(one_loop.matrix - m0.matrix))

    d = cfg.grid.d
    rows = []
    for index, kappa in enumerate(_kappas(cfg)):
        eigenvalues = np.linalg.eigvals(build_M(kernel, kappa).matrix)
        for value in eigenvalues[np.lexsort((eigenvalues.imag, -eigenvalues.real))]:
            rows.append([index, *_vector_cells(kappa), float(value.real), float(value.imag)])
    columns = ["kappa_index", *_vector_columns("kappa", d, True), "re", "im"]
    return result, {"spectrum": Table(columns=columns, rows=rows)}


def _spectrum(cfg: RunConfig, threads: int | None) -> tuple[dict[str, Any], dict[str, Table]]:
    """Leading eigenvalue per κ plus the gap and its change under N → 2N."""
    kernel = build_kernel(cfg)
    gap = spectral_gap(kernel)
    radius = certified_radius(kernel, gap)
    result: dict[str, Any] = {"gap": gap, "certified_radius": radius}
    if cfg.spectral.refine:
        refined = spectral_gap(build_kernel(cfg, 2 * cfg.grid.N))
        result["gap_refined"] = refined
        result["gap_relative_change"] = abs(refined - gap) / gap

    d = cfg.grid.d
    rows = []
    entries = []
    for kappa in _kappas(cfg):
        data = leading_eigen(build_M(kernel, kappa))
        within = bool(np.linalg.norm(kappa) <= radius)
        entries.append({"kappa": _plain(kappa), "f": _plain(data.f), "gap": data.gap, "within_radius": within})
        rows.append([*_vector_cells(kappa), data.f.real, data.f.imag, data.gap, data.runner_up.real])
    result["leading"] = entries
    columns = [*_vector_columns("kappa", d, True), "f_re", "f_im", "gap", "runner_up_re"]
    return result, {"leading": Table(columns=columns, rows=rows)}


def _diffuse(cfg: RunConfig, threads: int | None) -> tuple[dict[str, Any], dict[str, Table]]:
    """D by the Hessian and resolvent routes, with the exact Green–Kubo integral as a third check."""
    kernel = build_kernel(cfg)
    hessian = diffusion_hessian(kernel, cfg.spectral.step)
    resolvent = diffusion_resolvent(kernel)
    green_kubo_exact = diffusion_green_kubo_exact(kernel)
    scale = float(np.max(np.abs(resolvent.D)))
    return {
        "hessian": _tensor(hessian),
        "resolvent": _tensor(resolvent),
        "green_kubo_exact": _plain(green_kubo_exact),
        "relative_difference": float(np.max(np.abs(hessian.D - resolvent.D)) / scale),
        "positive_definite": bool(np.all(np.linalg.eigvalsh(0.5 * (resolvent.D + resolvent.D.T)) > 0)),
    }, {}


def _simulate(cfg: RunConfig, threads: int | None) -> tuple[dict[str, Any], dict[str, Table]]:
    """Ensemble statistics, both estimators of D and their z-scores against the spectral value."""
    kernel = build_kernel(cfg)
    stats = ensemble_stats(kernel, cfg.kmc, threads)
    gk = green_kubo(stats)
    msd = msd_diffusion(stats)
    spectral = diffusion_resolvent(kernel)
    gibbs = gibbs_state(kernel.grid, kernel.law, cfg.beta)
    reference = kernel.grid.weight * gibbs.values

    def z_score(estimate: DiffusionTensor) -> list[list[float]]:
        spread = np.where(estimate.uncertainty > 0, estimate.uncertainty, np.inf)
        return _plain((estimate.D - spectral.D) / spread)  # type: ignore[no-any-return]

    result: dict[str, Any] = {
        "n_traj": stats.n_traj,
        "seed": stats.seed,
        "rng": stats.rng,
        "green_kubo": _tensor(gk),
        "msd": _tensor(msd),
        "spectral": _tensor(spectral),
        "green_kubo_z": z_score(gk),
        "msd_z": z_score(msd),
        "total_variation": total_variation(stats.histogram, reference),
    }
    try:
        rate = vacf_decay_rate(stats.vacf_lags, stats.vacf, stats.vacf_stderr)
        gap = spectral_gap(kernel)
        result.update(vacf_decay_rate=rate, spectral_gap=gap, vacf_rate_over_gap=rate / gap)
    except CertificationError as exc:
        logger.warning("VACF decay rate not resolved: %s", exc)
        result["vacf_decay_rate"] = None

    d = cfg.grid.d
    msd_rows = [[t, *m, *s] for t, m, s in zip(stats.times, stats.msd, stats.msd_stderr, strict=True)]
    hist_rows = [
        [i, *kernel.grid.points[i], float(stats.histogram[i]), float(reference[i])] for i in range(kernel.grid.size)
    ]
    relaxation_rows = [
        [t, total_variation(h, reference)] for t, h in zip(stats.histogram_times, stats.histograms, strict=True)
    ]
    pairs = [(i, j) for i in range(d) for j in range(d)]
    vacf_rows = [
        [lag, *(c[i, j] for i, j in pairs), *(s[i, j] for i, j in pairs)]
        for lag, c, s in zip(stats.vacf_lags, stats.vacf, stats.vacf_stderr, strict=True)
    ]
    return result, {
        "msd": Table(
            columns=["t", *_vector_columns("msd", d, False), *_vector_columns("stderr", d, False)], rows=msd_rows
        ),
        "hist": Table(columns=["index", *_vector_columns("k", d, False), "empirical", "gibbs"], rows=hist_rows),
        "relaxation": Table(columns=["t", "total_variation"], rows=relaxation_rows),
        "vacf": Table(
            columns=["lag", *(f"C_{i}{j}" for i, j in pairs), *(f"stderr_{i}{j}" for i, j in pairs)], rows=vacf_rows
        ),
    }


def _clt(cfg: RunConfig, threads: int | None) -> tuple[dict[str, Any], dict[str, Table]]:
    """⟨1, e^{tM^{q/√t}}ζ⟩ against e^{−½(q,Dq)} over the (q, t) grid."""
    kernel = build_kernel(cfg)
    diffusion = diffusion_resolvent(kernel)
    radius = certified_radius(kernel)
    rows = []
    worst = 0.0
    for q in _wave_vectors(cfg):
        for t in cfg.clt.t:
            comparison = clt_check(kernel, q, t, diffusion, radius=radius)
            worst = max(worst, comparison.error)
            lhs = comparison.lhs
            rows.append([*_vector_cells(q), t, lhs.real, lhs.imag, comparison.rhs, comparison.error])
    columns = [*_vector_columns("q", cfg.grid.d, False), "t", "lhs_re", "lhs_im", "rhs", "error"]
    return {"max_error": worst, "D": _plain(diffusion.D), "certified_radius": radius}, {
        "clt": Table(columns=columns, rows=rows)
    }


def _pairings(cfg: RunConfig, threads: int | None) -> tuple[dict[str, Any], dict[str, Table]]:
    """Pairing-combinatorics certification report."""
    section = cfg.pairings
    spec = build_density(cfg) if section.h == HKind.CORRELATION else None
    h, rate = named_h(section.h, section.h_rate, spec)
    report = verify_combinatorial_bounds(
        section.n_max,
        h,
        section.t,
        section.z,
        method=section.mode,
        h_name=section.h.value,
        decay_rate=rate,
        seed=section.seed,
    )
    if not report.passed:
        logger.warning("Pairing bound check failed: %s", report.model_dump_json())
    rows = [
        [term.n, report.irreducible_counts[term.n], term.lhs, term.rhs, laplace.lhs, laplace.rhs]
        for term, laplace in zip(report.irreducible_sum.terms, report.laplace, strict=True)
    ]
    columns = ["n", "irreducible", "sum_lhs", "sum_rhs", "laplace_lhs", "laplace_rhs"]
    return {**_plain(report.model_dump()), "passed": report.passed}, {"terms": Table(columns=columns, rows=rows)}


def _correlate(cfg: RunConfig, threads: int | None) -> tuple[dict[str, Any], dict[str, Table]]:
    """ψ, ψ̂ and ψ± tables with the decay certificate."""
    spec = build_density(cfg)
    section = cfg.correlate
    profile = certify_decay(spec, section.t_max, section.n_samples)
    xi = np.linspace(-section.xi_max, section.xi_max, section.points)
    psi = np.asarray(spectral_density(xi, spec), dtype=float)

    result: dict[str, Any] = {
        "family": spec.family.value,
        "certified": profile.certified,
        "g_hat": profile.g_hat,
        "fit_residual": profile.residual,
        "reason": profile.reason,
        "kms_residual": check_kms(spec, xi[xi > 0]),
    }
    tables = {
        "psi_hat": Table(
            columns=["t", "re", "im"],
            rows=[[t, v.real, v.imag] for t, v in zip(profile.times, profile.values, strict=True)],
        ),
    }
    if profile.certified:
        plus, minus = half_transforms(xi, spec)
        result["half_transform_residual"] = float(np.max(np.abs(plus + minus - psi)))
        rows = [[x, p, a.real, a.imag, b.real, b.imag] for x, p, a, b in zip(xi, psi, plus, minus, strict=True)]
        tables["psi"] = Table(columns=["xi", "psi", "plus_re", "plus_im", "minus_re", "minus_im"], rows=rows)
    else:
        tables["psi"] = Table(columns=["xi", "psi"], rows=[[x, p] for x, p in zip(xi, psi, strict=True)])
    result["psi_hat_at_zero"] = _plain(complex(correlation_function(0.0, spec)))
    return result, tables


_DISPATCH: dict[str, Callable[[RunConfig, int | None], tuple[dict[str, Any], dict[str, Table]]]] = {
    "operator": _operator,
    "spectrum": _spectrum,
    "diffuse": _diffuse,
    "simulate": _simulate,
    "clt": _clt,
    "pairings": _pairings,
    "correlate": _correlate,
}


def versions() -> dict[str, str]:
    try:
        package = version("kdlab")
    except PackageNotFoundError:
        package = "unknown"
    return {"kdlab": package, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()}


def config_echo(cfg: RunConfig) -> dict[str, str]:
    """Canonical key → value text of the configuration."""
    return dict(line.split(" = ", 1) for line in dump_config(cfg).splitlines())  # type: ignore[misc]


def run_command(cmd: str, cfg: RunConfig, threads: int | None = None) -> RunReport:
    """Run one command and collect its payload and tables.

    Module errors propagate unchanged; the CLI maps them to exit codes.

    Raises:
        ConfigurationError: unknown command.
    """
    if cmd not in _DISPATCH:
        raise ConfigurationError(f"Unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    logger.info("Running %s (d=%d, N=%d, beta=%g)", cmd, cfg.grid.d, cfg.grid.N, cfg.beta)
    result, tables = _DISPATCH[cmd](cfg, threads)
    failed = [flag for flag in _CERTIFICATES.get(cmd, ()) if result.get(flag) is False]
    if failed:
        logger.warning("%s finished with failed checks: %s", cmd, ", ".join(failed))
    return RunReport(
        command=cmd,
        config=config_echo(cfg),
        versions=versions(),
        result=_plain(result),
        tables={name: Table(columns=t.columns, rows=_plain(t.rows)) for name, t in tables.items()},
        failed_checks=failed,
    )
