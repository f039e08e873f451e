"""Run configuration: a line-oriented `section.key = value` file validated by pydantic.

Lists are separated by ";", vector components by ",", and a complex number is written
`re:im`. Trigonometric coefficients are `n1,n2:value` entries. Lines starting with "#"
are comments.

    grid.d = 1
    grid.N = 64
    beta = 1.0
    spectral.kappa = 0; 0.1; 0.2:0.05
    kmc.n_traj = 100000
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.errors import ConfigParseError, ConfigurationError
from src.pairings.bounds import HKind
from src.pairings.chi import ChiMethod
from src.schemas.kmc import EnsembleConfig
from src.schemas.reservoir import DensityFamily, FormFactorShape, RadialDispersion
from src.schemas.torus import DispersionKind


def _items(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(";") if item.strip()]
    return value


def _number(text: str) -> complex | float:
    if ":" in text:
        real, imag = text.split(":", 1)
        return complex(float(real), float(imag))
    return float(text)


def _vectors(value: Any) -> Any:
    items = _items(value)
    if isinstance(items, list):
        return [[_number(c.strip()) for c in item.split(",")] if isinstance(item, str) else item for item in items]
    return items


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class GridSection(_Section):
    d: int = Field(default=1, ge=1, le=3, description="Torus dimension")
    N: int = Field(default=64, ge=4, description="Points per axis (even)")

    @field_validator("N")
    @classmethod
    def even(cls, v: int) -> int:
        if v % 2:
            raise ValueError(f"N must be even, got {v}")
        return v


class DispersionSection(_Section):
    kind: DispersionKind = DispersionKind.COSINE
    coefficients: dict[tuple[int, ...], float] = Field(
        default_factory=dict, description="Trigonometric coefficients `n1,n2:value; …`"
    )

    @field_validator("coefficients", mode="before")
    @classmethod
    def parse_coefficients(cls, value: Any) -> Any:
        items = _items(value)
        if not isinstance(items, list):
            return items
        parsed: dict[tuple[int, ...], float] = {}
        for item in items:
            index, _, coefficient = item.partition(":")
            parsed[tuple(int(i) for i in index.split(","))] = float(coefficient)
        return parsed

    @model_validator(mode="after")
    def needs_coefficients(self) -> DispersionSection:
        if self.kind == DispersionKind.TRIGONOMETRIC and not self.coefficients:
            raise ValueError("trigonometric dispersion needs coefficients")
        return self


class ReservoirSection(_Section):
    family: DensityFamily = DensityFamily.OHMIC_GAUSSIAN
    coupling: float = Field(default=1.0, gt=0, description="Prefactor c")
    exponent: float = Field(default=1.0, ge=1, description="Reservoir exponent d_R")
    cutoff: float = Field(default=4.0, gt=0, description="Gaussian cutoff Λ")
    omega: RadialDispersion = RadialDispersion.LINEAR
    form_factor: FormFactorShape = FormFactorShape.GAUSSIAN
    width: float = Field(default=1.0, gt=0)
    reservoir_dim: int = Field(default=3, ge=1, le=3)
    table_xi: list[float] = Field(default_factory=list)
    table_psi: list[float] = Field(default_factory=list)

    @field_validator("table_xi", "table_psi", mode="before")
    @classmethod
    def split_tables(cls, value: Any) -> Any:
        return _items(value)

    @model_validator(mode="after")
    def table_shape(self) -> ReservoirSection:
        if self.family == DensityFamily.TABULATED and (
            len(self.table_xi) < 2 or len(self.table_xi) != len(self.table_psi)
        ):
            raise ValueError("tabulated family needs table_xi and table_psi of equal length >= 2")
        return self


class OperatorSection(_Section):
    random_vectors: int = Field(default=100, ge=1, description="Random θ for the mass-conservation check")
    one_loop: bool = Field(default=True, description="Check (L(0))_0 = M^0")


class SpectralSection(_Section):
    kappa: list[list[complex]] = Field(default_factory=list, description="Tilts; empty means κ = 0")
    step: float = Field(default=1e-3, gt=0, description="Hessian finite-difference step")
    refine: bool = Field(default=True, description="Report the gap at 2N as well")

    @field_validator("kappa", mode="before")
    @classmethod
    def split_kappa(cls, value: Any) -> Any:
        return _vectors(value)


class CltSection(_Section):
    q: list[list[float]] = Field(default_factory=list, description="Wave vectors; empty means e_1")
    t: list[float] = Field(default_factory=lambda: [100.0, 400.0])

    @field_validator("q", mode="before")
    @classmethod
    def split_q(cls, value: Any) -> Any:
        return _vectors(value)

    @field_validator("t", mode="before")
    @classmethod
    def split_t(cls, value: Any) -> Any:
        return _items(value)

    @field_validator("t")
    @classmethod
    def positive(cls, v: list[float]) -> list[float]:
        if any(t <= 0 for t in v):
            raise ValueError("CLT times must be positive")
        return v


class PairingsSection(_Section):
    n_max: int = Field(default=3, ge=1, le=5)
    h: HKind = HKind.EXPONENTIAL
    h_rate: float = Field(default=1.0, gt=0)
    t: float = Field(default=1.0, ge=0)
    z: float = 0.0
    mode: ChiMethod = ChiMethod.QUADRATURE
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def order_fits_mode(self) -> PairingsSection:
        if self.mode == ChiMethod.QUADRATURE and self.n_max > 4:
            raise ValueError("quadrature mode supports n_max <= 4")
        return self


class CorrelateSection(_Section):
    t_max: float = Field(default=4.0, gt=0)
    n_samples: int = Field(default=64, ge=16)
    xi_max: float = Field(default=10.0, gt=0)
    points: int = Field(default=201, ge=2)


class OutputSection(_Section):
    dir: str = "results"
    record_timing: bool = False


class RunConfig(_Section):
    grid: GridSection = Field(default_factory=GridSection)
    beta: float = Field(default=1.0, gt=0, description="Inverse temperature")
    dispersion: DispersionSection = Field(default_factory=DispersionSection)
    reservoir: ReservoirSection = Field(default_factory=ReservoirSection)
    operator: OperatorSection = Field(default_factory=OperatorSection)
    spectral: SpectralSection = Field(default_factory=SpectralSection)
    kmc: EnsembleConfig = Field(default_factory=EnsembleConfig)
    clt: CltSection = Field(default_factory=CltSection)
    pairings: PairingsSection = Field(default_factory=PairingsSection)
    correlate: CorrelateSection = Field(default_factory=CorrelateSection)
    output: OutputSection = Field(default_factory=OutputSection)


# ── Parsing ──────────────────────────────────────────────────────────


def _read_lines(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigParseError("expected `key = value`", key=key or raw.strip(), line=number)
        if key in entries:
            raise ConfigParseError("duplicate key", key=key, line=number)
        entries[key] = (value.strip(), number)
    return entries


def _nest(entries: dict[str, tuple[str, int]]) -> dict[str, Any]:
    tree: dict[str, Any] = {}
    for key, (value, number) in entries.items():
        *sections, leaf = key.split(".")
        node = tree
        for section in sections:
            child = node.setdefault(section, {})
            if not isinstance(child, dict):
                raise ConfigParseError("key is both a value and a section", key=key, line=number)
            node = child
        if isinstance(node.get(leaf), dict):
            raise ConfigParseError("key is both a value and a section", key=key, line=number)
        node[leaf] = value
    return tree


def _line_for(key: str, entries: dict[str, tuple[str, int]]) -> int | None:
    if key in entries:
        return entries[key][1]
    for candidate, (_, number) in entries.items():
        if candidate.startswith(key + "."):
            return number
    return None


def _check_dimensions(config: RunConfig, entries: dict[str, tuple[str, int]]) -> None:
    d = config.grid.d
    vectors = {"spectral.kappa": config.spectral.kappa, "clt.q": config.clt.q}
    for key, values in vectors.items():
        if any(len(v) != d for v in values):
            raise ConfigParseError(f"vectors must have {d} components", key=key, line=_line_for(key, entries))
    if any(len(index) != d for index in config.dispersion.coefficients):
        key = "dispersion.coefficients"
        raise ConfigParseError(f"coefficient indices must have {d} components", key=key, line=_line_for(key, entries))
    init = config.kmc.init
    if isinstance(init, int) and not 0 <= init < config.grid.N**d:
        key = "kmc.init"
        message = f"init index outside the {config.grid.N**d}-point grid"
        raise ConfigParseError(message, key=key, line=_line_for(key, entries))


def parse_config(source: str | Path) -> RunConfig:
    """Parse and validate a run configuration.

    Args:
        source: A file path, or the configuration text itself.

    Raises:
        ConfigParseError: unknown key, type mismatch or range violation, naming key and line.
        ConfigurationError: the file cannot be read.
    """
    if isinstance(source, Path):
        try:
            text = source.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigurationError(f"Cannot read config {source}: {exc}") from exc
    else:
        text = source

    entries = _read_lines(text)
    try:
        config = RunConfig.model_validate(_nest(entries))
    except ValidationError as exc:
        error = exc.errors()[0]
        key = ".".join(str(part) for part in error["loc"] if isinstance(part, str))
        raise ConfigParseError(error["msg"], key=key or None, line=_line_for(key, entries)) from exc
    _check_dimensions(config, entries)
    return config


# ── Canonical text ───────────────────────────────────────────────────


def _format_number(value: complex | float | int) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, complex):
        if value.imag == 0:
            return repr(value.real)
        return f"{value.real!r}:{value.imag!r}"
    return repr(float(value))


def _format(value: Any) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, dict):
        return "; ".join(",".join(str(i) for i in k) + ":" + _format_number(v) for k, v in value.items())
    if isinstance(value, list):
        return "; ".join(
            ",".join(_format_number(c) for c in item) if isinstance(item, list) else _format_number(item)
            for item in value
        )
    if isinstance(value, str):
        return value
    return _format_number(value)


def dump_config(config: RunConfig) -> str:
    """Canonical text with every key; parse_config(dump_config(c)) == c."""
    lines = []
    for name in RunConfig.model_fields:
        value = getattr(config, name)
        if isinstance(value, BaseModel):
            for field in type(value).model_fields:
                lines.append(f"{name}.{field} = {_format(getattr(value, field))}")
        else:
            lines.append(f"{name} = {_format(value)}")
    return "\n".join(lines) + "\n"


def config_reference() -> str:
    """Key reference with defaults, generated from the models."""
    lines = ["configuration keys (default):"]
    defaults = dump_config(RunConfig()).splitlines()
    descriptions: dict[str, str] = {}
    for name, field in RunConfig.model_fields.items():
        annotation = field.annotation
        if isinstance(annotation, type) and issubclass(annotation, BaseModel):
            for key, sub in annotation.model_fields.items():
                descriptions[f"{name}.{key}"] = sub.description or ""
        else:
            descriptions[name] = field.description or ""
    for line in defaults:
        key = line.split(" = ", 1)[0]
        note = descriptions.get(key, "")
        lines.append(f"  {line}" + (f"    # {note}" if note else ""))
    return "\n".join(lines)
