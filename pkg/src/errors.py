"""Exception hierarchy shared by all kdlab modules.

Numerical outcomes that are answers (a failed decay certification, a violated bound)
are returned in result records. Exceptions are reserved for inputs a routine refuses.
"""

from __future__ import annotations


class KineticLabError(Exception):
    """Base class for all kdlab errors."""


class ConfigurationError(KineticLabError):
    """Invalid construction parameters (grid size, family parameters, ...)."""


class ConfigParseError(ConfigurationError):
    """Run-config text could not be parsed or validated."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None) -> None:
        location = ""
        if key is not None:
            location = f" [key '{key}'" + (f", line {line}]" if line is not None else "]")
        super().__init__(message + location)
        self.key = key
        self.line = line


class DomainError(KineticLabError):
    """A mathematical precondition is violated."""


class StripViolationError(DomainError):
    """A complex argument leaves the certified analyticity strip."""


class AmbiguousEigenvalueError(KineticLabError):
    """The leading eigenvalue is not separated from the rest of the spectrum."""

    def __init__(self, message: str, candidates: tuple[complex, complex]) -> None:
        super().__init__(f"{message}: candidates {candidates[0]!r} and {candidates[1]!r}")
        self.candidates = candidates


class SymmetryViolationError(KineticLabError):
    """A quantity that must vanish by inversion symmetry does not."""


class CertificationError(KineticLabError):
    """A routine refuses to run because a required certificate is missing."""


class OutputError(KineticLabError):
    """Writing results failed."""

    def __init__(self, message: str, path: str) -> None:
        super().__init__(f"{message}: {path}")
        self.path = path
