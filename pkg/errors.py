"""
Exception hierarchy for the decomposition engine.

Library code raises these; the command-line manager catches them at the
boundary, logs them and maps them to exit codes.
"""
from typing import Any, Dict, Optional, Sequence


class UfssError(Exception):
    """Base class for every error raised by the engine."""


class DimensionError(UfssError):
    """Arity mismatch between indices, points, polynomials or descriptors."""


class DomainError(UfssError):
    """Operation undefined for its input (zero polynomial, division by zero)."""


class NormalFormError(UfssError):
    """Input is not in the shape an engine requires."""


class DegenerateFiberError(UfssError):
    """The defining polynomial vanishes identically on a fiber."""

    def __init__(self, b: Sequence[Any], a: Sequence[Any]):
        self.b = tuple(b)
        self.a = tuple(a)
        super().__init__(f"Degenerate fiber at b={_fmt(self.b)}, a={_fmt(self.a)}")


class GuardViolation(UfssError):
    """A rational function was evaluated where its denominator vanishes."""

    def __init__(self, point: Sequence[Any], message: str = "denominator vanishes"):
        self.point = tuple(point)
        super().__init__(f"{message} at {_fmt(self.point)}")


class ContractViolation(UfssError):
    """An engine precondition or postcondition failed; carries a witness."""

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        self.witness = witness or {}
        super().__init__(message)


class InstanceParseError(UfssError):
    """Instance or decomposition file could not be parsed."""

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


def _fmt(point: Sequence[Any]) -> str:
    return "(" + ", ".join(str(v) for v in point) + ")"
