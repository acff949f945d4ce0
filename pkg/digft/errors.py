"""
Exceptions raised by digft.

Every error carries a human-readable message plus an optional machine
error code and a details dict, so the CLI and the agent tools can report
failures without parsing strings.
"""

from typing import Any, Dict, Optional


class DigftError(Exception):
    """Base error for all digft failures."""

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.error_code = error_code
        self.details = details or {}


class ParseError(DigftError):
    """Input file could not be parsed."""

    def __init__(
        self,
        message: str,
        line_number: Optional[int] = None,
        error_code: Optional[str] = "parse_error",
        details: Optional[Dict[str, Any]] = None,
    ):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message, error_code=error_code, details=details)
        self.line_number = line_number


class RaggedRowError(ParseError):
    """Rows of a CSV matrix have different lengths."""
    pass


class DimensionError(DigftError):
    """Shapes of matrices, signals or bases do not agree."""
    pass


class SelfLoopError(DigftError):
    """Adjacency matrix has a nonzero diagonal entry."""
    pass


class WeightClassError(DigftError):
    """Graph or signal class is not supported by the requested operation."""
    pass


class AsymmetryError(DigftError):
    """Operation requires a symmetric matrix."""
    pass


class UnsortedInputError(DigftError):
    """Frequencies were expected in ascending order."""
    pass


class NumericalError(DigftError):
    """Solver failed to converge or a linear system stayed singular."""
    pass


__all__ = [
    "DigftError",
    "ParseError",
    "RaggedRowError",
    "DimensionError",
    "SelfLoopError",
    "WeightClassError",
    "AsymmetryError",
    "UnsortedInputError",
    "NumericalError",
]
