"""
Utility functions shared across digft modules.
"""

from typing import Any, Optional
import hashlib
import math
import os
import uuid
from pathlib import Path

from rich.console import Console

from digft.errors import DigftError


# Debug output goes to stderr so stdout stays clean for results.
debug_console = Console(stderr=True)


class DebugLogger:
    """
    Scoped debug printer.

    Components take ``debug: bool`` and log through one of these,
    e.g. ``[digft feasible] restart 2 iter 40 obj=1.25``.
    """

    def __init__(self, scope: str, enabled: bool = False):
        self.prefix = f"[digft {scope}]"
        self.enabled = enabled

    def __call__(self, *args: Any) -> None:
        if self.enabled:
            debug_console.print(self.prefix, *args, markup=False, highlight=False)


def format_complex(value: complex) -> str:
    """
    Format a complex scalar as ``a+bi`` with round-trip precision.

    Example:
        >>> format_complex(0.5 - 0.25j)
        '0.5-0.25i'
    """
    re = float(value.real)
    im = float(value.imag)
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"{re!r}{sign}{abs(im)!r}i"


def format_real(value: float) -> str:
    """Format a real scalar with round-trip precision."""
    return repr(float(value))


def format_scalar(value: complex, real_only: bool) -> str:
    """Format as plain real when ``real_only``, otherwise ``a+bi``."""
    if real_only:
        return format_real(complex(value).real)
    return format_complex(complex(value))


def parse_complex(text: str) -> complex:
    """
    Parse ``a+bi``, ``a-bi``, ``bi`` or a plain real.

    Raises:
        ValueError: If the text is not a complex literal
    """
    token = text.strip()
    if not token:
        raise ValueError("empty value")
    if token.endswith("i"):
        token = token[:-1] + "j"
    if "(" in token or ")" in token:
        raise ValueError(f"invalid complex literal: {text!r}")
    return complex(token)


def format_significant(value: float, digits: int = 6) -> str:
    """
    Format a number to a fixed count of significant digits for stdout tables.

    Example:
        >>> format_significant(578.4812345)
        '578.481'
    """
    return f"{value:.{digits}g}"


def file_digest(path: Path) -> str:
    """SHA-256 hex digest of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def generate_run_id(prefix: str = "run") -> str:
    """
    Generate a unique identifier for a CLI run.

    Example:
        >>> generate_run_id()
        'run_a1b2c3d4e5f6a7b8'
    """
    return f"{prefix}_{uuid.uuid4().hex[:16]}"


def resolve_jobs(jobs: Optional[int] = None) -> int:
    """
    Decide how many worker processes an experiment may use.

    Precedence: explicit argument, then ``DIGFT_JOBS``, then the CPU count.

    Raises:
        DigftError: If ``DIGFT_JOBS`` is set but is not a positive integer
    """
    if jobs is not None:
        if jobs < 1:
            raise DigftError(f"jobs must be >= 1, got {jobs}", error_code="invalid_jobs")
        return jobs
    env = os.getenv("DIGFT_JOBS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise DigftError(
                f"DIGFT_JOBS must be a positive integer, got {env!r}",
                error_code="invalid_jobs",
            )
        if value < 1:
            raise DigftError(
                f"DIGFT_JOBS must be a positive integer, got {env!r}",
                error_code="invalid_jobs",
            )
        return value
    return os.cpu_count() or 1


__all__ = [
    "debug_console",
    "DebugLogger",
    "format_complex",
    "format_real",
    "format_scalar",
    "parse_complex",
    "format_significant",
    "file_digest",
    "generate_run_id",
    "resolve_jobs",
]
