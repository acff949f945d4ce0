"""
Graph Fourier Transform
=======================
Forward and inverse transforms against a ``GftBasis`` and power spectra
of signal series.

Coefficient k always belongs to basis column k, so coefficients follow
the basis' ascending frequency order.
"""

from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union
from dataclasses import dataclass
from pathlib import Path
import json

import numpy as np

from digft.basis import GftBasis
from digft.errors import DimensionError, ParseError
from digft.graph import GraphSignal, PathLike, SignalSeries, save_matrix
from digft.utils import format_real, format_scalar


OTHER_GROUP = "other"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """GFT coefficients of one signal."""
    coefficients: np.ndarray
    basis_ref: str
    frequencies: np.ndarray

    @property
    def n(self) -> int:
        return int(self.coefficients.shape[0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    """
    Per-harmonic power summed over time.

    ``coefficients`` (T x N) is kept when requested so per-harmonic
    time traces can be written out.
    """
    power: np.ndarray
    frequencies: np.ndarray
    basis_ref: str
    coefficients: Optional[np.ndarray] = None
    times: Optional[np.ndarray] = None

    @property
    def total(self) -> float:
        return float(np.sum(self.power))


def _basis_ref(basis: GftBasis) -> str:
    return f"{basis.graph_ref}:{basis.kind.value}:{basis.method.value}"


def _signal_values(basis: GftBasis, x: Union[GraphSignal, np.ndarray]) -> np.ndarray:
    values = x.values if isinstance(x, GraphSignal) else np.asarray(x, dtype=np.complex128)
    if values.ndim != 1 or values.shape[0] != basis.n:
        raise DimensionError(f"signal of shape {values.shape} does not match basis size {basis.n}")
    return values


# ============================================
# Transforms
# ============================================

def forward(basis: GftBasis, x: Union[GraphSignal, np.ndarray]) -> Spectrum:
    """x_hat = U^H x."""
    values = _signal_values(basis, x)
    return Spectrum(
        coefficients=basis.columns.conj().T @ values,
        basis_ref=_basis_ref(basis),
        frequencies=basis.frequencies,
    )


def inverse(basis: GftBasis, s: Spectrum) -> GraphSignal:
    """x = U x_hat."""
    if s.n != basis.n:
        raise DimensionError(f"spectrum of length {s.n} does not match basis size {basis.n}")
    return GraphSignal.from_array(basis.columns @ s.coefficients)


def coefficient_matrix(basis: GftBasis, series: SignalSeries) -> np.ndarray:
    """T x N matrix of coefficients, one row per frame."""
    if len(series) == 0:
        raise DimensionError("signal series is empty")
    if series.n != basis.n:
        raise DimensionError(f"series frames have length {series.n}, basis size is {basis.n}")
    return series.as_matrix() @ basis.columns.conj()


def power_spectrum(
    basis: GftBasis,
    series: SignalSeries,
    keep_coefficients: bool = False,
) -> PowerSpectrum:
    """
    P_k = sum_t |<u_k, x(t)>|^2.

    Raises:
        DimensionError: Empty series or frame length differs from N
    """
    coeffs = coefficient_matrix(basis, series)
    return PowerSpectrum(
        power=np.sum(np.abs(coeffs) ** 2, axis=0),
        frequencies=basis.frequencies,
        basis_ref=_basis_ref(basis),
        coefficients=coeffs if keep_coefficients else None,
        times=series.times if keep_coefficients else None,
    )


# ============================================
# Groups
# ============================================

def group_powers(p: PowerSpectrum, groups: Mapping[str, Iterable[int]]) -> Dict[str, float]:
    """
    Sum power per labelled harmonic group; the rest goes to ``"other"``.

    Raises:
        DimensionError: Index out of range
        ValueError: Index labelled more than once
    """
    n = p.power.shape[0]
    owner: Dict[int, str] = {}
    for label, indices in groups.items():
        for k in indices:
            k = int(k)
            if not 0 <= k < n:
                raise DimensionError(f"harmonic index {k} out of range for N={n}")
            if k in owner:
                raise ValueError(f"harmonic {k} is in both {owner[k]!r} and {label!r}")
            owner[k] = label
    totals: Dict[str, float] = {label: 0.0 for label in groups}
    totals.setdefault(OTHER_GROUP, 0.0)
    for k in range(n):
        totals[owner.get(k, OTHER_GROUP)] += float(p.power[k])
    return totals


def power_fraction(p: PowerSpectrum, indices: Sequence[int]) -> float:
    """Share of total power carried by the given harmonics."""
    total = p.total
    if total == 0:
        return 0.0
    picked = group_powers(p, {"picked": indices})["picked"]
    return picked / total


def load_groups(path: PathLike) -> Dict[str, List[int]]:
    """Read ``{"label": [indices...]}`` JSON."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            raw = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc.msg}", line_number=exc.lineno)
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: expected an object mapping labels to index lists")
    groups: Dict[str, List[int]] = {}
    for label, indices in raw.items():
        if not isinstance(indices, list) or not all(isinstance(k, int) for k in indices):
            raise ParseError(f"{path}: group {label!r} must be a list of integers")
        groups[str(label)] = indices
    return groups


# ============================================
# Files
# ============================================

def save_spectrum(s: Spectrum, path: PathLike) -> None:
    """CSV ``k,frequency,value`` with complex values as ``a+bi``."""
    real_only = not np.any(np.asarray(s.coefficients).imag != 0)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("k,frequency,value\n")
        for k, (f, c) in enumerate(zip(s.frequencies, s.coefficients)):
            handle.write(f"{k},{format_real(f)},{format_scalar(c, real_only)}\n")


def save_power_spectrum(p: PowerSpectrum, path: PathLike) -> None:
    """CSV ``k,frequency,value`` with real power values."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("k,frequency,value\n")
        for k, (f, v) in enumerate(zip(p.frequencies, p.power)):
            handle.write(f"{k},{format_real(f)},{format_real(v)}\n")


def save_coefficients(coefficients: np.ndarray, path: PathLike) -> None:
    """Time-by-harmonic coefficient matrix, one row per frame."""
    save_matrix(coefficients, Path(path))


__all__ = [
    "Spectrum",
    "PowerSpectrum",
    "forward",
    "inverse",
    "coefficient_matrix",
    "power_spectrum",
    "group_powers",
    "power_fraction",
    "load_groups",
    "save_spectrum",
    "save_power_spectrum",
    "save_coefficients",
]
