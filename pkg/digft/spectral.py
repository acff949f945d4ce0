"""
Spectral Tools
==============
Underlying undirected graph, Laplacian, symmetric eigendecomposition and
the variation upper bounds.

Two eigen-solvers are available:

- ``"lapack"`` (default): ``scipy.linalg.eigh``.
- ``"jacobi"``: cyclic Jacobi rotations, capped at 100 sweeps.

Both return ascending eigenvalues and eigenvectors under one sign rule:
each eigenvector is flipped so its largest-magnitude component is
positive, ties going to the lowest index. Degenerate eigenspaces are
returned as the solver produced them.
"""

from typing import Optional
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from digft.errors import AsymmetryError, DimensionError, NumericalError, WeightClassError
from digft.graph import Graph, WeightClass
from digft.variation import VariationKind, check_kind, complex_embed


SYMMETRY_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100


class EigenSolver(str, Enum):
    """Symmetric eigen-solver backends."""
    LAPACK = "lapack"
    JACOBI = "jacobi"


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Ascending eigenvalues with matching orthonormal eigenvector columns."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])


# ============================================
# Graph constructions
# ============================================

def underlying_undirected(g: Graph) -> Graph:
    """
    A^{|u|}_ij = max{|A_ij|, |A_ji|}.

    For nonnegative graphs this is the usual max{A_ij, A_ji}; complex
    weights contribute their modulus.
    """
    m = np.abs(g.adj)
    return Graph.from_matrix(np.maximum(m, m.T), name=f"{g.name}^u")


def _check_symmetric(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    if not np.allclose(m, m.T, rtol=0.0, atol=SYMMETRY_TOL * scale):
        raise AsymmetryError("matrix is not symmetric")


def laplacian(g: Graph) -> np.ndarray:
    """
    L = D - A with D_ii = sum_j A_ji.

    Raises:
        WeightClassError: Graph has negative or complex weights
        AsymmetryError: Graph is directed
    """
    if g.weight_class != WeightClass.NONNEGATIVE:
        raise WeightClassError(f"Laplacian needs nonnegative weights, graph is {g.weight_class.value}")
    a = g.real_adj
    _check_symmetric(a)
    return np.diag(a.sum(axis=0)) - a


# ============================================
# Eigendecomposition
# ============================================

def _orient(vectors: np.ndarray) -> np.ndarray:
    out = np.array(vectors, copy=True)
    for k in range(out.shape[1]):
        magnitude = np.abs(out[:, k])
        top = magnitude.max()
        if top == 0:
            continue
        lead = int(np.flatnonzero(magnitude >= top * (1.0 - 1e-9))[0])
        if out[lead, k] < 0:
            out[:, k] = -out[:, k]
    return out


def _jacobi_eigh(m: np.ndarray, max_sweeps: int = JACOBI_MAX_SWEEPS):
    a = np.array(m, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= 1e-12 * scale:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    raise NumericalError(
        f"Jacobi eigen-solver did not converge in {max_sweeps} sweeps",
        error_code="eig_no_convergence",
    )


def symmetric_eig(m: np.ndarray, method: EigenSolver = EigenSolver.LAPACK) -> EigenBasis:
    """
    Eigendecomposition of a real symmetric matrix.

    Returns eigenvalues ascending and sign-normalized orthonormal
    eigenvectors (column k pairs with eigenvalue k).

    Raises:
        AsymmetryError: Input not symmetric to 1e-10 (relative to its scale)
        NumericalError: Solver did not converge
    """
    m = np.asarray(m, dtype=np.float64)
    _check_symmetric(m)
    sym = 0.5 * (m + m.T)
    if EigenSolver(method) == EigenSolver.JACOBI:
        values, vectors = _jacobi_eigh(sym)
    else:
        try:
            values, vectors = scipy.linalg.eigh(sym)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigh failed: {exc}", error_code="eig_no_convergence")
    order = np.argsort(values, kind="stable")
    return EigenBasis(eigenvalues=values[order], eigenvectors=_orient(vectors[:, order]))


def underlying_eigenbasis(g: Graph, method: EigenSolver = EigenSolver.LAPACK) -> EigenBasis:
    """Eigenbasis of L^{|u|}, the greedy candidates' source."""
    return symmetric_eig(laplacian(underlying_undirected(g)), method=method)


# ============================================
# Bounds
# ============================================

def dv_upper_bound(g: Graph, method: EigenSolver = EigenSolver.LAPACK) -> float:
    """
    lambda_max of L^{|u|}.

    Bounds DV on nonnegative graphs and IDV on graphs without
    opposite-signed reciprocal edges. ``variation_upper_bound`` holds for
    every graph and kind.
    """
    return underlying_eigenbasis(g, method=method).lambda_max


def variation_upper_bound(
    g: Graph,
    kind: VariationKind,
    method: EigenSolver = EigenSolver.LAPACK,
) -> float:
    """
    Bound valid for every unit signal: lambda_max of the Laplacian of
    S_ij = |W_ij| + |W_ji|, with W = A, or the real embedding for CDV.
    """
    kind = VariationKind(kind)
    check_kind(kind, g)
    w = np.abs(complex_embed(g).a_tilde) if kind == VariationKind.CDV else np.abs(g.real_adj)
    s = w + w.T
    lap = np.diag(s.sum(axis=0)) - s
    return float(symmetric_eig(lap, method=method).eigenvalues[-1])


def count_components(g: Graph, tol: Optional[float] = None) -> int:
    """Connected components of the underlying undirected graph (zero eigenvalues of L^{|u|})."""
    basis = underlying_eigenbasis(g)
    scale = max(1.0, abs(basis.lambda_max))
    threshold = tol if tol is not None else 1e-9 * scale
    return int(np.sum(np.abs(basis.eigenvalues) <= threshold))


__all__ = [
    "EigenSolver",
    "EigenBasis",
    "underlying_undirected",
    "laplacian",
    "symmetric_eig",
    "underlying_eigenbasis",
    "dv_upper_bound",
    "variation_upper_bound",
    "count_components",
]
