"""
Variation Measures
==================
Total variation (TV), directed variation (DV), indefinite directed
variation (IDV) and complex directed variation (CDV), plus the analytic
gradients used by the basis optimizers.

CDV is defined through the real embedding

    A_tilde = [[Re(A), -Im(A)], [Im(A), Re(A)]],   x_tilde = [Re(x); Im(x)]

as CDV(x) = IDV(A_tilde, x_tilde). The expanded eight-term sum is kept as
``complex_dv_expanded`` and checked against the embedding in the tests.

Every measure has a column-wise kernel (``variation_columns``) that
evaluates all columns of an N x m matrix at once; the single-vector
functions are thin wrappers around it.
"""

from typing import Sequence, Union
from dataclasses import dataclass
from enum import Enum

import numpy as np

from digft.errors import AsymmetryError, DimensionError, WeightClassError
from digft.graph import Graph, GraphSignal, WeightClass


SignalLike = Union[GraphSignal, np.ndarray, Sequence[complex]]
Scalar = Union[float, np.ndarray]


class VariationKind(str, Enum):
    """Which variation measure defines graph frequency."""
    TV = "tv"
    DV = "dv"
    IDV = "idv"
    CDV = "cdv"

    @property
    def requires_real_signal(self) -> bool:
        return self != VariationKind.CDV


@dataclass(frozen=True, eq=False)
class RealEmbedding:
    """Real 2N x 2N form of a complex adjacency matrix."""
    a_tilde: np.ndarray

    @property
    def n(self) -> int:
        """Vertex count of the original graph."""
        return self.a_tilde.shape[0] // 2


# ============================================
# Clipping
# ============================================

def pos_part(s: Scalar) -> Scalar:
    """[s]_+ = max{0, s}."""
    out = np.maximum(s, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def neg_part(s: Scalar) -> Scalar:
    """[s]_- = -min{0, s}, always nonnegative."""
    out = np.maximum(np.negative(s), 0.0)
    return float(out) if np.ndim(out) == 0 else out


# ============================================
# Validation
# ============================================

def check_kind(kind: VariationKind, g: Graph) -> None:
    """
    Raise if ``g`` is outside the class ``kind`` accepts.

    Raises:
        WeightClassError: Weight class too wide for the measure
        AsymmetryError: TV on a directed graph
    """
    kind = VariationKind(kind)
    if kind == VariationKind.TV:
        if g.weight_class != WeightClass.NONNEGATIVE:
            raise WeightClassError(f"TV needs nonnegative weights, graph is {g.weight_class.value}")
        if not g.is_symmetric():
            raise AsymmetryError("TV needs a symmetric adjacency matrix")
    elif kind == VariationKind.DV:
        if g.weight_class != WeightClass.NONNEGATIVE:
            raise WeightClassError(f"DV needs nonnegative weights, graph is {g.weight_class.value}")
    elif kind == VariationKind.IDV:
        if g.weight_class == WeightClass.COMPLEX:
            raise WeightClassError("IDV needs real weights; use CDV for complex graphs")


def _signal_values(x: SignalLike, n: int) -> np.ndarray:
    values = x.values if isinstance(x, GraphSignal) else np.asarray(x, dtype=np.complex128)
    if values.ndim != 1 or values.shape[0] != n:
        raise DimensionError(f"signal of shape {values.shape} does not match graph size {n}")
    return values


def _real_columns(u: np.ndarray, kind: VariationKind) -> np.ndarray:
    if np.iscomplexobj(u):
        if np.any(u.imag != 0):
            raise WeightClassError(f"{kind.value.upper()} needs a real signal; use CDV")
        return u.real
    return np.asarray(u, dtype=np.float64)


def _as_columns(u: np.ndarray, n: int) -> np.ndarray:
    u = np.asarray(u)
    if u.ndim == 1:
        u = u[:, None]
    if u.ndim != 2 or u.shape[0] != n:
        raise DimensionError(f"expected {n} rows, got shape {u.shape}")
    return u


# ============================================
# Kernels (real adjacency, real N x m columns)
# ============================================

def _clipped_diffs(u: np.ndarray):
    d = u[:, None, :] - u[None, :, :]
    return np.maximum(d, 0.0), np.maximum(-d, 0.0)


def _idv_kernel(a_pos: np.ndarray, a_neg: np.ndarray, u: np.ndarray) -> np.ndarray:
    p, q = _clipped_diffs(u)
    return np.einsum("ij,ijk->k", a_pos, p * p) + np.einsum("ij,ijk->k", a_neg, q * q)


def _idv_gradient_kernel(a_pos: np.ndarray, a_neg: np.ndarray, u: np.ndarray) -> np.ndarray:
    # Outgoing terms use row i of A, incoming terms use column i.
    p, q = _clipped_diffs(u)
    return 2.0 * (
        np.einsum("ij,ijk->ik", a_pos, p)
        - np.einsum("ji,ijk->ik", a_pos, q)
        - np.einsum("ij,ijk->ik", a_neg, q)
        + np.einsum("ji,ijk->ik", a_neg, p)
    )


def _embed_matrix(adj: np.ndarray) -> np.ndarray:
    re, im = adj.real, adj.imag
    return np.block([[re, -im], [im, re]])


def _embed_columns(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    return np.concatenate([u.real, u.imag], axis=0)


# ============================================
# Embedding
# ============================================

def complex_embed(g: Graph) -> RealEmbedding:
    """Real 2N x 2N embedding of the adjacency matrix."""
    return RealEmbedding(a_tilde=_embed_matrix(g.adj))


def embed_signal(x: SignalLike) -> np.ndarray:
    """x_tilde = [Re(x); Im(x)]."""
    values = x.values if isinstance(x, GraphSignal) else np.asarray(x, dtype=np.complex128)
    return _embed_columns(values)


def dc_vector(n: int, kind: VariationKind) -> np.ndarray:
    """
    Unit vector with zero variation for ``kind`` on every graph.

    For CDV the real constant vector is not enough once weights have
    imaginary parts; the constant with phase pi/4 embeds to a constant
    2N-vector, so every clipped difference vanishes.
    """
    ones = np.ones(n) / np.sqrt(n)
    if VariationKind(kind) == VariationKind.CDV:
        return ones * np.exp(1j * np.pi / 4)
    return ones


# ============================================
# Column-wise evaluation
# ============================================

class VariationOperator:
    """
    Variation of one kind on one graph, ready for repeated evaluation.

    Clipped weight matrices (and the real embedding for CDV) are built
    once; ``values`` and ``gradients`` then work on N x m column blocks.

    Example:
        >>> op = VariationOperator(VariationKind.IDV, g)
        >>> freqs = op.values(U)
    """

    def __init__(self, kind: VariationKind, g: Graph):
        self.kind = VariationKind(kind)
        check_kind(self.kind, g)
        self.graph = g
        self.n = g.n
        self.is_complex = self.kind == VariationKind.CDV
        a = _embed_matrix(g.adj) if self.is_complex else g.real_adj
        self._a_pos = pos_part(a)
        self._a_neg = neg_part(a)

    def _working(self, u: np.ndarray) -> np.ndarray:
        cols = _as_columns(u, self.n)
        if self.is_complex:
            return _embed_columns(cols)
        return _real_columns(cols, self.kind)

    def values(self, u: np.ndarray) -> np.ndarray:
        """Variation of every column of ``u`` as a length-m array."""
        return _idv_kernel(self._a_pos, self._a_neg, self._working(u))

    def gradients(self, u: np.ndarray) -> np.ndarray:
        """
        Gradient of each column's variation with respect to that column.

        For CDV the result is complex: real part is the derivative along
        Re(u), imaginary part along Im(u).
        """
        grad = _idv_gradient_kernel(self._a_pos, self._a_neg, self._working(u))
        if self.is_complex:
            return grad[: self.n] + 1j * grad[self.n:]
        return grad


def variation_columns(kind: VariationKind, g: Graph, u: np.ndarray) -> np.ndarray:
    """Variation of every column of ``u`` (N x m), as a length-m array."""
    kind = VariationKind(kind)
    if kind == VariationKind.TV:
        check_kind(kind, g)
        cols = _real_columns(_as_columns(u, g.n), kind)
        d = cols[:, None, :] - cols[None, :, :]
        return np.einsum("ij,ijk->k", np.triu(g.real_adj, 1), d * d)
    return VariationOperator(kind, g).values(u)


def variation_gradient_columns(kind: VariationKind, g: Graph, u: np.ndarray) -> np.ndarray:
    """Column-wise gradients; DV and TV share the IDV kernel on their graph classes."""
    return VariationOperator(kind, g).gradients(u)


# ============================================
# Single-vector measures
# ============================================

def total_variation(g: Graph, x: SignalLike) -> float:
    """
    TV(x) = sum_{i<j} A_ij (x_i - x_j)^2 = x^T L x.

    Raises:
        WeightClassError: Graph not nonnegative or signal not real
        AsymmetryError: Graph not symmetric
    """
    values = _signal_values(x, g.n)
    return float(variation_columns(VariationKind.TV, g, values)[0])


def directed_variation(g: Graph, x: SignalLike) -> float:
    """DV(x) = sum_ij A_ij [x_i - x_j]_+^2 on a nonnegative graph."""
    values = _signal_values(x, g.n)
    return float(variation_columns(VariationKind.DV, g, values)[0])


def indefinite_dv(g: Graph, x: SignalLike) -> float:
    """
    IDV(x) = sum_ij [A_ij]_+ [x_i - x_j]_+^2 + [A_ij]_- [x_i - x_j]_-^2.

    Equals DV on nonnegative graphs.
    """
    values = _signal_values(x, g.n)
    return float(variation_columns(VariationKind.IDV, g, values)[0])


def complex_dv(g: Graph, x: SignalLike) -> float:
    """CDV(x) = IDV of the real embedding of A and x. Accepts every class."""
    values = _signal_values(x, g.n)
    return float(variation_columns(VariationKind.CDV, g, values)[0])


def complex_dv_expanded(g: Graph, x: SignalLike) -> float:
    """CDV through the expanded eight-term sum over the original N vertices."""
    values = _signal_values(x, g.n)
    a, b = g.adj.real, g.adj.imag
    xr, xi = values.real, values.imag
    d_re = xr[:, None] - xr[None, :]
    d_im = xi[:, None] - xi[None, :]
    cross_ri = xr[:, None] - xi[None, :]
    cross_ir = xi[:, None] - xr[None, :]
    ap, an = pos_part(a), neg_part(a)
    bp, bn = pos_part(b), neg_part(b)
    total = (
        ap * pos_part(d_re) ** 2 + an * neg_part(d_re) ** 2
        + ap * pos_part(d_im) ** 2 + an * neg_part(d_im) ** 2
        + bn * pos_part(cross_ri) ** 2 + bp * neg_part(cross_ri) ** 2
        + bp * pos_part(cross_ir) ** 2 + bn * neg_part(cross_ir) ** 2
    )
    return float(np.sum(total))


def variation(kind: VariationKind, g: Graph, x: SignalLike) -> float:
    """Dispatch to TV, DV, IDV or CDV."""
    kind = VariationKind(kind)
    if kind == VariationKind.TV:
        return total_variation(g, x)
    if kind == VariationKind.DV:
        return directed_variation(g, x)
    if kind == VariationKind.IDV:
        return indefinite_dv(g, x)
    return complex_dv(g, x)


# ============================================
# Gradients
# ============================================

def idv_gradient(g: Graph, u: Union[np.ndarray, Sequence[float]]) -> np.ndarray:
    """
    Gradient of IDV at a single real vector.

    Component i collects the outgoing edges (row i) clipped on u_i - u_j
    and the incoming edges (column i) clipped on u_j - u_i.
    """
    values = _signal_values(np.asarray(u, dtype=np.complex128), g.n)
    return variation_gradient_columns(VariationKind.IDV, g, values)[:, 0]


def cdv_gradient(g: Graph, u: Union[np.ndarray, Sequence[complex]]) -> np.ndarray:
    """Complex gradient of CDV: d/dRe(u) + i d/dIm(u)."""
    values = _signal_values(np.asarray(u, dtype=np.complex128), g.n)
    return variation_gradient_columns(VariationKind.CDV, g, values)[:, 0]


__all__ = [
    "VariationKind",
    "RealEmbedding",
    "pos_part",
    "neg_part",
    "check_kind",
    "complex_embed",
    "embed_signal",
    "dc_vector",
    "VariationOperator",
    "variation_columns",
    "variation_gradient_columns",
    "total_variation",
    "directed_variation",
    "indefinite_dv",
    "complex_dv",
    "complex_dv_expanded",
    "variation",
    "idv_gradient",
    "cdv_gradient",
]
