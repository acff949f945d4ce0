"""
Graph Core - Graphs, Signals and File I/O
=========================================
Data model shared by every other digft module.

- ``Graph``: dense N x N complex-capable adjacency with a weight class
  (nonnegative, indefinite or complex). Row i holds the edges leaving i.
- ``GraphSignal`` / ``SignalSeries``: vertex signals and time series of them.
- Edge-list, dense CSV and signal-series CSV readers and writers.
- Dale's law diagnostic for real-weighted graphs.

All types are immutable after construction.
"""

from typing import Dict, List, Optional, Sequence, Tuple, Union
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from digft.errors import (
    DigftError,
    DimensionError,
    ParseError,
    RaggedRowError,
    SelfLoopError,
    WeightClassError,
)
from digft.utils import format_scalar, parse_complex


PathLike = Union[str, Path]


class WeightClass(str, Enum):
    """Narrowest scalar class containing every edge weight."""
    NONNEGATIVE = "nonnegative"
    INDEFINITE = "indefinite"
    COMPLEX = "complex"

    @property
    def rank(self) -> int:
        return _WEIGHT_RANK[self]

    def contains(self, other: "WeightClass") -> bool:
        """True if every graph of class ``other`` is also of this class."""
        return self.rank >= other.rank

    @classmethod
    def infer(cls, adj: np.ndarray) -> "WeightClass":
        if np.any(adj.imag != 0):
            return cls.COMPLEX
        if np.any(adj.real < 0):
            return cls.INDEFINITE
        return cls.NONNEGATIVE


_WEIGHT_RANK = {
    WeightClass.NONNEGATIVE: 0,
    WeightClass.INDEFINITE: 1,
    WeightClass.COMPLEX: 2,
}


class ValueClass(str, Enum):
    """Whether a signal is real or complex."""
    REAL = "real"
    COMPLEX = "complex"


class MatrixFormat(str, Enum):
    """On-disk graph formats."""
    EDGE_LIST = "edgelist"
    DENSE_CSV = "dense"

    @classmethod
    def from_path(cls, path: PathLike) -> "MatrixFormat":
        return cls.DENSE_CSV if Path(path).suffix.lower() == ".csv" else cls.EDGE_LIST


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


# ============================================
# Data Classes
# ============================================

@dataclass(frozen=True, eq=False)
class Graph:
    """
    Directed graph with complex-capable weights.

    Use ``Graph.from_matrix`` to build one; it validates the matrix
    and infers the weight class.

    Example:
        >>> g = Graph.from_matrix([[0, 1], [0, 0]])
        >>> g.weight_class
        <WeightClass.NONNEGATIVE: 'nonnegative'>
    """
    n: int
    adj: np.ndarray
    weight_class: WeightClass
    name: str = "graph"

    def __post_init__(self) -> None:
        adj = np.asarray(self.adj, dtype=np.complex128)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise DimensionError(f"adjacency must be square, got shape {adj.shape}")
        if adj.shape[0] < 1:
            raise DimensionError("graph needs at least one vertex")
        if adj.shape[0] != self.n:
            raise DimensionError(f"n={self.n} does not match adjacency side {adj.shape[0]}")
        if not np.all(np.isfinite(adj)):
            raise WeightClassError("adjacency has non-finite entries")
        loops = np.flatnonzero(np.diag(adj))
        if loops.size:
            raise SelfLoopError(
                f"self-loop at vertex {int(loops[0])}",
                details={"vertices": loops.tolist()},
            )
        actual = WeightClass.infer(adj)
        declared = WeightClass(self.weight_class)
        if not declared.contains(actual):
            raise WeightClassError(
                f"weights are {actual.value} but graph was declared {declared.value}"
            )
        object.__setattr__(self, "adj", _frozen(adj))
        object.__setattr__(self, "weight_class", declared)

    @classmethod
    def from_matrix(
        cls,
        adj: Union[np.ndarray, Sequence[Sequence[complex]]],
        weight_class: Optional[WeightClass] = None,
        name: str = "graph",
    ) -> "Graph":
        matrix = np.asarray(adj, dtype=np.complex128)
        if matrix.ndim != 2:
            raise DimensionError(f"adjacency must be 2-D, got {matrix.ndim}-D")
        inferred = weight_class if weight_class is not None else WeightClass.infer(matrix)
        return cls(n=matrix.shape[0], adj=matrix, weight_class=inferred, name=name)

    @property
    def real_adj(self) -> np.ndarray:
        """Real part of the adjacency (the whole matrix for real classes)."""
        return self.adj.real

    @property
    def pattern(self) -> np.ndarray:
        """Boolean sparsity pattern."""
        return self.adj != 0

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.adj))

    @property
    def is_real(self) -> bool:
        return self.weight_class != WeightClass.COMPLEX

    def is_symmetric(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.adj, self.adj.T, rtol=0.0, atol=atol))

    def abs(self, name: Optional[str] = None) -> "Graph":
        """Graph of weight moduli (same pattern, nonnegative)."""
        return Graph.from_matrix(np.abs(self.adj), name=name or f"{self.name}|abs|")

    def with_weights(self, adj: np.ndarray, name: Optional[str] = None) -> "Graph":
        """New graph with the given matrix and this graph's name."""
        return Graph.from_matrix(adj, name=name or self.name)


@dataclass(frozen=True, eq=False)
class GraphSignal:
    """Vector of vertex values."""
    values: np.ndarray
    value_class: ValueClass

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 1:
            raise DimensionError(f"signal must be 1-D, got shape {values.shape}")
        declared = ValueClass(self.value_class)
        if declared == ValueClass.REAL and np.any(values.imag != 0):
            raise WeightClassError("signal declared real has imaginary parts")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "value_class", declared)

    @classmethod
    def from_array(
        cls,
        values: Union[np.ndarray, Sequence[complex]],
        value_class: Optional[ValueClass] = None,
    ) -> "GraphSignal":
        array = np.asarray(values, dtype=np.complex128)
        if value_class is None:
            value_class = ValueClass.COMPLEX if np.any(array.imag != 0) else ValueClass.REAL
        return cls(values=array, value_class=value_class)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def is_real(self) -> bool:
        return self.value_class == ValueClass.REAL

    def check_matches(self, g: Graph) -> None:
        if self.n != g.n:
            raise DimensionError(f"signal length {self.n} does not match graph size {g.n}")


@dataclass(frozen=True, eq=False)
class SignalSeries:
    """Time-indexed sequence of graph signals."""
    times: np.ndarray
    frames: Tuple[GraphSignal, ...]

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        frames = tuple(self.frames)
        if times.ndim != 1 or times.shape[0] != len(frames):
            raise DimensionError(f"{times.shape[0]} timestamps for {len(frames)} frames")
        if frames and len({f.n for f in frames}) != 1:
            raise DimensionError("all frames must share one length")
        if np.any(np.diff(times) <= 0):
            raise DigftError("timestamps must be strictly increasing", error_code="non_increasing_times")
        object.__setattr__(self, "times", _frozen(times))
        object.__setattr__(self, "frames", frames)

    @classmethod
    def from_matrix(cls, times: Sequence[float], values: np.ndarray) -> "SignalSeries":
        """Build from a T x N array (one row per time step)."""
        rows = np.atleast_2d(np.asarray(values, dtype=np.complex128))
        return cls(times=np.asarray(times), frames=tuple(GraphSignal.from_array(r) for r in rows))

    @property
    def n(self) -> int:
        return self.frames[0].n if self.frames else 0

    def __len__(self) -> int:
        return len(self.frames)

    def as_matrix(self) -> np.ndarray:
        """T x N array of frame values."""
        if not self.frames:
            return np.zeros((0, 0), dtype=np.complex128)
        return np.vstack([f.values for f in self.frames])


@dataclass(frozen=True)
class DalesLawReport:
    """Result of the Dale's law diagnostic."""
    compliant: bool
    offending_rows: List[int] = field(default_factory=list)


# ============================================
# Dale's law
# ============================================

def check_dales_law(g: Graph) -> DalesLawReport:
    """
    Check that every vertex's outgoing weights (row i) share one sign.

    Diagnostic only: callers warn, they do not block computation.

    Raises:
        WeightClassError: For complex graphs
    """
    if g.weight_class == WeightClass.COMPLEX:
        raise WeightClassError("Dale's law is defined for real weights only")
    a = g.real_adj
    has_pos = np.any(a > 0, axis=1)
    has_neg = np.any(a < 0, axis=1)
    offending = np.flatnonzero(has_pos & has_neg).tolist()
    return DalesLawReport(compliant=not offending, offending_rows=offending)


# ============================================
# Parsing helpers
# ============================================

def _parse_scalar(text: str, line_number: int) -> complex:
    try:
        return parse_complex(text)
    except ValueError:
        raise ParseError(f"cannot parse number {text!r}", line_number=line_number)


def _read_lines(path: PathLike) -> List[str]:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read().splitlines()


def _parse_csv_rows(lines: List[str], start_line: int = 1) -> List[List[complex]]:
    rows: List[List[complex]] = []
    for offset, line in enumerate(lines):
        number = start_line + offset
        if not line.strip():
            continue
        cells = line.split(",")
        rows.append([_parse_scalar(c, number) for c in cells])
        if len(rows[-1]) != len(rows[0]):
            raise RaggedRowError(
                f"expected {len(rows[0])} values, found {len(rows[-1])}",
                line_number=number,
            )
    return rows


# ============================================
# Graph files
# ============================================

def _load_edge_list(path: PathLike, name: str) -> Graph:
    header_n: Optional[int] = None
    edges: Dict[Tuple[int, int], complex] = {}
    for number, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            if key.strip() == "n" and value:
                try:
                    header_n = int(value)
                except ValueError:
                    raise ParseError(f"bad vertex count {value!r}", line_number=number)
                if header_n < 1:
                    raise ParseError("vertex count must be >= 1", line_number=number)
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ParseError(f"expected 'src dst re [im]', got {len(parts)} fields", line_number=number)
        try:
            src, dst = int(parts[0]), int(parts[1])
            re = float(parts[2])
            im = float(parts[3]) if len(parts) == 4 else 0.0
        except ValueError:
            raise ParseError(f"malformed edge {line!r}", line_number=number)
        if src < 0 or dst < 0:
            raise ParseError(f"negative vertex index in {line!r}", line_number=number)
        if src == dst:
            raise SelfLoopError(
                f"line {number}: self-loop at vertex {src}", details={"line_number": number}
            )
        if (src, dst) in edges:
            raise ParseError(f"duplicate edge {src}->{dst}", line_number=number)
        edges[(src, dst)] = complex(re, im)

    if header_n is None and not edges:
        raise ParseError("edge list is empty and has no '#n=' header")
    max_index = max((max(s, d) for s, d in edges), default=-1)
    n = header_n if header_n is not None else max_index + 1
    if max_index >= n:
        raise ParseError(f"vertex index {max_index} out of range for n={n}")
    adj = np.zeros((n, n), dtype=np.complex128)
    for (src, dst), weight in edges.items():
        adj[src, dst] = weight
    return Graph.from_matrix(adj, name=name)


def load_matrix(path: PathLike) -> np.ndarray:
    """
    Read a dense CSV of ``a+bi`` (or plain real) entries.

    Raises:
        ParseError: Empty file or malformed entry
        RaggedRowError: Rows of different length
    """
    rows = _parse_csv_rows(_read_lines(path))
    if not rows:
        raise ParseError(f"{path}: file is empty")
    return np.array(rows, dtype=np.complex128)


def load_graph(
    path: PathLike,
    format: Optional[MatrixFormat] = None,
    name: Optional[str] = None,
) -> Graph:
    """
    Load a graph from an edge list or a dense CSV.

    The weight class is the narrowest one holding every weight; unlisted
    edges are 0. Format defaults to dense CSV for ``.csv`` files.

    Raises:
        ParseError: Malformed line (with line number)
        DimensionError: Non-square dense matrix
        SelfLoopError: Nonzero diagonal entry
    """
    fmt = MatrixFormat(format) if format is not None else MatrixFormat.from_path(path)
    label = name or Path(path).stem
    if fmt == MatrixFormat.EDGE_LIST:
        return _load_edge_list(path, label)
    matrix = load_matrix(path)
    if matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"{path}: dense matrix is {matrix.shape[0]}x{matrix.shape[1]}")
    return Graph.from_matrix(matrix, name=label)


def save_matrix(m: np.ndarray, path: PathLike) -> None:
    """Write a matrix as dense CSV; plain reals when there are no imaginary parts."""
    matrix = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    real_only = not np.any(matrix.imag != 0)
    with open(path, "w", encoding="utf-8") as handle:
        for row in matrix:
            handle.write(",".join(format_scalar(v, real_only) for v in row) + "\n")


def save_graph(g: Graph, path: PathLike, format: Optional[MatrixFormat] = None) -> None:
    """Write a graph as an edge list (nonzero entries only) or dense CSV."""
    fmt = MatrixFormat(format) if format is not None else MatrixFormat.from_path(path)
    if fmt == MatrixFormat.DENSE_CSV:
        save_matrix(g.adj, path)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"#n={g.n}\n")
        for src, dst in zip(*np.nonzero(g.adj)):
            w = g.adj[src, dst]
            handle.write(f"{src}\t{dst}\t{float(w.real)!r}\t{float(w.imag)!r}\n")


# ============================================
# Signal files
# ============================================

def load_signal(path: PathLike) -> GraphSignal:
    """Read one signal from a single-row or single-column dense CSV."""
    matrix = load_matrix(path)
    if 1 not in matrix.shape:
        raise DimensionError(f"{path}: expected one row or one column, got {matrix.shape}")
    return GraphSignal.from_array(matrix.ravel())


def save_signal(x: GraphSignal, path: PathLike) -> None:
    save_matrix(x.values[None, :], path)


def load_signal_series(path: PathLike) -> SignalSeries:
    """
    Read a series CSV with header ``t,v0,...,v{N-1}``.

    Raises:
        ParseError: Missing header, bad value or non-increasing times
        RaggedRowError: Row length differs from the header
    """
    lines = _read_lines(path)
    start = next((i for i, line in enumerate(lines) if line.strip()), None)
    if start is None:
        raise ParseError(f"{path}: file is empty")
    header = [h.strip() for h in lines[start].split(",")]
    if len(header) < 2 or header[0] != "t":
        raise ParseError("header must be 't,v0,...'", line_number=start + 1)
    width = len(header)
    times: List[float] = []
    rows: List[List[complex]] = []
    for offset, line in enumerate(lines[start + 1:]):
        number = start + 2 + offset
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != width:
            raise RaggedRowError(f"expected {width} values, found {len(cells)}", line_number=number)
        try:
            times.append(float(cells[0]))
        except ValueError:
            raise ParseError(f"bad timestamp {cells[0]!r}", line_number=number)
        rows.append([_parse_scalar(c, number) for c in cells[1:]])
    if not rows:
        raise ParseError(f"{path}: series has no rows")
    if np.any(np.diff(times) <= 0):
        raise ParseError(f"{path}: timestamps must be strictly increasing")
    return SignalSeries.from_matrix(times, np.array(rows, dtype=np.complex128))


def save_signal_series(series: SignalSeries, path: PathLike) -> None:
    matrix = series.as_matrix()
    real_only = not np.any(matrix.imag != 0)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(",".join(["t"] + [f"v{k}" for k in range(series.n)]) + "\n")
        for t, row in zip(series.times, matrix):
            handle.write(",".join([repr(float(t))] + [format_scalar(v, real_only) for v in row]) + "\n")


__all__ = [
    "WeightClass",
    "ValueClass",
    "MatrixFormat",
    "Graph",
    "GraphSignal",
    "SignalSeries",
    "DalesLawReport",
    "check_dales_law",
    "load_graph",
    "save_graph",
    "load_matrix",
    "save_matrix",
    "load_signal",
    "save_signal",
    "load_signal_series",
    "save_signal_series",
]
