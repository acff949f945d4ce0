"""
GFT Basis Construction
======================
Builds orthonormal graph Fourier bases whose frequencies (variation of
each column) are spread evenly over the achievable range.

Two builders:

1. **Greedy**: eigenvectors of the underlying undirected Laplacian
   L^{|u|}, one sign (real graphs) or phase e^{i theta_k} (CDV) per
   eigenvector, chosen greedily to keep the frequency set evenly spread.

2. **Feasible**: fix a zero-variation DC column and a maximum-frequency
   column, then minimize spectral dispersion over the remaining columns
   by curvilinear search on the unitary group (Cayley transform update,
   Barzilai-Borwein steps, nonmonotone backtracking).

Dispersion here includes the endpoints 0 and f_max:

    delta = sum_k (s_{k+1} - s_k)^2   over (0, s_1, ..., s_N, f_max)

``consecutive_dispersion`` gives the endpoint-free form.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
import json

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, model_validator

from digft.errors import DimensionError, NumericalError, UnsortedInputError
from digft.graph import Graph, PathLike, load_matrix, save_matrix
from digft.spectral import EigenBasis, EigenSolver, underlying_eigenbasis
from digft.utils import DebugLogger, format_real
from digft.variation import VariationKind, VariationOperator, dc_vector


class BasisMethod(str, Enum):
    """How a basis was built."""
    GREEDY = "greedy"
    FEASIBLE = "feasible"
    EXHAUSTIVE = "exhaustive"


# ============================================
# Configuration
# ============================================

class DescentConfig(BaseModel):
    """Hyperparameters of the max-frequency search and the feasible descent."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    restarts: int = Field(default=10, ge=1, description="Independent descent starts (restart 0 is the greedy warm start).")
    max_iters: int = Field(default=5000, ge=1, description="Iteration cap per start.")
    initial_step: float = Field(default=1e-2, gt=0, description="First trial step before Barzilai-Borwein steps take over.")
    nonmonotone_window: int = Field(default=10, ge=1, description="Past objective values the acceptance test compares against.")
    sufficient_decrease: float = Field(default=1e-4, gt=0, lt=1, description="Armijo constant.")
    shrink: float = Field(default=0.5, gt=0, lt=1, description="Backtracking factor.")
    max_backtracks: int = Field(default=30, ge=1, description="Backtracking attempts before a start is declared stalled.")
    tol_rel_obj: float = Field(default=1e-8, gt=0, description="Relative objective change that counts as converged.")
    tol_grad: float = Field(default=1e-10, gt=0, description="Riemannian gradient norm that counts as converged.")
    step_min: float = Field(default=1e-10, gt=0, description="Lower clamp on the step size.")
    step_max: float = Field(default=1e3, gt=0, description="Upper clamp on the step size.")
    warm_starts: int = Field(default=10, ge=1, description="Best candidate vectors refined by the max-frequency ascent.")
    rng_seed: int = Field(default=0, ge=0, description="Seed for random starts.")

    @model_validator(mode="after")
    def _check_steps(self) -> "DescentConfig":
        if self.step_min > self.step_max:
            raise ValueError("step_min must not exceed step_max")
        return self


class GreedyConfig(BaseModel):
    """Candidate set of the greedy builder."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    phase_grid_size: int = Field(
        default=16,
        ge=2,
        description="Phases e^{2 pi i k / K}, k < K, tried per eigenvector for CDV. Real kinds use {+1, -1}.",
    )


# ============================================
# Data Classes
# ============================================

@dataclass(frozen=True)
class FeasibleDiagnostics:
    """Per-restart record of a feasible run."""
    initial_objective: List[float]
    final_objective: List[float]
    iterations: List[int]
    exhausted: List[bool]
    best_restart: int
    converged: List[bool] = field(default_factory=list)

    @property
    def warm_start_objective(self) -> float:
        """Objective at the greedy warm start (restart 0)."""
        return self.initial_objective[0]

    @property
    def iterations_exhausted(self) -> bool:
        """True if the returned restart hit ``max_iters`` before converging."""
        return self.exhausted[self.best_restart]

    @property
    def best_converged(self) -> bool:
        """True if the returned restart met a tolerance (stalled line searches do not count)."""
        if not self.converged:
            return not self.iterations_exhausted
        return self.converged[self.best_restart]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class GftBasis:
    """
    Orthonormal GFT basis with one frequency per column.

    Columns are ordered by ascending frequency (ties by original column
    index). Build with ``GftBasis.from_columns`` to get the ordering and
    frequencies computed for you.
    """
    columns: np.ndarray
    frequencies: np.ndarray
    kind: VariationKind
    method: BasisMethod
    graph_ref: str
    f_max: float
    phase_grid_size: Optional[int] = None
    config: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Optional[FeasibleDiagnostics] = None

    @classmethod
    def from_columns(
        cls,
        columns: np.ndarray,
        op: VariationOperator,
        method: BasisMethod,
        f_max: float,
        **kwargs: Any,
    ) -> "GftBasis":
        freqs = op.values(columns)
        order = np.argsort(freqs, kind="stable")
        cols = np.array(columns[:, order], copy=True)
        sorted_freqs = np.array(freqs[order], copy=True)
        cols.setflags(write=False)
        sorted_freqs.setflags(write=False)
        return cls(
            columns=cols,
            frequencies=sorted_freqs,
            kind=op.kind,
            method=method,
            graph_ref=op.graph.name,
            f_max=float(f_max),
            **kwargs,
        )

    @property
    def n(self) -> int:
        return int(self.columns.shape[0])

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.columns) and np.any(self.columns.imag != 0))

    @property
    def max_frequency(self) -> float:
        return float(self.frequencies[-1])

    @property
    def dispersion(self) -> float:
        """Dispersion with endpoints (0, f_max)."""
        return _endpoint_dispersion(self.frequencies, self.f_max)

    @property
    def gap_dispersion(self) -> float:
        """Endpoint-free dispersion over consecutive frequencies."""
        return consecutive_dispersion(self.frequencies)

    def orthonormality_error(self) -> float:
        """max |U^H U - I|."""
        gram = self.columns.conj().T @ self.columns
        return float(np.max(np.abs(gram - np.eye(self.n))))


# ============================================
# Dispersion
# ============================================

def _endpoint_dispersion(sorted_freqs: np.ndarray, f_max: float) -> float:
    seq = np.concatenate([[0.0], np.asarray(sorted_freqs, dtype=np.float64), [f_max]])
    return float(np.sum(np.diff(seq) ** 2))


def _check_ascending(freqs: np.ndarray) -> None:
    if np.any(np.diff(freqs) < 0):
        raise UnsortedInputError("frequencies must be in ascending order")


def spectral_dispersion(freqs: Sequence[float], f_max: float) -> float:
    """
    Sum of squared gaps over (0, freqs..., f_max).

    Raises:
        UnsortedInputError: Frequencies not ascending, or f_max below the largest
    """
    values = np.asarray(freqs, dtype=np.float64)
    _check_ascending(values)
    if values.size and f_max < values[-1] - 1e-9:
        raise UnsortedInputError(f"f_max={f_max} is below the largest frequency {values[-1]}")
    return _endpoint_dispersion(values, f_max)


def consecutive_dispersion(freqs: Sequence[float]) -> float:
    """Sum of squared gaps between consecutive ascending frequencies."""
    values = np.asarray(freqs, dtype=np.float64)
    _check_ascending(values)
    return float(np.sum(np.diff(values) ** 2))


# ============================================
# Candidates
# ============================================

def _phase_grid(k: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(k) / k
    re, im = np.cos(theta), np.sin(theta)
    re[np.abs(re) < 1e-12] = 0.0
    im[np.abs(im) < 1e-12] = 0.0
    return re + 1j * im


def candidate_scalars(kind: VariationKind, gcfg: GreedyConfig) -> np.ndarray:
    """Signs for real kinds, the phase grid for CDV."""
    if VariationKind(kind) == VariationKind.CDV:
        return _phase_grid(gcfg.phase_grid_size)
    return np.array([1.0, -1.0])


def _candidates(eig: EigenBasis, scalars: np.ndarray) -> np.ndarray:
    # Column i * S + s holds scalars[s] * v_i.
    v = eig.eigenvectors
    block = v[:, :, None] * scalars[None, None, :]
    return block.reshape(v.shape[0], -1)


def _candidate_table(op: VariationOperator, eig: EigenBasis, scalars: np.ndarray):
    cands = _candidates(eig, scalars)
    freqs = op.values(cands).reshape(eig.n, scalars.shape[0])
    return cands, freqs


# ============================================
# Greedy
# ============================================

def _greedy_select(freqs: np.ndarray, f_max: float) -> List[int]:
    chosen: List[int] = []
    selected: List[float] = []
    for i in range(freqs.shape[0]):
        best_s, best_val = 0, np.inf
        for s in range(freqs.shape[1]):
            trial = np.sort(np.array(selected + [freqs[i, s]]))
            val = _endpoint_dispersion(trial, f_max)
            # First candidate wins near-ties so sign and phase paths agree.
            if not np.isfinite(best_val) or val < best_val - 1e-12 * max(1.0, abs(best_val)):
                best_s, best_val = s, val
        chosen.append(best_s)
        selected.append(float(freqs[i, best_s]))
    return chosen


def greedy_basis(
    g: Graph,
    kind: VariationKind,
    gcfg: Optional[GreedyConfig] = None,
    solver: EigenSolver = EigenSolver.LAPACK,
) -> GftBasis:
    """
    Greedy sign/phase selection over eigenvectors of L^{|u|}.

    Eigenvectors are visited in ascending eigenvalue order; each gets the
    sign (or phase) that minimizes the dispersion of the frequencies
    chosen so far, with endpoints 0 and the largest candidate frequency.
    """
    gcfg = gcfg or GreedyConfig()
    op = VariationOperator(kind, g)
    eig = underlying_eigenbasis(g, method=solver)
    scalars = candidate_scalars(op.kind, gcfg)
    _, freqs = _candidate_table(op, eig, scalars)
    f_max = float(freqs.max())
    chosen = _greedy_select(freqs, f_max)
    columns = eig.eigenvectors * scalars[chosen][None, :]
    return GftBasis.from_columns(
        columns,
        op,
        BasisMethod.GREEDY,
        f_max,
        phase_grid_size=gcfg.phase_grid_size if op.is_complex else None,
        config=gcfg.model_dump(),
    )


def exhaustive_sign_basis(
    g: Graph,
    kind: VariationKind,
    solver: EigenSolver = EigenSolver.LAPACK,
    max_n: int = 12,
) -> GftBasis:
    """
    Best of all 2^N sign choices over the L^{|u|} eigenvectors.

    Uses the greedy objective (same endpoints), so it bounds what the
    greedy sign rule can reach.
    """
    if g.n > max_n:
        raise DimensionError(f"exhaustive search is limited to n <= {max_n}, got {g.n}")
    op = VariationOperator(kind, g)
    eig = underlying_eigenbasis(g, method=solver)
    scalars = np.array([1.0, -1.0])
    _, freqs = _candidate_table(op, eig, scalars)
    f_max = float(freqs.max())
    n = g.n
    masks = (np.arange(2 ** n)[:, None] >> np.arange(n)[None, :]) & 1
    table = np.sort(freqs[np.arange(n)[None, :], masks], axis=1)
    seq = np.concatenate([np.zeros((table.shape[0], 1)), table, np.full((table.shape[0], 1), f_max)], axis=1)
    scores = np.sum(np.diff(seq, axis=1) ** 2, axis=1)
    best = int(np.argmin(scores))
    columns = eig.eigenvectors * scalars[masks[best]][None, :]
    return GftBasis.from_columns(columns, op, BasisMethod.EXHAUSTIVE, f_max)


# ============================================
# Maximum-frequency search
# ============================================

def _inner(a: np.ndarray, b: np.ndarray) -> float:
    """Real inner product Re(a^H b), for real or complex arrays."""
    return float(np.real(np.vdot(a, b)))


class MaxFrequencySearch:
    """
    Riemannian gradient ascent of the variation on the unit sphere.

    Starts from every greedy candidate (scored, the best ``warm_starts``
    refined) plus ``restarts`` random unit vectors. When ``exclude`` is
    given the search stays in its orthogonal complement.
    """

    def __init__(
        self,
        g: Graph,
        kind: VariationKind,
        config: Optional[DescentConfig] = None,
        greedy_config: Optional[GreedyConfig] = None,
        solver: EigenSolver = EigenSolver.LAPACK,
        debug: bool = False,
    ):
        self.op = VariationOperator(kind, g)
        self.config = config or DescentConfig()
        self.greedy_config = greedy_config or GreedyConfig()
        self.solver = solver
        self._log = DebugLogger("max-freq", debug)

    def _project(self, x: np.ndarray, exclude: Optional[np.ndarray]) -> np.ndarray:
        if exclude is None:
            return x
        return x - exclude * np.vdot(exclude, x)

    def _ascend(self, x: np.ndarray, exclude: Optional[np.ndarray]) -> Tuple[np.ndarray, float]:
        cfg = self.config
        op = self.op

        def value_and_direction(u: np.ndarray) -> Tuple[float, np.ndarray]:
            val = float(op.values(u)[0])
            grad = self._project(op.gradients(u)[:, 0], exclude)
            return val, grad - u * _inner(u, grad)

        f, rg = value_and_direction(x)
        tau = cfg.initial_step
        for _ in range(cfg.max_iters):
            norm_sq = _inner(rg, rg)
            if np.sqrt(norm_sq) <= cfg.tol_grad:
                break
            accepted = False
            trial = tau
            for _ in range(cfg.max_backtracks):
                y = x + trial * rg
                y = y / np.linalg.norm(y)
                fy, rgy = value_and_direction(y)
                if fy >= f + cfg.sufficient_decrease * trial * norm_sq:
                    accepted = True
                    break
                trial *= cfg.shrink
            if not accepted:
                break
            s, dy = y - x, rgy - rg
            sy = abs(_inner(s, dy))
            tau = float(np.clip(_inner(s, s) / sy, cfg.step_min, cfg.step_max)) if sy > 0 else cfg.step_max
            converged = abs(fy - f) <= cfg.tol_rel_obj * max(1.0, abs(f))
            x, f, rg = y, fy, rgy
            if converged:
                break
        return x, f

    def run(self, exclude: Optional[np.ndarray] = None) -> Tuple[np.ndarray, float]:
        """Best unit vector found and its variation."""
        cfg = self.config
        op = self.op
        n = op.n
        eig = underlying_eigenbasis(op.graph, method=self.solver)
        scalars = candidate_scalars(op.kind, self.greedy_config)
        cands = _candidates(eig, scalars).astype(np.complex128 if op.is_complex else np.float64)

        starts: List[np.ndarray] = []
        for k in range(cands.shape[1]):
            c = self._project(cands[:, k], exclude)
            norm = np.linalg.norm(c)
            if norm > 1e-8:
                starts.append(c / norm)
        scores = op.values(np.column_stack(starts)) if starts else np.zeros(0)

        best_idx = int(np.argmax(scores)) if starts else -1
        best_x = starts[best_idx] if starts else None
        best_f = float(scores[best_idx]) if starts else -np.inf

        refine = [starts[i] for i in np.argsort(-scores, kind="stable")[: cfg.warm_starts]]
        for r in range(cfg.restarts):
            rng = np.random.default_rng([cfg.rng_seed, 1, r])
            z = rng.standard_normal(n)
            if op.is_complex:
                z = z + 1j * rng.standard_normal(n)
            z = self._project(z, exclude)
            refine.append(z / np.linalg.norm(z))

        for idx, x0 in enumerate(refine):
            x, f = self._ascend(x0, exclude)
            self._log(f"start {idx}: {f:.6g}")
            if f > best_f:
                best_x, best_f = x, f

        if best_x is None:
            raise NumericalError("no admissible start for the max-frequency search")
        return best_x, float(best_f)


def max_frequency_vector(
    g: Graph,
    kind: VariationKind,
    cfg: Optional[DescentConfig] = None,
    gcfg: Optional[GreedyConfig] = None,
    exclude: Optional[np.ndarray] = None,
    solver: EigenSolver = EigenSolver.LAPACK,
    debug: bool = False,
) -> Tuple[np.ndarray, float]:
    """
    Unit vector of (locally) maximal variation, and that variation.

    The result is never below any greedy candidate's frequency when
    ``exclude`` is None. With ``exclude`` (a unit vector) the search is
    restricted to its orthogonal complement.
    """
    search = MaxFrequencySearch(g, kind, cfg, gcfg, solver=solver, debug=debug)
    return search.run(exclude=exclude)


# ============================================
# Manifold step and gradient
# ============================================

def stiefel_step(u: np.ndarray, grad: np.ndarray, tau: float) -> np.ndarray:
    """
    Cayley-transform update that keeps U^H U = I.

    W = G U^H - U G^H,  U(tau) = (I + tau/2 W)^{-1} (I - tau/2 W) U

    Raises:
        NumericalError: (I + tau/2 W) stayed singular after shrinking tau
    """
    if tau == 0:
        return np.array(u, copy=True)
    if u.shape != grad.shape:
        raise DimensionError(f"U {u.shape} and G {grad.shape} differ in shape")
    w = grad @ u.conj().T - u @ grad.conj().T
    eye = np.eye(u.shape[0])
    step = tau
    for _ in range(20):
        try:
            return scipy.linalg.solve(eye + 0.5 * step * w, (eye - 0.5 * step * w) @ u)
        except np.linalg.LinAlgError:
            step *= 0.5
    raise NumericalError("Cayley system stayed singular", error_code="cayley_singular")


def dispersion_gradient(
    g: Graph,
    kind: VariationKind,
    u: np.ndarray,
    order: Optional[np.ndarray] = None,
    f_max: Optional[float] = None,
    fixed: Sequence[int] = (0, -1),
    op: Optional[VariationOperator] = None,
) -> np.ndarray:
    """
    Euclidean gradient of the endpoint dispersion of U's column frequencies.

    Column k gets 2 (2 f_k - f_prev - f_next) times the variation gradient
    at u_k, with neighbours taken in ``order`` (ascending, ties by column
    index) and endpoints 0 and ``f_max`` (default: the frequency of the
    last fixed column). Fixed columns get zero gradient.
    """
    op = op or VariationOperator(kind, g)
    freqs = op.values(u)
    n_cols = freqs.shape[0]
    fixed_idx = [f % n_cols for f in fixed]
    if order is None:
        order = np.argsort(freqs, kind="stable")
    if f_max is None:
        f_max = float(freqs[fixed_idx[-1]]) if fixed_idx else float(freqs.max())
    s = freqs[order]
    prev = np.concatenate([[0.0], s[:-1]])
    nxt = np.concatenate([s[1:], [f_max]])
    coef = np.empty(n_cols)
    coef[order] = 2.0 * (2.0 * s - prev - nxt)
    grad = op.gradients(u) * coef[None, :]
    if fixed_idx:
        grad[:, fixed_idx] = 0.0
    return grad


# ============================================
# Feasible method
# ============================================

class FeasibleOptimizer:
    """
    Two-step dispersion minimization with orthonormality kept exactly.

    Column layout during the descent is [u_1, Q Z, u_N]: u_1 the DC
    vector, u_N the maximum-frequency vector (orthogonal to u_1), Q an
    orthonormal basis of their complement and Z a square unitary matrix
    updated by Cayley steps.

    Example:
        >>> opt = FeasibleOptimizer(g, VariationKind.IDV, DescentConfig(restarts=3))
        >>> basis = opt.run()
    """

    def __init__(
        self,
        g: Graph,
        kind: VariationKind,
        config: Optional[DescentConfig] = None,
        greedy_config: Optional[GreedyConfig] = None,
        solver: EigenSolver = EigenSolver.LAPACK,
        debug: bool = False,
    ):
        if g.n < 3:
            raise DimensionError(f"feasible method needs n >= 3, got {g.n}")
        self.graph = g
        self.op = VariationOperator(kind, g)
        self.config = config or DescentConfig()
        self.greedy_config = greedy_config or GreedyConfig()
        self.solver = solver
        self.debug = debug
        self._log = DebugLogger("feasible", debug)
        self._dtype = np.complex128 if self.op.is_complex else np.float64

    # Objective -------------------------------------------------------

    def _assemble(self, z: np.ndarray) -> np.ndarray:
        return np.column_stack([self._u1, self._q @ z, self._un])

    def _objective(self, z: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
        u = self._assemble(z)
        freqs = self.op.values(u)
        order = np.argsort(freqs, kind="stable")
        return _endpoint_dispersion(freqs[order], self._f_n), u, order

    def _gradient_z(self, u: np.ndarray, order: np.ndarray) -> np.ndarray:
        grad = dispersion_gradient(
            self.graph, self.op.kind, u, order=order, f_max=self._f_n, op=self.op
        )
        return self._q.conj().T @ grad[:, 1:-1]

    # Starts ----------------------------------------------------------

    def _warm_start(self, greedy: GftBasis) -> np.ndarray:
        cols = [greedy.columns[:, k].astype(self._dtype) for k in range(greedy.n)]
        for anchor in (self._u1, self._un):
            overlaps = [abs(np.vdot(anchor, c)) for c in cols]
            cols.pop(int(np.argmax(overlaps)))
        z0 = self._q.conj().T @ np.column_stack(cols)
        unitary, _ = scipy.linalg.polar(z0)
        return unitary

    def _random_start(self, restart: int) -> np.ndarray:
        m = self._q.shape[1]
        rng = np.random.default_rng([self.config.rng_seed, 2, restart])
        z = rng.standard_normal((m, m))
        if self.op.is_complex:
            z = z + 1j * rng.standard_normal((m, m))
        q, r = np.linalg.qr(z)
        d = np.diag(r)
        phases = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
        return q * phases[None, :]

    # Descent ---------------------------------------------------------

    def _descend(self, z: np.ndarray) -> Tuple[np.ndarray, float, float, int, bool, bool]:
        cfg = self.config
        f, u, order = self._objective(z)
        f_init = f
        best_z, best_f = z, f
        history = [f]
        grad = self._gradient_z(u, order)
        w = grad @ z.conj().T - z @ grad.conj().T
        direction = w @ z
        tau = cfg.initial_step
        iterations = 0
        converged = False
        for iterations in range(1, cfg.max_iters + 1):
            w_norm_sq = float(np.real(np.vdot(w, w)))
            if np.sqrt(w_norm_sq) <= cfg.tol_grad:
                converged = True
                break
            reference = max(history[-cfg.nonmonotone_window:])
            trial = tau
            accepted = False
            for _ in range(cfg.max_backtracks):
                z_new = stiefel_step(z, grad, trial)
                f_new, u_new, order_new = self._objective(z_new)
                if f_new <= reference - cfg.sufficient_decrease * trial * 0.5 * w_norm_sq:
                    accepted = True
                    break
                trial *= cfg.shrink
            if not accepted:
                break
            grad_new = self._gradient_z(u_new, order_new)
            w_new = grad_new @ z_new.conj().T - z_new @ grad_new.conj().T
            direction_new = w_new @ z_new
            s = z_new - z
            y = direction_new - direction
            sy = abs(_inner(s, y))
            if sy > 0:
                if iterations % 2:
                    tau = _inner(s, s) / sy
                else:
                    tau = sy / max(_inner(y, y), 1e-300)
            tau = float(np.clip(tau, cfg.step_min, cfg.step_max))
            change = abs(f_new - f)
            z, f, grad, w, direction = z_new, f_new, grad_new, w_new, direction_new
            history.append(f)
            if f < best_f:
                best_z, best_f = z, f
            if change <= cfg.tol_rel_obj * max(1.0, abs(f)):
                converged = True
                break
        exhausted = not converged and iterations >= cfg.max_iters
        return best_z, f_init, best_f, iterations, exhausted, converged

    def run(self, greedy: Optional[GftBasis] = None) -> GftBasis:
        """Run every restart and return the lowest-dispersion basis."""
        cfg = self.config
        n = self.graph.n
        kind = self.op.kind
        if greedy is None:
            greedy = greedy_basis(self.graph, kind, self.greedy_config, solver=self.solver)

        self._u1 = dc_vector(n, kind).astype(self._dtype)
        un, _ = max_frequency_vector(
            self.graph, kind, cfg, self.greedy_config,
            exclude=self._u1, solver=self.solver, debug=self.debug,
        )
        un = un - self._u1 * np.vdot(self._u1, un)
        self._un = (un / np.linalg.norm(un)).astype(self._dtype)
        self._f_n = float(self.op.values(self._un)[0])
        self._q = scipy.linalg.null_space(np.vstack([self._u1.conj(), self._un.conj()]))
        self._log(f"f_max={self._f_n:.6g}")

        initial, final, iters, exhausted, converged = [], [], [], [], []
        best_z, best_f, best_restart = None, np.inf, 0
        for restart in range(cfg.restarts):
            z0 = self._warm_start(greedy) if restart == 0 else self._random_start(restart)
            z, f0, f, it, ex, ok = self._descend(z0)
            initial.append(f0)
            final.append(f)
            iters.append(it)
            exhausted.append(ex)
            converged.append(ok)
            self._log(f"restart {restart}: {f0:.6g} -> {f:.6g} in {it} iters" + ("" if ok else " (not converged)"))
            if f < best_f:
                best_z, best_f, best_restart = z, f, restart

        diagnostics = FeasibleDiagnostics(
            initial_objective=initial,
            final_objective=final,
            iterations=iters,
            exhausted=exhausted,
            best_restart=best_restart,
            converged=converged,
        )
        return GftBasis.from_columns(
            self._assemble(best_z),
            self.op,
            BasisMethod.FEASIBLE,
            self._f_n,
            phase_grid_size=self.greedy_config.phase_grid_size if self.op.is_complex else None,
            config=cfg.model_dump(),
            diagnostics=diagnostics,
        )


def feasible_basis(
    g: Graph,
    kind: VariationKind,
    cfg: Optional[DescentConfig] = None,
    gcfg: Optional[GreedyConfig] = None,
    greedy: Optional[GftBasis] = None,
    solver: EigenSolver = EigenSolver.LAPACK,
    debug: bool = False,
) -> GftBasis:
    """Feasible (orthonormality-preserving) dispersion minimization."""
    optimizer = FeasibleOptimizer(g, kind, cfg, gcfg, solver=solver, debug=debug)
    return optimizer.run(greedy=greedy)


def build_basis(
    g: Graph,
    kind: VariationKind,
    method: BasisMethod,
    cfg: Optional[DescentConfig] = None,
    gcfg: Optional[GreedyConfig] = None,
    debug: bool = False,
) -> GftBasis:
    """Dispatch on ``method``."""
    method = BasisMethod(method)
    if method == BasisMethod.GREEDY:
        return greedy_basis(g, kind, gcfg)
    if method == BasisMethod.EXHAUSTIVE:
        return exhaustive_sign_basis(g, kind)
    return feasible_basis(g, kind, cfg, gcfg, debug=debug)


# ============================================
# Basis files
# ============================================

BASIS_META = "basis.json"
BASIS_COLUMNS = "columns.csv"


def save_basis(basis: GftBasis, directory: PathLike) -> Path:
    """Write ``basis.json`` and ``columns.csv`` into ``directory``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "method": basis.method.value,
        "kind": basis.kind.value,
        "graph_ref": basis.graph_ref,
        "K": basis.phase_grid_size,
        "config": basis.config,
        "f_max": basis.f_max,
        "dispersion_endpoints": basis.dispersion,
        "dispersion_consecutive": basis.gap_dispersion,
        "frequencies": ",".join(format_real(f) for f in basis.frequencies),
        "diagnostics": basis.diagnostics.to_dict() if basis.diagnostics else None,
    }
    with open(out / BASIS_META, "w", encoding="utf-8") as handle:
        json.dump(meta, handle, indent=2)
    save_matrix(basis.columns, out / BASIS_COLUMNS)
    return out


def load_basis(directory: PathLike) -> GftBasis:
    """Read a basis written by ``save_basis``."""
    src = Path(directory)
    with open(src / BASIS_META, "r", encoding="utf-8") as handle:
        meta = json.load(handle)
    columns = load_matrix(src / BASIS_COLUMNS)
    if not np.any(columns.imag != 0):
        columns = np.ascontiguousarray(columns.real)
    freqs = np.array([float(f) for f in meta["frequencies"].split(",")])
    if freqs.shape[0] != columns.shape[1]:
        raise DimensionError(f"{freqs.shape[0]} frequencies for {columns.shape[1]} columns")
    diag = meta.get("diagnostics")
    columns.setflags(write=False)
    freqs.setflags(write=False)
    return GftBasis(
        columns=columns,
        frequencies=freqs,
        kind=VariationKind(meta["kind"]),
        method=BasisMethod(meta["method"]),
        graph_ref=meta.get("graph_ref", "graph"),
        f_max=float(meta["f_max"]),
        phase_grid_size=meta.get("K"),
        config=meta.get("config") or {},
        diagnostics=FeasibleDiagnostics(**diag) if diag else None,
    )


__all__ = [
    "BasisMethod",
    "DescentConfig",
    "GreedyConfig",
    "FeasibleDiagnostics",
    "GftBasis",
    "spectral_dispersion",
    "consecutive_dispersion",
    "candidate_scalars",
    "greedy_basis",
    "exhaustive_sign_basis",
    "MaxFrequencySearch",
    "max_frequency_vector",
    "stiefel_step",
    "dispersion_gradient",
    "FeasibleOptimizer",
    "feasible_basis",
    "build_basis",
    "save_basis",
    "load_basis",
]
