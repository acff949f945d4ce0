"""
Random-Graph Experiments
========================
Seeded graph ensembles and the studies run on them:

- ``discordance_experiment``: how often DV on the all-positive graph and
  IDV / CDV on the signed or complex graph order two random signals
  differently.
- ``method_comparison``: greedy vs feasible bases (max frequency and
  dispersion) under IDV and CDV.
- ``greedy_optimality_study``: greedy sign selection against the
  exhaustive 2^N optimum.
- ``case_study_table``: IDV vs DV bases on one real signed graph.

Seeding: instance ``i`` of ensemble class ``c`` draws from
``SeedSequence(seed, spawn_key=(c, i))``, so every instance is
reproducible on its own and results do not depend on worker count or
completion order.
"""

from typing import Any, Callable, Dict, Iterable, List, Literal, Optional, Sequence, Tuple
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
import csv
import json

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import stats

from digft.basis import (
    BasisMethod,
    DescentConfig,
    GftBasis,
    GreedyConfig,
    exhaustive_sign_basis,
    feasible_basis,
    greedy_basis,
)
from digft.graph import Graph
from digft.utils import DebugLogger, parse_complex, resolve_jobs
from digft.variation import VariationKind, VariationOperator


TIE_TOL = 1e-12
GraphClass = Literal["ring", "er", "sbm"]


# ============================================
# Configuration
# ============================================

class EnsembleConfig(BaseModel):
    """One random-graph class and its edge-weight distribution."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    graph_class: GraphClass = Field(default="er", description="ring | er | sbm")
    n: int = Field(default=16, ge=2, description="Vertices (ring, er).")
    degree: int = Field(default=2, ge=2, description="Ring lattice degree (even).")
    p: float = Field(default=0.2, ge=0.0, le=1.0, description="Edge probability (er).")
    communities: int = Field(default=3, ge=1, description="Blocks (sbm).")
    per_community: int = Field(default=8, ge=1, description="Vertices per block (sbm).")
    p_in: float = Field(default=0.5, ge=0.0, le=1.0, description="Within-block edge probability (sbm).")
    p_out: float = Field(default=0.1, ge=0.0, le=1.0, description="Between-block edge probability (sbm).")
    weight_set: Tuple[str, ...] = Field(
        default=("1", "-1", "i", "-i"),
        description="Edge weights drawn uniformly, written as a+bi literals.",
    )
    bidirectional_ring: bool = Field(default=False, description="Keep both directions of every ring edge.")
    ordered_pairs: bool = Field(
        default=True,
        description="er/sbm: sample each ordered pair independently; else sample unordered pairs and orient at random.",
    )

    @field_validator("weight_set")
    @classmethod
    def _check_weights(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        if not value:
            raise ValueError("weight_set must not be empty")
        for token in value:
            if parse_complex(token) == 0:
                raise ValueError("weight_set must not contain 0")
        return value

    @model_validator(mode="after")
    def _check_ring(self) -> "EnsembleConfig":
        if self.graph_class == "ring":
            if self.degree % 2:
                raise ValueError("ring lattice degree must be even")
            if self.degree >= self.n:
                raise ValueError("ring lattice degree must be below n")
        if self.graph_class == "sbm" and self.vertex_count < 2:
            raise ValueError("sbm needs at least 2 vertices")
        return self

    @property
    def weights(self) -> np.ndarray:
        return np.array([parse_complex(t) for t in self.weight_set], dtype=np.complex128)

    @property
    def vertex_count(self) -> int:
        if self.graph_class == "sbm":
            return self.communities * self.per_community
        return self.n

    @property
    def label(self) -> str:
        return self.graph_class


def default_ensemble(weight_set: Optional[Sequence[str]] = None) -> List[EnsembleConfig]:
    """The three standard classes: ring (n=16, degree 2), ER (n=16, p=0.2), SBM (3 x 8)."""
    extra = {"weight_set": tuple(weight_set)} if weight_set else {}
    return [
        EnsembleConfig(graph_class="ring", n=16, degree=2, **extra),
        EnsembleConfig(graph_class="er", n=16, p=0.2, **extra),
        EnsembleConfig(graph_class="sbm", communities=3, per_community=8, **extra),
    ]


# ============================================
# Generation
# ============================================

@dataclass(frozen=True)
class DerivedGraphs:
    """Complex graph and its indefinite and all-positive versions, one pattern."""
    g: Graph
    g_i: Graph
    g_p: Graph


def instance_rng(seed: int, class_index: int, instance: int) -> np.random.Generator:
    """Generator for one instance, independent of every other instance."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(class_index, instance)))


def _nx_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2 ** 31 - 1))


def _orient(undirected: nx.Graph, n: int, rng: np.random.Generator, both: bool) -> np.ndarray:
    pattern = np.zeros((n, n), dtype=bool)
    for u, v in sorted(undirected.edges()):
        if both:
            pattern[u, v] = pattern[v, u] = True
        elif rng.random() < 0.5:
            pattern[u, v] = True
        else:
            pattern[v, u] = True
    return pattern


def _pattern(cfg: EnsembleConfig, rng: np.random.Generator) -> np.ndarray:
    n = cfg.vertex_count
    if cfg.graph_class == "ring":
        lattice = nx.watts_strogatz_graph(n, cfg.degree, 0.0, seed=_nx_seed(rng))
        return _orient(lattice, n, rng, cfg.bidirectional_ring)
    if cfg.graph_class == "er":
        graph = nx.gnp_random_graph(n, cfg.p, seed=_nx_seed(rng), directed=cfg.ordered_pairs)
    else:
        sizes = [cfg.per_community] * cfg.communities
        probs = [
            [cfg.p_in if a == b else cfg.p_out for b in range(cfg.communities)]
            for a in range(cfg.communities)
        ]
        graph = nx.stochastic_block_model(
            sizes, probs, seed=_nx_seed(rng), directed=cfg.ordered_pairs, selfloops=False
        )
    if not cfg.ordered_pairs:
        return _orient(graph, n, rng, both=False)
    return nx.to_numpy_array(graph, nodelist=range(n), dtype=float) != 0


def generate(cfg: EnsembleConfig, rng: np.random.Generator, name: str = "graph") -> DerivedGraphs:
    """
    Draw one directed graph and derive its indefinite and positive versions.

    g_i maps each weight w to Re(w) + Im(w) (so +i -> +1, -i -> -1) and
    g_p sets every weight to 1.
    """
    pattern = _pattern(cfg, rng)
    np.fill_diagonal(pattern, False)
    weights = cfg.weights
    picks = rng.integers(0, weights.shape[0], size=pattern.shape)
    adj = np.where(pattern, weights[picks], 0.0)
    return DerivedGraphs(
        g=Graph.from_matrix(adj, name=name),
        g_i=Graph.from_matrix(adj.real + adj.imag, name=f"{name}_i"),
        g_p=Graph.from_matrix(pattern.astype(float), name=f"{name}_p"),
    )


def generate_instance(cfg: EnsembleConfig, seed: int, class_index: int, instance: int) -> DerivedGraphs:
    """``generate`` with the per-instance seeding scheme."""
    rng = instance_rng(seed, class_index, instance)
    return generate(cfg, rng, name=f"{cfg.label}-{instance}")


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform on the real unit sphere."""
    x = rng.standard_normal(n)
    return x / np.linalg.norm(x)


def _run_tasks(fn: Callable, tasks: List[Any], jobs: int) -> List[Any]:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (jobs * 8))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


# ============================================
# Discordance
# ============================================

@dataclass(frozen=True)
class DiscordanceRow:
    graph_class: str
    instance: int
    comparison: str
    discordant: bool


@dataclass
class ClassTally:
    discordant: int = 0
    comparisons: int = 0

    @property
    def fraction(self) -> float:
        return self.discordant / self.comparisons if self.comparisons else 0.0


@dataclass
class DiscordanceReport:
    """Discordance counts per class and overall."""
    seed: int
    instances: int
    configs: List[Dict[str, Any]]
    rows: List[DiscordanceRow] = field(default_factory=list)

    @property
    def per_class(self) -> Dict[str, ClassTally]:
        tallies: Dict[str, ClassTally] = {}
        for row in self.rows:
            tally = tallies.setdefault(row.graph_class, ClassTally())
            tally.comparisons += 1
            tally.discordant += int(row.discordant)
        return tallies

    @property
    def comparisons(self) -> int:
        return len(self.rows)

    @property
    def discordant(self) -> int:
        return sum(int(r.discordant) for r in self.rows)

    @property
    def fraction_discordant(self) -> float:
        return self.discordant / self.comparisons if self.comparisons else 0.0

    def summary(self) -> Dict[str, Any]:
        return {
            "experiment": "discordance",
            "seed": self.seed,
            "instances": self.instances,
            "configs": self.configs,
            "comparisons": self.comparisons,
            "discordant": self.discordant,
            "fraction_discordant": self.fraction_discordant,
            "per_class": {
                label: {"discordant": t.discordant, "comparisons": t.comparisons, "fraction": t.fraction}
                for label, t in self.per_class.items()
            },
        }

    csv_header = ("class", "instance", "comparison", "discordant")

    def csv_rows(self) -> Iterable[Tuple[Any, ...]]:
        for r in self.rows:
            yield (r.graph_class, r.instance, r.comparison, int(r.discordant))


def _ordering_disagrees(d_ref: float, d_other: float) -> bool:
    if abs(d_ref) <= TIE_TOL or abs(d_other) <= TIE_TOL:
        return False
    return np.sign(d_ref) != np.sign(d_other)


def _discordance_instance(task: Tuple[EnsembleConfig, int, int, int]) -> List[DiscordanceRow]:
    cfg, seed, class_index, instance = task
    rng = instance_rng(seed, class_index, instance)
    graphs = generate(cfg, rng, name=f"{cfg.label}-{instance}")
    n = cfg.vertex_count
    xy = np.column_stack([random_unit_vector(n, rng), random_unit_vector(n, rng)])
    dv = VariationOperator(VariationKind.DV, graphs.g_p).values(xy)
    idv = VariationOperator(VariationKind.IDV, graphs.g_i).values(xy)
    cdv = VariationOperator(VariationKind.CDV, graphs.g).values(xy)
    d_ref = dv[0] - dv[1]
    return [
        DiscordanceRow(cfg.label, instance, "dv_vs_idv", bool(_ordering_disagrees(d_ref, idv[0] - idv[1]))),
        DiscordanceRow(cfg.label, instance, "dv_vs_cdv", bool(_ordering_disagrees(d_ref, cdv[0] - cdv[1]))),
    ]


def discordance_experiment(
    configs: Optional[Sequence[EnsembleConfig]] = None,
    instances: int = 10000,
    seed: int = 0,
    jobs: Optional[int] = None,
    debug: bool = False,
) -> DiscordanceReport:
    """
    Per instance: draw a graph and two random unit signals, then check
    whether IDV (on g_i) and CDV (on g) order the signals like DV on g_p.
    Ties within 1e-12 count as concordant.
    """
    configs = list(configs) if configs is not None else default_ensemble()
    log = DebugLogger("discordance", debug)
    tasks = [(cfg, seed, c, i) for c, cfg in enumerate(configs) for i in range(instances)]
    workers = resolve_jobs(jobs)
    log(f"{len(tasks)} instances on {workers} workers")
    results = _run_tasks(_discordance_instance, tasks, workers)
    report = DiscordanceReport(
        seed=seed,
        instances=instances,
        configs=[c.model_dump() for c in configs],
        rows=[row for rows in results for row in rows],
    )
    log(f"fraction discordant {report.fraction_discordant:.4f}")
    return report


# ============================================
# Greedy vs feasible
# ============================================

@dataclass(frozen=True)
class ComparisonRecord:
    """
    One basis in the greedy vs feasible comparison.

    ``delta_consecutive`` sums squared gaps between consecutive sorted
    frequencies only (written as the ``delta_paper`` CSV column).
    ``delta_endpoints`` adds the gaps to 0 and to this basis' own f_max, so
    greedy and feasible values of it use different upper endpoints and are
    not directly comparable.

    ``warm_start_objective`` (feasible only) is the feasible objective at
    restart 0: the greedy columns re-anchored on the feasible DC and
    max-frequency columns and scored against the feasible f_max. It is the
    reference ``delta_endpoints`` never exceeds, not the greedy basis'
    dispersion.
    """
    graph_class: str
    instance: int
    kind: str
    method: str
    max_freq: float
    delta_consecutive: float
    delta_endpoints: float
    orthonormality_error: float
    warm_start_objective: Optional[float] = None


@dataclass
class ComparisonReport:
    """Per-graph max frequency and dispersion for each kind and method."""
    seed: int
    m: int
    configs: List[Dict[str, Any]]
    records: List[ComparisonRecord] = field(default_factory=list)

    def select(self, **criteria: Any) -> List[ComparisonRecord]:
        return [r for r in self.records if all(getattr(r, k) == v for k, v in criteria.items())]

    def median_max_frequency(self, graph_class: str, kind: str, method: str) -> float:
        values = [r.max_freq for r in self.select(graph_class=graph_class, kind=kind, method=method)]
        return float(np.median(values)) if values else float("nan")

    def correlation(self, variant: str = "consecutive") -> float:
        """Pearson correlation between dispersion and max frequency over all records."""
        if len(self.records) < 2:
            return float("nan")
        disp = np.array([r.delta_consecutive if variant == "consecutive" else r.delta_endpoints for r in self.records])
        freq = np.array([r.max_freq for r in self.records])
        if np.ptp(disp) == 0 or np.ptp(freq) == 0:
            return float("nan")
        return float(stats.pearsonr(disp, freq)[0])

    def summary(self) -> Dict[str, Any]:
        groups: Dict[str, Dict[str, float]] = {}
        for r in self.records:
            key = f"{r.graph_class}/{r.kind}/{r.method}"
            groups.setdefault(key, {"median_max_freq": self.median_max_frequency(r.graph_class, r.kind, r.method)})
        return {
            "experiment": "method_comparison",
            "seed": self.seed,
            "M": self.m,
            "configs": self.configs,
            "records": len(self.records),
            "pearson_consecutive": self.correlation("consecutive"),
            "pearson_endpoints": self.correlation("endpoints"),
            "groups": groups,
        }

    csv_header = ("class", "instance", "kind", "method", "max_freq", "delta_paper", "delta_endpoints")

    def csv_rows(self) -> Iterable[Tuple[Any, ...]]:
        for r in self.records:
            yield (r.graph_class, r.instance, r.kind, r.method, repr(r.max_freq), repr(r.delta_consecutive), repr(r.delta_endpoints))


def _record(label: str, instance: int, basis: GftBasis) -> ComparisonRecord:
    return ComparisonRecord(
        graph_class=label,
        instance=instance,
        kind=basis.kind.value,
        method=basis.method.value,
        max_freq=basis.max_frequency,
        delta_consecutive=basis.gap_dispersion,
        delta_endpoints=basis.dispersion,
        orthonormality_error=basis.orthonormality_error(),
        warm_start_objective=basis.diagnostics.warm_start_objective if basis.diagnostics else None,
    )


def _comparison_instance(task) -> List[ComparisonRecord]:
    cfg, seed, class_index, instance, kinds, methods, descent, greedy_cfg = task
    rng = instance_rng(seed, class_index, instance)
    graphs = generate(cfg, rng, name=f"{cfg.label}-{instance}")
    descent = descent.model_copy(update={"rng_seed": _nx_seed(rng)})
    records = []
    for kind in kinds:
        g = graphs.g if kind == VariationKind.CDV else graphs.g_i
        greedy = greedy_basis(g, kind, greedy_cfg)
        for method in methods:
            if method == BasisMethod.GREEDY:
                basis = greedy
            else:
                basis = feasible_basis(g, kind, descent, greedy_cfg, greedy=greedy)
            records.append(_record(cfg.label, instance, basis))
    return records


def method_comparison(
    configs: Optional[Sequence[EnsembleConfig]] = None,
    m: int = 20,
    kinds: Sequence[VariationKind] = (VariationKind.IDV, VariationKind.CDV),
    methods: Sequence[BasisMethod] = (BasisMethod.GREEDY, BasisMethod.FEASIBLE),
    seed: int = 0,
    descent: Optional[DescentConfig] = None,
    greedy_config: Optional[GreedyConfig] = None,
    jobs: Optional[int] = None,
    debug: bool = False,
) -> ComparisonReport:
    """Greedy and feasible bases on M graphs per class; IDV uses g_i, CDV uses g."""
    configs = list(configs) if configs is not None else default_ensemble()
    descent = descent or DescentConfig()
    greedy_config = greedy_config or GreedyConfig()
    kinds = tuple(VariationKind(k) for k in kinds)
    methods = tuple(BasisMethod(mm) for mm in methods)
    log = DebugLogger("compare", debug)
    tasks = [
        (cfg, seed, c, i, kinds, methods, descent, greedy_config)
        for c, cfg in enumerate(configs)
        for i in range(m)
    ]
    workers = resolve_jobs(jobs)
    log(f"{len(tasks)} graphs on {workers} workers")
    results = _run_tasks(_comparison_instance, tasks, workers)
    return ComparisonReport(
        seed=seed,
        m=m,
        configs=[c.model_dump() for c in configs],
        records=[r for rs in results for r in rs],
    )


# ============================================
# Greedy optimality gap
# ============================================

@dataclass
class GreedyGapReport:
    """Greedy / exhaustive dispersion ratio per instance."""
    seed: int
    n: int
    ratios: List[float] = field(default_factory=list)

    def fraction_within(self, factor: float = 2.0) -> float:
        if not self.ratios:
            return 0.0
        return sum(r <= factor for r in self.ratios) / len(self.ratios)

    def summary(self) -> Dict[str, Any]:
        ratios = np.array(self.ratios) if self.ratios else np.zeros(0)
        return {
            "experiment": "greedy_optimality",
            "seed": self.seed,
            "n": self.n,
            "instances": len(self.ratios),
            "fraction_within_2x": self.fraction_within(2.0),
            "ratio_min": float(ratios.min()) if ratios.size else None,
            "ratio_median": float(np.median(ratios)) if ratios.size else None,
            "ratio_max": float(ratios.max()) if ratios.size else None,
        }

    csv_header = ("instance", "ratio")

    def csv_rows(self) -> Iterable[Tuple[Any, ...]]:
        for i, r in enumerate(self.ratios):
            yield (i, repr(r))


def _gap_instance(task) -> float:
    cfg, seed, instance = task
    graphs = generate(cfg, instance_rng(seed, 0, instance), name=f"gap-{instance}")
    greedy = greedy_basis(graphs.g_i, VariationKind.IDV)
    best = exhaustive_sign_basis(graphs.g_i, VariationKind.IDV)
    if best.dispersion == 0:
        return 1.0 if greedy.dispersion == 0 else float("inf")
    return greedy.dispersion / best.dispersion


def greedy_optimality_study(
    instances: int = 50,
    n: int = 6,
    seed: int = 0,
    p: float = 0.5,
    jobs: Optional[int] = None,
) -> GreedyGapReport:
    """Random directed +-1 graphs; ratio of greedy to exhaustive dispersion."""
    cfg = EnsembleConfig(graph_class="er", n=n, p=p, weight_set=("1", "-1"))
    tasks = [(cfg, seed, i) for i in range(instances)]
    ratios = _run_tasks(_gap_instance, tasks, resolve_jobs(jobs))
    return GreedyGapReport(seed=seed, n=n, ratios=list(ratios))


# ============================================
# Case study
# ============================================

@dataclass(frozen=True)
class CaseStudyRow:
    label: str
    max_idv: float
    max_dv: float
    delta_consecutive: float
    delta_endpoints: float


@dataclass
class CaseStudyTable:
    """IDV bases on g against DV bases on |g|."""
    graph_ref: str
    rows: List[CaseStudyRow]
    greedy_max_harmonics_agree: bool
    bases: Dict[str, GftBasis] = field(default_factory=dict, repr=False)

    def summary(self) -> Dict[str, Any]:
        return {
            "experiment": "case_study",
            "graph": self.graph_ref,
            "greedy_max_harmonics_agree": self.greedy_max_harmonics_agree,
            "rows": [asdict(r) for r in self.rows],
        }

    csv_header = ("basis", "max_idv", "max_dv", "delta_consecutive", "delta_endpoints")

    def csv_rows(self) -> Iterable[Tuple[Any, ...]]:
        for r in self.rows:
            yield (r.label, repr(r.max_idv), repr(r.max_dv), repr(r.delta_consecutive), repr(r.delta_endpoints))


def _top_column(basis: GftBasis) -> np.ndarray:
    return basis.columns[:, -1]


def case_study_table(
    g: Graph,
    descent: Optional[DescentConfig] = None,
    greedy_config: Optional[GreedyConfig] = None,
    methods: Sequence[BasisMethod] = (BasisMethod.GREEDY, BasisMethod.FEASIBLE),
    debug: bool = False,
) -> CaseStudyTable:
    """
    Greedy/feasible bases under IDV on ``g`` and DV on ``|g|``, each scored
    by max IDV, max DV and its own dispersion.
    """
    g_abs = g.abs()
    idv_op = VariationOperator(VariationKind.IDV, g)
    dv_op = VariationOperator(VariationKind.DV, g_abs)
    bases: Dict[str, GftBasis] = {}
    for kind, graph in ((VariationKind.IDV, g), (VariationKind.DV, g_abs)):
        greedy = greedy_basis(graph, kind, greedy_config)
        for method in methods:
            method = BasisMethod(method)
            if method == BasisMethod.GREEDY:
                basis = greedy
            else:
                basis = feasible_basis(graph, kind, descent, greedy_config, greedy=greedy, debug=debug)
            bases[f"{method.value}-{kind.value}"] = basis

    rows = [
        CaseStudyRow(
            label=label,
            max_idv=float(idv_op.values(b.columns).max()),
            max_dv=float(dv_op.values(b.columns).max()),
            delta_consecutive=b.gap_dispersion,
            delta_endpoints=b.dispersion,
        )
        for label, b in bases.items()
    ]
    agree = False
    if "greedy-idv" in bases and "greedy-dv" in bases:
        overlap = abs(np.vdot(_top_column(bases["greedy-idv"]), _top_column(bases["greedy-dv"])))
        agree = bool(overlap >= 1.0 - 1e-6)
    return CaseStudyTable(graph_ref=g.name, rows=rows, greedy_max_harmonics_agree=agree, bases=bases)


# ============================================
# Report files
# ============================================

REPORT_SUMMARY = "summary.json"
REPORT_ROWS = "rows.csv"


def write_report(report: Any, out_dir: Path) -> Path:
    """Write ``summary.json`` and long-format ``rows.csv`` for any report type."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / REPORT_SUMMARY, "w", encoding="utf-8") as handle:
        json.dump(report.summary(), handle, indent=2, default=str)
    with open(out / REPORT_ROWS, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(report.csv_header)
        writer.writerows(report.csv_rows())
    return out


__all__ = [
    "EnsembleConfig",
    "default_ensemble",
    "DerivedGraphs",
    "instance_rng",
    "generate",
    "generate_instance",
    "random_unit_vector",
    "DiscordanceRow",
    "DiscordanceReport",
    "discordance_experiment",
    "ComparisonRecord",
    "ComparisonReport",
    "method_comparison",
    "GreedyGapReport",
    "greedy_optimality_study",
    "CaseStudyRow",
    "CaseStudyTable",
    "case_study_table",
    "write_report",
]
