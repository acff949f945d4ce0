"""
digft
=====

Graph Fourier transforms for directed graphs whose edge weights may be
negative or complex.

This package provides:
- **Variation measures**: TV, DV, and their signed (IDV) and complex (CDV) extensions
- **Basis construction**: greedy sign/phase selection and feasible descent on the unitary group
- **Transforms**: forward/inverse GFT and power spectra of signal series
- **Experiments**: seeded random-graph studies (ordering discordance, greedy vs feasible)
- **Agent tools**: LangChain wrappers for variation, bases and spectra

Quick Start:
    >>> import numpy as np
    >>> from digft import Graph, VariationKind, greedy_basis, forward
    >>>
    >>> g = Graph.from_matrix([[0, 1, 0], [0, 0, -1], [1, 0, 0]])
    >>> basis = greedy_basis(g, VariationKind.IDV)
    >>> basis.frequencies
    >>> spectrum = forward(basis, np.array([1.0, 0.0, -1.0]))

Feasible Method:
    >>> from digft import DescentConfig, feasible_basis
    >>>
    >>> basis = feasible_basis(g, VariationKind.IDV, DescentConfig(restarts=5))
    >>> basis.diagnostics.best_restart

Command Line:
    $ digft basis --graph g.tsv --kind idv --method feasible --out basis/
    $ digft spectra --basis basis/ --series s.csv --out power.csv

Environment Variables:
    DIGFT_JOBS: Worker processes for experiments (default: all cores)
"""

__version__ = "0.1.0"

# Errors
from digft.errors import (
    DigftError,
    ParseError,
    RaggedRowError,
    DimensionError,
    SelfLoopError,
    WeightClassError,
    AsymmetryError,
    UnsortedInputError,
    NumericalError,
)

# Graphs and signals
from digft.graph import (
    WeightClass,
    ValueClass,
    MatrixFormat,
    Graph,
    GraphSignal,
    SignalSeries,
    DalesLawReport,
    check_dales_law,
    load_graph,
    save_graph,
    load_matrix,
    save_matrix,
    load_signal,
    save_signal,
    load_signal_series,
    save_signal_series,
)

# Variation
from digft.variation import (
    VariationKind,
    VariationOperator,
    complex_embed,
    embed_signal,
    dc_vector,
    total_variation,
    directed_variation,
    indefinite_dv,
    complex_dv,
    complex_dv_expanded,
    variation,
    variation_columns,
    idv_gradient,
    cdv_gradient,
)

# Spectral
from digft.spectral import (
    EigenSolver,
    EigenBasis,
    underlying_undirected,
    laplacian,
    symmetric_eig,
    underlying_eigenbasis,
    dv_upper_bound,
    variation_upper_bound,
    count_components,
)

# Bases
from digft.basis import (
    BasisMethod,
    DescentConfig,
    GreedyConfig,
    FeasibleDiagnostics,
    GftBasis,
    spectral_dispersion,
    consecutive_dispersion,
    greedy_basis,
    exhaustive_sign_basis,
    max_frequency_vector,
    stiefel_step,
    dispersion_gradient,
    FeasibleOptimizer,
    feasible_basis,
    build_basis,
    save_basis,
    load_basis,
)

# Transforms
from digft.gft import (
    Spectrum,
    PowerSpectrum,
    forward,
    inverse,
    power_spectrum,
    group_powers,
    power_fraction,
    load_groups,
)

# Experiments
from digft.experiments import (
    EnsembleConfig,
    DerivedGraphs,
    generate,
    discordance_experiment,
    method_comparison,
    greedy_optimality_study,
    case_study_table,
    write_report,
)

__all__ = [
    # Version
    "__version__",
    # Errors
    "DigftError",
    "ParseError",
    "RaggedRowError",
    "DimensionError",
    "SelfLoopError",
    "WeightClassError",
    "AsymmetryError",
    "UnsortedInputError",
    "NumericalError",
    # Graphs and signals
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
    # Variation
    "VariationKind",
    "VariationOperator",
    "complex_embed",
    "embed_signal",
    "dc_vector",
    "total_variation",
    "directed_variation",
    "indefinite_dv",
    "complex_dv",
    "complex_dv_expanded",
    "variation",
    "variation_columns",
    "idv_gradient",
    "cdv_gradient",
    # Spectral
    "EigenSolver",
    "EigenBasis",
    "underlying_undirected",
    "laplacian",
    "symmetric_eig",
    "underlying_eigenbasis",
    "dv_upper_bound",
    "variation_upper_bound",
    "count_components",
    # Bases
    "BasisMethod",
    "DescentConfig",
    "GreedyConfig",
    "FeasibleDiagnostics",
    "GftBasis",
    "spectral_dispersion",
    "consecutive_dispersion",
    "greedy_basis",
    "exhaustive_sign_basis",
    "max_frequency_vector",
    "stiefel_step",
    "dispersion_gradient",
    "FeasibleOptimizer",
    "feasible_basis",
    "build_basis",
    "save_basis",
    "load_basis",
    # Transforms
    "Spectrum",
    "PowerSpectrum",
    "forward",
    "inverse",
    "power_spectrum",
    "group_powers",
    "power_fraction",
    "load_groups",
    # Experiments
    "EnsembleConfig",
    "DerivedGraphs",
    "generate",
    "discordance_experiment",
    "method_comparison",
    "greedy_optimality_study",
    "case_study_table",
    "write_report",
]
