"""
Command-line interface.

    digft gen --class er --seed 7 --out g.tsv --emit-derived
    digft variation --graph g.tsv --signal x.csv --kind idv
    digft basis --graph g.tsv --kind idv --method feasible --out basis/
    digft transform --basis basis/ --series s.csv --out coeffs.csv
    digft spectra --basis basis/ --series s.csv --groups groups.json --out power.csv
    digft experiment-discordance --instances 10000 --seed 0 --out report/
    digft experiment-compare --M 20 --seed 0 --out report/
    digft validate --graph g.tsv --dales-law
    digft case-study --graph fly.tsv --series fly.csv --out table/

Exit codes: 0 success, 1 validation failed, 2 usage error, 3 input
error, 4 numerical failure.
"""

from typing import Any, Callable, Dict, List, Optional, Sequence
from datetime import datetime, timezone
from pathlib import Path
import argparse
import json
import sys
import time

import numpy as np
from pydantic import BaseModel, Field, ValidationError
from rich.console import Console
from rich.table import Table

from digft import __version__
from digft.basis import (
    BasisMethod,
    DescentConfig,
    GreedyConfig,
    build_basis,
    load_basis,
    save_basis,
)
from digft.errors import (
    AsymmetryError,
    DigftError,
    DimensionError,
    NumericalError,
    ParseError,
    SelfLoopError,
    UnsortedInputError,
    WeightClassError,
)
from digft.experiments import (
    EnsembleConfig,
    case_study_table,
    default_ensemble,
    discordance_experiment,
    generate_instance,
    method_comparison,
    write_report,
)
from digft.gft import (
    coefficient_matrix,
    forward,
    group_powers,
    load_groups,
    power_spectrum,
    save_coefficients,
    save_power_spectrum,
    save_spectrum,
)
from digft.graph import (
    check_dales_law,
    load_graph,
    load_signal,
    load_signal_series,
    save_graph,
)
from digft.spectral import count_components, variation_upper_bound
from digft.utils import DebugLogger, debug_console, file_digest, format_real, format_significant, generate_run_id
from digft.variation import VariationKind, variation


EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERICAL = 4

INPUT_ERRORS = (
    ParseError,
    DimensionError,
    SelfLoopError,
    WeightClassError,
    AsymmetryError,
    UnsortedInputError,
    OSError,
    ValueError,
)
NUMERICAL_ERRORS = (NumericalError, np.linalg.LinAlgError)

MANIFEST_NAME = "manifest.json"

console = Console(highlight=False)


class RunManifest(BaseModel):
    """Everything needed to rerun a command."""
    run_id: str = Field(default_factory=generate_run_id)
    command: str
    argv: List[str]
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    version: str = __version__
    inputs: Dict[str, str] = Field(default_factory=dict, description="path -> sha256")
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    runtime_seconds: float = 0.0


class _Run:
    """Per-invocation context shared by the subcommand handlers."""

    def __init__(self, args: argparse.Namespace, argv: Sequence[str]):
        self.args = args
        self.argv = list(argv)
        self.started = time.perf_counter()
        self.inputs: Dict[str, str] = {}
        self._log = DebugLogger(args.command, args.debug)

    def track(self, path: str) -> Path:
        p = Path(path)
        if p.is_file():
            self.inputs[str(p)] = file_digest(p)
        return p

    def manifest(self, target: Path, config: Dict[str, Any], seed: Optional[int] = None) -> None:
        """Write into ``target`` if it is a directory, else beside it as ``<file>.manifest.json``."""
        record = RunManifest(
            command=self.args.command,
            argv=self.argv,
            config=config,
            seed=seed,
            inputs=self.inputs,
            runtime_seconds=time.perf_counter() - self.started,
        )
        path = target / MANIFEST_NAME if target.is_dir() else target.with_name(target.name + ".manifest.json")
        path.write_text(record.model_dump_json(indent=2), encoding="utf-8")
        self._log(f"manifest {path}")


def _descent_config(args: argparse.Namespace) -> DescentConfig:
    return DescentConfig(
        restarts=args.restarts,
        max_iters=args.max_iters,
        rng_seed=args.seed,
    )


# ============================================
# Handlers
# ============================================

def _cmd_gen(run: _Run) -> int:
    args = run.args
    overrides = {k: v for k, v in (("n", args.n), ("p", args.p), ("degree", args.degree)) if v is not None}
    cfg = EnsembleConfig(graph_class=args.graph_class, **overrides)
    graphs = generate_instance(cfg, args.seed, 0, args.instance)
    out = Path(args.out)
    save_graph(graphs.g, out)
    written = [out]
    if args.emit_derived:
        for suffix, g in (("_i", graphs.g_i), ("_p", graphs.g_p)):
            path = out.with_name(out.stem + suffix + out.suffix)
            save_graph(g, path)
            written.append(path)
    run.manifest(out, {"ensemble": cfg.model_dump(), "instance": args.instance}, seed=args.seed)
    console.print(f"{graphs.g.edge_count} edges, n={graphs.g.n} -> " + ", ".join(str(p) for p in written))
    return EXIT_OK


def _cmd_variation(run: _Run) -> int:
    args = run.args
    g = load_graph(run.track(args.graph))
    x = load_signal(run.track(args.signal))
    value = variation(VariationKind(args.kind), g, x)
    console.print(format_real(value), soft_wrap=True)
    return EXIT_OK


def _cmd_basis(run: _Run) -> int:
    args = run.args
    g = load_graph(run.track(args.graph))
    descent = _descent_config(args)
    gcfg = GreedyConfig(phase_grid_size=args.K)
    basis = build_basis(g, VariationKind(args.kind), BasisMethod(args.method), descent, gcfg, debug=args.debug)
    out = save_basis(basis, args.out)
    run.manifest(out, {"kind": args.kind, "method": args.method, "descent": descent.model_dump(), "greedy": gcfg.model_dump()}, seed=args.seed)

    table = Table(title=f"{basis.method.value} {basis.kind.value} basis ({g.name})")
    table.add_column("k", justify="right")
    table.add_column("frequency", justify="right")
    for k, f in enumerate(basis.frequencies):
        table.add_row(str(k), format_significant(f))
    console.print(table)
    console.print(
        f"dispersion {format_significant(basis.dispersion)} "
        f"(consecutive {format_significant(basis.gap_dispersion)}), "
        f"max frequency {format_significant(basis.max_frequency)}"
    )
    if basis.diagnostics and basis.diagnostics.iterations_exhausted:
        debug_console.print("digft: warning: best restart hit --max-iters before converging", highlight=False)
    elif basis.diagnostics and not basis.diagnostics.best_converged:
        debug_console.print("digft: warning: best restart stopped when the line search found no acceptable step", highlight=False)
    return EXIT_OK


def _cmd_transform(run: _Run) -> int:
    args = run.args
    basis = load_basis(run.track(args.basis))
    out = Path(args.out)
    if args.signal:
        save_spectrum(forward(basis, load_signal(run.track(args.signal))), out)
    else:
        series = load_signal_series(run.track(args.series))
        save_coefficients(coefficient_matrix(basis, series), out)
    run.manifest(out, {"basis": args.basis})
    return EXIT_OK


def _cmd_spectra(run: _Run) -> int:
    args = run.args
    basis = load_basis(run.track(args.basis))
    series = load_signal_series(run.track(args.series))
    spectrum = power_spectrum(basis, series, keep_coefficients=bool(args.coefficients))
    out = Path(args.out)
    save_power_spectrum(spectrum, out)
    if args.coefficients:
        save_coefficients(spectrum.coefficients, Path(args.coefficients))
    groups = load_groups(run.track(args.groups)) if args.groups else {}
    run.manifest(out, {"basis": args.basis, "groups": groups})

    table = Table(title="power by group")
    table.add_column("group")
    table.add_column("power", justify="right")
    table.add_column("share", justify="right")
    total = spectrum.total
    for label, value in group_powers(spectrum, groups).items():
        table.add_row(label, format_significant(value), format_significant(value / total if total else 0.0))
    console.print(table)
    return EXIT_OK


def _cmd_discordance(run: _Run) -> int:
    args = run.args
    configs = default_ensemble(args.weights.split(",") if args.weights else None)
    report = discordance_experiment(configs, args.instances, args.seed, jobs=args.jobs, debug=args.debug)
    out = write_report(report, Path(args.out))
    run.manifest(out, {"instances": args.instances, "configs": [c.model_dump() for c in configs]}, seed=args.seed)

    table = Table(title="ordering discordance")
    table.add_column("class")
    table.add_column("comparisons", justify="right")
    table.add_column("fraction", justify="right")
    for label, tally in report.per_class.items():
        table.add_row(label, str(tally.comparisons), format_significant(tally.fraction))
    table.add_row("all", str(report.comparisons), format_significant(report.fraction_discordant))
    console.print(table)
    return EXIT_OK


def _cmd_compare(run: _Run) -> int:
    args = run.args
    descent = _descent_config(args)
    gcfg = GreedyConfig(phase_grid_size=args.K)
    configs = default_ensemble()
    report = method_comparison(
        configs, m=args.M, seed=args.seed, descent=descent, greedy_config=gcfg,
        jobs=args.jobs, debug=args.debug,
    )
    out = write_report(report, Path(args.out))
    run.manifest(out, {"M": args.M, "descent": descent.model_dump(), "greedy": gcfg.model_dump()}, seed=args.seed)

    table = Table(title="median max frequency")
    table.add_column("class")
    table.add_column("kind")
    table.add_column("greedy", justify="right")
    table.add_column("feasible", justify="right")
    for cfg in configs:
        for kind in ("idv", "cdv"):
            table.add_row(
                cfg.label,
                kind,
                format_significant(report.median_max_frequency(cfg.label, kind, "greedy")),
                format_significant(report.median_max_frequency(cfg.label, kind, "feasible")),
            )
    console.print(table)
    console.print(f"pearson(dispersion, max frequency) = {format_significant(report.correlation())}")
    return EXIT_OK


def _cmd_validate(run: _Run) -> int:
    args = run.args
    g = load_graph(run.track(args.graph))
    table = Table(title=f"graph {g.name}")
    table.add_column("check")
    table.add_column("result")
    table.add_row("vertices", str(g.n))
    table.add_row("edges", str(g.edge_count))
    table.add_row("weight class", g.weight_class.value)
    table.add_row("symmetric", str(g.is_symmetric()))
    table.add_row("components", str(count_components(g)))
    kind = VariationKind.CDV if not g.is_real else VariationKind.IDV
    table.add_row(f"{kind.value} upper bound", format_significant(variation_upper_bound(g, kind)))
    status = EXIT_OK
    if args.dales_law:
        if not g.is_real:
            table.add_row("dale's law", "n/a (complex weights)")
        else:
            report = check_dales_law(g)
            table.add_row("dale's law", "ok" if report.compliant else f"violated at rows {report.offending_rows}")
            if not report.compliant:
                status = EXIT_INVALID
    console.print(table)
    return status


def _cmd_case_study(run: _Run) -> int:
    args = run.args
    g = load_graph(run.track(args.graph))
    descent = _descent_config(args)
    gcfg = GreedyConfig(phase_grid_size=args.K)
    if g.is_real and not check_dales_law(g).compliant:
        debug_console.print("digft: warning: graph violates Dale's law", highlight=False)
    table_report = case_study_table(g, descent, gcfg, debug=args.debug)
    out = write_report(table_report, Path(args.out))
    for label, basis in table_report.bases.items():
        save_basis(basis, out / label)
    if args.series:
        series = load_signal_series(run.track(args.series))
        for label in ("greedy-idv", "feasible-idv"):
            if label in table_report.bases:
                power = power_spectrum(table_report.bases[label], series, keep_coefficients=True)
                save_power_spectrum(power, out / f"power-{label}.csv")
                save_coefficients(power.coefficients, out / f"coefficients-{label}.csv")
    run.manifest(out, {"descent": descent.model_dump(), "greedy": gcfg.model_dump()}, seed=args.seed)

    table = Table(title=f"case study ({g.name})")
    for column in ("basis", "max IDV", "max DV", "dispersion", "dispersion (endpoints)"):
        table.add_column(column, justify="right" if column != "basis" else "left")
    for row in table_report.rows:
        table.add_row(
            row.label,
            format_significant(row.max_idv),
            format_significant(row.max_dv),
            format_significant(row.delta_consecutive),
            format_significant(row.delta_endpoints),
        )
    console.print(table)
    console.print(f"greedy IDV and DV share the max-frequency harmonic: {table_report.greedy_max_harmonics_agree}")
    return EXIT_OK


# ============================================
# Parser
# ============================================

def _add_descent_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=10, help="feasible restarts (default: 10)")
    p.add_argument("--max-iters", type=int, default=5000, help="iterations per restart (default: 5000)")
    p.add_argument("--K", type=int, default=16, help="phase grid size for CDV (default: 16)")
    p.add_argument("--seed", type=int, default=0, help="seed for random restarts (default: 0)")


def _add_jobs_flag(p: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps a value given before the subcommand
    p.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes (same as the global --jobs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="digft",
        description="Graph Fourier transforms for directed graphs with signed or complex weights.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("\n\n")[1] if __doc__ else None,
    )
    parser.add_argument("--version", action="version", version=f"digft {__version__}")
    parser.add_argument("--debug", action="store_true", help="progress logging on stderr")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes for experiments (default: $DIGFT_JOBS or all cores)")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("gen", help="generate a random directed graph")
    p.add_argument("--class", dest="graph_class", choices=["ring", "er", "sbm"], required=True, help="graph class")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--instance", type=int, default=0, help="instance index under the seed (default: 0)")
    p.add_argument("--n", type=int, default=None, help="vertex count (ring, er; default: 16)")
    p.add_argument("--p", type=float, default=None, help="edge probability (er; default: 0.2)")
    p.add_argument("--degree", type=int, default=None, help="ring lattice degree (default: 2)")
    p.add_argument("--out", required=True, help="edge-list (or .csv dense) output")
    p.add_argument("--emit-derived", action="store_true", help="also write the indefinite (_i) and positive (_p) graphs")
    p.set_defaults(handler=_cmd_gen)

    p = sub.add_parser("variation", help="variation of one signal")
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument("--signal", required=True, help="signal CSV (one row or column)")
    p.add_argument("--kind", choices=[k.value for k in VariationKind], required=True, help="measure")
    p.set_defaults(handler=_cmd_variation)

    p = sub.add_parser("basis", help="build a GFT basis")
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument("--kind", choices=["idv", "cdv", "dv", "tv"], required=True, help="frequency measure")
    p.add_argument("--method", choices=[m.value for m in BasisMethod], required=True, help="construction method")
    p.add_argument("--out", required=True, help="output directory")
    _add_descent_flags(p)
    p.set_defaults(handler=_cmd_basis)

    p = sub.add_parser("transform", help="GFT of a signal or signal series")
    p.add_argument("--basis", required=True, help="basis directory")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--series", help="series CSV (t,v0,...); writes the time-by-harmonic matrix")
    source.add_argument("--signal", help="single signal CSV; writes k,frequency,value")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(handler=_cmd_transform)

    p = sub.add_parser("spectra", help="power spectrum of a signal series")
    p.add_argument("--basis", required=True, help="basis directory")
    p.add_argument("--series", required=True, help="series CSV (t,v0,...)")
    p.add_argument("--groups", default=None, help='JSON {"label": [harmonic indices]}')
    p.add_argument("--coefficients", default=None, help="also write the time-by-harmonic coefficients here")
    p.add_argument("--out", required=True, help="output CSV (k,frequency,value)")
    p.set_defaults(handler=_cmd_spectra)

    p = sub.add_parser("experiment-discordance", help="DV vs IDV/CDV ordering discordance")
    p.add_argument("--instances", type=int, default=10000, help="instances per class (default: 10000)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    p.add_argument("--weights", default=None, help="comma-separated weight set (default: 1,-1,i,-i)")
    p.add_argument("--out", required=True, help="report directory")
    _add_jobs_flag(p)
    p.set_defaults(handler=_cmd_discordance)

    p = sub.add_parser("experiment-compare", help="greedy vs feasible bases")
    p.add_argument("--M", type=int, default=20, help="graphs per class (default: 20)")
    p.add_argument("--out", required=True, help="report directory")
    _add_descent_flags(p)
    _add_jobs_flag(p)
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("validate", help="structural checks on a graph file")
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument("--dales-law", action="store_true", help="fail if a vertex has mixed-sign outgoing weights")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("case-study", help="IDV vs DV bases on one signed graph")
    p.add_argument("--graph", required=True, help="real-weighted graph file")
    p.add_argument("--series", default=None, help="series CSV for power spectra of the IDV bases")
    p.add_argument("--out", required=True, help="output directory")
    _add_descent_flags(p)
    p.set_defaults(handler=_cmd_case_study)

    return parser


def _fail(code: int, message: str) -> int:
    debug_console.print(f"digft: error: {message}", markup=False, highlight=False, soft_wrap=True)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    handler: Callable[[_Run], int] = args.handler
    try:
        return handler(_Run(args, argv))
    except ValidationError as exc:
        first = exc.errors()[0] if exc.errors() else {}
        return _fail(EXIT_USAGE, f"invalid configuration: {first.get('loc', '')} {first.get('msg', exc)}")
    except NUMERICAL_ERRORS as exc:
        return _fail(EXIT_NUMERICAL, str(exc))
    except INPUT_ERRORS as exc:
        return _fail(EXIT_INPUT, str(exc))
    except DigftError as exc:
        code = EXIT_USAGE if exc.error_code == "invalid_jobs" else EXIT_INPUT
        return _fail(code, str(exc))


if __name__ == "__main__":
    sys.exit(main())
