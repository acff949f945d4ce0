"""
LangChain Tool Implementations for digft
========================================
Expose variation, basis construction and power spectra to LangChain
agents. Tools work on files (graph, signal, series, basis directory)
and return human-readable text.

Tools provided:
- GraphVariationTool: TV / DV / IDV / CDV of one signal
- GftBasisTool: Build and save a greedy or feasible GFT basis
- GraphPowerSpectrumTool: Power spectrum of a signal series, strongest harmonics first
"""

from typing import Any, ClassVar, Dict, List, Optional, Type
import asyncio

import numpy as np
from pydantic import BaseModel, Field
from langchain_core.tools import BaseTool
from langchain_core.callbacks import AsyncCallbackManagerForToolRun, CallbackManagerForToolRun

from digft.basis import BasisMethod, DescentConfig, GreedyConfig, build_basis, load_basis, save_basis
from digft.errors import DigftError
from digft.gft import power_spectrum
from digft.graph import load_graph, load_signal, load_signal_series
from digft.utils import format_significant
from digft.variation import VariationKind, variation


# ============================================
# Input Schemas
# ============================================

class VariationInput(BaseModel):
    """Input schema for computing the variation of a graph signal."""

    graph_path: str = Field(description="Path to the graph file (edge list, or dense CSV ending in .csv).")
    signal_path: str = Field(description="Path to a CSV holding one signal as a single row or column.")
    kind: str = Field(
        default="idv",
        description="Variation measure: 'tv', 'dv', 'idv' (signed weights) or 'cdv' (complex weights).",
    )


class BasisInput(BaseModel):
    """Input schema for building a GFT basis."""

    graph_path: str = Field(description="Path to the graph file.")
    out_dir: str = Field(description="Directory to write basis.json and columns.csv into.")
    kind: str = Field(default="idv", description="Frequency measure: 'idv' or 'cdv'.")
    method: str = Field(default="greedy", description="'greedy' (fast) or 'feasible' (optimized, slower).")
    restarts: int = Field(default=3, ge=1, description="Restarts for the feasible method.")


class PowerSpectrumInput(BaseModel):
    """Input schema for the power spectrum of a signal series."""

    basis_dir: str = Field(description="Directory written by build_gft_basis.")
    series_path: str = Field(description="Series CSV with header t,v0,...,v{N-1}.")
    top_k: int = Field(default=5, ge=1, description="How many of the strongest harmonics to list.")


# ============================================
# Tool Implementations
# ============================================

class GraphVariationTool(BaseTool):
    """
    Variation (graph frequency) of one signal on a directed graph.

    Example:
        >>> tool = GraphVariationTool()
        >>> tool.invoke({"graph_path": "g.tsv", "signal_path": "x.csv", "kind": "dv"})
    """

    name: str = "compute_graph_variation"
    description: str = """Compute how much a signal varies across a directed graph.

Arguments:
- graph_path: graph file
- signal_path: signal CSV
- kind: tv, dv, idv or cdv

Returns the variation value. Larger means higher graph frequency."""

    args_schema: Type[BaseModel] = VariationInput
    debug: bool = False

    model_config: ClassVar[dict] = {"arbitrary_types_allowed": True}

    def _run(
        self,
        graph_path: str,
        signal_path: str,
        kind: str = "idv",
        run_manager: Optional[CallbackManagerForToolRun] = None,
    ) -> str:
        try:
            g = load_graph(graph_path)
            value = variation(VariationKind(kind.lower()), g, load_signal(signal_path))
            return f"{kind.upper()} of {signal_path} on {g.name} (n={g.n}): {value!r}"
        except (DigftError, OSError, ValueError) as e:
            return f"❌ Variation failed: {str(e)}"

    async def _arun(
        self,
        graph_path: str,
        signal_path: str,
        kind: str = "idv",
        run_manager: Optional[AsyncCallbackManagerForToolRun] = None,
    ) -> str:
        return await asyncio.to_thread(self._run, graph_path, signal_path, kind)


class GftBasisTool(BaseTool):
    """
    Build a graph Fourier basis and save it for later transforms.

    The greedy method is fast; the feasible method spreads frequencies
    more evenly at the cost of an optimization run.
    """

    name: str = "build_gft_basis"
    description: str = """Build a graph Fourier transform basis for a directed graph.

Arguments:
- graph_path: graph file
- out_dir: where to save the basis
- kind: idv (real signed weights) or cdv (complex weights)
- method: greedy or feasible
- restarts: feasible restarts (default 3)

Returns the basis frequencies and dispersion. Use graph_power_spectrum with out_dir afterwards."""

    args_schema: Type[BaseModel] = BasisInput
    debug: bool = False

    model_config: ClassVar[dict] = {"arbitrary_types_allowed": True}

    def _run(
        self,
        graph_path: str,
        out_dir: str,
        kind: str = "idv",
        method: str = "greedy",
        restarts: int = 3,
        run_manager: Optional[CallbackManagerForToolRun] = None,
    ) -> str:
        try:
            g = load_graph(graph_path)
            basis = build_basis(
                g,
                VariationKind(kind.lower()),
                BasisMethod(method.lower()),
                DescentConfig(restarts=restarts),
                GreedyConfig(),
                debug=self.debug,
            )
            save_basis(basis, out_dir)
            freqs = ", ".join(format_significant(f, 4) for f in basis.frequencies)
            return f"""✅ {basis.method.value.capitalize()} {basis.kind.value.upper()} basis saved to {out_dir}

Vertices: {basis.n}
Max frequency: {format_significant(basis.max_frequency)}
Dispersion: {format_significant(basis.dispersion)}
Frequencies: {freqs}"""
        except (DigftError, OSError, ValueError) as e:
            return f"❌ Basis construction failed: {str(e)}"

    async def _arun(
        self,
        graph_path: str,
        out_dir: str,
        kind: str = "idv",
        method: str = "greedy",
        restarts: int = 3,
        run_manager: Optional[AsyncCallbackManagerForToolRun] = None,
    ) -> str:
        return await asyncio.to_thread(self._run, graph_path, out_dir, kind, method, restarts)


class GraphPowerSpectrumTool(BaseTool):
    """Power per harmonic of a signal series, strongest first."""

    name: str = "graph_power_spectrum"
    description: str = """Project a time series of graph signals onto a saved GFT basis.

Arguments:
- basis_dir: directory from build_gft_basis
- series_path: series CSV (t,v0,...)
- top_k: number of harmonics to list

Returns the strongest harmonics with their frequency and share of total power."""

    args_schema: Type[BaseModel] = PowerSpectrumInput
    debug: bool = False

    model_config: ClassVar[dict] = {"arbitrary_types_allowed": True}

    def _run(
        self,
        basis_dir: str,
        series_path: str,
        top_k: int = 5,
        run_manager: Optional[CallbackManagerForToolRun] = None,
    ) -> str:
        try:
            basis = load_basis(basis_dir)
            spectrum = power_spectrum(basis, load_signal_series(series_path))
            total = spectrum.total
            order = np.argsort(-spectrum.power, kind="stable")[:top_k]
            lines = [
                f"   k={k}  frequency={format_significant(spectrum.frequencies[k])}  "
                f"share={format_significant(spectrum.power[k] / total if total else 0.0, 3)}"
                for k in order
            ]
            return f"Total power: {format_significant(total)}\nStrongest harmonics:\n" + "\n".join(lines)
        except (DigftError, OSError, ValueError) as e:
            return f"❌ Power spectrum failed: {str(e)}"

    async def _arun(
        self,
        basis_dir: str,
        series_path: str,
        top_k: int = 5,
        run_manager: Optional[AsyncCallbackManagerForToolRun] = None,
    ) -> str:
        return await asyncio.to_thread(self._run, basis_dir, series_path, top_k)


# ============================================
# Convenience function for creating all tools
# ============================================

def create_digft_tools(debug: bool = False) -> List[BaseTool]:
    """
    Create all digft tools with shared configuration.

    Example:
        >>> tools = create_digft_tools()
        >>> agent = create_agent(llm, tools)
    """
    common_config: Dict[str, Any] = {"debug": debug}
    return [
        GraphVariationTool(**common_config),
        GftBasisTool(**common_config),
        GraphPowerSpectrumTool(**common_config),
    ]


__all__ = [
    "VariationInput",
    "BasisInput",
    "PowerSpectrumInput",
    "GraphVariationTool",
    "GftBasisTool",
    "GraphPowerSpectrumTool",
    "create_digft_tools",
]
