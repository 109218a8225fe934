"""Lowering of small unitaries to Clifford+T plus hub-targeted CNOTs."""

from __future__ import annotations

from ..qsim import depth
from .kak import canonical_coordinates, interaction, kak_decompose
from .pipeline import (
    DEFAULT_BUDGET,
    CompiledCircuit,
    DepthBudgetExceeded,
    compile_full,
    fuse_parametric_runs,
)
from .routing import Topology, route
from .synthesis import SynthesisBudget, SynthesisResult, sequence_unitary, synthesize_single_qubit

__all__ = [
    "DEFAULT_BUDGET",
    "CompiledCircuit",
    "DepthBudgetExceeded",
    "SynthesisBudget",
    "SynthesisResult",
    "Topology",
    "canonical_coordinates",
    "compile_full",
    "depth",
    "fuse_parametric_runs",
    "interaction",
    "kak_decompose",
    "route",
    "sequence_unitary",
    "synthesize_single_qubit",
]
