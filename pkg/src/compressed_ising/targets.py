"""Named compile targets and the compiled magnetization circuits for n = 4.

``ising-j<k>`` is the full three-qubit experiment for ``J = k * j_max / 12``:
preparation of the compressed input state (qubit 2 is the discarded
ancilla), followed by the whole adiabatic evolution ``W(J)`` on qubits 0
and 1. The magnetization is ``-<Y>`` on qubit 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import compressed
from .compiler import CompiledCircuit, SynthesisBudget, Topology, compile_full, kak_decompose
from .config import DEPTH_LIMIT
from .qsim import Circuit, expectation, partial_trace, run

ISING_POINTS = 12
ISING_READOUT_QUBIT = 1
#: Layers reserved for the Y-basis change (Sdg, H) before measurement.
READOUT_DEPTH = 2
#: Synthesis budget used for the compiled magnetization circuits.
ISING_BUDGET = SynthesisBudget(max_t_count=16, target_epsilon=1e-2, max_total_length=16)
STEP_PHI = 0.2
STEP_DT = 0.1


def ising_coupling(k: int, points: int = ISING_POINTS, j_max: float = 2.0) -> float:
    if not 1 <= k <= points:
        raise ValueError(f"point index {k} outside 1..{points}")
    return j_max * k / points


def ising_structure(J: float, schedule: compressed.Schedule = compressed.Schedule()) -> Circuit:
    """Preparation plus the exact two-qubit decomposition of ``W(J)`` (n = 4)."""
    prep, _ = compressed.build_prep_circuit(2)
    W = compressed.build_W(compressed.CompressedSpec(4, schedule), J)
    return prep + kak_decompose(W).remap([0, 1], num_qubits=prep.num_qubits)


@lru_cache(maxsize=64)
def compile_ising(
    J: float,
    schedule: compressed.Schedule = compressed.Schedule(),
    budget: SynthesisBudget = ISING_BUDGET,
    max_depth: int | None = DEPTH_LIMIT,
) -> CompiledCircuit:
    """Compile the n = 4 experiment at coupling ``J`` for the star device.

    The depth limit applies to the whole experiment, so ``READOUT_DEPTH``
    layers are kept free for the measurement basis change.
    """
    limit = None if max_depth is None else max_depth - READOUT_DEPTH
    return compile_full(ising_structure(J, schedule), Topology(3, 0), budget, limit)


def circuit_magnetization(c: Circuit, qubit: int = ISING_READOUT_QUBIT) -> float:
    """Noiseless ``-<Y>`` on ``qubit`` after running ``c`` from ``|0...0>``."""
    rho = partial_trace(run(c), [qubit])
    return -expectation(rho, "Y")


@dataclass(frozen=True)
class BuiltinTarget:
    name: str
    target: np.ndarray | Circuit
    topology: Topology
    max_depth: int | None = DEPTH_LIMIT


def _ising_target(k: int) -> BuiltinTarget:
    limit = DEPTH_LIMIT - READOUT_DEPTH
    return BuiltinTarget(f"ising-j{k}", ising_structure(ising_coupling(k)), Topology(3, 0), limit)


BUILTIN_NAMES = (
    *(f"ising-j{k}" for k in range(1, ISING_POINTS + 1)),
    "step2q",
    "step3q",
    "a-gate",
    "ccphase",
    "identity",
)


def builtin_target(name: str) -> BuiltinTarget:
    """Look up a named compile target.

    Raises:
        KeyError: for an unknown name.
    """
    if name.startswith("ising-j") and name in BUILTIN_NAMES:
        return _ising_target(int(name.removeprefix("ising-j")))
    if name == "step2q":
        return BuiltinTarget(name, compressed.build_step_circuit_2q(STEP_PHI, STEP_DT), Topology(2, 0))
    if name == "step3q":
        return BuiltinTarget(name, compressed.build_step_circuit_3q(STEP_PHI, STEP_DT), Topology(3, 0), None)
    if name == "a-gate":
        return BuiltinTarget(name, compressed.build_A_circuit(), Topology(3, 0), None)
    if name == "ccphase":
        return BuiltinTarget(name, compressed.build_ccphase(STEP_PHI), Topology(3, 0), None)
    if name == "identity":
        return BuiltinTarget(name, np.eye(4, dtype=complex), Topology(2, 0))
    raise KeyError(f"unknown builtin target {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
