"""Compressed simulation of the transverse-field Ising chain on log2(n) qubits.

Submodules:
    qsim: dense state-vector and density-matrix simulator.
    compressed: the compressed matchgate construction and its circuits.
    oracle: exact diagonalization and full-chain Trotter references.
    compiler: two-qubit decomposition, Clifford+T synthesis and routing.
    noise: noisy sampling, tomography and fidelities.
    validate: validating circuit sets.
    cli: the ``compressed-ising`` command.
"""

from __future__ import annotations

__version__ = "0.1.0"
