"""Validating circuit sets: black-box error estimates from classically checkable twins.

A validating circuit keeps every T, Tdg and CNOT of a circuit of interest in
place and swaps each remaining single-qubit gate for a random Clifford on
the same qubit. Running such twins on the noisy device and comparing with
exact simulation gives an error estimate for circuits of the same size.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .noise import NoiseModel, noisy_expectation, sample_expectation
from .qsim import PARAMETRIC, Circuit, Gate

KEPT_GATES = frozenset({"T", "TDG", "CNOT"})
REPLACEMENT_GATES = ("X", "Y", "Z", "H", "S", "SDG")
PRESERVED_COUNTS = ("t_count", "cnot_count", "total_gate_count")

#: Device errors e for ten validating twins of each of the J = 2/6 and J = 3/6
#: experiments, recorded for reference only (one device, one day).
REFERENCE_DEVICE_ERRORS = {
    "ising-j2": (0.038, 0.076, 0.030, 0.130, 0.066, 0.166, 0.270, 0.128, 0.260, 0.000),
    "ising-j3": (0.034, 0.202, 0.070, 0.152, 0.216, 0.076, 0.078, 0.248, 0.144, 0.056),
}


@dataclass(frozen=True)
class ValidatingSpec:
    """What to randomize and how many twins to draw.

    Attributes:
        base_circuit: circuit of interest over the hardware gate set.
        count: number of validating circuits.
        measured_qubit: qubit whose Y expectation is compared.
        seed: seed for the gate replacement.
        preserve: counts kept equal to the base (always all of them).
    """

    base_circuit: Circuit
    count: int
    measured_qubit: int = 1
    seed: int = 0
    preserve: tuple[str, ...] = PRESERVED_COUNTS

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if not 0 <= self.measured_qubit < self.base_circuit.num_qubits:
            raise ValueError(f"measured qubit {self.measured_qubit} is not in the circuit")


def _counts(c: Circuit) -> dict[str, int]:
    return {"t_count": c.t_count, "cnot_count": c.cnot_count, "total_gate_count": len(c)}


def generate_validating_set(spec: ValidatingSpec) -> list[Circuit]:
    """Draw ``spec.count`` positional Clifford twins of the base circuit.

    Raises:
        ValueError: if the base still holds PHASE, ROTY or U gates.
    """
    base = spec.base_circuit
    bad = sorted({g.name for g in base.gates if g.name in PARAMETRIC})
    if bad:
        raise ValueError(f"base circuit has unsynthesized gates: {', '.join(bad)}")
    rng = np.random.default_rng(spec.seed)
    target = _counts(base)
    out = []
    for _ in range(spec.count):
        gates = [
            g if g.name in KEPT_GATES else Gate(REPLACEMENT_GATES[rng.integers(6)], g.qubits)
            for g in base.gates
        ]
        twin = Circuit(base.num_qubits, gates)
        assert _counts(twin) == target
        out.append(twin)
    return out


@dataclass(frozen=True)
class ValidatingRow:
    circuit_id: int
    y_ideal: float
    y_measured: float
    e: float
    stderr: float = 0.0


@dataclass(frozen=True)
class ValidatingReport:
    rows: tuple[ValidatingRow, ...]

    @property
    def per_circuit_errors(self) -> list[float]:
        return [r.e for r in self.rows]

    @property
    def mean_error(self) -> float:
        return float(np.mean(self.per_circuit_errors))

    @property
    def max_error(self) -> float:
        return float(np.max(self.per_circuit_errors))

    def to_csv(self) -> str:
        """RFC 4180 CSV with columns circuit_id, y_ideal, y_measured, e and a mean row."""
        buf = io.StringIO(newline="")
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["circuit_id", "y_ideal", "y_measured", "e"])
        for r in self.rows:
            w.writerow([r.circuit_id, repr(r.y_ideal), repr(r.y_measured), repr(r.e)])
        w.writerow(["mean", "", "", repr(self.mean_error)])
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_csv().encode())


def ideal_y(c: Circuit, qubit: int) -> float:
    """Exact ``<Y>`` on ``qubit``, computed by the noisy evaluator with noise off."""
    return noisy_expectation(c, {qubit: "Y"}, None)


def evaluate_validating_set(
    circuits: list[Circuit],
    noise: NoiseModel | None,
    shots: int | None,
    measured_qubit: int,
    seed: int | None = None,
) -> ValidatingReport:
    """Compare noisy and exact ``<Y>`` on every circuit.

    Args:
        circuits: validating circuits.
        noise: device model; None for noiseless.
        shots: runs per circuit, or None for analytic noisy expectations.
        measured_qubit: qubit carrying the Y measurement.
        seed: root of the per-circuit sampling streams (defaults to the
            noise seed).
    """
    if seed is None:
        seed = noise.seed if noise is not None else 0
    streams = np.random.SeedSequence(seed).spawn(len(circuits))
    rows = []
    for i, (c, stream) in enumerate(zip(circuits, streams)):
        exact = ideal_y(c, measured_qubit)
        res = sample_expectation(c, {measured_qubit: "Y"}, shots, noise, np.random.default_rng(stream))
        rows.append(ValidatingRow(i, exact, res.estimate, abs(res.estimate - exact), res.stderr))
    return ValidatingReport(tuple(rows))


def ising_validating_set(seed: int = 0, per_base: int = 10) -> list[Circuit]:
    """Twins of the compiled J = 2/6 and J = 3/6 experiments, ``per_base`` each."""
    from .targets import compile_ising, ising_coupling

    seeds = np.random.SeedSequence(seed).generate_state(2)
    out = []
    for k, s in zip((2, 3), seeds):
        base = compile_ising(ising_coupling(k)).circuit
        out += generate_validating_set(ValidatingSpec(base, per_base, 1, int(s)))
    return out
