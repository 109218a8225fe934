"""End-to-end lowering: decomposition, routing, Clifford+T synthesis, depth check."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import DEPTH_LIMIT
from ..qsim import GATE_SET, PARAMETRIC, Circuit, Gate, depth
from .kak import kak_decompose
from .routing import Topology, route
from .synthesis import SynthesisBudget, synthesize_single_qubit

DEFAULT_BUDGET = SynthesisBudget(max_t_count=10, target_epsilon=1e-2, max_total_length=12)


class DepthBudgetExceeded(RuntimeError):
    """No synthesis length fits the depth limit; ``attempt`` holds the best try."""

    def __init__(self, attempt: "CompiledCircuit") -> None:
        super().__init__(f"compiled depth {attempt.depth} exceeds limit {attempt.max_depth}")
        self.attempt = attempt


@dataclass
class CompiledCircuit:
    """A circuit over {X, Y, Z, H, S, Sdg, T, Tdg, CNOT} with its error bound.

    Attributes:
        circuit: the lowered circuit.
        synthesis_error: sum of per-gate operator-norm synthesis errors, an
            upper bound on the distance to the target up to global phase.
        depth: ASAP depth of ``circuit``.
        max_depth: the depth limit it was compiled against (None for none).
        gate_errors: synthesis error of each approximated gate, in order.
        length_cap: per-gate sequence length that was finally used.
        routing_cnots: CNOTs added by routing beyond the unrouted count.
    """

    circuit: Circuit
    synthesis_error: float
    depth: int
    max_depth: int | None = DEPTH_LIMIT
    gate_errors: list[float] = field(default_factory=list)
    length_cap: int = 0
    routing_cnots: int = 0

    @property
    def over_budget(self) -> bool:
        return self.max_depth is not None and self.depth > self.max_depth

    @property
    def cnot_count(self) -> int:
        return self.circuit.cnot_count

    @property
    def t_count(self) -> int:
        return self.circuit.t_count


def fuse_parametric_runs(c: Circuit) -> Circuit:
    """Fuse each single-qubit run that contains a non-fixed gate into one ``U``.

    Runs made only of fixed Clifford+T gates are left untouched.
    """
    out = Circuit(c.num_qubits)
    pending: dict[int, list[Gate]] = {}

    def flush(q: int) -> None:
        run = pending.pop(q, [])
        if not any(g.name in PARAMETRIC for g in run):
            out.extend(run)
            return
        m = np.eye(2, dtype=complex)
        for g in run:
            m = g.unitary() @ m
        w, _, vh = np.linalg.svd(m)
        out.append(Gate("U", (q,), matrix=w @ vh))

    for g in c.gates:
        if g.name == "CNOT":
            for q in g.qubits:
                flush(q)
            out.append(g)
        else:
            pending.setdefault(g.qubits[0], []).append(g)
    for q in sorted(pending):
        flush(q)
    return out


def _lower(c: Circuit, budget: SynthesisBudget, cap: int) -> tuple[Circuit, list[float]]:
    local = SynthesisBudget(budget.max_t_count, budget.target_epsilon, cap)
    out = Circuit(c.num_qubits)
    errors = []
    for g in c.gates:
        if g.name in PARAMETRIC:
            res = synthesize_single_qubit(g.unitary(), local)
            errors.append(res.error)
            out.extend(res.gates(g.qubits[0]))
        else:
            out.append(g)
    return out, errors


def compile_full(
    target: np.ndarray | Circuit,
    topo: Topology | None = None,
    budget: SynthesisBudget | None = None,
    max_depth: int | None = DEPTH_LIMIT,
    strict: bool = False,
) -> CompiledCircuit:
    """Compile a two-qubit unitary or a small circuit to the hardware gate set.

    A 4x4 matrix goes through ``kak_decompose``; a ``Circuit`` (for example
    one of the three-qubit step constructions) is taken as the structural
    decomposition. The result is routed, single-qubit runs holding
    non-Clifford+T gates are fused and synthesized, and the per-gate length
    is lowered from ``budget.max_total_length`` until the depth fits.

    Args:
        target: 4x4 unitary or a circuit.
        topo: device topology; defaults to qubit 0 as the CNOT target.
        budget: synthesis budget per single-qubit gate.
        max_depth: depth limit, or None for none.
        strict: raise ``DepthBudgetExceeded`` instead of returning an
            over-budget result.

    Raises:
        ValueError: for a matrix that is not 4x4.
    """
    budget = budget or DEFAULT_BUDGET
    if isinstance(target, Circuit):
        structural = target
    else:
        u = np.asarray(target, dtype=complex)
        if u.shape != (4, 4):
            raise ValueError(
                f"matrix targets must be 4x4, got {u.shape}; pass larger targets as circuits"
            )
        structural = kak_decompose(u)
    topo = topo or Topology(structural.num_qubits, 0)
    routed = route(structural, topo)
    fused = fuse_parametric_runs(routed)
    extra = routed.cnot_count - structural.cnot_count

    attempts = []
    for cap in range(budget.max_total_length, -1, -1):
        lowered, errors = _lower(fused, budget, cap)
        result = CompiledCircuit(
            lowered, float(sum(errors)), depth(lowered), max_depth, errors, cap, extra
        )
        attempts.append(result)
        if not result.over_budget:
            break
    result = attempts[-1] if not attempts[-1].over_budget else attempts[0]
    assert all(g.name in GATE_SET and topo.allows(g) for g in result.circuit.gates)
    if result.over_budget and strict:
        raise DepthBudgetExceeded(result)
    return result
