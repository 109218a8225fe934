"""Star-topology routing where a single qubit is the only legal CNOT target."""

from __future__ import annotations

from dataclasses import dataclass

from ..qsim import Circuit, Gate


@dataclass(frozen=True)
class Topology:
    """Device connectivity: every qubit may control a CNOT onto ``cnot_target``.

    Attributes:
        num_qubits: number of device qubits.
        cnot_target: the unique qubit allowed as a CNOT target.
    """

    num_qubits: int
    cnot_target: int = 0

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError("a topology needs at least one qubit")
        if not 0 <= self.cnot_target < self.num_qubits:
            raise ValueError(f"cnot_target {self.cnot_target} outside 0..{self.num_qubits - 1}")

    @property
    def allowed_controls(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.num_qubits) if q != self.cnot_target)

    def allows(self, g: Gate) -> bool:
        return g.name != "CNOT" or g.qubits[1] == self.cnot_target


def _reversed_cnot(control: int, target: int) -> list[Gate]:
    """CNOT(control -> target) built from CNOT(target -> control)."""
    hs = [Gate("H", (control,)), Gate("H", (target,))]
    return [*hs, Gate("CNOT", (target, control)), *hs]


def _swap_via(q: int, hub: int) -> list[Gate]:
    """SWAP(q, hub) from three CNOTs that all target ``hub``."""
    return [Gate("CNOT", (q, hub)), *_reversed_cnot(hub, q), Gate("CNOT", (q, hub))]


def route_gate(g: Gate, topo: Topology) -> list[Gate]:
    if topo.allows(g):
        return [g]
    control, target = g.qubits
    hub = topo.cnot_target
    if control == hub:
        return _reversed_cnot(control, target)
    swap = _swap_via(target, hub)
    return [*swap, Gate("CNOT", (control, hub)), *swap]


def route(c: Circuit, topo: Topology) -> Circuit:
    """Rewrite ``c`` so that every CNOT targets ``topo.cnot_target``.

    A CNOT controlled by the hub is reversed with Hadamards; any other
    CNOT is moved onto the hub by swapping its target with the hub, applying
    the CNOT there and swapping back.
    """
    if c.num_qubits > topo.num_qubits:
        raise ValueError(f"circuit needs {c.num_qubits} qubits, topology has {topo.num_qubits}")
    out = Circuit(topo.num_qubits)
    for g in c.gates:
        out.extend(route_gate(g, topo))
    return out
