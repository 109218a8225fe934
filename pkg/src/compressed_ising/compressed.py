"""Compressed simulation of the open transverse-field Ising chain.

An ``n = 2**m`` site chain with ``H(J) = sum Z_k + J sum X_k X_{k+1}`` is
evolved adiabatically from ``J = 0`` on only ``m`` qubits. One adiabatic
step is ``U_d R_l^T R_0^T`` and the magnetization is read off as
``M(J) = -Tr(W rho_in W^dagger (1 x Y_m))``. The value equals the site
averaged ``<Z>`` of the full chain under the matching first-order Trotter
evolution (see :func:`compressed_ising.oracle.full_chain_trotter`).

Basis states are indexed 0-based here; the 1-based label ``|k>`` of the
operator formulas is index ``k - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import MAX_DENSE_QUBITS
from .qsim import (
    Circuit,
    Gate,
    expectation,
    gate,
    kron,
    roty_matrix,
)


@dataclass(frozen=True)
class Schedule:
    """Digital adiabatic ramp ``J_l = (l / L) j_max`` with Trotter step ``dt``."""

    j_max: float = 2.0
    L: int = 2400
    dt: float = 0.1

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError("L must be at least 1")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        # j_max == 0 is allowed as the degenerate single-point ramp J = 0
        if self.j_max < 0:
            raise ValueError("j_max must be non-negative")

    def coupling(self, l: int) -> float:
        return l / self.L * self.j_max

    def phi(self, l: int) -> float:
        return 2 * self.coupling(l) * self.dt

    @property
    def phis(self) -> np.ndarray:
        l = np.arange(1, self.L + 1)
        return 2 * (l / self.L * self.j_max) * self.dt

    def steps_for(self, J: float) -> int:
        """Number of steps ``L(J) = round(L J / j_max)`` needed to reach ``J``."""
        if J < 0 or J > self.j_max + 1e-12:
            raise ValueError(f"J={J} outside [0, {self.j_max}]")
        if J == 0:
            return 0
        return int(round(self.L * J / self.j_max))


@dataclass(frozen=True)
class CompressedSpec:
    n: int
    schedule: Schedule = Schedule()

    def __post_init__(self) -> None:
        m = self.n.bit_length() - 1
        if self.n < 4 or 2**m != self.n:
            raise ValueError(f"chain length must be a power of two >= 4, got {self.n}")
        if m > MAX_DENSE_QUBITS:
            raise ValueError(f"m={m} exceeds the dense limit")

    @property
    def m(self) -> int:
        return self.n.bit_length() - 1


@dataclass(frozen=True)
class MagnetizationPoint:
    J: float
    M: float
    steps_used: int


def _check_m(m: int) -> None:
    if m < 2:
        raise ValueError(f"need m >= 2 compressed qubits, got {m}")


Y_PLUS = np.array([1, 1j]) / np.sqrt(2)


def build_rho_in(m: int) -> np.ndarray:
    """``rho_in = 2^{1-m} 1^{(m-1)} (x) |+_y><+_y|``."""
    _check_m(m)
    d = 2 ** (m - 1)
    return kron(np.eye(d) / d, np.outer(Y_PLUS, Y_PLUS.conj()))


def build_R0(m: int, dt: float) -> np.ndarray:
    """``1 (x) exp(2 i dt Y)`` on the last qubit."""
    _check_m(m)
    return kron(np.eye(2 ** (m - 1)), roty_matrix(2 * dt))


def build_Rl(m: int, phi: float) -> np.ndarray:
    """Real rotation by ``phi`` in the planes ``(|2k>, |2k+1>)``, k = 1 .. 2^(m-1) - 1.

    The first and last basis states are left fixed. Labels are the 1-based
    ``|k>`` of the formula, read on the ``2**m``-dimensional space.
    """
    _check_m(m)
    d = 2**m
    c, s = np.cos(phi), np.sin(phi)
    R = np.eye(d) * c
    R[0, 0] = R[d - 1, d - 1] = 1.0
    for k in range(1, d // 2):
        # |2k+1><2k| - h.c. in 1-based labels
        R[2 * k, 2 * k - 1] += s
        R[2 * k - 1, 2 * k] -= s
    return R


def build_Ud(m: int, phi: float) -> np.ndarray:
    """Identity except ``e^{i phi}`` on the last basis state."""
    _check_m(m)
    u = np.eye(2**m, dtype=complex)
    u[-1, -1] = np.exp(1j * phi)
    return u


def step_unitary(m: int, phi: float, dt: float, transpose: bool = True) -> np.ndarray:
    """One adiabatic step ``U_d R_l^T R_0^T`` (or ``U_d R_l R_0``)."""
    R0, Rl = build_R0(m, dt), build_Rl(m, phi)
    if transpose:
        R0, Rl = R0.T, Rl.T
    return build_Ud(m, phi) @ Rl @ R0


def build_W(spec: CompressedSpec, J: float) -> np.ndarray:
    """Whole evolution up to ``J``; the step with ``l = 1`` is applied first."""
    sched = spec.schedule
    steps = sched.steps_for(J)
    m = spec.m
    d = 2**m
    R0T = build_R0(m, sched.dt).T
    W = np.eye(d, dtype=complex)
    for l in range(1, steps + 1):
        phi = sched.phi(l)
        W = build_Ud(m, phi) @ (build_Rl(m, phi).T @ (R0T @ W))
    return W


def magnetization_of(W: np.ndarray, m: int) -> float:
    rho = W @ build_rho_in(m) @ W.conj().T
    return -expectation(rho, {m - 1: "Y"})


def magnetization(spec: CompressedSpec, J: float) -> MagnetizationPoint:
    W = build_W(spec, J)
    return MagnetizationPoint(J, magnetization_of(W, spec.m), spec.schedule.steps_for(J))


def sweep(spec: CompressedSpec, J_list) -> list[MagnetizationPoint]:
    return [magnetization(spec, J) for J in J_list]


def default_grid(points: int = 12, j_max: float = 2.0) -> list[float]:
    """``J = j_max * k / points`` for ``k = 1 .. points``."""
    return [j_max * k / points for k in range(1, points + 1)]


# --------------------------------------------------------------------------
# gate-level constructions


def _roty_as_phase(theta: float, q: int) -> list[Gate]:
    # exp(i theta Y) = (S H) Phase(-2 theta) (S H)^dagger up to a global phase
    return [
        gate("SDG", q),
        gate("H", q),
        gate("PHASE", q, param=-2 * theta),
        gate("H", q),
        gate("S", q),
    ]


def _controlled_phase(control: int, target: int, alpha: float) -> list[Gate]:
    """``diag(1, 1, 1, e^{i alpha})`` with two CNOTs onto ``target``."""
    return [
        gate("PHASE", control, param=alpha / 2),
        gate("PHASE", target, param=alpha / 2),
        gate("CNOT", control, target),
        gate("PHASE", target, param=-alpha / 2),
        gate("CNOT", control, target),
    ]


def build_step_circuit_2q(phi: float, dt: float, transpose: bool = True) -> Circuit:
    """Two-qubit circuit for one step ``U_d R_l^T R_0^T`` (``U_d R_l R_0`` if not ``transpose``).

    All CNOTs target qubit 0. Angle-dependent gates appear only as PHASE
    gates between Cliffords, so the circuit depth is 18.
    """
    sign = -1 if transpose else 1
    theta = sign * phi
    c = Circuit(2)
    c.extend(_roty_as_phase(sign * 2 * dt, 1))
    # Givens rotation on span{|01>, |10>}: conjugating with CNOT(1->0) turns it
    # into a rotation of qubit 1 controlled by qubit 0, diagonalized by S H.
    c.extend(
        [
            gate("CNOT", 1, 0),
            gate("SDG", 1),
            gate("H", 1),
            gate("CNOT", 1, 0),
            gate("PHASE", 0, param=theta),
            gate("PHASE", 1, param=-theta),
            gate("CNOT", 1, 0),
            gate("H", 1),
            gate("S", 1),
            gate("CNOT", 1, 0),
        ]
    )
    c.extend(_controlled_phase(1, 0, phi))
    return c


def build_prep_circuit(m: int) -> tuple[Circuit, list[int]]:
    """Circuit preparing ``rho_in`` from ``|0...0>`` plus the ancillas to discard.

    Data qubits are ``0 .. m-1``, ancillas ``m .. 2m-2``. Mixed qubits are
    produced by entangling with ancillas; every CNOT targets a data qubit.
    """
    if m == 2:
        a = 2
        c = Circuit(3, [gate("H", a), gate("H", 1), gate("CNOT", a, 0), gate("S", 1)])
        return c, [a]
    if m == 3:
        a1, a2 = 3, 4
        c = Circuit(
            5,
            [
                gate("H", 0),
                gate("H", a1),
                gate("H", a2),
                gate("H", 2),
                gate("CNOT", 0, 1),  # Bell pair on (0, 1)
                gate("S", 2),
                gate("CNOT", a2, 1),  # random X on qubit 1 removes ZZ, YY correlations
                gate("H", 1),
                gate("CNOT", a1, 1),  # random Z on qubit 1 removes XX
                gate("H", 1),
            ],
        )
        return c, [a1, a2]
    raise ValueError(f"preparation circuits exist for m in {{2, 3}}, got {m}")


def build_A_matrix() -> np.ndarray:
    """``A = |8><1| + sum_{k=1}^{7} |k><k+1|``: the cyclic decrement on 3 qubits."""
    A = np.zeros((8, 8))
    A[7, 0] = 1
    for k in range(1, 8):
        A[k - 1, k] = 1
    return A


def _toffoli(c1: int, c2: int, t: int) -> list[Gate]:
    g = gate
    return [
        g("H", t),
        g("CNOT", c2, t),
        g("TDG", t),
        g("CNOT", c1, t),
        g("T", t),
        g("CNOT", c2, t),
        g("TDG", t),
        g("CNOT", c1, t),
        g("T", c2),
        g("T", t),
        g("H", t),
        g("CNOT", c1, c2),
        g("T", c1),
        g("TDG", c2),
        g("CNOT", c1, c2),
    ]


def build_A_circuit() -> Circuit:
    """Clifford+T circuit for :func:`build_A_matrix`.

    Decrement of the 3-bit register (qubit 0 most significant): flip the
    lowest bit, propagate the borrow with CNOT(2->1), then a Toffoli onto
    qubit 0.
    """
    c = Circuit(3, [gate("X", 2), gate("CNOT", 2, 1)])
    c.extend(_toffoli(1, 2, 0))
    return c


def build_ccphase(phi: float) -> Circuit:
    """Doubly controlled phase: ``e^{i phi}`` on ``|111>`` only.

    Square-root construction with ``V = P(phi/2)``; the controlled phase
    between qubits 0 and 2 is done on (1, 2) between two swaps of qubits 0
    and 1.
    """
    swap = [gate("CNOT", 0, 1), gate("CNOT", 1, 0), gate("CNOT", 0, 1)]
    c = Circuit(3)
    c.extend(_controlled_phase(1, 2, phi / 2))
    c.append(gate("CNOT", 0, 1))
    c.extend(_controlled_phase(1, 2, -phi / 2))
    c.append(gate("CNOT", 0, 1))
    c.extend(swap)
    c.extend(_controlled_phase(1, 2, phi / 2))
    c.extend(swap)
    return c


def _controlled_roty(control: int, target: int, theta: float) -> list[Gate]:
    """Controlled ``exp(i theta Y)``."""
    return [
        gate("ROTY", target, param=theta / 2),
        gate("CNOT", control, target),
        gate("ROTY", target, param=-theta / 2),
        gate("CNOT", control, target),
    ]


def build_cc_roty(theta: float) -> Circuit:
    """``exp(i theta Y)`` on qubit 2 controlled by qubits 0 and 1."""
    c = Circuit(3)
    c.extend(_controlled_roty(1, 2, theta / 2))
    c.append(gate("CNOT", 0, 1))
    c.extend(_controlled_roty(1, 2, -theta / 2))
    c.append(gate("CNOT", 0, 1))
    c.extend(_controlled_roty(0, 2, theta / 2))
    return c


def build_Rl_transpose_circuit_3q(phi: float) -> Circuit:
    """Circuit for ``build_Rl(3, phi).T``.

    Shifting the basis with the decrement ``A`` moves the rotation planes so
    that the rotation becomes ``O = exp(i phi Y)`` on qubit 2 unless qubits 0
    and 1 are both set: ``R_l^T = A^dagger O_2 Lambda_{0,1}(O^T) A``.
    """
    A = build_A_circuit()
    c = Circuit(3, list(A.gates))
    c.extend(build_cc_roty(-phi).gates)
    c.append(gate("ROTY", 2, param=phi))
    c.extend(A.inverse().gates)
    return c


def build_step_circuit_3q(phi: float, dt: float) -> Circuit:
    """One three-qubit step ``U_d R_l^T R_0^T``."""
    c = Circuit(3, [gate("ROTY", 2, param=-2 * dt)])
    c.extend(build_Rl_transpose_circuit_3q(phi).gates)
    c.extend(build_ccphase(phi).gates)
    return c


def readout_circuit(num_qubits: int, qubit: int) -> Circuit:
    """Basis change so that a Z measurement on ``qubit`` measures Y."""
    return Circuit(num_qubits, [gate("SDG", qubit), gate("H", qubit)])
