"""Two-qubit decomposition into at most three CNOTs and local gates.

A two-qubit unitary is written as ``K1 . N(a, b, c) . K2`` with local
``K1``, ``K2`` and ``N(a, b, c) = exp(i (a XX + b YY + c ZZ))``. The
factorization goes through the magic basis, where local unitaries become
real orthogonal matrices and ``N`` becomes diagonal. ``N`` is then
emitted with a fixed CNOT template: one CNOT for the CNOT class, two when
one coordinate vanishes, three otherwise.
"""

from __future__ import annotations

import numpy as np

from ..config import ALGEBRAIC_TOL, STRUCTURAL_TOL
from ..qsim import (
    FIXED_GATES,
    Circuit,
    Gate,
    circuit_unitary,
    distance_up_to_phase,
    is_unitary,
)

_X, _Y, _Z = FIXED_GATES["X"], FIXED_GATES["Y"], FIXED_GATES["Z"]
_PAULI_PAIRS = (np.kron(_X, _X), np.kron(_Y, _Y), np.kron(_Z, _Z))

MAGIC = np.array(
    [[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]], dtype=complex
) / np.sqrt(2)
# eigenvalues of XX, YY, ZZ on the magic-basis columns, plus a phase column
_COORD_SYSTEM = np.column_stack(
    [np.real(np.diag(MAGIC.conj().T @ p @ MAGIC)) for p in _PAULI_PAIRS] + [np.ones(4)]
)
_CNOT_01 = Gate("CNOT", (0, 1)).unitary()
_CNOT_10 = _CNOT_01[np.ix_([0, 2, 1, 3], [0, 2, 1, 3])]
_QUARTER = np.pi / 4


def interaction(a: float, b: float, c: float) -> np.ndarray:
    """``exp(i (a XX + b YY + c ZZ))``."""
    diag = np.exp(1j * (_COORD_SYSTEM[:, :3] @ np.array([a, b, c])))
    return MAGIC @ np.diag(diag) @ MAGIC.conj().T


def _rz(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def _ry(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _expi(t: float, pauli: np.ndarray) -> np.ndarray:
    return np.cos(t) * np.eye(2) + 1j * np.sin(t) * pauli


def _u(q: int, m: np.ndarray) -> Gate:
    return Gate("U", (q,), matrix=m)


def _local_pair(left: np.ndarray, right: np.ndarray) -> list[Gate]:
    return [_u(0, left), _u(1, right)]


def factor_local(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a 4x4 tensor product into its 2x2 factors (up to phase)."""
    m = np.asarray(u).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    w, s, vh = np.linalg.svd(m)
    a = _nearest_unitary(w[:, 0].reshape(2, 2))
    b = _nearest_unitary(vh[0].reshape(2, 2))
    return a, b


def _nearest_unitary(m: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def _is_local(u: np.ndarray) -> bool:
    a, b = factor_local(u)
    return distance_up_to_phase(np.kron(a, b), u) < STRUCTURAL_TOL


def _three_cnot(a: float, b: float, c: float) -> list[Gate]:
    """N(a, b, c) as three alternating CNOTs with rotations between them."""
    return [
        _u(1, _rz(-np.pi / 2)),
        Gate("CNOT", (1, 0)),
        _u(0, _rz(np.pi / 2 - 2 * c)),
        _u(1, _ry(2 * a - np.pi / 2)),
        Gate("CNOT", (0, 1)),
        _u(1, _ry(np.pi / 2 - 2 * b)),
        Gate("CNOT", (1, 0)),
        _u(0, _rz(np.pi / 2)),
    ]


def _two_cnot_xz(a: float, c: float) -> list[Gate]:
    """N(a, 0, c) = CX . (e^{i a X} x e^{i c Z}) . CX."""
    return [
        Gate("CNOT", (0, 1)),
        _u(0, _expi(a, _X)),
        _u(1, _expi(c, _Z)),
        Gate("CNOT", (0, 1)),
    ]


def _one_cnot_xx() -> list[Gate]:
    """N(pi/4, 0, 0) up to phase: Hadamard-conjugated exp(i pi/4 Z X)."""
    h = FIXED_GATES["H"]
    return [
        _u(0, h),
        Gate("CNOT", (0, 1)),
        _u(0, _expi(_QUARTER, _Z)),
        _u(1, _expi(_QUARTER, _X)),
        _u(0, h),
    ]


def _conjugated(gates: list[Gate], v: np.ndarray) -> list[Gate]:
    """Gates realizing (v x v) . G . (v x v)^dagger."""
    vd = v.conj().T
    return [_u(0, vd), _u(1, vd), *gates, _u(0, v), _u(1, v)]


# locals mapping the XX axis onto YY / ZZ and YY onto ZZ
_S = FIXED_GATES["S"]
_H = FIXED_GATES["H"]
_QX = _expi(-_QUARTER, _X)


def _interaction_circuit(a: float, b: float, c: float, tol: float) -> list[Gate]:
    zero = [abs(x) < tol for x in (a, b, c)]
    quarter = [abs(x - _QUARTER) < tol for x in (a, b, c)]
    if sum(zero) == 2 and sum(quarter) == 1:
        if quarter[0]:
            return _one_cnot_xx()
        if quarter[1]:
            return _conjugated(_one_cnot_xx(), _S)
        return _conjugated(_one_cnot_xx(), _H)
    if zero[1]:
        return _two_cnot_xz(a, c)
    if zero[0]:
        return _conjugated(_two_cnot_xz(b, c), _S)
    if zero[2]:
        return _conjugated(_two_cnot_xz(a, b), _QX)
    return _three_cnot(a, b, c)


def _simultaneous_diagonalizer(m2: np.ndarray) -> np.ndarray:
    """Real orthogonal P (det +1) with P^T m2 P diagonal, for symmetric unitary m2."""
    rng = np.random.default_rng(2024)
    re, im = m2.real, m2.imag
    for attempt in range(64):
        r = 0.5 if attempt == 0 else rng.random()
        _, p = np.linalg.eigh(r * re + (1 - r) * im)
        d = p.T @ m2 @ p
        if np.allclose(d, np.diag(np.diag(d)), atol=1e-9):
            if np.linalg.det(p) < 0:
                p[:, 0] = -p[:, 0]
            return p
    raise np.linalg.LinAlgError("could not diagonalize the magic-basis square")


def canonical_coordinates(u: np.ndarray) -> tuple[np.ndarray, tuple[float, float, float], np.ndarray]:
    """Return ``(K1, (a, b, c), K2)`` with ``u ~ K1 . N(a, b, c) . K2`` up to phase.

    ``K1`` and ``K2`` are 4x4 tensor products. Coordinates are reduced to
    ``(-pi/4, pi/4]``; the Pauli factors this produces are folded into
    ``K2``.
    """
    u = np.asarray(u, dtype=complex)
    su = u / np.linalg.det(u) ** 0.25
    up = MAGIC.conj().T @ su @ MAGIC
    m2 = up.T @ up
    p = _simultaneous_diagonalizer(m2)
    d = np.diag(p.T @ m2 @ p)
    root = np.sqrt(d)
    if np.real(np.prod(root)) < 0:
        root[0] = -root[0]
    k1m = up @ p @ np.diag(1 / root)
    k1 = MAGIC @ k1m @ MAGIC.conj().T
    k2 = MAGIC @ p.T @ MAGIC.conj().T
    coords = np.linalg.solve(_COORD_SYSTEM, np.angle(root))[:3]
    reduced = []
    for x, pair in zip(coords, _PAULI_PAIRS):
        k = int(np.ceil((x - _QUARTER) / (np.pi / 2) - 1e-9))
        reduced.append(float(x - k * np.pi / 2))
        # exp(i x PP) = exp(i x' PP) (i PP)^k; Pauli pairs commute with N
        k2 = np.linalg.matrix_power(pair, k % 2) @ k2
    return k1, tuple(reduced), k2


def _merge_single_qubit(gates: list[Gate]) -> list[Gate]:
    """Fuse runs of single-qubit gates per wire and drop identities."""
    out: list[Gate] = []
    pending: dict[int, np.ndarray] = {}

    def flush(q: int) -> None:
        m = pending.pop(q, None)
        if m is None:
            return
        if distance_up_to_phase(m, np.eye(2)) > ALGEBRAIC_TOL:
            out.append(_u(q, _nearest_unitary(m)))

    for g in gates:
        if g.name == "CNOT":
            for q in g.qubits:
                flush(q)
            out.append(g)
        else:
            q = g.qubits[0]
            pending[q] = g.unitary() @ pending.get(q, np.eye(2))
    for q in sorted(pending):
        flush(q)
    return out


def kak_decompose(u: np.ndarray, tol: float = ALGEBRAIC_TOL) -> Circuit:
    """Decompose a two-qubit unitary into CNOTs and arbitrary single-qubit gates.

    Args:
        u: 4x4 unitary, qubit 0 most significant.
        tol: unitarity tolerance on the input.

    Returns:
        A circuit with at most 3 CNOTs and at most 8 ``U`` gates whose
        unitary equals ``u`` up to global phase.

    Raises:
        ValueError: for a non-unitary or wrongly sized input.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {u.shape}")
    if not is_unitary(u, tol):
        raise ValueError("input is not unitary")

    for cnot, qubits in ((_CNOT_01, (0, 1)), (_CNOT_10, (1, 0))):
        if distance_up_to_phase(u, cnot) < STRUCTURAL_TOL:
            return Circuit(2, [Gate("CNOT", qubits)])
    if _is_local(u):
        a, b = factor_local(u)
        return Circuit(2, _merge_single_qubit(_local_pair(a, b)))

    k1, (a, b, c), k2 = canonical_coordinates(u)
    l1, r1 = factor_local(k1)
    l2, r2 = factor_local(k2)
    for core in (_interaction_circuit(a, b, c, 1e-9), _three_cnot(a, b, c)):
        gates = _merge_single_qubit([*_local_pair(l2, r2), *core, *_local_pair(l1, r1)])
        circ = Circuit(2, gates)
        if distance_up_to_phase(circuit_unitary(circ), u) < STRUCTURAL_TOL:
            return circ
    raise np.linalg.LinAlgError("two-qubit decomposition failed to reconstruct its input")


