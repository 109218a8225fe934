"""Dense few-qubit simulation: gates, circuits, states and comparisons.

Conventions
-----------
Qubit 0 is the most significant bit of a basis index, so the computational
basis state ``|k_0 k_1 ... k_{q-1}>`` has (0-based) index
``sum_i k_i 2**(q-1-i)``. This is the labeling ``|k> = (x)|k_i>`` with
``k = 1 + sum_i k_i 2**(m-i)`` used for the compressed Ising operators,
shifted to 0-based indices. Tensor products are plain ``np.kron`` in qubit
order.

States are plain numpy arrays: a 1-D array of length ``2**q`` is a state
vector, a ``2**q x 2**q`` array is a density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .config import ALGEBRAIC_TOL, MAX_DENSE_QUBITS

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
T = np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

#: Fixed single-qubit gates by name.
FIXED_GATES = {
    "X": X,
    "Y": Y,
    "Z": Z,
    "H": H,
    "S": S,
    "SDG": S.conj().T,
    "T": T,
    "TDG": T.conj().T,
}
CLIFFORD_1Q = ("X", "Y", "Z", "H", "S", "SDG")
#: Gates a compiled circuit may contain.
GATE_SET = frozenset(FIXED_GATES) | {"CNOT"}
PARAMETRIC = frozenset({"PHASE", "ROTY", "U"})


def phase_matrix(phi: float) -> np.ndarray:
    """``diag(1, e^{i phi})``."""
    return np.array([[1, 0], [0, np.exp(1j * phi)]], dtype=complex)


def roty_matrix(theta: float) -> np.ndarray:
    """``exp(i theta Y)``, a real rotation."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """One gate of a circuit.

    ``qubits`` is ``(q,)`` for single-qubit gates and ``(control, target)``
    for CNOT. ``param`` carries the angle of PHASE/ROTY; ``matrix`` the 2x2
    unitary of an arbitrary single-qubit gate ``U``.
    """

    name: str
    qubits: tuple[int, ...]
    param: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        name = self.name.upper()
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if name == "CNOT":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"CNOT needs distinct control and target, got {self.qubits}")
        elif len(self.qubits) != 1:
            raise ValueError(f"{name} acts on exactly one qubit, got {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        if name in ("PHASE", "ROTY"):
            if self.param is None:
                raise ValueError(f"{name} needs an angle")
            object.__setattr__(self, "param", float(self.param))
        elif name == "U":
            if self.matrix is None:
                raise ValueError("U needs a 2x2 matrix")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2, 2) or not is_unitary(m):
                raise ValueError("U matrix must be a 2x2 unitary")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        elif name not in FIXED_GATES and name != "CNOT":
            raise ValueError(f"unknown gate {name!r}")

    @property
    def is_two_qubit(self) -> bool:
        return self.name == "CNOT"

    def unitary(self) -> np.ndarray:
        """Local matrix of the gate (4x4 in (control, target) order for CNOT)."""
        if self.name == "CNOT":
            return np.array(
                [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
            )
        if self.name == "PHASE":
            return phase_matrix(self.param)
        if self.name == "ROTY":
            return roty_matrix(self.param)
        if self.name == "U":
            return np.array(self.matrix)
        return FIXED_GATES[self.name]

    def inverse(self) -> "Gate":
        q = self.qubits
        if self.name in ("PHASE", "ROTY"):
            return Gate(self.name, q, -self.param)
        if self.name == "U":
            return Gate("U", q, matrix=self.matrix.conj().T)
        swap = {"S": "SDG", "SDG": "S", "T": "TDG", "TDG": "T"}
        return Gate(swap.get(self.name, self.name), q)


def gate(name: str, *qubits: int, param: float | None = None) -> Gate:
    """Shorthand constructor: ``gate("CNOT", 0, 1)``, ``gate("PHASE", 1, param=0.3)``."""
    return Gate(name, qubits, param)


@dataclass
class Circuit:
    """Ordered gate list over ``num_qubits`` qubits; gates[0] is applied first."""

    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        self.gates = list(self.gates)
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if max(g.qubits) >= self.num_qubits:
            raise ValueError(f"gate {g.name}{g.qubits} outside a {self.num_qubits}-qubit circuit")

    def append(self, g: Gate) -> "Circuit":
        self._check(g)
        self.gates.append(g)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        n = max(self.num_qubits, other.num_qubits)
        return Circuit(n, self.gates + other.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, [g.inverse() for g in reversed(self.gates)])

    def remap(self, mapping: Mapping[int, int] | Sequence[int], num_qubits: int | None = None) -> "Circuit":
        """Relabel qubit ``q`` as ``mapping[q]``."""
        n = self.num_qubits if num_qubits is None else num_qubits
        out = Circuit(n)
        for g in self.gates:
            out.append(Gate(g.name, tuple(mapping[q] for q in g.qubits), g.param, g.matrix))
        return out

    @property
    def t_count(self) -> int:
        return sum(g.name in ("T", "TDG") for g in self.gates)

    @property
    def cnot_count(self) -> int:
        return sum(g.name == "CNOT" for g in self.gates)

    @property
    def depth(self) -> int:
        return depth(self)


def depth(c: Circuit) -> int:
    """ASAP layer count: every gate takes one layer on each qubit it touches."""
    level = [0] * c.num_qubits
    for g in c.gates:
        layer = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = layer
    return max(level, default=0)


# --------------------------------------------------------------------------
# matrices and states


def is_unitary(u: np.ndarray, tol: float = ALGEBRAIC_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) <= tol)


def num_qubits_of(dim: int) -> int:
    q = int(dim).bit_length() - 1
    if dim < 2 or 2**q != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return q


def kron(*mats: np.ndarray) -> np.ndarray:
    return reduce(np.kron, mats)


def embed(local: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Full ``2**n`` matrix of ``local`` acting on ``qubits`` (in that order)."""
    out = np.eye(2**n, dtype=complex)
    return _apply_to_axes(out.reshape([2] * n + [2**n]), local, list(qubits)).reshape(2**n, 2**n)


def basis_state(bits: str | Sequence[int]) -> np.ndarray:
    """State vector for a bit string, e.g. ``basis_state("01")``."""
    bits = [int(b) for b in bits]
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(map(str, bits)), 2)] = 1
    return v


def zero_state(n: int) -> np.ndarray:
    return basis_state([0] * n)


def density(state: np.ndarray) -> np.ndarray:
    """Density matrix of a state vector (identity on matrices)."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 2:
        return state
    return np.outer(state, state.conj())


def _apply_to_axes(tensor: np.ndarray, local: np.ndarray, axes: list[int]) -> np.ndarray:
    k = len(axes)
    op = local.reshape([2] * (2 * k))
    moved = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(moved, list(range(k)), axes)


def _state_qubits(state: np.ndarray) -> int:
    if state.ndim == 1:
        return num_qubits_of(state.shape[0])
    if state.ndim == 2 and state.shape[0] == state.shape[1]:
        return num_qubits_of(state.shape[0])
    raise ValueError(f"not a state vector or density matrix: shape {state.shape}")


def apply_matrix(state: np.ndarray, local: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply a local unitary to ``qubits`` of a state vector or density matrix."""
    state = np.asarray(state, dtype=complex)
    n = _state_qubits(state)
    qubits = list(qubits)
    if any(q < 0 or q >= n for q in qubits):
        raise IndexError(f"qubits {qubits} out of range for {n} qubits")
    if state.ndim == 1:
        return _apply_to_axes(state.reshape([2] * n), local, qubits).reshape(-1)
    t = _apply_to_axes(state.reshape([2] * (2 * n)), local, qubits)
    t = _apply_to_axes(t, local.conj(), [n + q for q in qubits])
    return t.reshape(2**n, 2**n)


def apply_gate(state: np.ndarray, g: Gate) -> np.ndarray:
    """``U|psi>`` for vectors, ``U rho U^dagger`` for density matrices."""
    return apply_matrix(state, g.unitary(), g.qubits)


def run(c: Circuit, state: np.ndarray | None = None) -> np.ndarray:
    """Apply every gate of ``c`` in order (default input ``|0...0>``)."""
    out = zero_state(c.num_qubits) if state is None else np.asarray(state, dtype=complex)
    for g in c.gates:
        out = apply_gate(out, g)
    return out


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Matrix of the whole circuit; the last gate in the list is the leftmost factor."""
    if c.num_qubits > MAX_DENSE_QUBITS:
        raise ValueError(f"{c.num_qubits} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}")
    n = c.num_qubits
    u = np.eye(2**n, dtype=complex).reshape([2] * n + [2**n])
    for g in c.gates:
        u = _apply_to_axes(u, g.unitary(), list(g.qubits))
    return u.reshape(2**n, 2**n)


PauliSpec = Union[str, Mapping[int, str]]


def pauli_operator(pauli: PauliSpec, n: int) -> np.ndarray:
    """Dense matrix of a Pauli string.

    ``pauli`` is either a full string such as ``"IY"`` (qubit 0 first) or a
    mapping ``{qubit: "X"|"Y"|"Z"}``.
    """
    ops = _pauli_list(pauli, n)
    return kron(*[PAULI[p] for p in ops])


def _pauli_list(pauli: PauliSpec, n: int) -> list[str]:
    if isinstance(pauli, str):
        if len(pauli) != n:
            raise IndexError(f"Pauli string {pauli!r} does not match {n} qubits")
        ops = list(pauli.upper())
    else:
        ops = ["I"] * n
        for q, p in pauli.items():
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} out of range for {n} qubits")
            ops[q] = p.upper()
    if any(p not in PAULI for p in ops):
        raise ValueError(f"invalid Pauli string {pauli!r}")
    return ops


def expectation(state: np.ndarray, pauli: PauliSpec) -> float:
    """``<psi|P|psi>`` or ``Tr(rho P)`` for a Pauli string ``P``."""
    state = np.asarray(state, dtype=complex)
    n = _state_qubits(state)
    ops = _pauli_list(pauli, n)
    out = state
    for q, p in enumerate(ops):
        if p != "I":
            out = _apply_one_side(out, PAULI[p], q, n)
    if state.ndim == 1:
        val = np.vdot(state, out)
    else:
        val = np.trace(out)
    return float(val.real)


def _apply_one_side(state: np.ndarray, local: np.ndarray, q: int, n: int) -> np.ndarray:
    # left multiplication only; for density matrices this is P rho
    if state.ndim == 1:
        return _apply_to_axes(state.reshape([2] * n), local, [q]).reshape(-1)
    return _apply_to_axes(state.reshape([2] * n + [2**n]), local, [q]).reshape(2**n, 2**n)


def distance_up_to_phase(u: np.ndarray, v: np.ndarray) -> float:
    """``min_theta ||u - e^{i theta} v||`` in operator norm, for unitaries.

    The eigenphases of ``v^dagger u`` lie on an arc of length ``delta``
    (2 pi minus the largest gap); the optimum puts ``theta`` at the arc's
    midpoint, giving ``2 sin(delta / 4)``.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    w = v.conj().T @ u
    if w.shape == (2, 2):
        c = min(abs(np.trace(w)) / 2, 1.0)
        return float(2 * np.sin(np.arccos(c) / 2))
    phases = np.sort(np.angle(np.linalg.eigvals(w)))
    gaps = np.diff(np.concatenate([phases, [phases[0] + 2 * np.pi]]))
    arc = 2 * np.pi - gaps.max()
    return float(2 * np.sin(max(arc, 0.0) / 4))


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = ALGEBRAIC_TOL) -> bool:
    return distance_up_to_phase(u, v) <= tol


def partial_trace(rho: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix on ``keep`` (kept in ascending qubit order)."""
    rho = density(rho)
    n = _state_qubits(rho)
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if any(q < 0 or q >= n for q in keep):
        raise IndexError(f"keep {keep} out of range for {n} qubits")
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for q in drop:
        cols[q] = rows[q]
    out = "".join(rows[q] for q in keep) + "".join(cols[q] for q in keep)
    d = 2 ** len(keep)
    return np.einsum("".join(rows) + "".join(cols) + "->" + out, t).reshape(d, d)
