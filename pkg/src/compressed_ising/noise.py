"""Noisy shot sampling, single-qubit tomography and fidelity scoring.

The noise model is depolarizing noise after every gate plus classical
readout flips. Expectations are computed exactly on the noisy density
matrix and shots are drawn from the resulting outcome distribution, so the
analytic value of any sampled estimate is always available.
"""

from __future__ import annotations

import configparser
import itertools
import math
import warnings
from dataclasses import asdict, dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .config import MAX_SHOTS
from .qsim import (
    PAULI,
    Circuit,
    Gate,
    apply_gate,
    apply_matrix,
    density,
    partial_trace,
    run,
    zero_state,
)

NOISE_KEYS = ("p_depol_1q", "p_depol_2q", "readout_flip_0to1", "readout_flip_1to0", "seed")
BUILTIN_NOISE = ("default", "calibration")
NOISE_ENV_VAR = "COMPRESSED_ISING_NOISE"


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing gate noise plus readout bit flips.

    Attributes:
        p_depol_1q: depolarizing probability after each single-qubit gate.
        p_depol_2q: two-qubit depolarizing probability after each CNOT.
        readout_flip_0to1: probability a 0 outcome is reported as 1.
        readout_flip_1to0: probability a 1 outcome is reported as 0.
        seed: root seed for shot sampling.
    """

    p_depol_1q: float = 0.0
    p_depol_2q: float = 0.0
    readout_flip_0to1: float = 0.0
    readout_flip_1to0: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        for key in NOISE_KEYS[:4]:
            value = getattr(self, key)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{key} = {value} is not a probability")

    @classmethod
    def off(cls, seed: int = 0) -> "NoiseModel":
        return cls(seed=seed)

    @property
    def is_noiseless(self) -> bool:
        return not any(getattr(self, k) for k in NOISE_KEYS[:4])

    def with_seed(self, seed: int) -> "NoiseModel":
        return replace(self, seed=seed)

    def dumps(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in asdict(self).items())

    @classmethod
    def loads(cls, text: str) -> "NoiseModel":
        parser = configparser.ConfigParser()
        parser.read_string("[noise]\n" + text)
        section = parser["noise"]
        unknown = set(section) - set(NOISE_KEYS)
        if unknown:
            raise ValueError(f"unknown noise keys: {sorted(unknown)}")
        missing = set(NOISE_KEYS) - set(section)
        if missing:
            raise ValueError(f"missing noise keys: {sorted(missing)}")
        values = {k: float(section[k]) for k in NOISE_KEYS[:4]}
        return cls(**values, seed=int(section["seed"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "NoiseModel":
        return cls.loads(Path(path).read_text())


def load_noise(spec: str | Path) -> NoiseModel:
    """Resolve ``"off"``, a shipped config name, or a file path to a model."""
    name = str(spec)
    if name in ("off", "none"):
        return NoiseModel.off()
    stem = name.removesuffix(".cfg")
    if stem in BUILTIN_NOISE and not Path(name).exists():
        text = resources.files("compressed_ising.data").joinpath(f"{stem}.cfg").read_text()
        return NoiseModel.loads(text)
    return NoiseModel.load(name)


# --------------------------------------------------------------------------
# noisy simulation


def _depolarize(rho: np.ndarray, qubits: tuple[int, ...], p: float) -> np.ndarray:
    """``(1 - p) rho + p * (I / 2^k) (x) Tr_qubits(rho)``, written as a Pauli twirl."""
    if p == 0.0:
        return rho
    k = len(qubits)
    twirl = np.zeros_like(rho)
    for labels in itertools.product("IXYZ", repeat=k):
        op = PAULI[labels[0]] if k == 1 else np.kron(PAULI[labels[0]], PAULI[labels[1]])
        twirl += apply_matrix(rho, op, qubits)
    return (1 - p) * rho + p * twirl / 4**k


def simulate_noisy(c: Circuit, noise: NoiseModel | None, state: np.ndarray | None = None) -> np.ndarray:
    """Density matrix after running ``c`` with depolarizing noise after each gate."""
    rho = density(zero_state(c.num_qubits) if state is None else state)
    for g in c.gates:
        rho = apply_gate(rho, g)
        if noise is not None:
            p = noise.p_depol_2q if g.name == "CNOT" else noise.p_depol_1q
            rho = _depolarize(rho, g.qubits, p)
    return rho


def _observable_map(observable: str | dict[int, str], n: int) -> dict[int, str]:
    if isinstance(observable, str):
        if len(observable) != n:
            raise ValueError(f"Pauli string {observable!r} does not match {n} qubits")
        items = {q: p for q, p in enumerate(observable.upper()) if p != "I"}
    else:
        items = {int(q): p.upper() for q, p in observable.items() if p.upper() != "I"}
    for q, p in items.items():
        if p not in "XYZ" or not 0 <= q < n:
            raise ValueError(f"invalid observable entry {q}: {p}")
    return items


def basis_change(observable: dict[int, str], n: int) -> Circuit:
    """Gates that rotate each measured Pauli onto Z: H for X, Sdg then H for Y."""
    gates: list[Gate] = []
    for q, p in sorted(observable.items()):
        if p == "X":
            gates.append(Gate("H", (q,)))
        elif p == "Y":
            gates += [Gate("SDG", (q,)), Gate("H", (q,))]
    return Circuit(n, gates)


def _readout_parity(rho: np.ndarray, qubits: list[int], noise: NoiseModel | None) -> float:
    n = int(round(math.log2(rho.shape[0])))
    probs = np.clip(np.real(np.diag(rho)), 0.0, None).reshape([2] * n)
    drop = tuple(q for q in range(n) if q not in qubits)
    marginal = probs.sum(axis=drop) if drop else probs
    f01 = noise.readout_flip_0to1 if noise else 0.0
    f10 = noise.readout_flip_1to0 if noise else 0.0
    confusion = np.array([[1 - f01, f10], [f01, 1 - f10]])
    for axis in range(len(qubits)):
        marginal = np.moveaxis(np.tensordot(confusion, marginal, axes=(1, axis)), 0, axis)
    signs = np.array([1.0, -1.0])
    parity = signs
    for _ in range(len(qubits) - 1):
        parity = np.multiply.outer(parity, signs)
    return float(np.sum(parity * marginal))


def noisy_expectation(
    prep: Circuit | np.ndarray,
    observable: str | dict[int, str],
    noise: NoiseModel | None,
) -> float:
    """Exact expectation of a Pauli product as read out on the noisy device.

    ``prep`` is a circuit run from ``|0...0>`` or an already prepared
    state. The basis change is applied with gate noise and the outcome
    passes through the readout confusion matrix.
    """
    if isinstance(prep, Circuit):
        rho = simulate_noisy(prep, noise)
        n = prep.num_qubits
    else:
        rho = density(prep)
        n = int(round(math.log2(rho.shape[0])))
    obs = _observable_map(observable, n)
    if not obs:
        return 1.0
    rho = simulate_noisy(basis_change(obs, n), noise, rho)
    return _readout_parity(rho, sorted(obs), noise)


@dataclass(frozen=True)
class ShotResult:
    """Empirical mean of a +-1 observable.

    ``shots`` is None for analytic (infinite-shot) evaluation, in which
    case ``estimate == expected`` and ``stderr == 0``.
    """

    observable: str
    shots: int | None
    estimate: float
    stderr: float
    expected: float


def _observable_label(observable: str | dict[int, str]) -> str:
    if isinstance(observable, str):
        return observable.upper()
    return ",".join(f"{p.upper()}{q}" for q, p in sorted(observable.items()))


def _rng(noise: NoiseModel | None, rng: np.random.Generator | None) -> np.random.Generator:
    if rng is not None:
        return rng
    return np.random.default_rng(noise.seed if noise is not None else 0)


def sample_expectation(
    prep: Circuit | np.ndarray,
    observable: str | dict[int, str],
    shots: int | None,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
    max_shots: int | None = MAX_SHOTS,
) -> ShotResult:
    """Estimate ``<observable>`` from ``shots`` noisy runs.

    Args:
        prep: preparation circuit or state.
        observable: Pauli string or ``{qubit: "X"|"Y"|"Z"}``.
        shots: number of runs, or None for the analytic value.
        noise: noise model; None means noiseless.
        rng: random generator; defaults to one seeded from ``noise.seed``.
        max_shots: device cap on runs per computation; None disables it.

    Raises:
        ValueError: for ``shots < 1`` or above the cap.
    """
    expected = noisy_expectation(prep, observable, noise)
    label = _observable_label(observable)
    if shots is None:
        return ShotResult(label, None, expected, 0.0, expected)
    if shots < 1:
        raise ValueError("shots must be at least 1")
    if max_shots is not None and shots > max_shots:
        raise ValueError(f"{shots} shots exceeds the cap of {max_shots}")
    p_plus = min(max((1 + expected) / 2, 0.0), 1.0)
    k = int(_rng(noise, rng).binomial(shots, p_plus))
    estimate = 2 * k / shots - 1
    stderr = math.sqrt(max(1 - estimate**2, 0.0) / shots)
    return ShotResult(label, shots, estimate, stderr, expected)


# --------------------------------------------------------------------------
# tomography


@dataclass(frozen=True)
class BlochEstimate:
    """Direct-inversion Bloch vector; its length may exceed 1."""

    x: float
    y: float
    z: float
    rescaled: bool = False
    stderr: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.vector))

    def density(self) -> np.ndarray:
        """``(I + x X + y Y + z Z) / 2``, possibly not positive."""
        return 0.5 * (PAULI["I"] + self.x * PAULI["X"] + self.y * PAULI["Y"] + self.z * PAULI["Z"])

    def rescale(self, eta: float) -> "BlochEstimate":
        """Divide every component by ``eta``."""
        if not eta > 0:
            raise ValueError(f"cannot rescale by eta = {eta}")
        x, y, z = self.vector / eta
        se = tuple(s / eta for s in self.stderr)
        return BlochEstimate(float(x), float(y), float(z), True, se)

    def clipped(self) -> "BlochEstimate":
        """Project onto the unit ball (an opt-in convenience, never applied implicitly)."""
        r = self.length
        if r <= 1:
            return self
        x, y, z = self.vector / r
        return BlochEstimate(float(x), float(y), float(z), self.rescaled, self.stderr)


def tomograph_qubit(
    prep: Circuit,
    qubit: int,
    shots: int | None = MAX_SHOTS,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
) -> BlochEstimate:
    """Estimate one qubit's Bloch vector from X, Y and Z experiments."""
    if not 0 <= qubit < prep.num_qubits:
        raise IndexError(f"qubit {qubit} outside a {prep.num_qubits}-qubit circuit")
    gen = _rng(noise, rng)
    results = [sample_expectation(prep, {qubit: p}, shots, noise, gen) for p in "XYZ"]
    x, y, z = (r.estimate for r in results)
    return BlochEstimate(x, y, z, False, tuple(r.stderr for r in results))


def _ideal_qubit_state(ideal: Gate | Circuit | np.ndarray, qubit: int) -> np.ndarray:
    if isinstance(ideal, Gate):
        n = max(ideal.qubits) + 1
        ideal = Circuit(n, [ideal])
    if isinstance(ideal, Circuit):
        ideal = run(ideal)
    rho = density(ideal)
    if rho.shape[0] == 2:
        return rho
    return partial_trace(rho, [qubit])


def overlap(
    ideal: Gate | Circuit | np.ndarray,
    estimate: BlochEstimate | np.ndarray,
    qubit: int = 0,
) -> float:
    """``Tr(sigma rho_hat)`` for the ideal single-qubit state ``sigma``.

    ``ideal`` is a gate or circuit applied to ``|0...0>`` (reduced to
    ``qubit``) or an explicit state.
    """
    sigma = _ideal_qubit_state(ideal, qubit)
    rho = estimate.density() if isinstance(estimate, BlochEstimate) else np.asarray(estimate)
    return float(np.real(np.trace(sigma @ rho)))


def fidelity(
    ideal: Gate | Circuit | np.ndarray,
    estimate: BlochEstimate | np.ndarray,
    qubit: int = 0,
) -> float:
    """``sqrt(<ideal| rho_hat |ideal>)`` with the overlap clipped to [0, 1].

    Raises:
        ValueError: if the overlap is below -1e-6 (a badly unphysical estimate).
    """
    ov = overlap(ideal, estimate, qubit)
    if ov < -1e-6:
        raise ValueError(f"overlap {ov:.6g} is negative; the estimate is badly unphysical")
    if not 0.0 <= ov <= 1.0:
        warnings.warn(f"overlap {ov:.12g} clipped to [0, 1]", stacklevel=2)
    return math.sqrt(min(max(ov, 0.0), 1.0))


def calibrate_eta(
    noise: NoiseModel | None,
    shots: int | None = MAX_SHOTS,
    rng: np.random.Generator | None = None,
) -> float:
    """``p(0 | |0>) - p(0 | |1>)``, with ``|1>`` prepared by a noisy X gate.

    Raises:
        ValueError: if eta is not positive, since rescaling would be meaningless.
    """
    gen = _rng(noise, rng)
    zero = sample_expectation(Circuit(1), "Z", shots, noise, gen)
    one = sample_expectation(Circuit(1, [Gate("X", (0,))]), "Z", shots, noise, gen)
    # p(0) = (1 + <Z>) / 2
    eta = (zero.estimate - one.estimate) / 2
    if not eta > 0:
        raise ValueError(f"eta = {eta:.6g} is not positive; rescaling refused")
    return float(eta)


# --------------------------------------------------------------------------
# single-gate fidelity table

GATE_TABLE = ("1", "H", "T", "S", "SDG", "X", "CNOT")


def gate_experiment(label: str) -> tuple[Circuit, int]:
    """Preparation circuit and tomographed qubit for one row of the gate table.

    The identity row is an empty circuit. CNOT acts on ``|00>`` with qubit 0
    as control and the target qubit is tomographed against ``|0>``.
    """
    name = label.upper()
    if name in ("1", "I", "ID"):
        return Circuit(1), 0
    if name == "CNOT":
        return Circuit(2, [Gate("CNOT", (0, 1))]), 1
    return Circuit(1, [Gate(name, (0,))]), 0


@dataclass(frozen=True)
class GateFidelity:
    gate: str
    bloch: BlochEstimate
    fidelity: float


def gate_fidelity_table(
    noise: NoiseModel | None,
    shots: int | None = MAX_SHOTS,
    gates: tuple[str, ...] = GATE_TABLE,
    seed: int | None = None,
) -> list[GateFidelity]:
    """Tomograph each gate applied to ``|0>`` and score it against the ideal state."""
    if seed is None:
        seed = noise.seed if noise is not None else 0
    root = np.random.SeedSequence(seed)
    rows = []
    for label, child in zip(gates, root.spawn(len(gates))):
        prep, qubit = gate_experiment(label)
        est = tomograph_qubit(prep, qubit, shots, noise, np.random.default_rng(child))
        rows.append(GateFidelity(label, est, fidelity(prep, est, qubit)))
    return rows
