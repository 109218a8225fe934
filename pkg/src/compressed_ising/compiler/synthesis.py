"""Search-based Clifford+T approximation of single-qubit unitaries.

All gate sequences over {H, S, Sdg, T, Tdg, X, Y, Z} up to a length bound
are enumerated breadth-first. Sequences that produce the same unitary (up
to global phase) with the same T-count are collapsed to the first one met,
which is the shortest and, among those, the lexicographically smallest.
The table for a length bound is therefore exhaustive: every sequence
within the bound has a representative with the same unitary, the same
T-count and no greater length.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..qsim import FIXED_GATES, Gate, distance_up_to_phase

ALPHABET = tuple(sorted(FIXED_GATES))  # H, S, SDG, T, TDG, X, Y, Z
_MATS = np.array([FIXED_GATES[g] for g in ALPHABET])
_IS_T = np.array([g in ("T", "TDG") for g in ALPHABET])
_ERR_DECIMALS = 12


@dataclass(frozen=True)
class SynthesisBudget:
    """Limits for one synthesized single-qubit gate.

    Attributes:
        max_t_count: T and Tdg gates allowed in the sequence.
        target_epsilon: operator-norm error regarded as good enough.
        max_total_length: gates allowed in the sequence (its depth).
    """

    max_t_count: int = 10
    target_epsilon: float = 1e-2
    max_total_length: int = 12

    def __post_init__(self) -> None:
        if self.max_t_count < 0 or self.max_total_length < 0 or not self.target_epsilon > 0:
            raise ValueError("synthesis budget needs non-negative limits and a positive epsilon")


@dataclass(frozen=True)
class SynthesisResult:
    sequence: tuple[str, ...]
    error: float
    t_count: int
    target_epsilon: float = float("inf")

    @property
    def meets_target(self) -> bool:
        return self.error <= self.target_epsilon

    def gates(self, qubit: int) -> list[Gate]:
        return [Gate(name, (qubit,)) for name in self.sequence]


def _phase_keys(mats: np.ndarray) -> np.ndarray:
    flat = mats.reshape(len(mats), 4)
    first = np.argmax(np.abs(flat) > 1e-6, axis=1)
    ph = flat[np.arange(len(flat)), first]
    flat = flat * np.conj(ph / np.abs(ph))[:, None]
    return np.round(np.concatenate([flat.real, flat.imag], axis=1) * 1e8).astype(np.int64)


class _Table:
    """Deduplicated sequences grown one length at a time."""

    def __init__(self) -> None:
        self.mats = [np.eye(2, dtype=complex)[None]]
        self.tcount = [np.zeros(1, dtype=int)]
        self.length = [np.zeros(1, dtype=int)]
        self.seqs: list[tuple[str, ...]] = [()]
        self._seen = {(tuple(_phase_keys(self.mats[0])[0]), 0)}
        self._frontier = (self.mats[0], self.tcount[0], [()])
        self.max_length = 0

    def grow(self, length: int) -> None:
        while self.max_length < length:
            mats, tc, seqs = self._frontier
            # child (parent p, gate g) sits at p * len(ALPHABET) + g: lexicographic order
            new = np.einsum("gij,njk->ngik", _MATS, mats).reshape(-1, 2, 2)
            new_t = (tc[:, None] + _IS_T[None, :]).reshape(-1)
            keys = _phase_keys(new)
            keep = []
            for i, (k, t) in enumerate(zip(map(tuple, keys), new_t.tolist())):
                if (k, t) not in self._seen:
                    self._seen.add((k, t))
                    keep.append(i)
            na = len(ALPHABET)
            new_seqs = [seqs[i // na] + (ALPHABET[i % na],) for i in keep]
            self.max_length += 1
            self._frontier = (new[keep], new_t[keep], new_seqs)
            self.mats.append(new[keep])
            self.tcount.append(new_t[keep])
            self.length.append(np.full(len(keep), self.max_length))
            self.seqs.extend(new_seqs)
        self._flat = None

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if getattr(self, "_flat", None) is None:
            self._flat = (
                np.concatenate(self.mats),
                np.concatenate(self.tcount),
                np.concatenate(self.length),
            )
        return self._flat


@lru_cache(maxsize=1)
def _table() -> _Table:
    return _Table()


def _errors(cands: np.ndarray, u: np.ndarray) -> np.ndarray:
    tr = np.abs(np.einsum("nij,ij->n", cands.conj(), u)) / 2
    return 2 * np.sin(np.arccos(np.minimum(tr, 1.0)) / 2)


def synthesize_single_qubit(u: np.ndarray, budget: SynthesisBudget) -> SynthesisResult:
    """Best Clifford+T sequence for ``u`` within ``budget``.

    Minimizes ``distance_up_to_phase``; ties go to the shorter, then the
    lexicographically smaller sequence. A zero-length budget yields the
    empty (identity) sequence with its error reported.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError("expected a 2x2 unitary")
    table = _table()
    table.grow(budget.max_total_length)
    mats, tc, ln = table.arrays()
    mask = (tc <= budget.max_t_count) & (ln <= budget.max_total_length)
    idx = np.flatnonzero(mask)
    err = np.round(_errors(mats[idx], u), _ERR_DECIMALS)
    best = idx[int(np.argmin(err))]
    seq = table.seqs[best]
    error = distance_up_to_phase(_product(seq), u)
    return SynthesisResult(seq, error, int(tc[best]), budget.target_epsilon)


def _product(seq: tuple[str, ...]) -> np.ndarray:
    out = np.eye(2, dtype=complex)
    for name in seq:
        out = FIXED_GATES[name] @ out
    return out


def sequence_unitary(seq) -> np.ndarray:
    """Matrix of a gate-name sequence, first name applied first."""
    return _product(tuple(seq))


def is_clifford_t_exact(u: np.ndarray, max_length: int = 12, tol: float = 1e-9) -> tuple[str, ...] | None:
    """Return a short exact sequence for ``u`` if one exists within ``max_length``."""
    res = synthesize_single_qubit(u, SynthesisBudget(max_t_count=max_length, max_total_length=max_length))
    return res.sequence if res.error <= tol else None
