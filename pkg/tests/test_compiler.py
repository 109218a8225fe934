from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from compressed_ising import compressed
from compressed_ising.compiler import (
    SynthesisBudget,
    Topology,
    canonical_coordinates,
    compile_full,
    depth,
    interaction,
    kak_decompose,
    route,
    sequence_unitary,
    synthesize_single_qubit,
)
from compressed_ising.compiler.pipeline import DepthBudgetExceeded
from compressed_ising.qsim import (
    FIXED_GATES,
    GATE_SET,
    Circuit,
    circuit_unitary,
    distance_up_to_phase,
    gate,
    kron,
    phase_matrix,
)

CNOT = np.eye(4)[[0, 1, 3, 2]].astype(complex)
SWAP = np.eye(4)[[0, 2, 1, 3]].astype(complex)


def brute_force_min_error(u, max_len, max_t):
    """Exhaustive oracle: every word over the 8-letter alphabet up to max_len."""
    names = sorted(FIXED_GATES)
    best = distance_up_to_phase(np.eye(2), u)
    for n in range(1, max_len + 1):
        for word in itertools.product(names, repeat=n):
            if sum(w in ("T", "TDG") for w in word) > max_t:
                continue
            m = np.eye(2, dtype=complex)
            for w in word:
                m = FIXED_GATES[w] @ m
            best = min(best, distance_up_to_phase(m, u))
    return best


# ---------------------------------------------------------------- synthesis


@pytest.mark.parametrize("phi,expected", [(np.pi / 4, ("T",)), (np.pi / 2, ("S",)), (0.0, ())])
def test_exact_phase_gates(phi, expected):
    res = synthesize_single_qubit(phase_matrix(phi), SynthesisBudget(10, 1e-3, 12))
    assert res.sequence == expected
    assert res.error == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("max_t", [0, 1, 2])
def test_synthesis_matches_exhaustive_enumeration(max_t):
    u = phase_matrix(0.1)
    res = synthesize_single_qubit(u, SynthesisBudget(max_t, 1e-3, 4))
    assert res.error == pytest.approx(brute_force_min_error(u, 4, max_t), abs=1e-12)
    assert res.t_count <= max_t


def test_phase_point_one_with_t_budget_ten():
    u = phase_matrix(0.1)
    res = synthesize_single_qubit(u, SynthesisBudget(10, 1e-3, 5))
    assert res.error == pytest.approx(brute_force_min_error(u, 5, 10), abs=1e-12)


def test_reported_error_is_the_sequence_distance():
    u = unitary_group.rvs(2, random_state=3)
    res = synthesize_single_qubit(u, SynthesisBudget(6, 1e-3, 10))
    assert res.error == pytest.approx(distance_up_to_phase(sequence_unitary(res.sequence), u))
    assert set(res.sequence) <= set(FIXED_GATES)


def test_empty_budget_returns_identity_with_error():
    u = phase_matrix(0.7)
    res = synthesize_single_qubit(u, SynthesisBudget(0, 1e-3, 0))
    assert res.sequence == ()
    assert res.error == pytest.approx(distance_up_to_phase(np.eye(2), u))
    assert not res.meets_target


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_more_t_gates_never_hurt(seed):
    u = unitary_group.rvs(2, random_state=seed)
    errors = [synthesize_single_qubit(u, SynthesisBudget(t, 1e-3, 10)).error for t in range(7)]
    assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))


def test_synthesis_is_deterministic():
    u = unitary_group.rvs(2, random_state=11)
    b = SynthesisBudget(5, 1e-3, 10)
    assert synthesize_single_qubit(u, b) == synthesize_single_qubit(u, b)


def test_budget_validation():
    with pytest.raises(ValueError):
        SynthesisBudget(-1, 1e-3, 4)
    with pytest.raises(ValueError):
        SynthesisBudget(1, 0.0, 4)


# ---------------------------------------------------------------- kak


def test_kak_cnot_is_one_gate():
    c = kak_decompose(CNOT)
    assert [g.name for g in c.gates] == ["CNOT"]


def test_kak_swap_uses_three_cnots():
    c = kak_decompose(SWAP)
    assert c.cnot_count == 3
    assert distance_up_to_phase(circuit_unitary(c), SWAP) < 1e-9


def test_kak_controlled_phase_uses_two_cnots():
    u = np.diag([1, 1, 1, np.exp(0.3j)])
    c = kak_decompose(u)
    assert c.cnot_count == 2
    assert distance_up_to_phase(circuit_unitary(c), u) < 1e-9


def test_kak_local_needs_no_cnot():
    u = kron(unitary_group.rvs(2, random_state=1), unitary_group.rvs(2, random_state=2))
    c = kak_decompose(u)
    assert c.cnot_count == 0
    assert distance_up_to_phase(circuit_unitary(c), u) < 1e-9


@pytest.mark.parametrize("seed", range(30))
def test_kak_round_trip(seed):
    u = unitary_group.rvs(4, random_state=seed)
    c = kak_decompose(u)
    assert c.cnot_count <= 3
    assert sum(g.name != "CNOT" for g in c.gates) <= 8
    assert distance_up_to_phase(circuit_unitary(c), u) < 1e-9


def test_kak_rejects_non_unitary():
    with pytest.raises(ValueError):
        kak_decompose(np.ones((4, 4)))
    with pytest.raises(ValueError):
        kak_decompose(np.eye(2))


@pytest.mark.parametrize("abc", [(0.3, 0.2, -0.1), (0.7, 0.0, 0.1), (np.pi / 4, 0, 0)])
def test_canonical_coordinates_reconstruct(abc):
    u = kron(unitary_group.rvs(2, random_state=4), unitary_group.rvs(2, random_state=5))
    u = u @ interaction(*abc)
    k1, coords, k2 = canonical_coordinates(u)
    assert all(-np.pi / 4 - 1e-9 < x <= np.pi / 4 + 1e-9 for x in coords)
    assert distance_up_to_phase(k1 @ interaction(*coords) @ k2, u) < 1e-9


# ---------------------------------------------------------------- routing


def test_route_keeps_hub_targeted_cnot():
    c = Circuit(3, [gate("CNOT", 1, 2)])
    assert route(c, Topology(3, 2)).gates == c.gates


def test_route_reverses_with_hadamards():
    out = route(Circuit(3, [gate("CNOT", 2, 1)]), Topology(3, 2))
    hs = [gate("H", 2), gate("H", 1)]
    assert out.gates == [*hs, gate("CNOT", 1, 2), *hs]


def test_route_swaps_through_hub():
    c = Circuit(3, [gate("CNOT", 0, 1)])
    topo = Topology(3, 2)
    out = route(c, topo)
    assert all(g.qubits[1] == 2 for g in out.gates if g.name == "CNOT")
    assert out.cnot_count == 7
    assert distance_up_to_phase(circuit_unitary(out), circuit_unitary(c)) < 1e-9


def random_circuit(rng, n, length):
    gates = []
    for _ in range(length):
        if rng.random() < 0.4:
            a, b = rng.choice(n, 2, replace=False)
            gates.append(gate("CNOT", int(a), int(b)))
        else:
            gates.append(gate(str(rng.choice(sorted(FIXED_GATES))), int(rng.integers(n))))
    return Circuit(n, gates)


@pytest.mark.parametrize("seed", range(100))
def test_route_preserves_unitary_and_depth_bound(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    c = random_circuit(rng, n, 12)
    topo = Topology(n, int(rng.integers(n)))
    out = route(c, topo)
    assert all(topo.allows(g) for g in out.gates)
    assert distance_up_to_phase(circuit_unitary(out), circuit_unitary(c)) < 1e-9
    assert depth(out) >= depth(c)


def test_topology_validation():
    with pytest.raises(ValueError):
        Topology(2, 2)
    assert Topology(3, 1).allowed_controls == (0, 2)


# ---------------------------------------------------------------- pipeline


def test_compile_cnot():
    r = compile_full(CNOT, Topology(2, 1))
    assert r.circuit.gates == [gate("CNOT", 0, 1)]
    assert r.synthesis_error == 0.0
    assert r.depth == 1


@pytest.mark.parametrize("seed", range(10))
def test_compile_round_trip_within_bound(seed):
    u = unitary_group.rvs(4, random_state=100 + seed)
    r = compile_full(u)
    assert {g.name for g in r.circuit.gates} <= GATE_SET
    assert all(g.qubits[1] == 0 for g in r.circuit.gates if g.name == "CNOT")
    assert distance_up_to_phase(circuit_unitary(r.circuit), u) <= r.synthesis_error + 1e-9
    assert r.depth <= 39 and not r.over_budget


def test_compile_controlled_phase():
    u = np.diag([1, 1, 1, np.exp(0.3j)])
    r = compile_full(u)
    assert r.cnot_count == 2
    assert distance_up_to_phase(circuit_unitary(r.circuit), u) <= r.synthesis_error + 1e-9


def test_compile_three_qubit_step_reports_routing():
    c = compressed.build_step_circuit_3q(0.3, 0.1)
    r = compile_full(c, Topology(3, 1), max_depth=None)
    assert r.routing_cnots > 0
    assert all(g.qubits[1] == 1 for g in r.circuit.gates if g.name == "CNOT")
    assert distance_up_to_phase(circuit_unitary(r.circuit), circuit_unitary(c)) <= r.synthesis_error + 1e-9


def test_depth_limit_lowers_sequence_length():
    u = unitary_group.rvs(4, random_state=7)
    loose = compile_full(u, max_depth=None)
    tight = compile_full(u, max_depth=20)
    assert tight.depth <= 20 < loose.depth
    assert tight.length_cap < loose.length_cap


def test_infeasible_depth_is_flagged_or_raised():
    u = unitary_group.rvs(4, random_state=7)
    r = compile_full(u, max_depth=2)
    assert r.over_budget
    with pytest.raises(DepthBudgetExceeded) as info:
        compile_full(u, max_depth=2, strict=True)
    assert info.value.attempt.depth > 2


def test_compile_rejects_large_matrix():
    with pytest.raises(ValueError):
        compile_full(np.eye(8))


@pytest.mark.parametrize(
    "gates,expected",
    [([], 0), ([gate("H", 0), gate("H", 1)], 1), ([gate("H", 0), gate("CNOT", 0, 1), gate("H", 1)], 3)],
)
def test_depth(gates, expected):
    assert depth(Circuit(2, gates)) == expected

