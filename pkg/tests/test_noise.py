from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compressed_ising.noise import (
    GATE_TABLE,
    BlochEstimate,
    NoiseModel,
    _depolarize,
    calibrate_eta,
    fidelity,
    gate_experiment,
    gate_fidelity_table,
    load_noise,
    noisy_expectation,
    overlap,
    sample_expectation,
    simulate_noisy,
    tomograph_qubit,
)
from compressed_ising.qsim import Circuit, density, gate, partial_trace, run

PLUS = Circuit(1, [gate("H", 0)])


def readout_only(f01=0.0, f10=0.0):
    return NoiseModel(0.0, 0.0, f01, f10, seed=7)


# ------------------------------------------------------------ model / config


def test_config_round_trip(tmp_path):
    m = NoiseModel(0.01, 0.05, 0.02, 0.03, seed=99)
    assert NoiseModel.loads(m.dumps()) == m
    path = tmp_path / "n.cfg"
    m.save(path)
    assert load_noise(path) == m


@pytest.mark.parametrize(
    "text",
    [
        "p_depol_1q = 0.1\np_depol_2q = 0.1\nreadout_flip_0to1 = 0\nreadout_flip_1to0 = 0\n",
        "p_depol_1q = 0.1\np_depol_2q = 0.1\nreadout_flip_0to1 = 0\nreadout_flip_1to0 = 0\nseed = 1\nextra = 2\n",
        "p_depol_1q = 1.5\np_depol_2q = 0.1\nreadout_flip_0to1 = 0\nreadout_flip_1to0 = 0\nseed = 1\n",
    ],
)
def test_config_rejects_bad_files(text):
    with pytest.raises(ValueError):
        NoiseModel.loads(text)


def test_shipped_configs_and_off():
    assert load_noise("off").is_noiseless
    for name in ("default", "calibration", "default.cfg"):
        assert not load_noise(name).is_noiseless


# ------------------------------------------------------------ channel


def explicit_depolarize(rho, qubit, n, p):
    """(1 - p) rho + p * I/2 (x) Tr_q(rho), assembled by kron on the chosen slot."""
    rest = [k for k in range(n) if k != qubit]
    reduced = partial_trace(rho, rest)
    # reorder so that the depolarized qubit goes back to its slot
    full = np.kron(np.eye(2) / 2, reduced)
    perm = [qubit] + rest
    inv = np.argsort(perm)
    full = full.reshape([2] * 2 * n).transpose(list(inv) + [n + i for i in inv]).reshape(2**n, 2**n)
    return (1 - p) * rho + p * full


@pytest.mark.parametrize("qubit", [0, 1, 2])
def test_single_qubit_depolarizing_matches_formula(qubit):
    rng = np.random.default_rng(qubit)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    rho = density(psi / np.linalg.norm(psi))
    assert np.allclose(_depolarize(rho, (qubit,), 0.3), explicit_depolarize(rho, qubit, 3, 0.3))


def test_full_two_qubit_depolarizing_gives_identity():
    rho = density(run(Circuit(2, [gate("H", 0), gate("CNOT", 0, 1)])))
    assert np.allclose(_depolarize(rho, (0, 1), 1.0), np.eye(4) / 4)


def test_noisy_simulation_preserves_trace():
    noise = NoiseModel(0.1, 0.2, 0.0, 0.0)
    c = Circuit(3, [gate("H", 0), gate("CNOT", 0, 2), gate("T", 1), gate("CNOT", 1, 0)])
    rho = simulate_noisy(c, noise)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.all(np.linalg.eigvalsh(rho) > -1e-12)


def test_depolarized_bloch_component_shrinks_by_one_minus_p():
    # H then the X basis change H: two noisy gates, each shrinking by (1 - p)
    p = 0.1
    e = noisy_expectation(PLUS, "X", NoiseModel(p, 0.0, 0.0, 0.0))
    assert e == pytest.approx((1 - p) ** 2, abs=1e-12)


# ------------------------------------------------------------ sampling


@pytest.mark.parametrize("shots", [1, 17, 8192])
def test_zero_state_z_is_exactly_one(shots):
    assert sample_expectation(Circuit(1), "Z", shots).estimate == 1.0


def test_plus_state_z_is_fair_coin():
    r = sample_expectation(PLUS, "Z", 8192, rng=np.random.default_rng(3))
    assert abs(r.estimate) <= 4 * max(r.stderr, 1 / math.sqrt(8192))


def test_readout_flip_shifts_z():
    r = sample_expectation(Circuit(1), "Z", 10**6, readout_only(0.05), max_shots=None)
    assert r.expected == pytest.approx(1 - 2 * 0.05)
    assert abs(r.estimate - 0.90) <= 4 * r.stderr


def test_shot_cap_and_minimum():
    with pytest.raises(ValueError):
        sample_expectation(Circuit(1), "Z", 8193)
    with pytest.raises(ValueError):
        sample_expectation(Circuit(1), "Z", 0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), shots=st.integers(1, 8192), angle=st.floats(-3.0, 3.0))
def test_stderr_invariant(seed, shots, angle):
    c = Circuit(1, [gate("ROTY", 0, param=angle)])
    r = sample_expectation(c, "Z", shots, rng=np.random.default_rng(seed))
    assert abs(r.estimate) <= 1
    assert r.stderr == pytest.approx(math.sqrt((1 - r.estimate**2) / shots), abs=1e-12)


def test_determinism():
    noise = load_noise("default")
    c = Circuit(2, [gate("H", 0), gate("CNOT", 0, 1), gate("T", 1)])
    a = sample_expectation(c, "XY", 4096, noise)
    b = sample_expectation(c, "XY", 4096, noise)
    assert a == b


def test_unbiased_against_analytic_noisy_value():
    noise = load_noise("default")
    c = Circuit(2, [gate("H", 0), gate("T", 0), gate("CNOT", 0, 1), gate("H", 1)])
    for seed in range(20):
        r = sample_expectation(c, {0: "X"}, 10**5, noise, np.random.default_rng(seed), max_shots=None)
        assert abs(r.estimate - r.expected) <= 5 * r.stderr


def test_analytic_mode():
    r = sample_expectation(PLUS, "X", None)
    assert (r.estimate, r.stderr, r.shots) == (pytest.approx(1.0), 0.0, None)


# ------------------------------------------------------------ tomography


@pytest.mark.parametrize(
    "prep,expected",
    [
        (PLUS, (1, 0, 0)),
        (Circuit(1), (0, 0, 1)),
        (Circuit(1, [gate("H", 0), gate("S", 0)]), (0, 1, 0)),
    ],
)
def test_noiseless_tomography(prep, expected):
    est = tomograph_qubit(prep, 0, shots=None)
    assert np.allclose(est.vector, expected, atol=1e-12)


def test_tomography_rejects_bad_qubit():
    with pytest.raises(IndexError):
        tomograph_qubit(Circuit(1), 1)


def test_fidelity_exact_state():
    h_state = density(run(PLUS))
    assert fidelity(gate("H", 0), h_state) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_of_shrunk_x_component():
    # an <X> of 2 * 0.9963^2 - 1 gives an overlap of 0.9963^2, so F = 0.9963
    est = BlochEstimate(2 * 0.9963**2 - 1, 0.0, 0.0)
    assert fidelity(gate("H", 0), est) == pytest.approx(0.9963, abs=1e-12)


def test_fidelity_of_maximally_mixed_state():
    assert fidelity(Circuit(1), BlochEstimate(0, 0, 0)) == pytest.approx(math.sqrt(0.5))


def test_fidelity_refuses_badly_unphysical_estimate():
    with pytest.raises(ValueError):
        fidelity(Circuit(1), BlochEstimate(0, 0, -1.2))


def test_fidelity_warns_when_clipping():
    est = BlochEstimate(0, 0, 1.05)
    with pytest.warns(UserWarning):
        assert fidelity(Circuit(1), est) == 1.0
    assert overlap(Circuit(1), est) == pytest.approx(1.025)


def test_clipped_is_opt_in():
    est = BlochEstimate(0.0, 0.0, 1.2)
    assert est.length == pytest.approx(1.2)
    assert est.clipped().length == pytest.approx(1.0)


# ------------------------------------------------------------ eta


def test_eta_noiseless():
    assert calibrate_eta(None, None) == 1.0


def test_eta_symmetric_readout():
    eta = calibrate_eta(readout_only(0.024, 0.024), None)
    assert eta == pytest.approx(1 - 2 * 0.024)
    assert 1 / eta == pytest.approx(1.05, abs=0.01)


def test_eta_asymmetric_readout():
    assert calibrate_eta(readout_only(0.02, 0.03), None) == pytest.approx(0.95)


def test_eta_refuses_pathological_noise():
    with pytest.raises(ValueError):
        calibrate_eta(readout_only(0.6, 0.6), None)


def test_rescaling_recovers_unit_z():
    noise = readout_only(0.04, 0.04)
    rng = np.random.default_rng(11)
    eta = calibrate_eta(noise, 8192, rng)
    est = tomograph_qubit(Circuit(1), 0, 8192, noise, rng).rescale(eta)
    assert est.rescaled
    assert abs(est.z - 1) <= 5 * est.stderr[2] + 5 * math.sqrt(2 / 8192) / eta


def test_rescale_rejects_nonpositive_eta():
    with pytest.raises(ValueError):
        BlochEstimate(0, 0, 1).rescale(0.0)


# ------------------------------------------------------------ gate table


def test_gate_experiments():
    assert gate_experiment("1") == (Circuit(1), 0)
    c, q = gate_experiment("CNOT")
    assert (c.num_qubits, q) == (2, 1)


@pytest.mark.parametrize("shots", [None, 8192])
def test_noiseless_table_fidelity_is_one(shots):
    rows = gate_fidelity_table(None, shots)
    assert [r.gate for r in rows] == list(GATE_TABLE)
    # every ideal state is an eigenstate of its scored axis, so shots add no noise
    for r in rows:
        assert r.fidelity == pytest.approx(1.0, abs=1e-12)


def test_default_noise_table_in_band():
    rows = gate_fidelity_table(load_noise("default"), None)
    for r in rows:
        assert 0.94 <= r.fidelity <= 1.0
