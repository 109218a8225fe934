from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import eigh, expm

from compressed_ising import oracle
from compressed_ising.compressed import Schedule

X = np.array([[0, 1], [1, 0]])
Z = np.diag([1, -1])


def op_at(single, site, n):
    mats = [np.eye(2)] * n
    mats[site] = single
    out = np.array([[1.0]])
    for m in mats:
        out = np.kron(out, m)
    return out


def dense_parts(n):
    hz = sum(op_at(Z, k, n) for k in range(n))
    hxx = sum(op_at(X, k, n) @ op_at(X, k + 1, n) for k in range(n - 1))
    return hz, hxx


def dense_trotter(n, J, schedule, symmetric=False):
    """Independent reference with matrix exponentials of the dense Hamiltonian parts."""
    hz, hxx = dense_parts(n)
    dt = schedule.dt
    psi = np.zeros(2**n, dtype=complex)
    psi[-1] = 1
    for l in range(1, schedule.steps_for(J) + 1):
        jl = schedule.coupling(l)
        if symmetric:
            half = expm(-0.5j * dt * hz)
            psi = half @ expm(-1j * dt * jl * hxx) @ half @ psi
        else:
            psi = expm(-1j * dt * jl * hxx) @ expm(-1j * dt * hz) @ psi
    return np.mean([np.vdot(psi, op_at(Z, k, n) @ psi).real for k in range(n)])


@pytest.mark.parametrize("n,J", [(2, 0.5), (3, 1.3), (4, 0.0)])
def test_hamiltonian_matches_kron_construction(n, J):
    hz, hxx = dense_parts(n)
    assert np.allclose(oracle.hamiltonian(oracle.IsingChainSpec(n, J)), hz + J * hxx)


def test_zero_coupling_ground_state_is_all_down():
    for n in (2, 4, 8):
        assert oracle.exact_ground_magnetization(oracle.IsingChainSpec(n, 0.0)) == pytest.approx(-1.0)


@pytest.mark.parametrize("n,J", [(4, 0.5), (4, 1.0), (6, 1.7)])
def test_ground_magnetization_matches_dense_eigh(n, J):
    hz, hxx = dense_parts(n)
    # lowest eigenpair only, via a different LAPACK driver than the package uses
    _, v = eigh(hz + J * hxx, subset_by_index=[0, 0], driver="evr")
    psi = v[:, 0]
    expected = np.mean([psi @ op_at(Z, k, n) @ psi for k in range(n)])
    assert oracle.exact_ground_magnetization(oracle.IsingChainSpec(n, J)) == pytest.approx(expected, abs=1e-10)


def test_per_site_values_average_to_default():
    spec = oracle.IsingChainSpec(4, 1.2)
    per_site = [oracle.exact_ground_magnetization(spec, site=k) for k in range(4)]
    assert np.mean(per_site) == pytest.approx(oracle.exact_ground_magnetization(spec))
    # reflection symmetry of the open chain
    assert per_site[0] == pytest.approx(per_site[3], abs=1e-10)


@pytest.mark.parametrize("splitting", ["field-first", "symmetric"])
@pytest.mark.parametrize("n,J", [(3, 1.0), (4, 2.0)])
def test_trotter_matches_dense_expm(splitting, n, J):
    sched = Schedule(2.0, 20, 0.1)
    got = oracle.full_chain_trotter(oracle.IsingChainSpec(n, J), sched, splitting=splitting)
    assert got == pytest.approx(dense_trotter(n, J, sched, splitting == "symmetric"), abs=1e-12)


def test_slow_ramp_tracks_ground_state():
    sched = Schedule(2.0, 600, 0.1)
    spec = oracle.IsingChainSpec(4, 1.0)
    assert oracle.full_chain_trotter(spec, sched) == pytest.approx(
        oracle.exact_ground_magnetization(spec), abs=0.03
    )


@pytest.mark.parametrize("kwargs", [dict(n=1, J=0.0), dict(n=13, J=0.0)])
def test_spec_bounds(kwargs):
    with pytest.raises(ValueError):
        oracle.IsingChainSpec(**kwargs)


def test_trotter_rejects_unknown_splitting():
    with pytest.raises(ValueError):
        oracle.full_chain_trotter(oracle.IsingChainSpec(4, 1.0), Schedule(2.0, 10, 0.1), splitting="x")
