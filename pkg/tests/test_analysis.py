import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liouvsim.analysis import (
    SIGMA, AnalysisError, bell_fidelity, chi_apply, dejmps_recurrence, pauli_rotation_gates,
    process_tomography_1q, purify_step, teleport_channel, tfim_hamiltonian, tfim_magnetization,
    tfim_trotter_circuit, werner_depol_p, werner_state,
)
from liouvsim.circuit import Gate
from liouvsim.gates import build_gate
from liouvsim.noise import amplitude_damping, depolarizing_channel, uniform_device
from liouvsim.oracle import (
    dense_evolve, exact_tfim_evolution, expand_operator, gate_local_qubits, tfim_hamiltonian_oracle,
)
from liouvsim.state import DensityState

from conftest import random_density

PHI = np.array([1, 0, 0, 1]) / math.sqrt(2)


def unit(i, j):
    m = np.zeros((4, 4), dtype=complex)
    m[i, j] = 1
    return m


def test_chi_identity_and_paulis():
    assert np.allclose(process_tomography_1q(lambda r: r), unit(0, 0), atol=1e-14)
    for k in (1, 2, 3):
        s = SIGMA[k]
        assert np.allclose(process_tomography_1q(lambda r: s @ r @ s), unit(k, k), atol=1e-14)


def test_chi_depolarizing():
    p = 0.3
    chi = process_tomography_1q(depolarizing_channel(p).apply)
    assert np.allclose(chi, np.diag([1 - 3 * p / 4, p / 4, p / 4, p / 4]), atol=1e-14)


def test_chi_amplitude_damping():
    g = 0.2
    s = math.sqrt(1 - g)
    chi = process_tomography_1q(amplitude_damping(g).apply)
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 0], expected[3, 3] = (1 + s) ** 2 / 4, (1 - s) ** 2 / 4
    expected[0, 3] = expected[3, 0] = g / 4
    expected[1, 1] = expected[2, 2] = g / 4
    expected[1, 2], expected[2, 1] = -1j * g / 4, 1j * g / 4
    assert np.allclose(chi, expected, atol=1e-14)


@given(st.integers(0, 2**31))
def test_chi_reconstructs_channel(seed):
    ch = amplitude_damping(0.37).apply
    chi = process_tomography_1q(ch)
    rho = random_density(np.random.default_rng(seed), 1)
    assert np.max(np.abs(chi_apply(chi, rho) - ch(rho))) < 1e-13
    assert np.max(np.abs(chi - chi.conj().T)) < 1e-14
    assert abs(np.trace(chi) - 1) < 1e-14


def test_tomography_accepts_density_state_and_rejects_bad_shape():
    chi = process_tomography_1q(lambda r: DensityState.from_dense(r))
    assert np.allclose(chi, unit(0, 0), atol=1e-14)
    with pytest.raises(AnalysisError):
        process_tomography_1q(lambda r: np.eye(4) / 4)


def test_teleport_noiseless_is_identity():
    ch = teleport_channel()
    rho = random_density(np.random.default_rng(3), 1)
    assert np.max(np.abs(ch(rho) - rho)) < 1e-12
    chi = process_tomography_1q(ch)
    assert abs(chi[0, 0] - 1) < 1e-10
    off = chi.copy()
    off[0, 0] = 0
    assert np.max(np.abs(off)) < 1e-9


def test_teleport_unfused_matches_fused():
    dev = uniform_device(3, error_1q=1e-2, error_2q=5e-2, t1_us=40, t2_us=30, duration_1q_ns=35, duration_2q_ns=300)
    a = process_tomography_1q(teleport_channel(dev, fuse=True))
    b = process_tomography_1q(teleport_channel(dev, fuse=False))
    assert np.max(np.abs(a - b)) < 1e-12


def test_teleport_noisy_degrades():
    dev = uniform_device(3, error_1q=0.1, error_2q=0.1)
    chi = process_tomography_1q(teleport_channel(dev))
    assert chi[0, 0].real < 0.95
    assert abs(np.trace(chi) - 1) < 1e-12


def test_bell_fidelity_and_werner():
    assert bell_fidelity(np.outer(PHI, PHI)) == pytest.approx(1.0, abs=1e-15)
    assert bell_fidelity(np.eye(4) / 4) == pytest.approx(0.25, abs=1e-15)
    for f in (0.25, 0.6, 0.9, 1.0):
        w = werner_state(f)
        assert bell_fidelity(w) == pytest.approx(f, abs=1e-15)
        assert abs(np.trace(w) - 1) < 1e-15
        depol = dense_evolve(np.outer(PHI, PHI), depolarizing_channel(werner_depol_p(f), 2).operators, [0, 1])
        assert np.max(np.abs(depol - w)) < 1e-14
    with pytest.raises(AnalysisError):
        bell_fidelity(np.eye(2))


def test_dejmps_recurrence_examples():
    p, c = dejmps_recurrence((1, 0, 0, 0))
    assert p == 1 and c == (1, 0, 0, 0)
    p, c = dejmps_recurrence((0.25,) * 4)
    assert p == pytest.approx(0.5) and c[0] == pytest.approx(0.25)


@pytest.mark.parametrize("f", [0.3, 0.5, 0.62, 0.75, 0.9, 0.99, 1.0])
def test_purify_noiseless_matches_recurrence(f):
    p_ref, c = dejmps_recurrence((f, (1 - f) / 3, (1 - f) / 3, (1 - f) / 3))
    p, f_out = purify_step(f, f, 0.0)
    assert p == pytest.approx(p_ref, abs=1e-12)
    assert f_out == pytest.approx(c[0], abs=1e-12)


def test_purify_improves_above_half_and_noise_hurts():
    _, clean = purify_step(0.8, 0.8, 0.0)
    _, noisy = purify_step(0.8, 0.8, 0.05)
    assert clean > 0.8 and noisy < clean
    with pytest.raises(AnalysisError):
        purify_step(0.1, 0.8, 0.0)
    with pytest.raises(AnalysisError):
        purify_step(0.8, 0.8, 1.5)


def test_tfim_hamiltonian_matches_oracle():
    for J, lam in ((1.0, 1.0), (0.7, -0.3), (0.0, 2.0)):
        h = tfim_hamiltonian(J, lam)
        assert np.max(np.abs(h - tfim_hamiltonian_oracle(J, lam))) < 1e-15
        assert np.max(np.abs(h - h.conj().T)) == 0


def _mz_oracle(J, lam, t):
    psi = exact_tfim_evolution(J, lam, t)[:, 0]
    probs = np.abs(psi) ** 2
    ks = np.arange(16)
    return sum(np.sum(probs * (1 - 2 * ((ks >> q) & 1))) / 2 for q in range(4)) / 4


def test_tfim_exact_magnetization():
    assert tfim_magnetization(1.0, 1.0, [0.0]) == [pytest.approx(0.5, abs=1e-15)]
    times = [0.3, 1.7, 4.0]
    for J, lam in ((1.0, 1.0), (1.0, 0.5)):
        got = tfim_magnetization(J, lam, times)
        assert got == pytest.approx([_mz_oracle(J, lam, t) for t in times], abs=1e-12)


@pytest.mark.parametrize("ops", [{0: "Z"}, {1: "X", 2: "X"}, {0: "Y", 1: "Z", 2: "Z", 3: "Y"}, {0: "X", 3: "Y"}])
def test_pauli_rotation_gates(ops):
    angle = 0.77
    u = np.eye(16, dtype=complex)
    for g in pauli_rotation_gates(ops, angle):
        u = expand_operator(build_gate(g.name, g.params), gate_local_qubits(g), 4) @ u
    lookup = dict(zip("XYZ", SIGMA[1:]))
    p = np.eye(1)
    for q in reversed(range(4)):
        p = np.kron(p, lookup[ops[q]] if q in ops else np.eye(2))
    expected = math.cos(angle / 2) * np.eye(16) - 1j * math.sin(angle / 2) * p
    assert np.max(np.abs(u - expected)) < 1e-13


def test_trotter_converges():
    t = 1.3
    exact = _mz_oracle(1.0, 1.0, t)
    coarse = abs(tfim_magnetization(1.0, 1.0, [t], trotter_steps=5)[0] - exact)
    fine = abs(tfim_magnetization(1.0, 1.0, [t], trotter_steps=80)[0] - exact)
    assert fine < coarse and fine < 5e-3


def test_trotter_circuit_rejects_zero_steps_and_other_sizes():
    with pytest.raises(AnalysisError):
        tfim_trotter_circuit(1, 1, 1.0, 0)
    with pytest.raises(AnalysisError):
        tfim_magnetization(1, 1, [0.0], n=5)
    assert isinstance(tfim_trotter_circuit(1, 0, 1.0, 1).ops[0], Gate)
