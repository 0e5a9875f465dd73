"""Case-study analytics: 1-qubit process tomography, teleportation, DEJMPS
purification and transverse-field Ising magnetization."""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit, Gate
from .engine import evolve, prepare
from .gates import build_gate
from .linalg import superop_from_kraus, superop_from_unitary
from .noise import DeviceModel, depolarizing_channel
from .state import DensityState, apply_superop, expectation_pauli_z, partial_trace, to_dense_matrix

SIGMA = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

_KET0 = np.array([1, 0], dtype=np.complex128)
_KET1 = np.array([0, 1], dtype=np.complex128)
_PLUS = np.array([1, 1], dtype=np.complex128) / math.sqrt(2)
_PLUS_I = np.array([1, 1j], dtype=np.complex128) / math.sqrt(2)
TOMOGRAPHY_PROBES = tuple(np.outer(k, k.conj()) for k in (_KET0, _KET1, _PLUS, _PLUS_I))

PHI_PLUS = np.array([1, 0, 0, 1], dtype=np.complex128) / math.sqrt(2)


class AnalysisError(ValueError):
    pass


# ---------------------------------------------------------------- tomography

def _as_dense(x) -> np.ndarray:
    if isinstance(x, DensityState):
        return to_dense_matrix(x)
    return np.asarray(x, dtype=np.complex128)


def chi_apply(chi: np.ndarray, rho) -> np.ndarray:
    """``sum_ij chi_ij sigma_i rho sigma_j``."""
    rho = _as_dense(rho)
    return sum(chi[i, j] * SIGMA[i] @ rho @ SIGMA[j] for i in range(4) for j in range(4))


def process_tomography_1q(channel: Callable, residual_tol: float = 1e-9) -> np.ndarray:
    """Chi matrix of a single-qubit channel in the {I, X, Y, Z} basis.

    ``channel`` receives a 2x2 density matrix and returns the output density
    matrix (a 2x2 array or a 1-qubit :class:`DensityState`). Probes are
    |0>, |1>, |+>, |+i>, which span all 2x2 matrices, so the 16x16 system is
    solved exactly.
    """
    rows, rhs = [], []
    for rho in TOMOGRAPHY_PROBES:
        out = _as_dense(channel(rho.copy()))
        if out.shape != (2, 2):
            raise AnalysisError(f"channel returned shape {out.shape}, expected (2, 2)")
        basis = [(SIGMA[i] @ rho @ SIGMA[j]).reshape(-1) for i in range(4) for j in range(4)]
        rows.append(np.array(basis).T)
        rhs.append(out.reshape(-1))
    a = np.vstack(rows)
    b = np.concatenate(rhs)
    if np.linalg.cond(a) > 1e12:
        raise AnalysisError("tomography system is numerically singular")
    chi = np.linalg.solve(a, b)
    residual = np.max(np.abs(a @ chi - b))
    if residual > residual_tol:
        raise AnalysisError(f"tomography residual {residual:.2e} above {residual_tol:.0e}")
    return chi.reshape(4, 4)


# ---------------------------------------------------------------- teleportation

def teleport_circuit() -> Circuit:
    """Three-qubit teleportation of q0 onto q2 with deferred (coherent) corrections."""
    return Circuit(3, 0, [
        Gate("H", (), (1,)),
        Gate("CX", (), (1, 2)),
        Gate("CX", (), (0, 1)),
        Gate("H", (), (0,)),
        Gate("CX", (), (1, 2)),
        Gate("CZ", (), (0, 2)),
    ])


def teleport_channel(device: DeviceModel | None = None, fuse: bool = True) -> Callable[[np.ndarray], np.ndarray]:
    """Channel mapping the input state of q0 to the reduced output state of q2."""
    bound = prepare(teleport_circuit(), device, fuse)
    ancilla = np.zeros((4, 4), dtype=np.complex128)
    ancilla[0, 0] = 1.0

    def channel(rho_in) -> np.ndarray:
        rho_in = _as_dense(rho_in)
        # q0 is the least significant qubit, so it is the rightmost kron factor
        state = DensityState.from_dense(np.kron(ancilla, rho_in))
        evolve(bound, state)
        return partial_trace(to_dense_matrix(state), [2])

    return channel


# ---------------------------------------------------------------- purification

def bell_fidelity(state) -> float:
    """``<Phi+| rho |Phi+>`` of a two-qubit state."""
    rho = _as_dense(state)
    if rho.shape != (4, 4):
        raise AnalysisError(f"expected a 2-qubit state, got shape {rho.shape}")
    return float(np.real(PHI_PLUS.conj() @ rho @ PHI_PLUS))


def werner_state(f: float) -> np.ndarray:
    """``F |Phi+><Phi+| + (1-F)/3 (I - |Phi+><Phi+|)``."""
    proj = np.outer(PHI_PLUS, PHI_PLUS.conj())
    return f * proj + (1 - f) / 3 * (np.eye(4) - proj)


def werner_depol_p(f: float) -> float:
    """Two-qubit depolarizing probability turning a perfect Bell pair into fidelity ``f``."""
    return 4.0 / 3.0 * (1.0 - f)


def dejmps_recurrence(coeffs: Sequence[float]) -> tuple[float, tuple[float, float, float, float]]:
    """One DEJMPS round on two identical Bell-diagonal pairs.

    ``coeffs`` are the weights on (Phi+, Psi-, Psi+, Phi-). Returns the
    success probability and the new weights.
    """
    a, b, c, d = coeffs
    norm = (a + b) ** 2 + (c + d) ** 2
    return norm, ((a * a + b * b) / norm, 2 * c * d / norm, (c * c + d * d) / norm, 2 * a * b / norm)


def _check_fidelity(f: float) -> None:
    if not 0.25 <= f <= 1.0:
        raise AnalysisError(f"input fidelity must be in [0.25, 1], got {f}")


def purify_step(f_a: float, f_b: float, cx_error: float) -> tuple[float, float]:
    """One DEJMPS round on two Werner pairs with noisy bilateral CX gates.

    Pair A lives on qubits (0, 1), pair B on (2, 3); Alice holds 0 and 2, Bob
    1 and 3. Each of the two CX gates is followed by a two-qubit depolarizing
    channel of probability ``cx_error``. Post-selection on equal parity of
    qubits 2 and 3 is done by projection, not sampling.

    Returns ``(success_probability, output_fidelity)``.
    """
    _check_fidelity(f_a)
    _check_fidelity(f_b)
    if not 0.0 <= cx_error <= 1.0:
        raise AnalysisError(f"cx_error must be in [0, 1], got {cx_error}")
    state = DensityState.ground(4)
    h = superop_from_unitary(build_gate("H"))
    cx = superop_from_unitary(build_gate("CX"))
    for (alice, bob), f in (((0, 1), f_a), ((2, 3), f_b)):
        apply_superop(state, (alice,), h)
        apply_superop(state, (bob, alice), cx)
        apply_superop(state, (alice, bob), superop_from_kraus(depolarizing_channel(werner_depol_p(f), 2)))
    plus = superop_from_unitary(build_gate("RX", [math.pi / 2]))
    minus = superop_from_unitary(build_gate("RX", [-math.pi / 2]))
    for q in (0, 2):
        apply_superop(state, (q,), plus)
    for q in (1, 3):
        apply_superop(state, (q,), minus)
    noise = superop_from_kraus(depolarizing_channel(cx_error, 2))
    for control, target in ((0, 2), (1, 3)):
        apply_superop(state, (target, control), cx)
        apply_superop(state, (target, control), noise)
    rho = to_dense_matrix(state)
    idx = np.arange(16)
    keep = ((idx >> 2) & 1) == ((idx >> 3) & 1)
    proj = np.diag(keep.astype(float))
    post = proj @ rho @ proj
    p_succ = float(np.real(np.trace(post)))
    if p_succ <= 0:
        return 0.0, 0.0
    pair = partial_trace(post / p_succ, [0, 1])
    return p_succ, bell_fidelity(pair)


# ---------------------------------------------------------------- Ising

_X, _Y, _Z = SIGMA[1], SIGMA[2], SIGMA[3]


def _embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    m = np.eye(1, dtype=np.complex128)
    for q in range(n - 1, -1, -1):
        m = np.kron(m, ops.get(q, SIGMA[0]))
    return m


def tfim_terms(J: float, lam: float, n: int = 4) -> list[tuple[float, dict[int, str]]]:
    """Pauli terms (coefficient, {qubit: 'X'|'Y'|'Z'}) of the chain Hamiltonian.

    Open-boundary XX couplings, the Y Z...Z Y string joining the ends, and the
    transverse field on every site.
    """
    terms = [(J, {i: "X", i + 1: "X"}) for i in range(n - 1)]
    string = {0: "Y", n - 1: "Y"}
    string.update({q: "Z" for q in range(1, n - 1)})
    terms.append((1.0, string))
    terms += [(lam, {i: "Z"}) for i in range(n)]
    return terms


def tfim_hamiltonian(J: float, lam: float, n: int = 4) -> np.ndarray:
    lookup = {"X": _X, "Y": _Y, "Z": _Z}
    return sum(c * _embed({q: lookup[p] for q, p in ops.items()}, n) for c, ops in tfim_terms(J, lam, n))


def pauli_rotation_gates(ops: dict[int, str], angle: float) -> list[Gate]:
    """Gates for ``exp(-i angle/2 P)`` with P a Pauli string."""
    qubits = sorted(ops)
    pre, post = [], []
    for q in qubits:
        if ops[q] == "X":
            pre.append(Gate("H", (), (q,)))
            post.append(Gate("H", (), (q,)))
        elif ops[q] == "Y":
            pre.append(Gate("RX", (math.pi / 2,), (q,)))
            post.append(Gate("RX", (-math.pi / 2,), (q,)))
    ladder = [Gate("CX", (), (a, b)) for a, b in zip(qubits, qubits[1:])]
    return pre + ladder + [Gate("RZ", (angle,), (qubits[-1],))] + ladder[::-1] + post


def tfim_trotter_circuit(J: float, lam: float, t: float, steps: int, n: int = 4) -> Circuit:
    """First-order product formula for ``exp(-i H t)`` starting from ``|0...0>``."""
    if steps < 1:
        raise AnalysisError("trotter steps must be >= 1")
    dt = t / steps
    one_step = []
    for c, ops in tfim_terms(J, lam, n):
        if c != 0.0:
            one_step += pauli_rotation_gates(ops, 2 * c * dt)
    return Circuit(n, 0, one_step * steps)


def _magnetization(state: DensityState) -> float:
    n = state.n_qubits
    return sum(0.5 * expectation_pauli_z(state, q) for q in range(n)) / n


def tfim_magnetization(
    J: float,
    lam: float,
    times: Sequence[float],
    device: DeviceModel | None = None,
    *,
    n: int = 4,
    trotter_steps: int | None = None,
    fuse: bool = True,
) -> list[float]:
    """Mean magnetization ``(1/n) sum_q <sigma_z(q)>/2`` after evolving ``|0000>``.

    Without a device and without ``trotter_steps`` the evolution is exact
    (eigendecomposition). Otherwise a Trotter circuit (20 steps by default)
    runs through the full transpile/noise pipeline.
    """
    if n != 4:
        raise AnalysisError("the Ising study is defined for a 4-spin chain")
    out = []
    if device is None and trotter_steps is None:
        evals, vecs = np.linalg.eigh(tfim_hamiltonian(J, lam, n))
        psi0 = np.zeros(1 << n, dtype=np.complex128)
        psi0[0] = 1.0
        for t in times:
            u = (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T
            psi = u @ psi0
            state = DensityState.from_dense(np.outer(psi, psi.conj()))
            out.append(_magnetization(state))
        return out
    steps = 20 if trotter_steps is None else trotter_steps
    for t in times:
        bound = prepare(tfim_trotter_circuit(J, lam, t, steps, n), device, fuse)
        out.append(_magnetization(evolve(bound, DensityState.ground(n))))
    return out
