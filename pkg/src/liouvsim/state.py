"""Column-stacked density matrix and the 1-/2-qubit superoperator kernels."""
from __future__ import annotations

import functools

import numba
import numpy as np

from . import _kernels
from .linalg import Superoperator

MAX_QUBITS = 16
MAX_DENSE_QUBITS = 6
NEGATIVE_CLAMP = 1e-10
IMAG_ERROR = 1e-6


class StateError(ValueError):
    """Raised for invalid register sizes, qubit indices or corrupted states."""


class DensityState:
    """Density matrix of ``n_qubits`` qubits stored as ``vec(rho)``.

    ``amps[r + c * 2**n]`` holds ``rho[r, c]``; qubit ``q`` is bit ``q`` of the
    row index (little-endian).
    """

    __slots__ = ("n_qubits", "amps")

    def __init__(self, n_qubits: int, amps: np.ndarray):
        amps = np.ascontiguousarray(amps, dtype=np.complex128)
        if amps.shape != (4**n_qubits,):
            raise StateError(f"expected {4**n_qubits} amplitudes for {n_qubits} qubits, got {amps.shape}")
        self.n_qubits = n_qubits
        self.amps = amps

    @classmethod
    def ground(cls, n: int) -> "DensityState":
        return new_ground(n)

    @classmethod
    def from_dense(cls, rho) -> "DensityState":
        rho = np.asarray(rho, dtype=np.complex128)
        n = int(rho.shape[0]).bit_length() - 1
        if rho.shape != (1 << n, 1 << n):
            raise StateError(f"not a 2^n x 2^n matrix: {rho.shape}")
        return cls(n, rho.reshape(-1, order="F"))

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def copy(self) -> "DensityState":
        return DensityState(self.n_qubits, self.amps.copy())

    def trace(self) -> complex:
        d = self.dim
        return complex(self.amps[:: d + 1].sum())

    def hermiticity_error(self) -> float:
        m = self.amps.reshape((self.dim, self.dim), order="F")
        return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0

    def to_dense(self) -> np.ndarray:
        return to_dense_matrix(self)

    def __repr__(self) -> str:
        return f"DensityState(n_qubits={self.n_qubits})"


def new_ground(n: int) -> DensityState:
    """``|0...0><0...0|``."""
    if not 1 <= n <= MAX_QUBITS:
        raise StateError(f"number of qubits must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros(4**n, dtype=np.complex128)
    amps[0] = 1.0
    return DensityState(n, amps)


def group_base_index(i: int, q: int, n: int) -> int:
    """First stacked index of the ``i``-th 4-amplitude group of a 1-qubit gate on ``q``.

    Same value as inserting zero bits into ``i`` at position ``q`` and then at
    position ``q + n``.
    """
    j = i >> q  # floor(i / 2**q)
    return (j // (1 << (n - 1))) * (1 << (q + n + 1)) + (j % (1 << (n - 1))) * (1 << (q + 1)) + (i % (1 << q))


@functools.lru_cache(maxsize=4096)
def _layout(qubits: tuple[int, ...], n: int) -> tuple[np.ndarray, np.ndarray]:
    positions = list(qubits) + [q + n for q in qubits]
    offsets = _kernels.local_offsets(positions)
    offsets.flags.writeable = False
    sorted_pos = np.array(sorted(positions), dtype=np.int64)
    sorted_pos.flags.writeable = False
    return sorted_pos, offsets


def _resolve_workers(workers: int) -> int:
    return numba.config.NUMBA_NUM_THREADS if workers <= 0 else workers


def apply_superop(state: DensityState, qubits, s: Superoperator, workers: int = 1) -> None:
    """Apply a superoperator in place to the given qubits.

    ``qubits[0]`` is the least significant local bit of the operator, so for a
    2-qubit ``s = conj(G) kron G`` the gate ``G`` is indexed ``b(q1)*2 + b(q0)``.
    """
    n = state.n_qubits
    qubits = tuple(int(q) for q in qubits)
    if len(qubits) != s.arity:
        raise StateError(f"superoperator of arity {s.arity} applied to {len(qubits)} qubits")
    for q in qubits:
        if not 0 <= q < n:
            raise StateError(f"qubit {q} out of range for a {n}-qubit register")
    if len(set(qubits)) != len(qubits):
        raise StateError(f"repeated qubit in {qubits}")
    sorted_pos, offsets = _layout(qubits, n)
    mat = np.ascontiguousarray(s.matrix)
    w = _resolve_workers(workers)
    if w > 1:
        numba.set_num_threads(min(w, numba.config.NUMBA_NUM_THREADS))
        _kernels.apply_parallel(state.amps, mat, sorted_pos, offsets, w)
    else:
        _kernels.apply_serial(state.amps, mat, sorted_pos, offsets)


def apply_superop1(state: DensityState, q: int, s: Superoperator, workers: int = 1) -> None:
    if s.arity != 1:
        raise StateError("apply_superop1 needs a 4x4 superoperator")
    apply_superop(state, (q,), s, workers)


def apply_superop2(state: DensityState, q0: int, q1: int, s: Superoperator, workers: int = 1) -> None:
    if s.arity != 2:
        raise StateError("apply_superop2 needs a 16x16 superoperator")
    if q0 == q1:
        raise StateError("two-qubit superoperator needs distinct qubits")
    apply_superop(state, (q0, q1), s, workers)


def diagonal_probs(state: DensityState) -> np.ndarray:
    """Computational-basis probabilities (the diagonal of rho).

    Tiny negative entries from rounding are clamped to zero and the result is
    renormalised; anything more negative than ``-1e-10`` is a corrupted state.
    """
    d = state.dim
    diag = state.amps[:: d + 1]
    if np.any(np.abs(diag.imag) >= IMAG_ERROR):
        raise StateError("density matrix diagonal has a large imaginary part")
    p = diag.real.copy()
    if np.any(p < -NEGATIVE_CLAMP):
        raise StateError(f"negative probability {p.min():.3e} on the diagonal")
    p[p < 0] = 0.0
    total = p.sum()
    if total <= 0:
        raise StateError("density matrix has zero trace")
    return p / total


def expectation_pauli_z(state: DensityState, q: int) -> float:
    if not 0 <= q < state.n_qubits:
        raise StateError(f"qubit {q} out of range")
    p = diagonal_probs(state)
    bits = (np.arange(p.size) >> q) & 1
    return float(np.sum(p * (1 - 2 * bits)))


def to_dense_matrix(state: DensityState) -> np.ndarray:
    if state.n_qubits > MAX_DENSE_QUBITS:
        raise StateError(f"dense view limited to {MAX_DENSE_QUBITS} qubits")
    return state.amps.reshape((state.dim, state.dim), order="F").copy()


def partial_trace(rho: np.ndarray, keep) -> np.ndarray:
    """Reduce a dense density matrix to the qubits in ``keep``.

    ``keep[0]`` becomes the least significant qubit of the result.
    """
    n = int(rho.shape[0]).bit_length() - 1
    keep = [int(q) for q in keep]
    # numpy axes are big-endian: axis j holds qubit n-1-j
    t = np.asarray(rho).reshape([2] * (2 * n))
    row = [chr(ord("a") + j) for j in range(n)]
    col = [chr(ord("A") + j) for j in range(n)]
    for q in range(n):
        if q not in keep:
            col[n - 1 - q] = row[n - 1 - q]
    out = "".join(row[n - 1 - q] for q in reversed(keep)) + "".join(col[n - 1 - q] for q in reversed(keep))
    res = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    k = len(keep)
    return res.reshape(1 << k, 1 << k)
