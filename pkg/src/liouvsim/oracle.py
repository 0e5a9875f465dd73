"""Brute-force reference simulators for tests.

Nothing here touches the stacked-vector kernels: operators are expanded to
full ``2**n x 2**n`` matrices element by element and applied as ``G rho G^dagger``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .circuit import Barrier, Circuit, Gate, Measure
from .gates import build_gate

MAX_ORACLE_QUBITS = 4


def _check_n(n: int) -> None:
    if n > MAX_ORACLE_QUBITS:
        raise ValueError(f"oracle limited to {MAX_ORACLE_QUBITS} qubits, got {n}")


def expand_operator(op: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Full-register matrix of ``op``; ``qubits[0]`` is the least significant local bit of ``op``."""
    op = np.ascontiguousarray(op, dtype=np.complex128)
    full = _expand_cached(op.tobytes(), op.shape, tuple(int(q) for q in qubits), n)
    return full.copy()


@lru_cache(maxsize=8192)
def _expand_cached(raw: bytes, shape: tuple, qubits: tuple, n: int) -> np.ndarray:
    op = np.frombuffer(raw, dtype=np.complex128).reshape(shape)
    k = len(qubits)
    dim = 1 << n
    mask = sum(1 << q for q in qubits)
    full = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim):
        li = sum(((i >> q) & 1) << j for j, q in enumerate(qubits))
        for jdx in range(dim):
            if (i & ~mask) != (jdx & ~mask):
                continue
            lj = sum(((jdx >> q) & 1) << j for j, q in enumerate(qubits))
            full[i, jdx] = op[li, lj]
    assert op.shape == (1 << k, 1 << k)
    return full


def dense_evolve(rho: np.ndarray, op, qubits: Sequence[int]) -> np.ndarray:
    """``G rho G^dagger`` for a matrix, or ``sum_i K_i rho K_i^dagger`` for a Kraus list."""
    rho = np.asarray(rho, dtype=np.complex128)
    n = int(rho.shape[0]).bit_length() - 1
    _check_n(n)
    ops = [op] if isinstance(op, np.ndarray) and op.ndim == 2 else list(op)
    out = np.zeros_like(rho)
    for k in ops:
        g = expand_operator(k, qubits, n)
        out += g @ rho @ g.conj().T
    return out


def dense_superop_evolve(rho: np.ndarray, s: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply a local Liouville matrix through the full ``4**n x 4**n`` superoperator.

    Element ``(r, c)`` of rho sits at stacked index ``r + c * 2**n``; the local
    index of a stacked entry is ``b(r-bits) + 2**k * b(c-bits)``.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    n = int(rho.shape[0]).bit_length() - 1
    _check_n(n)
    d = 1 << n
    k = len(qubits)
    v = np.array([rho[j % d, j // d] for j in range(d * d)])
    out = np.zeros_like(v)
    mask = sum(1 << q for q in qubits)

    def local(r, c):
        lr = sum(((r >> q) & 1) << j for j, q in enumerate(qubits))
        lc = sum(((c >> q) & 1) << j for j, q in enumerate(qubits))
        return lr + (lc << k)

    for a in range(d * d):
        ra, ca = a % d, a // d
        for b in range(d * d):
            rb, cb = b % d, b // d
            if (ra & ~mask) != (rb & ~mask) or (ca & ~mask) != (cb & ~mask):
                continue
            out[a] += s[local(ra, ca), local(rb, cb)] * v[b]
    res = np.zeros_like(rho)
    for j in range(d * d):
        res[j % d, j // d] = out[j]
    return res


def gate_local_qubits(g: Gate) -> tuple[int, ...]:
    # gate matrices list their first qubit as the most significant bit
    return tuple(reversed(g.qubits))


def dense_statevector(circuit: Circuit) -> np.ndarray:
    """Noiseless full-matrix state-vector simulation from ``|0...0>``."""
    n = circuit.n_qubits
    _check_n(n)
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[0] = 1.0
    for op in circuit.ops:
        if isinstance(op, Gate):
            psi = expand_operator(build_gate(op.name, op.params), gate_local_qubits(op), n) @ psi
        elif not isinstance(op, (Measure, Barrier)):
            raise ValueError(f"state-vector oracle cannot simulate {type(op).__name__}")
    return psi


_PX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_PZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _pauli_string(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    m = np.eye(1, dtype=np.complex128)
    for q in reversed(range(n)):
        m = np.kron(m, ops.get(q, np.eye(2)))
    return m


def tfim_hamiltonian_oracle(J: float, lam: float, n: int = 4) -> np.ndarray:
    h = np.zeros((1 << n, 1 << n), dtype=np.complex128)
    for i in range(n - 1):
        h += J * _pauli_string({i: _PX, i + 1: _PX}, n)
    string = {0: _PY, n - 1: _PY}
    string.update({q: _PZ for q in range(1, n - 1)})
    h += _pauli_string(string, n)
    for i in range(n):
        h += lam * _pauli_string({i: _PZ}, n)
    return h


def exact_tfim_evolution(J: float, lam: float, t: float, n: int = 4) -> np.ndarray:
    """``exp(-i H t)`` by eigendecomposition of the Hermitian Hamiltonian."""
    evals, vecs = np.linalg.eigh(tfim_hamiltonian_oracle(J, lam, n))
    return (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T
