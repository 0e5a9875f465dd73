"""Small dense complex algebra, Kraus channels and superoperators.

Density matrices are column-stacked throughout: ``vec(rho)[r + c * d] = rho[r, c]``.
With that convention ``vec(A X B) = (B^T kron A) vec(X)``, so a channel with
Kraus operators ``K_i`` acts on ``vec(rho)`` through ``sum_i conj(K_i) kron K_i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

#: tolerance for the trace-preservation check on Kraus lists
CPTP_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-d complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product of two finite matrices."""
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def norm_diff(a, b) -> float:
    """Frobenius norm of ``a - b``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def vec(m) -> np.ndarray:
    """Column-stack a matrix."""
    return np.asarray(m, dtype=np.complex128).reshape(-1, order="F").copy()


def unvec(v, dim: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=np.complex128)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a stacked square matrix")
    return v.reshape((dim, dim), order="F").copy()


def _arity_for_side(side: int, what: str) -> int:
    try:
        return {2: 1, 4: 2}[side]
    except KeyError:
        raise ValueError(f"{what} must act on 1 or 2 qubits (side 2 or 4), got side {side}") from None


@dataclass(frozen=True)
class KrausChannel:
    """A quantum channel ``rho -> sum_i K_i rho K_i^dagger``."""

    operators: tuple[np.ndarray, ...]
    dim: int = field(init=False)

    def __init__(self, operators: Sequence):
        ops = tuple(as_matrix(k) for k in operators)
        if not ops:
            raise ValueError("a Kraus channel needs at least one operator")
        shape = ops[0].shape
        if shape[0] != shape[1]:
            raise ValueError(f"Kraus operators must be square, got {shape}")
        for k in ops:
            if k.shape != shape:
                raise ValueError(f"mismatched Kraus operator shapes {shape} and {k.shape}")
        _arity_for_side(shape[0], "Kraus channel")
        for k in ops:
            k.flags.writeable = False
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "dim", shape[0])

    @property
    def arity(self) -> int:
        return _arity_for_side(self.dim, "Kraus channel")

    def completeness_error(self) -> float:
        """Frobenius distance of ``sum K^dagger K`` from the identity."""
        acc = sum(dagger(k) @ k for k in self.operators)
        return norm_diff(acc, np.eye(self.dim))

    def is_trace_preserving(self, tol: float = CPTP_TOL) -> bool:
        return self.completeness_error() <= tol

    def apply(self, rho) -> np.ndarray:
        """Evaluate the channel on a ``dim x dim`` density matrix."""
        rho = as_matrix(rho)
        return sum(k @ rho @ dagger(k) for k in self.operators)


@dataclass(frozen=True)
class Superoperator:
    """Liouville matrix acting on a column-stacked 1- or 2-qubit density matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape not in ((4, 4), (16, 16)):
            raise ValueError(f"superoperator must be 4x4 or 16x16, got {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def arity(self) -> int:
        return 1 if self.matrix.shape[0] == 4 else 2

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        # (self @ other) applies ``other`` first
        if not isinstance(other, Superoperator):
            return NotImplemented
        if other.arity != self.arity:
            raise ValueError("cannot compose superoperators of different arity")
        return Superoperator(self.matrix @ other.matrix)

    @classmethod
    def identity(cls, arity: int) -> "Superoperator":
        return cls(np.eye(4**arity, dtype=np.complex128))

    def apply_dense(self, rho) -> np.ndarray:
        """Apply to a small density matrix via vec/unvec."""
        rho = as_matrix(rho)
        return unvec(self.matrix @ vec(rho), rho.shape[0])


def superop_from_kraus(ch: KrausChannel | Sequence) -> Superoperator:
    """``S = sum_i conj(K_i) kron K_i``."""
    if not isinstance(ch, KrausChannel):
        ch = KrausChannel(ch)
    acc = np.zeros((ch.dim**2, ch.dim**2), dtype=np.complex128)
    for k in ch.operators:
        acc += np.kron(np.conj(k), k)
    return Superoperator(acc)


def superop_from_unitary(g) -> Superoperator:
    """Superoperator of ``rho -> g rho g^dagger``; blind to the global phase of ``g``."""
    g = as_matrix(g)
    if g.shape[0] != g.shape[1]:
        raise ValueError(f"gate matrix must be square, got {g.shape}")
    _arity_for_side(g.shape[0], "gate")
    return Superoperator(np.kron(np.conj(g), g))


def is_unitary(g, tol: float = 1e-12) -> bool:
    g = as_matrix(g)
    return norm_diff(dagger(g) @ g, np.eye(g.shape[0])) <= tol
