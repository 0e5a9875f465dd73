"""Standard gate matrices.

Two-qubit matrices are written in the local basis ``|a b>`` (index ``2*a + b``)
where ``a`` is the first listed qubit; for CX that is the control.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

BASIS_GATES = frozenset({"ID", "SX", "X", "RZ", "CX"})


class GateError(ValueError):
    pass


def _rx(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return [[c, -1j * s], [-1j * s, c]]


def _ry(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return [[c, -s], [s, c]]


def _rz(theta):
    return [[cmath.exp(-0.5j * theta), 0], [0, cmath.exp(0.5j * theta)]]


def _u(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return [
        [c, -cmath.exp(1j * lam) * s],
        [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
    ]


_R2 = 1 / math.sqrt(2)


@dataclass(frozen=True)
class GateDef:
    name: str
    arity: int
    param_count: int
    matrix_builder: Callable[..., object]

    def build(self, params: Sequence[float] = ()) -> np.ndarray:
        if len(params) != self.param_count:
            raise GateError(f"{self.name} takes {self.param_count} parameter(s), got {len(params)}")
        return np.array(self.matrix_builder(*params), dtype=np.complex128)


def _const(m):
    return lambda: m


GATES: dict[str, GateDef] = {
    g.name: g
    for g in [
        GateDef("ID", 1, 0, _const([[1, 0], [0, 1]])),
        GateDef("X", 1, 0, _const([[0, 1], [1, 0]])),
        GateDef("Y", 1, 0, _const([[0, -1j], [1j, 0]])),
        GateDef("Z", 1, 0, _const([[1, 0], [0, -1]])),
        GateDef("H", 1, 0, _const([[_R2, _R2], [_R2, -_R2]])),
        GateDef("S", 1, 0, _const([[1, 0], [0, 1j]])),
        GateDef("SDG", 1, 0, _const([[1, 0], [0, -1j]])),
        GateDef("T", 1, 0, _const([[1, 0], [0, cmath.exp(0.25j * math.pi)]])),
        GateDef("TDG", 1, 0, _const([[1, 0], [0, cmath.exp(-0.25j * math.pi)]])),
        GateDef("SX", 1, 0, _const([[(1 + 1j) / 2, (1 - 1j) / 2], [(1 - 1j) / 2, (1 + 1j) / 2]])),
        GateDef("RX", 1, 1, _rx),
        GateDef("RY", 1, 1, _ry),
        GateDef("RZ", 1, 1, _rz),
        GateDef("U", 1, 3, _u),
        GateDef("CX", 2, 0, _const([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])),
        GateDef("CZ", 2, 0, _const([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]])),
        GateDef("SWAP", 2, 0, _const([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])),
    ]
}


def gate_def(name: str) -> GateDef:
    try:
        return GATES[name.upper()]
    except KeyError:
        raise GateError(f"unknown gate {name!r}") from None


def build_gate(name: str, params: Sequence[float] = ()) -> np.ndarray:
    """Unitary matrix of a named gate (2x2 or 4x4)."""
    return gate_def(name).build(tuple(float(p) for p in params))


def gate_arity(name: str) -> int:
    return gate_def(name).arity
