"""Basis decomposition, coupling checks, noise binding and gate fusion."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Barrier, Circuit, Gate, Measure, Reset
from .gates import BASIS_GATES
from .linalg import Superoperator, superop_from_kraus
from .noise import DeviceError, DeviceModel, noisy_gate_superop, readout_confusion

_ANGLE_EPS = 1e-12
_PI = math.pi

_RESET_SUPEROP = superop_from_kraus([[[1, 0], [0, 0]], [[0, 1], [0, 0]]])


class TranspileError(ValueError):
    pass


def _near(a: float, b: float, period: float = 2 * _PI) -> bool:
    d = (a - b) % period
    return d < _ANGLE_EPS or period - d < _ANGLE_EPS


def _rz(q: int, angle: float) -> list[Gate]:
    # RZ(2*pi*k) is a global phase
    if _near(angle, 0.0):
        return []
    return [Gate("RZ", (angle,), (q,))]


def _euler_zsx(theta: float, phi: float, lam: float, q: int) -> list[Gate]:
    """``U(theta, phi, lam)`` as RZ/SX/X, equal up to global phase."""
    sx = Gate("SX", (), (q,))
    if _near(theta, 0.0):
        return _rz(q, phi + lam)
    if _near(theta, _PI / 2):
        return _rz(q, lam - _PI / 2) + [sx] + _rz(q, phi + _PI / 2)
    if _near(theta, _PI):
        return _rz(q, lam + _PI) + [Gate("X", (), (q,))] + _rz(q, phi)
    return _rz(q, lam) + [sx] + _rz(q, theta + _PI) + [sx] + _rz(q, phi + _PI)


_FIXED_RZ = {"Z": _PI, "S": _PI / 2, "SDG": -_PI / 2, "T": _PI / 4, "TDG": -_PI / 4}


def decompose_gate(g: Gate) -> list[Gate]:
    name = g.name
    if name in BASIS_GATES:
        return [g]
    if name in _FIXED_RZ:
        return [Gate("RZ", (_FIXED_RZ[name],), g.qubits)]
    if len(g.qubits) == 1:
        q = g.qubits[0]
        if name == "H":
            return _euler_zsx(_PI / 2, 0.0, _PI, q)
        if name == "Y":
            return [Gate("RZ", (_PI,), (q,)), Gate("X", (), (q,))]
        if name == "RX":
            return _euler_zsx(g.params[0], -_PI / 2, _PI / 2, q)
        if name == "RY":
            return _euler_zsx(g.params[0], 0.0, 0.0, q)
        if name == "U":
            return _euler_zsx(*g.params, q)
    else:
        a, b = g.qubits
        if name == "CZ":
            h = _euler_zsx(_PI / 2, 0.0, _PI, b)
            return h + [Gate("CX", (), (a, b))] + h
        if name == "SWAP":
            return [Gate("CX", (), (a, b)), Gate("CX", (), (b, a)), Gate("CX", (), (a, b))]
    raise TranspileError(f"cannot decompose gate {name.lower()} into the basis")


def decompose_to_basis(c: Circuit, basis=BASIS_GATES) -> Circuit:
    """Rewrite every gate into {ID, SX, X, RZ, CX}; other ops pass through."""
    if frozenset(b.upper() for b in basis) != BASIS_GATES:
        raise TranspileError(f"only the basis {sorted(BASIS_GATES)} is supported")
    ops = []
    for op in c.ops:
        ops.extend(decompose_gate(op) if isinstance(op, Gate) else [op])
    return c.with_ops(ops)


@dataclass(frozen=True)
class CouplingViolation:
    op_index: int
    control: int
    target: int

    def __str__(self) -> str:
        return f"op {self.op_index}: cx q[{self.control}],q[{self.target}] is not on the coupling map"


def check_coupling(c: Circuit, device: DeviceModel) -> list[CouplingViolation]:
    """Every two-qubit gate must sit on a directed coupling edge; empty list means ok."""
    if c.n_qubits > device.num_qubits:
        return [CouplingViolation(-1, c.n_qubits, device.num_qubits)]
    edges = set(device.coupling_map)
    return [
        CouplingViolation(i, *op.qubits)
        for i, op in enumerate(c.ops)
        if isinstance(op, Gate) and len(op.qubits) == 2 and tuple(op.qubits) not in edges
    ]


@dataclass
class Step:
    """One executable update; ``qubits[0]`` is the least significant local qubit."""

    qubits: tuple[int, ...]
    superop: Superoperator | None
    kind: str = "gate"  # gate | reset | barrier
    label: str = ""

    @property
    def fusable(self) -> bool:
        return self.kind == "gate"


@dataclass
class MeasurementSpec:
    n_clbits: int
    pairs: list[tuple[int, int]]  # (qubit, clbit)
    confusion: list[np.ndarray | None]


@dataclass
class BoundCircuit:
    n_qubits: int
    steps: list[Step]
    measurement: MeasurementSpec
    stats: dict = field(default_factory=dict)

    def gate_steps(self) -> int:
        return sum(s.kind == "gate" for s in self.steps)


def bind_noise(c: Circuit, device: DeviceModel | None) -> BoundCircuit:
    """Map every op of a basis circuit to its (noisy) superoperator."""
    if device is not None:
        bad = check_coupling(c, device)
        if bad:
            if bad[0].op_index < 0:
                raise DeviceError(f"circuit needs {c.n_qubits} qubits, device has {device.num_qubits}")
            raise TranspileError("coupling violations: " + "; ".join(map(str, bad)))
    steps = []
    cache: dict[tuple, Superoperator] = {}
    for op in c.ops:
        if isinstance(op, Gate):
            if device is not None and op.name not in BASIS_GATES:
                raise TranspileError(f"{op.name.lower()} is not a basis gate; decompose first")
            key = (op.name, op.params, op.qubits)
            s = cache.get(key)
            if s is None:
                s = cache[key] = noisy_gate_superop(op.name, op.params, op.qubits, device)
            steps.append(Step(tuple(reversed(op.qubits)), s, "gate", op.name.lower()))
        elif isinstance(op, Reset):
            steps.append(Step((op.qubit,), _RESET_SUPEROP, "reset", "reset"))
        elif isinstance(op, Barrier):
            steps.append(Step(op.qubits or tuple(range(c.n_qubits)), None, "barrier", "barrier"))
    pairs = [(m.qubit, m.clbit) for m in c.ops if isinstance(m, Measure)]
    n_clbits = c.n_clbits
    if not pairs:
        # no measurements: read out every qubit q into clbit q
        pairs, n_clbits = [(q, q) for q in range(c.n_qubits)], c.n_qubits
    conf = [readout_confusion(device.qubit_cals[q]) if device is not None else None for q, _ in pairs]
    return BoundCircuit(c.n_qubits, steps, MeasurementSpec(n_clbits, pairs, conf))


def fuse(b: BoundCircuit) -> BoundCircuit:
    """Merge runs of same-qubit 1q steps and same-ordered-pair 2q steps.

    A step is folded into the most recent step touching its qubits when that
    step is a gate on exactly the same (ordered) qubits. Barriers block
    merging and are dropped; resets are never merged.
    """
    out: list[Step] = []
    last: dict[int, int] = {}  # qubit -> index into out, or -1 after a barrier
    for st in b.steps:
        if st.kind == "barrier":
            for q in st.qubits:
                last[q] = -1
            continue
        idx = {last.get(q) for q in st.qubits}
        if st.fusable and len(idx) == 1:
            j = idx.pop()
            if j is not None and j >= 0 and out[j].fusable and out[j].qubits == st.qubits:
                prev = out[j]
                out[j] = Step(prev.qubits, st.superop @ prev.superop, "gate", f"{prev.label}+{st.label}")
                continue
        out.append(Step(st.qubits, st.superop, st.kind, st.label))
        for q in st.qubits:
            last[q] = len(out) - 1
    return BoundCircuit(b.n_qubits, out, b.measurement, dict(b.stats))
