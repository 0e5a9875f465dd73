"""Circuit intermediate representation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .gates import gate_def


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    name: str
    params: tuple[float, ...]
    qubits: tuple[int, ...]

    def __init__(self, name: str, params=(), qubits=()):
        object.__setattr__(self, "name", name.upper())
        object.__setattr__(self, "params", tuple(float(p) for p in params))
        object.__setattr__(self, "qubits", tuple(int(q) for q in qubits))


@dataclass(frozen=True)
class Reset:
    qubit: int


@dataclass(frozen=True)
class Measure:
    qubit: int
    clbit: int


@dataclass(frozen=True)
class Barrier:
    qubits: tuple[int, ...]

    def __init__(self, qubits=()):
        object.__setattr__(self, "qubits", tuple(int(q) for q in qubits))


Op = Union[Gate, Reset, Measure, Barrier]


def op_qubits(op: Op) -> tuple[int, ...]:
    if isinstance(op, (Gate, Barrier)):
        return op.qubits
    return (op.qubit,)


@dataclass
class Circuit:
    n_qubits: int
    n_clbits: int = 0
    ops: list = None

    def __post_init__(self):
        if self.ops is None:
            self.ops = []
        self.ops = list(self.ops)
        self.validate()

    def validate(self) -> None:
        if self.n_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        measured: set[int] = set()
        used_clbits: set[int] = set()
        for i, op in enumerate(self.ops):
            check_op(op, self.n_qubits, self.n_clbits, measured, used_clbits, where=f"op {i}")

    def append(self, op: Op) -> "Circuit":
        self.ops.append(op)
        self.validate()
        return self

    @property
    def gates(self) -> list[Gate]:
        return [op for op in self.ops if isinstance(op, Gate)]

    @property
    def measurements(self) -> list[Measure]:
        return [op for op in self.ops if isinstance(op, Measure)]

    def gate_count(self) -> int:
        return sum(isinstance(op, Gate) for op in self.ops)

    def with_ops(self, ops) -> "Circuit":
        return Circuit(self.n_qubits, self.n_clbits, list(ops))


def check_op(op: Op, n_qubits: int, n_clbits: int, measured: set, used_clbits: set, where: str = "") -> None:
    """Validate one op against register sizes and the terminal-measurement rule."""
    prefix = f"{where}: " if where else ""
    for q in op_qubits(op):
        if not 0 <= q < n_qubits:
            raise CircuitError(f"{prefix}qubit index {q} out of range [0, {n_qubits})")
    if isinstance(op, Gate):
        d = gate_def(op.name)
        if len(op.qubits) != d.arity:
            raise CircuitError(f"{prefix}{op.name.lower()} acts on {d.arity} qubit(s), got {len(op.qubits)}")
        if len(op.params) != d.param_count:
            raise CircuitError(f"{prefix}{op.name.lower()} takes {d.param_count} parameter(s), got {len(op.params)}")
        if len(set(op.qubits)) != len(op.qubits):
            raise CircuitError(f"{prefix}repeated qubit in {op.name.lower()}")
    if isinstance(op, (Gate, Reset)):
        hit = measured.intersection(op_qubits(op))
        if hit:
            raise CircuitError(
                f"{prefix}operation on qubit {min(hit)} after its measurement; "
                "only terminal measurements are supported"
            )
    if isinstance(op, Measure):
        if not 0 <= op.clbit < n_clbits:
            raise CircuitError(f"{prefix}clbit index {op.clbit} out of range [0, {n_clbits})")
        if op.qubit in measured:
            raise CircuitError(f"{prefix}qubit {op.qubit} measured twice")
        if op.clbit in used_clbits:
            raise CircuitError(f"{prefix}clbit {op.clbit} written twice")
        measured.add(op.qubit)
        used_clbits.add(op.clbit)
