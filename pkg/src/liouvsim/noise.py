"""Noise channels and device calibration models.

Every channel is built from Kraus operators and converted to a superoperator.
Gate noise is appended after the ideal gate: ``S = S_depol @ S_thermal @ S_ideal``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .gates import BASIS_GATES, build_gate
from .linalg import KrausChannel, Superoperator, superop_from_kraus, superop_from_unitary

PAULIS = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

NOISELESS_GATES = frozenset({"RZ"})


class DeviceError(ValueError):
    """Invalid device description or missing calibration data."""


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")


def depolarizing_channel(p: float, arity: int = 1) -> KrausChannel:
    """``rho -> (1-p) rho + p I/2^arity`` as a Pauli-string Kraus list."""
    _check_prob("depolarizing probability", p)
    if arity not in (1, 2):
        raise ValueError(f"arity must be 1 or 2, got {arity}")
    n_strings = 4**arity
    w_id = math.sqrt(max(0.0, 1.0 - p * (n_strings - 1) / n_strings))
    w = math.sqrt(p / n_strings)
    ops = []
    for idx in itertools.product(range(4), repeat=arity):
        mat = PAULIS[idx[0]]
        for j in idx[1:]:
            mat = np.kron(mat, PAULIS[j])
        ops.append((w_id if not any(idx) else w) * mat)
    return KrausChannel(ops)


def amplitude_damping(gamma: float) -> KrausChannel:
    _check_prob("gamma", gamma)
    return KrausChannel([
        [[1, 0], [0, math.sqrt(1 - gamma)]],
        [[0, math.sqrt(gamma)], [0, 0]],
    ])


def phase_damping(lam: float) -> KrausChannel:
    _check_prob("lambda", lam)
    return KrausChannel([
        [[1, 0], [0, math.sqrt(1 - lam)]],
        [[0, 0], [0, math.sqrt(lam)]],
    ])


def compose_kraus(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Channel applying ``first`` and then ``second``."""
    return KrausChannel([b @ a for b in second.operators for a in first.operators])


def tensor_kraus(high: KrausChannel, low: KrausChannel) -> KrausChannel:
    """Product channel; ``low`` acts on the least significant local qubit."""
    return KrausChannel([np.kron(h, l) for h in high.operators for l in low.operators])


@dataclass(frozen=True)
class QubitCalibration:
    t1_us: float
    t2_us: float
    prob_meas0_prep1: float = 0.0
    prob_meas1_prep0: float = 0.0
    # kept for completeness of the calibration record, unused by any model
    frequency_ghz: float | None = None
    readout_length_ns: float | None = None

    def __post_init__(self):
        if not (self.t1_us > 0 and self.t2_us > 0):
            raise DeviceError(f"T1 and T2 must be positive (t1_us={self.t1_us}, t2_us={self.t2_us})")
        if self.t2_us > 2 * self.t1_us:
            raise DeviceError(
                f"t2_us={self.t2_us} exceeds 2*t1_us={2 * self.t1_us}; "
                "pure dephasing would need a negative rate"
            )
        _check_prob("prob_meas0_prep1", self.prob_meas0_prep1)
        _check_prob("prob_meas1_prep0", self.prob_meas1_prep0)

    @property
    def readout_error(self) -> float:
        return 0.5 * (self.prob_meas0_prep1 + self.prob_meas1_prep0)


@dataclass(frozen=True)
class GateCalibration:
    name: str
    qubits: tuple[int, ...]
    error: float
    duration_ns: float

    def __post_init__(self):
        object.__setattr__(self, "name", self.name.upper())
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        _check_prob("gate error", self.error)
        if self.duration_ns < 0:
            raise DeviceError(f"negative gate duration {self.duration_ns}")


@dataclass(frozen=True)
class DeviceModel:
    name: str
    num_qubits: int
    qubit_cals: tuple[QubitCalibration, ...]
    gate_cals: tuple[GateCalibration, ...]
    coupling_map: tuple[tuple[int, int], ...]
    basis_gates: frozenset[str] = BASIS_GATES
    _lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "qubit_cals", tuple(self.qubit_cals))
        object.__setattr__(self, "gate_cals", tuple(self.gate_cals))
        object.__setattr__(self, "coupling_map", tuple((int(a), int(b)) for a, b in self.coupling_map))
        if len(self.qubit_cals) != self.num_qubits:
            raise DeviceError(f"{self.num_qubits} qubits declared but {len(self.qubit_cals)} calibrations given")
        for a, b in self.coupling_map:
            if a == b or not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise DeviceError(f"invalid coupling edge ({a}, {b})")
        edges = set(self.coupling_map)
        lookup = {}
        for cal in self.gate_cals:
            if any(not 0 <= q < self.num_qubits for q in cal.qubits):
                raise DeviceError(f"{cal.name} calibration on out-of-range qubits {cal.qubits}")
            if len(cal.qubits) == 2 and cal.qubits not in edges:
                raise DeviceError(f"{cal.name} calibration on {cal.qubits}, which is not a coupling edge")
            lookup[(cal.name, cal.qubits)] = cal
        object.__setattr__(self, "_lookup", lookup)
        for name, qubits in self.required_calibrations():
            if (name, qubits) not in lookup:
                raise DeviceError(f"missing calibration for {name.lower()} on qubits {list(qubits)}")

    def required_calibrations(self) -> Iterable[tuple[str, tuple[int, ...]]]:
        for name in sorted(self.basis_gates - NOISELESS_GATES):
            if name == "CX":
                yield from ((name, e) for e in self.coupling_map)
            else:
                yield from ((name, (q,)) for q in range(self.num_qubits))

    def gate_cal(self, name: str, qubits: Sequence[int]) -> GateCalibration:
        key = (name.upper(), tuple(int(q) for q in qubits))
        try:
            return self._lookup[key]
        except KeyError:
            raise DeviceError(f"no calibration for {name.lower()} on qubits {list(key[1])}") from None

    def allows(self, control: int, target: int) -> bool:
        return (control, target) in set(self.coupling_map)

    def to_dict(self) -> dict[str, Any]:
        qubits = []
        for c in self.qubit_cals:
            d = {"t1_us": c.t1_us, "t2_us": c.t2_us,
                 "prob_meas0_prep1": c.prob_meas0_prep1, "prob_meas1_prep0": c.prob_meas1_prep0}
            if c.frequency_ghz is not None:
                d["frequency_ghz"] = c.frequency_ghz
            if c.readout_length_ns is not None:
                d["readout_length_ns"] = c.readout_length_ns
            qubits.append(d)
        return {
            "name": self.name,
            "num_qubits": self.num_qubits,
            "qubits": qubits,
            "gates": [{"name": g.name.lower(), "qubits": list(g.qubits), "error": g.error,
                       "duration_ns": g.duration_ns} for g in self.gate_cals],
            "coupling_map": [list(e) for e in self.coupling_map],
        }


def uniform_device(
    num_qubits: int,
    *,
    error_1q: float = 0.0,
    error_2q: float = 0.0,
    t1_us: float = 100.0,
    t2_us: float = 100.0,
    duration_1q_ns: float = 0.0,
    duration_2q_ns: float = 0.0,
    readout: tuple[float, float] = (0.0, 0.0),
    coupling_map: Iterable[tuple[int, int]] | None = None,
    name: str = "uniform",
) -> DeviceModel:
    """Device with identical calibration everywhere; all-to-all coupling by default.

    ``readout`` is ``(prob_meas0_prep1, prob_meas1_prep0)``.
    """
    if coupling_map is None:
        coupling_map = [(a, b) for a in range(num_qubits) for b in range(num_qubits) if a != b]
    coupling_map = [tuple(e) for e in coupling_map]
    qcals = [QubitCalibration(t1_us, t2_us, readout[0], readout[1]) for _ in range(num_qubits)]
    gcals = [GateCalibration(g, (q,), error_1q, duration_1q_ns) for q in range(num_qubits) for g in ("ID", "SX", "X")]
    gcals += [GateCalibration("CX", e, error_2q, duration_2q_ns) for e in coupling_map]
    return DeviceModel(name, num_qubits, qcals, gcals, coupling_map)


def thermal_relaxation_kraus(cal: QubitCalibration, duration_ns: float) -> KrausChannel:
    if duration_ns < 0:
        raise ValueError(f"negative duration {duration_ns}")
    if cal.t2_us > 2 * cal.t1_us:
        raise DeviceError("thermal relaxation requires t2 <= 2*t1")
    t = duration_ns * 1e-3
    gamma = -math.expm1(-t / cal.t1_us)
    lam = -math.expm1(-2 * t * (1 / cal.t2_us - 1 / (2 * cal.t1_us)))
    return compose_kraus(phase_damping(min(max(lam, 0.0), 1.0)), amplitude_damping(gamma))


def thermal_relaxation_superop(cal: QubitCalibration, duration_ns: float) -> Superoperator:
    """Amplitude damping followed by phase damping over ``duration_ns``.

    Populations relax as ``exp(-t/T1)`` toward ``|0>`` and coherences decay as
    ``exp(-t/T2)``.
    """
    return superop_from_kraus(thermal_relaxation_kraus(cal, duration_ns))


def gate_error_to_depol_p(error: float, arity: int) -> float:
    """Depolarizing probability whose average gate infidelity equals ``error``."""
    d = 2**arity
    return min(1.0, max(0.0, error * d / (d - 1)))


def readout_confusion(cal: QubitCalibration) -> np.ndarray:
    """Column-stochastic ``M[measured, prepared]``."""
    p10 = cal.prob_meas1_prep0
    p01 = cal.prob_meas0_prep1
    return np.array([[1 - p10, p01], [p10, 1 - p01]], dtype=float)


def noisy_gate_superop(gate: str, params: Sequence[float], qubits: Sequence[int],
                       device: DeviceModel | None) -> Superoperator:
    """Superoperator of a basis gate with its calibrated noise appended.

    ``qubits`` are in circuit order (control first for CX); the result is
    indexed with ``qubits[-1]`` as the least significant local qubit.
    """
    gate = gate.upper()
    ideal = superop_from_unitary(build_gate(gate, params))
    if device is None or gate in NOISELESS_GATES:
        return ideal
    if gate not in device.basis_gates:
        raise DeviceError(f"{gate.lower()} is not a basis gate of device {device.name!r}")
    cal = device.gate_cal(gate, qubits)
    arity = len(qubits)
    if arity == 1:
        thermal = thermal_relaxation_kraus(device.qubit_cals[qubits[0]], cal.duration_ns)
    else:
        hi, lo = qubits
        thermal = tensor_kraus(
            thermal_relaxation_kraus(device.qubit_cals[hi], cal.duration_ns),
            thermal_relaxation_kraus(device.qubit_cals[lo], cal.duration_ns),
        )
    depol = depolarizing_channel(gate_error_to_depol_p(cal.error, arity), arity)
    return superop_from_kraus(depol) @ superop_from_kraus(thermal) @ ideal


# ---------------------------------------------------------------- JSON loading

def _req(obj: dict, key: str, path: str, kinds=(int, float)):
    if not isinstance(obj, dict):
        raise DeviceError(f"{path}: expected an object")
    if key not in obj:
        raise DeviceError(f"{path}.{key}: missing required key")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, kinds):
        raise DeviceError(f"{path}.{key}: unexpected type {type(val).__name__}")
    return val


def _opt_num(obj: dict, key: str, path: str):
    if key not in obj or obj[key] is None:
        return None
    return float(_req(obj, key, path))


def device_from_dict(data: Any) -> DeviceModel:
    name = _req(data, "name", "$", str)
    num_qubits = _req(data, "num_qubits", "$", int)
    qubits = _req(data, "qubits", "$", list)
    gates = _req(data, "gates", "$", list)
    coupling = _req(data, "coupling_map", "$", list)

    qcals = []
    for i, q in enumerate(qubits):
        p = f"$.qubits[{i}]"
        try:
            qcals.append(QubitCalibration(
                float(_req(q, "t1_us", p)), float(_req(q, "t2_us", p)),
                float(_req(q, "prob_meas0_prep1", p)), float(_req(q, "prob_meas1_prep0", p)),
                _opt_num(q, "frequency_ghz", p), _opt_num(q, "readout_length_ns", p),
            ))
        except (DeviceError, ValueError) as exc:
            raise DeviceError(f"{p}: {exc}") from None

    gcals = []
    for i, g in enumerate(gates):
        p = f"$.gates[{i}]"
        gname = _req(g, "name", p, str).upper()
        if gname not in BASIS_GATES:
            raise DeviceError(f"{p}.name: {gname.lower()!r} is not a basis gate")
        gq = _req(g, "qubits", p, list)
        expected = 2 if gname == "CX" else 1
        if len(gq) != expected or not all(isinstance(x, int) and not isinstance(x, bool) for x in gq):
            raise DeviceError(f"{p}.qubits: {gname.lower()} needs {expected} integer qubit index(es)")
        if gname in NOISELESS_GATES:
            continue
        try:
            gcals.append(GateCalibration(gname, tuple(gq), float(_req(g, "error", p)),
                                         float(_req(g, "duration_ns", p))))
        except (DeviceError, ValueError) as exc:
            raise DeviceError(f"{p}: {exc}") from None

    edges = []
    for i, e in enumerate(coupling):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise DeviceError(f"$.coupling_map[{i}]: expected a pair of qubit indices")
        edges.append(tuple(e))
    try:
        return DeviceModel(name, num_qubits, qcals, gcals, edges)
    except DeviceError as exc:
        raise DeviceError(f"$: {exc}") from None


def load_device_json(text: str) -> DeviceModel:
    """Parse and validate a device calibration document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DeviceError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return device_from_dict(data)
