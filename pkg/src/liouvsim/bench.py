"""Per-gate timing of the C1/C2 kernels across register sizes."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .engine import check_memory, memory_estimate
from .noise import DeviceModel, noisy_gate_superop
from .state import DensityState, apply_superop

_C1_GATES = (("SX", ()), ("X", ()), ("ID", ()), ("RZ", None))


@dataclass(frozen=True)
class BenchRow:
    n_qubits: int
    gate_kind: str
    mean_us: float
    memory_bytes: int


def _random_gate(kind: str, n: int, k: int, rng: np.random.Generator, device: DeviceModel | None):
    if kind == "c1":
        name, params = _C1_GATES[rng.integers(len(_C1_GATES))]
        if params is None:
            params = (float(rng.uniform(-np.pi, np.pi)),)
        # round-robin targets: kernel cost varies a little with qubit position
        q = k % n
        return (q,), noisy_gate_superop(name, params, (q,), device)
    if device is not None:
        edges = [e for e in device.coupling_map if max(e) < n]
        if not edges:
            raise ValueError(f"device has no coupling edge within the first {n} qubits")
        c, t = edges[rng.integers(len(edges))]
    else:
        c, t = (int(x) for x in rng.choice(n, size=2, replace=False))
    return (t, c), noisy_gate_superop("CX", (), (c, t), device)


def time_gates(n: int, kind: str, n_gates: int, device: DeviceModel | None = None,
               seed: int = 0, workers: int = 1) -> float:
    """Mean wall time in microseconds of ``n_gates`` random gates of ``kind`` ('c1' or 'c2')."""
    check_memory(n)
    if device is not None and n > device.num_qubits:
        raise ValueError(f"device has only {device.num_qubits} qubits")
    rng = np.random.default_rng(seed)
    gates = [_random_gate(kind, n, k, rng, device) for k in range(n_gates)]
    state = DensityState.ground(n)
    apply_superop(state, *gates[0], workers=workers)  # warm-up / JIT
    t0 = time.perf_counter()
    for qubits, s in gates:
        apply_superop(state, qubits, s, workers=workers)
    return (time.perf_counter() - t0) / n_gates * 1e6


def run_bench(lo: int, hi: int, n_gates: int = 100, device: DeviceModel | None = None,
              seed: int = 0, workers: int = 1, kinds=("c1", "c2")) -> list[BenchRow]:
    rows = []
    for kind in kinds:
        for n in range(lo, hi + 1):
            if kind == "c2" and n < 2:
                continue
            rows.append(BenchRow(n, kind, time_gates(n, kind, n_gates, device, seed, workers), memory_estimate(n)))
    return rows


def scaling_factors(rows: list[BenchRow]) -> dict[str, list[float]]:
    """Ratio of mean gate time between consecutive register sizes, per gate kind."""
    out: dict[str, list[float]] = {}
    for kind in sorted({r.gate_kind for r in rows}):
        rs = sorted((r for r in rows if r.gate_kind == kind), key=lambda r: r.n_qubits)
        out[kind] = [b.mean_us / a.mean_us for a, b in zip(rs, rs[1:])]
    return out
