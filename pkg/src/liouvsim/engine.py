"""End-to-end execution: transpile, bind, fuse, evolve, measure, sample."""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .noise import DeviceModel
from .state import MAX_DENSE_QUBITS, MAX_QUBITS, DensityState, apply_superop, diagonal_probs, expectation_pauli_z
from .transpile import BoundCircuit, bind_noise, decompose_to_basis, fuse as fuse_steps

SCHEMA_VERSION = 1
MAX_SHOTS = 10**8
MAX_OUTCOME_BITS = 24
MEMORY_FRACTION = 0.75
PROB_CUTOFF = 1e-15
_SAMPLE_CHUNK = 1 << 20


class ResourceError(RuntimeError):
    """The requested run would exceed the memory budget."""


def memory_estimate(n_qubits: int) -> int:
    """Bytes needed for the stacked density matrix: 16 * 4**n."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    return 16 * 4**n_qubits


def default_memory_budget() -> int:
    try:
        return os.sysconf("SC_PAGE_SIZE") * os.sysconf("SC_PHYS_PAGES")
    except (ValueError, OSError, AttributeError):
        return 8 << 30


def check_memory(n_qubits: int, budget: int | None = None) -> None:
    if n_qubits > MAX_QUBITS:
        raise ResourceError(f"{n_qubits} qubits exceeds the hard cap of {MAX_QUBITS}")
    budget = default_memory_budget() if budget is None else budget
    need = memory_estimate(n_qubits)
    if need > MEMORY_FRACTION * budget:
        raise ResourceError(
            f"{n_qubits} qubits need {need} bytes, over {MEMORY_FRACTION:.0%} of the {budget}-byte budget"
        )


@dataclass(frozen=True)
class RunConfig:
    shots: int = 0
    seed: int = 0
    fuse: bool = True
    keep_state: bool = False
    workers: int = 1
    memory_budget: int | None = None

    def __post_init__(self):
        if not 0 <= self.shots <= MAX_SHOTS:
            raise ValueError(f"shots must be in [0, {MAX_SHOTS}]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.workers < 0:
            raise ValueError("workers must be >= 0")


@dataclass
class RunResult:
    n_clbits: int
    exact_probs: np.ndarray
    counts: dict[str, int]
    expectations_z: list[float]
    state: np.ndarray | None = None
    stats: dict = field(default_factory=dict)

    def probs_dict(self, cutoff: float = PROB_CUTOFF) -> dict[str, float]:
        return {bitstring(k, self.n_clbits): float(p) for k, p in enumerate(self.exact_probs) if p > cutoff}

    def to_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "probs": self.probs_dict(),
            "counts": dict(self.counts),
            "expectations_z": [float(x) for x in self.expectations_z],
            "stats": dict(self.stats),
        }
        if self.state is not None:
            out["state"] = {"re": self.state.real.tolist(), "im": self.state.imag.tolist()}
        return out


def bitstring(k: int, width: int) -> str:
    """Big-endian: clbit 0 is the rightmost character."""
    return format(k, f"0{width}b") if width else ""


def prepare(circuit: Circuit, device: DeviceModel | None, fuse: bool = True) -> BoundCircuit:
    """Transpile to the basis, bind noise and optionally fuse."""
    basis = decompose_to_basis(circuit)
    bound = bind_noise(basis, device)
    stats = {"gates_parsed": circuit.gate_count(), "gates_basis": basis.gate_count()}
    if fuse:
        bound = fuse_steps(bound)
    stats["gates_fused"] = bound.gate_steps()
    bound.stats = stats
    return bound


def evolve(bound: BoundCircuit, state: DensityState, workers: int = 1) -> DensityState:
    """Apply every step in order; each kernel call returns before the next starts."""
    if state.n_qubits != bound.n_qubits:
        raise ValueError("state and circuit sizes differ")
    for st in bound.steps:
        if st.superop is not None:
            apply_superop(state, st.qubits, st.superop, workers)
    return state


def outcome_distribution(probs: np.ndarray, n_qubits: int, bound: BoundCircuit) -> tuple[np.ndarray, int]:
    """Marginal over measured qubits (indexed by clbits), with readout error applied."""
    meas = bound.measurement
    pairs, nc, conf = meas.pairs, meas.n_clbits, meas.confusion
    if nc > MAX_OUTCOME_BITS:
        raise ResourceError(f"{nc} classical bits exceed the outcome limit of {MAX_OUTCOME_BITS}")
    ks = np.arange(probs.size)
    idx = np.zeros(probs.size, dtype=np.int64)
    for q, c in pairs:
        idx |= ((ks >> q) & 1) << c
    dist = np.bincount(idx, weights=probs, minlength=1 << nc)
    if any(m is not None for m in conf):
        t = dist.reshape([2] * nc)
        for (q, c), m in zip(pairs, conf):
            if m is None:
                continue
            axis = nc - 1 - c
            t = np.moveaxis(np.tensordot(m, t, axes=([1], [axis])), 0, axis)
        dist = t.reshape(-1)
    return dist, nc


def sample_counts(dist: np.ndarray, shots: int, seed: int, width: int) -> dict[str, int]:
    """Inverse-CDF sampling driven by a Philox counter-based stream.

    Shot ``i`` consumes the ``i``-th double of ``Philox(key=seed)``, so the
    result depends only on ``(dist, shots, seed)``.
    """
    if shots == 0:
        return {}
    cdf = np.cumsum(dist)
    cdf /= cdf[-1]
    gen = np.random.Generator(np.random.Philox(key=seed))
    tally = np.zeros(dist.size, dtype=np.int64)
    done = 0
    while done < shots:
        n = min(_SAMPLE_CHUNK, shots - done)
        u = gen.random(n)
        tally += np.bincount(np.searchsorted(cdf, u, side="right").clip(max=dist.size - 1), minlength=dist.size)
        done += n
    return {bitstring(k, width): int(c) for k, c in enumerate(tally) if c}


def run(circuit: Circuit, device: DeviceModel | None = None, cfg: RunConfig | None = None) -> RunResult:
    cfg = cfg or RunConfig()
    t0 = time.perf_counter()
    check_memory(circuit.n_qubits, cfg.memory_budget)
    if device is not None and circuit.n_qubits > device.num_qubits:
        raise ValueError(f"circuit uses {circuit.n_qubits} qubits but device has {device.num_qubits}")
    bound = prepare(circuit, device, cfg.fuse)
    state = evolve(bound, DensityState.ground(circuit.n_qubits), cfg.workers)
    probs = diagonal_probs(state)
    dist, width = outcome_distribution(probs, circuit.n_qubits, bound)
    counts = sample_counts(dist, cfg.shots, cfg.seed, width)
    ez = [expectation_pauli_z(state, q) for q in range(circuit.n_qubits)]
    kept = None
    if cfg.keep_state:
        if circuit.n_qubits > MAX_DENSE_QUBITS:
            raise ResourceError(f"state output is limited to {MAX_DENSE_QUBITS} qubits")
        kept = state.amps.copy()
    stats = dict(bound.stats)
    stats["wall_ms"] = (time.perf_counter() - t0) * 1e3
    return RunResult(width, dist, counts, ez, kept, stats)
