"""Acceptance criteria 1-11, one test each.

Every test prints a single ``[criterion N] PASS|FAIL ...`` line (visible even
under output capture) before asserting. Run directly with
``python3 tests/test_acceptance.py`` for the bare report.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from liouvsim import benchmarks_dir
from liouvsim.analysis import process_tomography_1q, purify_step, teleport_channel, tfim_magnetization
from liouvsim.bench import time_gates
from liouvsim.circuit import Circuit, Gate, Measure
from liouvsim.engine import RunConfig, memory_estimate, prepare, run
from liouvsim.gates import GATES, build_gate
from liouvsim.linalg import norm_diff, superop_from_kraus, superop_from_unitary
from liouvsim.noise import (
    QubitCalibration, amplitude_damping, depolarizing_channel, gate_error_to_depol_p, noisy_gate_superop,
    phase_damping, thermal_relaxation_kraus, thermal_relaxation_superop, uniform_device,
)
from liouvsim.oracle import dense_evolve, gate_local_qubits
from liouvsim.qasm import parse_qasm2
from liouvsim.state import DensityState, apply_superop, group_base_index
from liouvsim.transpile import decompose_to_basis

sys.path.insert(0, str(Path(__file__).parent))
from conftest import random_density, random_kraus, random_unitary  # noqa: E402
from test_noise import direct_ad, direct_depol, direct_pd, direct_thermal  # noqa: E402

GHZ = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[3];\ncreg c[3];\nh q[0];\ncx q[0],q[1];\ncx q[1],q[2];\nmeasure q -> c;\n'


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return _report


def _unvec(amps, n):
    d = 1 << n
    return amps.reshape(d, d, order="F")


def _random_gate(rng, n, names):
    name = names[rng.integers(len(names))]
    d = GATES[name]
    qubits = tuple(int(q) for q in rng.permutation(n)[: d.arity])
    params = tuple(float(x) for x in rng.uniform(-2 * math.pi, 2 * math.pi, d.param_count))
    return Gate(name, params, qubits)


def _basis_kraus_oracle(rho, gate, dev):
    """Ideal gate, then per-qubit thermal relaxation, then depolarizing, as separate Kraus sums."""
    qs = gate_local_qubits(gate)
    rho = dense_evolve(rho, build_gate(gate.name, gate.params), qs)
    if gate.name == "RZ":
        return rho
    cal = dev.gate_cal(gate.name, gate.qubits)
    for q in gate.qubits:
        rho = dense_evolve(rho, thermal_relaxation_kraus(dev.qubit_cals[q], cal.duration_ns).operators, [q])
    p = gate_error_to_depol_p(cal.error, len(qs))
    return dense_evolve(rho, depolarizing_channel(p, len(qs)).operators, qs)


# ---------------------------------------------------------------- 1

def test_criterion_1_oracle_equivalence(report):
    rng = np.random.default_rng(2024)
    all_names = sorted(GATES)
    t0 = time.perf_counter()
    worst = 0.0
    for case in range(200):
        n = int(rng.integers(1, 5))
        names = [g for g in all_names if GATES[g].arity <= n]
        n_ops = int(rng.integers(1, 31))
        rho0 = random_density(rng, n)
        mode = case % 3
        if mode == 0:
            # noiseless, full transpile + fuse pipeline
            gates = [_random_gate(rng, n, names) for _ in range(n_ops)]
            bound = prepare(Circuit(n, 0, gates), None, fuse=True)
            state = DensityState.from_dense(rho0)
            for st in bound.steps:
                apply_superop(state, st.qubits, st.superop)
            ref = rho0
            for g in gates:
                ref = dense_evolve(ref, build_gate(g.name, g.params), gate_local_qubits(g))
        elif mode == 1:
            # arbitrary Kraus channels interleaved with ideal gates on the kernels directly
            state = DensityState.from_dense(rho0)
            ref = rho0
            for _ in range(n_ops):
                k = 1 if n == 1 else int(rng.integers(1, 3))
                qs = tuple(int(q) for q in rng.permutation(n)[:k])
                ops = random_kraus(rng, 1 << k, int(rng.integers(1, 4))) if rng.random() < 0.5 \
                    else [random_unitary(rng, 1 << k)]
                apply_superop(state, qs, superop_from_kraus(ops))
                ref = dense_evolve(ref, ops, qs)
        else:
            # device noise through transpile, bind and fuse
            dev = uniform_device(n, error_1q=float(rng.uniform(0, 0.01)), error_2q=float(rng.uniform(0, 0.05)),
                                 t1_us=80.0, t2_us=float(rng.uniform(20, 160)),
                                 duration_1q_ns=35.0, duration_2q_ns=300.0)
            gates = [_random_gate(rng, n, names) for _ in range(n_ops)]
            c = Circuit(n, 0, gates)
            bound = prepare(c, dev, fuse=True)
            state = DensityState.from_dense(rho0)
            for st in bound.steps:
                apply_superop(state, st.qubits, st.superop)
            ref = rho0
            for g in decompose_to_basis(c).ops:
                ref = _basis_kraus_oracle(ref, g, dev)
        worst = max(worst, float(np.max(np.abs(state.to_dense() - ref))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed <= 60
    report(1, ok, f"200 circuits, max |diff| = {worst:.2e} (tol 1e-12), {elapsed:.1f} s (limit 60 s)")


# ---------------------------------------------------------------- 2

def _insert_zero_bits(i, q, n):
    def ins(x, p):
        return ((x >> p) << (p + 1)) | (x & ((1 << p) - 1))
    return ins(ins(i, q), q + n)


def test_criterion_2_index_formula(report):
    cases = bad = 0
    for n in range(1, 7):
        for q in range(n):
            for i in range(4**n):
                cases += 1
                bad += group_base_index(i, q, n) != _insert_zero_bits(i, q, n)
    report(2, bad == 0 and cases > 25_000, f"{cases} cases, {bad} mismatches")


# ---------------------------------------------------------------- 3

def test_criterion_3_channel_validation(report):
    grid = np.linspace(0.0, 1.0, 51)
    worst = {}
    worst["depol1"] = max(norm_diff(superop_from_kraus(depolarizing_channel(p, 1)).matrix, direct_depol(p, 1)) for p in grid)
    worst["depol2"] = max(norm_diff(superop_from_kraus(depolarizing_channel(p, 2)).matrix, direct_depol(p, 2)) for p in grid)
    worst["amp_damp"] = max(norm_diff(superop_from_kraus(amplitude_damping(g)).matrix, direct_ad(g)) for g in grid)
    worst["phase_damp"] = max(norm_diff(superop_from_kraus(phase_damping(x)).matrix, direct_pd(x)) for x in grid)
    cal = QubitCalibration(100.0, 80.0)
    worst["thermal"] = max(
        norm_diff(thermal_relaxation_superop(cal, t).matrix, direct_thermal(100.0, 80.0, t * 1e-3))
        for t in np.linspace(0.0, 500_000.0, 51)
    )
    ok = all(v <= 1e-14 for v in worst.values())
    report(3, ok, "51 points each, max norm_diff " + ", ".join(f"{k}={v:.1e}" for k, v in worst.items()) + " (tol 1e-14)")


# ---------------------------------------------------------------- 4

def test_criterion_4_ghz(report):
    c = parse_qasm2(GHZ)
    r = run(c)
    probs = r.exact_probs
    dev_main = max(abs(probs[0] - 0.5), abs(probs[7] - 0.5))
    dev_other = float(np.max(np.abs(probs[1:7])))
    a = run(c, cfg=RunConfig(shots=500, seed=77)).counts
    b = run(c, cfg=RunConfig(shots=500, seed=77)).counts
    same = repr(sorted(a.items())).encode() == repr(sorted(b.items())).encode()
    ok = dev_main <= 1e-12 and dev_other <= 1e-12 and same and sum(a.values()) == 500
    report(4, ok, f"|p-0.5| = {dev_main:.1e}, other outcomes <= {dev_other:.1e}, 500-shot counts reproducible: {same} {a}")


# ---------------------------------------------------------------- 5

def test_criterion_5_teleport(report):
    chi = process_tomography_1q(teleport_channel())
    off = chi.copy()
    off[0, 0] = 0
    c00 = abs(chi[0, 0] - 1)
    rest = float(np.max(np.abs(off)))
    noisy = process_tomography_1q(teleport_channel(uniform_device(3, error_1q=0.1, error_2q=0.1)))
    ok = c00 <= 1e-10 and rest <= 1e-9 and noisy[0, 0].real < 0.95
    report(5, ok, f"|chi00-1| = {c00:.1e}, max other = {rest:.1e}, noisy chi00 = {noisy[0, 0].real:.4f} (< 0.95)")


# ---------------------------------------------------------------- 6

def test_criterion_6_fusion(report):
    files = sorted(benchmarks_dir().glob("*.qasm"))
    growth, shrink, agree, lines = [], [], [], []
    for f in files:
        c = parse_qasm2(f.read_text())
        fused = run(c, cfg=RunConfig(fuse=True))
        plain = run(c, cfg=RunConfig(fuse=False))
        s = fused.stats
        g, k = s["gates_basis"] / s["gates_parsed"], s["gates_basis"] / s["gates_fused"]
        growth.append(g)
        shrink.append(k)
        agree.append(float(np.max(np.abs(fused.exact_probs - plain.exact_probs))))
        lines.append(f"{f.stem}: {s['gates_parsed']}->{s['gates_basis']}->{s['gates_fused']}")
    mg, ms = float(np.mean(growth)), float(np.mean(shrink))
    ok = len(files) >= 5 and 1.5 <= mg <= 4 and ms >= 1.2 and max(agree) <= 1e-12
    report(6, ok, f"{len(files)} circuits, mean transpile growth {mg:.2f} (in [1.5, 4]), mean fusion factor "
                  f"{ms:.2f} (>= 1.2), fused vs unfused max |dp| {max(agree):.1e}; " + "; ".join(lines))


# ---------------------------------------------------------------- 7

def test_criterion_7_noise_limits(report):
    rng = np.random.default_rng(7)
    cal = QubitCalibration(50.0, 70.0)
    s_th = thermal_relaxation_superop(cal, 1e6 * 50.0 * 1e3)
    zero = np.diag([1.0, 0.0])
    th = max(float(np.max(np.abs(s_th.apply_dense(random_density(rng, 1)) - zero))) for _ in range(100))
    s_dep = superop_from_kraus(depolarizing_channel(1.0))
    dep = max(float(np.max(np.abs(s_dep.apply_dense(random_density(rng, 1)) - np.eye(2) / 2))) for _ in range(100))
    devs = [uniform_device(2, error_1q=e, t1_us=t1, t2_us=t1, duration_1q_ns=d)
            for e, t1, d in ((0.0, 100.0, 0.0), (0.05, 10.0, 500.0), (0.5, 1.0, 1e4))]
    rz_exact = all(
        np.array_equal(noisy_gate_superop("RZ", [th_], [q], dev).matrix,
                       superop_from_unitary(build_gate("RZ", [th_])).matrix)
        for dev in devs for q in (0, 1) for th_ in rng.uniform(-7, 7, 10)
    )
    ok = th <= 1e-10 and dep <= 1e-12 and rz_exact
    report(7, ok, f"thermal(t=1e6*T1) -> |0><0| within {th:.1e}, depol(p=1) -> I/2 within {dep:.1e}, RZ exact: {rz_exact}")


# ---------------------------------------------------------------- 8

ISING_DEVICE = dict(error_1q=1e-3, error_2q=1e-2, t1_us=100.0, t2_us=80.0, duration_1q_ns=35.0, duration_2q_ns=300.0)


@pytest.mark.slow
def test_criterion_8_ising(report):
    times = np.linspace(0.0, 2 * math.pi, 50)
    results = []
    for J, lam in ((1.0, 1.0), (1.0, 0.5)):
        exact = np.array(tfim_magnetization(J, lam, times))
        clean = np.array(tfim_magnetization(J, lam, times, trotter_steps=200))
        noisy = np.array(tfim_magnetization(J, lam, times, uniform_device(4, **ISING_DEVICE)))
        d_clean, d_noisy = np.abs(clean - exact), np.abs(noisy - exact)
        results.append((J, lam, float(d_clean.max()), bool(np.all(d_noisy > d_clean)), float(d_noisy.min())))
    ok = all(dc <= 0.01 and worse for _, _, dc, worse, _ in results)
    detail = "; ".join(f"J={J} lambda={lam}: noiseless max dev {dc:.1e} (tol 0.01), noisy dev > noiseless at "
                       f"all 50 points: {w} (min noisy dev {mn:.1e})" for J, lam, dc, w, mn in results)
    report(8, ok, detail)


# ---------------------------------------------------------------- 9

def test_criterion_9_distillation(report):
    grid = np.round(np.arange(0.6, 0.95 + 1e-9, 0.05), 12)

    def gains(e):
        return [purify_step(f, f, e)[1] - f for f in grid]

    clean_ok = min(gains(0.0)) > 0
    threshold = None
    for e in np.round(np.arange(0.0, 0.2001, 0.001), 6):
        if max(gains(float(e))) <= 0:
            threshold = float(e)
            break
    ok = clean_ok and threshold is not None and 0.04 <= threshold <= 0.10
    report(9, ok, f"noiseless f_out > f_in on all {grid.size} grid points: {clean_ok}; "
                  f"no-improvement threshold cx_error = {threshold} (in [0.04, 0.10])")


# ---------------------------------------------------------------- 10

def test_criterion_10_invariants(report):
    rng = np.random.default_rng(10)
    names = sorted(GATES)
    t0 = time.perf_counter()
    fails = {"trace": 0, "hermitian": 0, "psd": 0, "workers": 0, "phase": 0}
    for _ in range(500):
        n = int(rng.integers(1, 4))
        dev = uniform_device(n, error_1q=float(rng.uniform(0, 0.05)), error_2q=float(rng.uniform(0, 0.1)),
                             t1_us=50.0, t2_us=float(rng.uniform(10, 100)), duration_1q_ns=50.0,
                             duration_2q_ns=400.0, readout=(0.02, 0.01))
        gates = [_random_gate(rng, n, [g for g in names if GATES[g].arity <= n]) for _ in range(int(rng.integers(1, 12)))]
        c = Circuit(n, n, gates + [Measure(q, q) for q in range(n)])
        r1 = run(c, dev, RunConfig(keep_state=True, workers=1))
        r3 = run(c, dev, RunConfig(keep_state=True, workers=3))
        rho = _unvec(r1.state, n)
        fails["workers"] += int(not (np.array_equal(r1.state, r3.state) and np.array_equal(r1.exact_probs, r3.exact_probs)))
        fails["trace"] += int(abs(np.trace(rho) - 1) > 1e-12)
        fails["hermitian"] += int(np.max(np.abs(rho - rho.conj().T)) > 1e-12)
        fails["psd"] += int(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -1e-12)
        k = 1 if n == 1 else 2
        qs = tuple(int(q) for q in rng.permutation(n)[:k])
        u = random_unitary(rng, 1 << k)
        a, b = DensityState(n, r1.state.copy()), DensityState(n, r1.state.copy())
        apply_superop(a, qs, superop_from_unitary(u))
        apply_superop(b, qs, superop_from_unitary(np.exp(1j * rng.uniform(0, 2 * math.pi)) * u))
        fails["phase"] += int(np.max(np.abs(a.amps - b.amps)) > 1e-12)
    elapsed = time.perf_counter() - t0
    ok = not any(fails.values()) and elapsed <= 120
    report(10, ok, f"500 cases, failures {fails}, {elapsed:.1f} s (limit 120 s)")


# ---------------------------------------------------------------- 11

@pytest.mark.slow
def test_criterion_11_scaling(report):
    n_gates = {n: n * reps for n, reps in ((8, 40), (9, 20), (10, 8), (11, 4), (12, 2))}
    # interleave sizes over several rounds and keep the fastest, so background load hits every size alike
    t = {n: math.inf for n in n_gates}
    for r in range(7):
        for n, g in n_gates.items():
            t[n] = min(t[n], time_gates(n, "c1", g, seed=r))
    ratios = [t[n + 1] / t[n] for n in range(8, 12)]
    mem = memory_estimate(27)
    mem_ok = mem == 16 * 4**27 and round(mem / 2**50) == 256
    ok = all(3 <= x <= 5 for x in ratios) and mem_ok
    report(11, ok, "C1 time ratios n->n+1 for n=8..11: " + ", ".join(f"{x:.2f}" for x in ratios)
                   + f" (in [3, 5]); memory_estimate(27) = {mem} B = {mem / 2**50:.0f} PiB")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
