"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 resource error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import process_tomography_1q, purify_step, teleport_channel, tfim_magnetization
from .bench import run_bench, scaling_factors
from .engine import SCHEMA_VERSION, ResourceError, RunConfig, run
from .noise import load_device_json
from .qasm import parse_qasm2

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2


def _load_device(path):
    return None if path is None else load_device_json(Path(path).read_text())


def _range(text: str, kind=float):
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"expected lo:hi or lo:hi:step, got {text!r}")
    return [kind(p) for p in parts]


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_run(args) -> int:
    circuit = parse_qasm2(Path(args.circuit).read_text())
    device = _load_device(args.noise)
    cfg = RunConfig(shots=args.shots, seed=args.seed, fuse=args.fuse == "on",
                    keep_state=args.emit_state, workers=args.workers)
    result = run(circuit, device, cfg)
    doc = result.to_dict()
    if args.no_timing:
        doc["stats"]["wall_ms"] = 0.0
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_tomography(args) -> int:
    chi = process_tomography_1q(teleport_channel(_load_device(args.noise)))
    doc = {"schema_version": SCHEMA_VERSION, "chi": {"re": chi.real.tolist(), "im": chi.imag.tolist()}}
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_distill(args) -> int:
    errors = [float(x) for x in args.cx_errors.split(",") if x.strip()]
    lo, hi, step = _range(args.fidelity_grid)
    grid = np.round(np.arange(lo, hi + step / 2, step), 12)
    rows = []
    for e in errors:
        for f in grid:
            p, f_out = purify_step(float(f), float(f), e)
            rows.append((repr(e), repr(float(f)), repr(p), repr(f_out)))
    _emit(_csv_text(("cx_error", "f_in", "success_prob", "f_out"), rows), args.output)
    return EXIT_OK


def cmd_ising(args) -> int:
    device = _load_device(args.noise)
    times = np.linspace(0.0, args.tmax, args.points) if args.points > 1 else np.array([0.0])
    mz = tfim_magnetization(args.J, args.lam, times, device, trotter_steps=args.trotter_steps)
    rows = [(repr(float(t)), repr(float(m))) for t, m in zip(times, mz)]
    _emit(_csv_text(("t", "Mz"), rows), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    lo, hi = _range(args.qubits, int)[:2]
    rows = run_bench(lo, hi, args.gates, _load_device(args.noise), args.seed, args.workers)
    text = _csv_text(("n_qubits", "gate_kind", "mean_us", "memory_bytes"),
                     [(r.n_qubits, r.gate_kind, f"{r.mean_us:.3f}", r.memory_bytes) for r in rows])
    _emit(text, args.csv)
    for kind, ratios in scaling_factors(rows).items():
        print(f"{kind} scaling per added qubit: " + ", ".join(f"{x:.2f}" for x in ratios), file=sys.stderr)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; argparse would otherwise exit 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="liouvsim", description="Noisy density-matrix circuit simulator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="simulate an OpenQASM 2 circuit")
    r.add_argument("--circuit", required=True)
    r.add_argument("--noise")
    r.add_argument("--shots", type=int, default=0)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--fuse", choices=("on", "off"), default="on")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--output")
    r.add_argument("--emit-state", action="store_true")
    r.add_argument("--no-timing", action="store_true", help="report wall_ms as 0 for reproducible output")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("tomography-teleport", help="chi matrix of the teleportation channel")
    t.add_argument("--noise")
    t.add_argument("--output")
    t.set_defaults(func=cmd_tomography)

    d = sub.add_parser("distill", help="one DEJMPS round over a fidelity grid")
    d.add_argument("--cx-errors", required=True)
    d.add_argument("--fidelity-grid", required=True)
    d.add_argument("--output")
    d.set_defaults(func=cmd_distill)

    i = sub.add_parser("ising", help="transverse magnetization of the 4-spin chain")
    i.add_argument("--J", type=float, required=True)
    i.add_argument("--lambda", dest="lam", type=float, required=True)
    i.add_argument("--tmax", type=float, required=True)
    i.add_argument("--points", type=int, required=True)
    i.add_argument("--noise")
    i.add_argument("--trotter-steps", type=int)
    i.add_argument("--output")
    i.set_defaults(func=cmd_ising)

    b = sub.add_parser("bench", help="per-gate kernel timing")
    b.add_argument("--qubits", required=True)
    b.add_argument("--gates", type=int, default=100)
    b.add_argument("--noise")
    b.add_argument("--csv")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--workers", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ResourceError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
