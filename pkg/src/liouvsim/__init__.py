"""Noisy density-matrix quantum circuit simulation in the superoperator picture."""
from .circuit import Barrier, Circuit, Gate, Measure, Reset
from .engine import RunConfig, RunResult, memory_estimate, run
from .linalg import KrausChannel, Superoperator, superop_from_kraus, superop_from_unitary
from .noise import DeviceModel, load_device_json, uniform_device
from .qasm import parse_qasm2, to_qasm2
from .state import DensityState, new_ground


def benchmarks_dir():
    """Directory holding the bundled benchmark ``.qasm`` circuits."""
    from pathlib import Path

    return Path(__file__).parent / "benchmarks"


__all__ = [
    "Barrier", "Circuit", "Gate", "Measure", "Reset",
    "RunConfig", "RunResult", "memory_estimate", "run",
    "KrausChannel", "Superoperator", "superop_from_kraus", "superop_from_unitary",
    "DeviceModel", "load_device_json", "uniform_device",
    "parse_qasm2", "to_qasm2",
    "DensityState", "new_ground", "benchmarks_dir",
]

__version__ = "0.1.0"
