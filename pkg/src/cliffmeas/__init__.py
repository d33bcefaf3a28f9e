"""Constant-depth Pauli-measurement schedules for Clifford circuits, with an exact simulator."""

from .bruhat import StageSequence, bruhat_decompose
from .compiler import SCHEMA_VERSION, Schedule, compile, compile_circuit, frame_correction
from .pauli import PauliOp
from .symplectic import CliffordGate, SymplecticMatrix, circuit_to_symplectic
from .tableau import Tableau
from .verify import end_to_end_check, run_schedule

__version__ = "0.1.0"

__all__ = [
    "SCHEMA_VERSION",
    "CliffordGate",
    "PauliOp",
    "Schedule",
    "StageSequence",
    "SymplecticMatrix",
    "Tableau",
    "bruhat_decompose",
    "circuit_to_symplectic",
    "compile",
    "compile_circuit",
    "end_to_end_check",
    "frame_correction",
    "run_schedule",
]
