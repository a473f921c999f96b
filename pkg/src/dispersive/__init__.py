"""Dispersive qubit-oscillator physics with and without the rotating-wave approximation."""

from .formulas import coupling_matrix, dispersive_params, shift_prediction, validity_report
from .models import ModelKind, build_generator, build_hamiltonian, transform_frame
from .spectra import concurrence, frame_residual, ground_state, numeric_shift, shift_record
from .system import QubitParams, Spin, SystemSpec

__all__ = [
    "ModelKind",
    "QubitParams",
    "Spin",
    "SystemSpec",
    "build_generator",
    "build_hamiltonian",
    "concurrence",
    "coupling_matrix",
    "dispersive_params",
    "frame_residual",
    "ground_state",
    "numeric_shift",
    "shift_prediction",
    "shift_record",
    "transform_frame",
    "validity_report",
]
