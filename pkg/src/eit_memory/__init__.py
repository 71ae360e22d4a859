"""Trapping, storing and releasing quantum light in a driven Lambda-atom cavity.

Time is measured in units of the bare-cavity decay time 1/gamma, and the
quantization length is absorbed so that a normalized envelope satisfies
``int |h|^2 dt = 1``.
"""

__version__ = "0.1.0"

from .errors import (BandwidthError, CutoffError, GridMismatchError, InfeasibleError,
                     NormalizationError, RecurrenceError, StepSizeError, TruncationError,
                     UnmatchableError)
from .grid import TimeGrid
from .impedance import (AdiabaticityMargins, adiabaticity_margins, impedance_residual,
                        matched_schedule)
from .ladder import (ControlSchedule, DarkAmplitudeTrajectory, SystemParams, capture_channel,
                     dark_amplitude, dark_state_coeffs, loss_channel, loss_kraus,
                     mixing_angle_from_rabi, output_envelope, rabi_from_mixing_angle)
from .oracle import (BathGrid, LambdaTrajectory, ModeTrajectory, discretize_input, free_field,
                     integrate_lambda_system, integrate_mode_equations)
from .protocol import (CycleResult, SweepPoint, Tailored, TimeReverse, bipartite_store,
                       fidelity_sweep, full_cycle, negativity, partial_transpose, release,
                       storage_decay, two_mode_ket)
from .states import (FockStateMatrix, PulseEnvelope, make_coherent, make_fock,
                     make_gaussian_envelope, make_sech_envelope, make_squeezed_vacuum,
                     squeezing_for_mean_photons, state_fidelity)

__all__ = [
    "AdiabaticityMargins", "BandwidthError", "BathGrid", "ControlSchedule", "CutoffError",
    "CycleResult", "DarkAmplitudeTrajectory", "FockStateMatrix", "GridMismatchError",
    "InfeasibleError", "LambdaTrajectory", "ModeTrajectory", "NormalizationError", "PulseEnvelope",
    "RecurrenceError", "StepSizeError", "SweepPoint", "SystemParams", "Tailored", "TimeGrid",
    "TimeReverse", "TruncationError", "UnmatchableError", "adiabaticity_margins", "bipartite_store",
    "capture_channel", "dark_amplitude", "dark_state_coeffs", "discretize_input", "fidelity_sweep",
    "free_field", "full_cycle", "impedance_residual", "integrate_lambda_system",
    "integrate_mode_equations", "loss_channel", "loss_kraus", "make_coherent", "make_fock",
    "make_gaussian_envelope", "make_sech_envelope", "make_squeezed_vacuum", "matched_schedule",
    "mixing_angle_from_rabi", "negativity", "output_envelope", "partial_transpose",
    "rabi_from_mixing_angle", "release", "squeezing_for_mean_photons", "state_fidelity",
    "storage_decay", "two_mode_ket",
]
