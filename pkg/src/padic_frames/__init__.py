"""Step tight wavelet frames on the p-adic group and their approximation bounds."""
from .group import TAU_EQ, TAU_ZERO, CharCoset, Params, PointIndex, ShiftIndex
from .step import Spectrum, StepSignal, fourier, inverse_fourier
from .mask import Classification, MaskTree, enumerate_zero_sets, solve_mask, synthesize_phi_hat, validate_zero_set
from .frame import FrameSystem, build_frame, search_tiling, validate_frame_spec
from .frame_ops import analysis_coeffs, parseval_check, partition_check, remainder_energy
from .approx import WeightSpec, bound_log, bound_sobolev_power, bound_thm31, run_report

__all__ = [
    "TAU_EQ", "TAU_ZERO", "CharCoset", "Params", "PointIndex", "ShiftIndex",
    "Spectrum", "StepSignal", "fourier", "inverse_fourier",
    "Classification", "MaskTree", "enumerate_zero_sets", "solve_mask", "synthesize_phi_hat", "validate_zero_set",
    "FrameSystem", "build_frame", "search_tiling", "validate_frame_spec",
    "analysis_coeffs", "parseval_check", "partition_check", "remainder_energy",
    "WeightSpec", "bound_log", "bound_sobolev_power", "bound_thm31", "run_report",
]
