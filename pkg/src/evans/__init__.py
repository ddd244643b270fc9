"""Evans functions of layers: bounded, polar and high-frequency regimes."""

from .evans import DEFAULT_LADDER, E_minus, evans, evans_polar_limit, evans_winding, kernel_basis
from .high_frequency import d2_on_sphere, decoupled_subspace, hf_tracking_check, rescaled_evans_hf
from .linearized import LinearizedSystem, ProfileCoefficients, linearized_system
from .models import ContourSpec, EvansEvaluation, Frequency, HighFrequencyEvaluation, ScanGrid, ScanPoint, ScanReport
from .scan import scan_uniform_evans

__all__ = [
    "DEFAULT_LADDER",
    "ContourSpec",
    "E_minus",
    "EvansEvaluation",
    "Frequency",
    "HighFrequencyEvaluation",
    "LinearizedSystem",
    "ProfileCoefficients",
    "ScanGrid",
    "ScanPoint",
    "ScanReport",
    "d2_on_sphere",
    "decoupled_subspace",
    "evans",
    "evans_polar_limit",
    "evans_winding",
    "hf_tracking_check",
    "kernel_basis",
    "linearized_system",
    "rescaled_evans_hf",
    "scan_uniform_evans",
]
