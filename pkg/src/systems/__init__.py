"""Model catalog, frozen symbols and structural audits."""

from .audit import audit_hypotheses, perturbed_states, random_directions, spectral_profile
from .boundary import boundary_operator_eval
from .builtins import PARAMETER_DEFAULTS, GammaLaw, is_inflow, make_builtin
from .models import (
    AuditReport,
    AuditStatus,
    BlockSystem,
    BoundaryOperator,
    CharCounts,
    HypothesisResult,
    MhdSpeeds,
    ProfileReduction,
    SymbolEvaluation,
    invert_block,
)
from .symbols import G_nu, counts, eval_bars, mhd_speeds

__all__ = [
    "AuditReport",
    "AuditStatus",
    "BlockSystem",
    "BoundaryOperator",
    "CharCounts",
    "GammaLaw",
    "G_nu",
    "HypothesisResult",
    "MhdSpeeds",
    "PARAMETER_DEFAULTS",
    "ProfileReduction",
    "SymbolEvaluation",
    "audit_hypotheses",
    "boundary_operator_eval",
    "counts",
    "eval_bars",
    "invert_block",
    "is_inflow",
    "make_builtin",
    "mhd_speeds",
    "perturbed_states",
    "random_directions",
    "spectral_profile",
]
