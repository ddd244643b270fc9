"""Exception hierarchy shared by every layerlab module.

Numerical failures carry the offending location (z, zeta, gap, block name,
residual) in ``payload`` so that scans can record them per grid point.
"""

from __future__ import annotations

from typing import Any, Mapping


class LayerlabError(RuntimeError):
    """Base class of all layerlab failures."""

    def __init__(self, message: str, **payload: Any) -> None:
        self.message = message
        self.payload: Mapping[str, Any] = dict(payload)
        super().__init__(message)

    def __str__(self) -> str:
        if not self.payload:
            return self.message
        details = ", ".join(f"{key}={_render(value)}" for key, value in sorted(self.payload.items()))
        return f"{self.message} ({details})"


def _render(value: Any) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    if isinstance(value, complex):
        return f"{value.real:.6g}{value.imag:+.6g}j"
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(_render(item) for item in value) + ")"
    return str(value)


class ConfigError(LayerlabError):
    """Invalid run configuration or command line input."""


class ConfigParse(ConfigError):
    """A configuration file could not be parsed or holds an unknown key."""


class ModelError(LayerlabError):
    """A model could not be instantiated."""


class BadParams(ModelError):
    """Model parameters violate the admissibility conditions."""


class NumericalError(LayerlabError):
    """A numerical kernel failed."""


class NonFinite(NumericalError):
    """Input or intermediate values contain NaN or infinity."""


class DimensionMismatch(NumericalError):
    """Operand dimensions are incompatible."""


class GapTooSmall(NumericalError):
    """Eigenvalues lie too close to the splitting line."""


class GapCollapse(NumericalError):
    """The tracked spectral subset touched the rest of the spectrum along a path."""


class StepFailure(NumericalError):
    """The adaptive integrator underflowed its minimum step."""


class NoConvergence(NumericalError):
    """An iteration did not reach its tolerance."""


class SingularJacobian(NumericalError):
    """A Newton Jacobian is singular."""


class SingularBlock(NumericalError):
    """A coefficient block that must be invertible is singular."""


class Characteristic(NumericalError):
    """A normal symbol has an eigenvalue at zero."""


class DomainViolation(NumericalError):
    """A state lies outside the declared model domain."""


class ChartRadiusExceeded(NumericalError):
    """A stable-manifold coordinate exceeds the chart radius."""


class NontransversalSeed(NumericalError):
    """The boundary-value Jacobian at the seed is rank deficient."""


class NontransversalLayer(NumericalError):
    """The endstate tangent space has the wrong dimension."""


class DecayTooSlow(NumericalError):
    """The profile has not decayed to its endstate within the truncation length."""


class NonConvergentLadder(NumericalError):
    """Successive differences along a rho ladder grow."""


class NoSymmetrizer(NumericalError):
    """The model does not provide a symmetrizer."""


class NotOrthonormal(NumericalError):
    """Subspace basis columns are not orthonormal."""


def as_layerlab_error(error: Exception) -> LayerlabError:
    """The error itself, or a NumericalError naming the foreign exception type."""
    if isinstance(error, LayerlabError):
        return error
    return NumericalError(str(error) or type(error).__name__, source=type(error).__name__)


__all__ = [
    "LayerlabError",
    "ConfigError",
    "ConfigParse",
    "ModelError",
    "BadParams",
    "NumericalError",
    "NonFinite",
    "DimensionMismatch",
    "GapTooSmall",
    "GapCollapse",
    "StepFailure",
    "NoConvergence",
    "SingularJacobian",
    "SingularBlock",
    "Characteristic",
    "DomainViolation",
    "ChartRadiusExceeded",
    "NontransversalSeed",
    "NontransversalLayer",
    "DecayTooSlow",
    "NonConvergentLadder",
    "NoSymmetrizer",
    "NotOrthonormal",
    "as_layerlab_error",
]
