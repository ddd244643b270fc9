"""Uniform Evans scans over bounded frequencies and the parabolic sphere."""

from __future__ import annotations

from collections.abc import Sequence

from src.batch import GridEvaluator
from src.core.logging import performance_monitor, scan_logger
from src.profiles.models import Profile
from src.systems import BoundaryOperator

from .evans import evans, evans_polar_limit, evans_winding
from .high_frequency import d2_on_sphere
from .linearized import ProfileCoefficients
from .models import ContourSpec, Frequency, ScanGrid, ScanPoint, ScanReport


def _evaluate(profile: Profile, bc: BoundaryOperator, grid: ScanGrid, coefficients: ProfileCoefficients | None):
    def worker(sample: tuple[str, Frequency]) -> tuple[float, float | None, float | None]:
        regime, zeta = sample
        if regime == "bounded":
            evaluation = evans(profile, bc, zeta, coefficients)
            return evaluation.modulus, evaluation.conditioning["sigma_min"], None
        if regime == "polar":
            value, residual = evans_polar_limit(profile, bc, zeta, grid.rho_ladder, coefficients)
            return value, None, residual
        return d2_on_sphere(profile, bc, zeta), None, None

    return worker


def _winding_entry(profile: Profile, bc: BoundaryOperator, contour: ContourSpec, coefficients: ProfileCoefficients | None) -> dict:
    entry = {"contour": contour.to_dict(), "winding": None, "error": None}
    try:
        entry["winding"], _ = evans_winding(profile, bc, contour, coefficients)
    except Exception as error:
        scan_logger.info(f"winding contour failed: {type(error).__name__}: {error}")
        entry["error"] = type(error).__name__
    return entry


@performance_monitor("evans.scan_uniform_evans")
def scan_uniform_evans(
    profile: Profile,
    bc: BoundaryOperator,
    grid: ScanGrid | None = None,
    *,
    contours: Sequence[ContourSpec] = (),
    jobs: int = 1,
    floor: float = 1e-8,
) -> ScanReport:
    """min |D| for |zeta| <= R (with polar limits) and min |d2| on the parabolic sphere.

    Per-point failures are recorded in the report with their exception class
    and never stop the scan.
    """
    grid = grid or ScanGrid()
    system = profile.system
    coefficients = None if profile.is_constant else ProfileCoefficients.from_profile(profile)
    samples = grid.samples(system.d)
    scan_logger.info(f"{system.name}/{bc.name}: scanning {len(samples)} frequencies on {jobs} workers")
    results = GridEvaluator(jobs).map_ordered(samples, _evaluate(profile, bc, grid, coefficients))

    points = []
    for result in results:
        regime, zeta = result.item
        if result.succeeded:
            value, condition, residual = result.value
            points.append(ScanPoint(result.index, regime, zeta, value=value, condition=condition, residual=residual))
        else:
            points.append(ScanPoint(result.index, regime, zeta, error=result.error_code, error_message=result.error_message))
    windings = tuple(_winding_entry(profile, bc, contour, coefficients) for contour in contours)
    report = ScanReport(system.name, bc.name, system.d, grid, tuple(points), windings, floor)
    scan_logger.info(
        f"{system.name}/{bc.name}: bounded min {report.bounded_min}, sphere min {report.sphere_min}, "
        f"{len(report.failures)} failed points"
    )
    return report


__all__ = ["scan_uniform_evans"]
