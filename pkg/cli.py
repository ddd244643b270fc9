#!/usr/bin/env python3
"""layerlab command line interface."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(ROOT))

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
FAILURE_LIMIT = 0.10
CONSTANT_COEFFICIENT_MODELS = ("scalar", "counterexample")


class CliArgumentParser(argparse.ArgumentParser):
    """Invalid command lines are configuration errors."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _jobs(text: str) -> int:
    from src.core.settings import settings

    value = int(text)
    if not 1 <= value <= settings.MAX_JOBS:
        raise argparse.ArgumentTypeError(f"jobs must lie in 1..{settings.MAX_JOBS}")
    return value


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError("value must be positive")
    return value


def load_run_config(args: argparse.Namespace):
    from src.core.config import load_config

    return load_config(args.config).with_overrides(out=args.out, jobs=args.jobs, tol=args.tol, floor=args.floor, seed=args.seed)


def build_model(config):
    """(system, templates, state) for the configured model and endstate."""
    import numpy as np

    from src.core.errors import ConfigError
    from src.systems import make_builtin

    system, templates = make_builtin(config.model.model_id, config.model.params)
    if config.model.state is None:
        if config.model.model_id not in CONSTANT_COEFFICIENT_MODELS:
            raise ConfigError(f"[model] state is required for {config.model.model_id}")
        state = np.zeros(system.N)
    else:
        state = np.asarray(config.model.state, dtype=float)
    if state.shape != (system.N,):
        raise ConfigError(f"[model] state needs {system.N} components", found=state.size)
    if config.model.nu is not None:
        nu = np.asarray(config.model.nu, dtype=float)
        if nu.shape != (system.d,) or not np.allclose(nu, system.normal):
            raise ConfigError("[model] nu must be the unit normal e_d", nu=tuple(nu.tolist()))
    if config.bc.template not in templates:
        raise ConfigError(f"template {config.bc.template!r} is not available for {system.name}", known=tuple(sorted(templates)))
    return system, templates, state


def build_profile(config, system, templates, state):
    """Layer and boundary operator from [model] amplitude and [bc] data.

    Explicit boundary data solve the boundary-value problem near the
    endstate; otherwise the layer is the constant state or the stable
    manifold member of the given amplitude along the slowest direction.
    """
    import numpy as np

    from src.core.errors import ConfigError
    from src.profiles import constant_profile, small_amplitude_family, solve_profile_bc

    template = templates[config.bc.template]
    tol = config.scan.tol
    if config.bc.g is not None:
        bc = template(state)
        g = np.asarray(config.bc.g, dtype=float)
        if g.size != bc.N1plus + bc.g2.size:
            raise ConfigError(f"[bc] g needs {bc.N1plus + bc.g2.size} components for {bc.name}", found=g.size)
        profile, _ = solve_profile_bc(system, bc, state, g=(g[: bc.N1plus], g[bc.N1plus :]), tol=tol)
        return profile, bc.with_data(g[: bc.N1plus], g[bc.N1plus :]), "boundary_value"
    if config.model.amplitude > 0.0:
        profile = small_amplitude_family(system, state, [config.model.amplitude], radius=config.model.chart_radius, tol=tol)[0]
        return profile, template(profile.w[0]), "stable_manifold"
    return constant_profile(system, state), template(state), "constant"


def _transversality(system, bc, profile, state):
    from src.profiles import transversality_general, transversality_small

    if profile.is_constant:
        return transversality_small(system, bc, state)
    return transversality_general(profile, bc)


def _scan_exit(kind: str, minimum, failure_fraction: float, violation: bool, floor: float) -> int:
    if violation:
        print(f"FAIL: {kind} violation, minimum {minimum} <= floor {floor:g} or nonzero winding")
        return EXIT_VIOLATION
    if failure_fraction > FAILURE_LIMIT:
        print(f"FAIL: {kind} numerical failure on {failure_fraction:.1%} of the grid")
        return EXIT_NUMERICAL
    print(f"PASS: {kind} minimum {minimum} above floor {floor:g}")
    return EXIT_PASS


def audit_command(args: argparse.Namespace) -> int:
    from src.exporters import write_json_report
    from src.systems import AuditStatus, audit_hypotheses, perturbed_states, random_directions

    config = load_run_config(args)
    system, _, state = build_model(config)
    seed = config.model.seed
    states = perturbed_states(system, state, config.model.sample_count, seed)
    directions = random_directions(system.d, config.model.sample_count, seed)
    report = audit_hypotheses(system, states, directions, seed=seed)
    path = write_json_report(report.to_dict(), config.output_dir / f"{config.prefix}_audit.json")
    for result in report.results:
        label = "ADVISORY" if result.status is AuditStatus.ADVISORY else ("PASS" if result.passed else "FAIL")
        print(f"{label}: {result.name}" + (f" ({result.note})" if result.note else ""))
    print(f"Audit report: {path}")
    return EXIT_PASS if report.passed() else EXIT_VIOLATION


def profile_command(args: argparse.Namespace) -> int:
    from src.exporters import write_csv, write_json_report

    config = load_run_config(args)
    system, templates, state = build_model(config)
    profile, bc, construction = build_profile(config, system, templates, state)
    report = _transversality(system, bc, profile, state)
    table = write_csv(profile.columns(), profile.rows(), config.output_dir / f"{config.prefix}_profile.csv")
    payload = {
        "kind": "profile",
        "system": system.name,
        "bc": bc.name,
        "construction": construction,
        "profile": profile.to_dict(),
        "transversality": report.to_dict(),
        "table": table.name,
        "columns": profile.columns(),
    }
    path = write_json_report(payload, config.output_dir / f"{config.prefix}_profile.json")
    print(f"PASS: {construction} profile of {system.name} on [0, {profile.z_max:.6g}], transversal={str(report.transversal).lower()}")
    print(f"Profile reports: {table}, {path}")
    return EXIT_PASS


def evans_scan_command(args: argparse.Namespace) -> int:
    import numpy as np

    from src.core.errors import ConfigError
    from src.evans import ContourSpec, ScanGrid, scan_uniform_evans
    from src.exporters import write_csv, write_json_report

    config = load_run_config(args)
    system, templates, state = build_model(config)
    profile, bc, _ = build_profile(config, system, templates, state)
    scan = config.scan
    grid = ScanGrid(scan.radius, scan.hemisphere_points, scan.rho_points, scan.sphere_points, scan.rho_ladder, config.model.seed)
    contours = []
    if scan.has_contour:
        eta = np.zeros(system.d - 1) if scan.eta is None else np.asarray(scan.eta, dtype=float)
        if eta.shape != (system.d - 1,):
            raise ConfigError(f"[scan] eta needs {system.d - 1} components", found=eta.size)
        contours.append(ContourSpec(scan.contour_center, scan.contour_radius, tuple(eta), scan.contour_points))
    report = scan_uniform_evans(profile, bc, grid, contours=contours, jobs=config.jobs, floor=scan.floor)
    table = write_csv(report.columns(), report.rows(), config.output_dir / f"{config.prefix}_evans_scan.csv")
    payload = {**report.to_dict(), "table": table.name}
    path = write_json_report(payload, config.output_dir / f"{config.prefix}_evans_scan.json")
    for entry in report.windings:
        print(f"Winding on |lambda - {entry['contour']['center'][0]:g}| = {entry['contour']['radius']:g}: {entry['winding']}")
    print(f"Evans scan reports: {table}, {path}")
    minima = [value for value in (report.bounded_min, report.sphere_min) if value is not None]
    return _scan_exit("evans-scan", min(minima) if minima else None, report.failure_fraction, report.violation, scan.floor)


def lop_scan_command(args: argparse.Namespace) -> int:
    from src.core.errors import NoSymmetrizer
    from src.exporters import write_csv, write_json_report
    from src.hyperbolic import lopatinski_scan, maximal_dissipativity, residual_tangent_space

    config = load_run_config(args)
    system, templates, state = build_model(config)
    profile, bc, _ = build_profile(config, system, templates, state)
    residual = residual_tangent_space(system, bc, profile.endstate, profile=profile)
    try:
        dissipativity = maximal_dissipativity(system, residual).to_dict()
    except NoSymmetrizer:
        dissipativity = None
    residual_path = write_json_report(
        {**residual.to_dict(), "dissipativity": dissipativity},
        config.output_dir / f"{config.prefix}_residual_bc.json",
    )
    report = lopatinski_scan(system, residual, config.scan.lop_grid, jobs=config.jobs, floor=config.scan.floor)
    table = write_csv(report.columns(), report.rows(), config.output_dir / f"{config.prefix}_lop_scan.csv")
    path = write_json_report({**report.to_dict(), "table": table.name}, config.output_dir / f"{config.prefix}_lop_scan.json")
    if dissipativity is not None:
        print(f"Maximally dissipative residual condition: {str(dissipativity['dissipative']).lower()}")
    witness = report.witness
    if witness is not None:
        print(f"Lopatinski minimum at (tau, gamma, eta) = {(witness.frequency.tau, witness.frequency.gamma, *witness.frequency.eta)}")
    print(f"Lopatinski reports: {residual_path}, {table}, {path}")
    return _scan_exit("lop-scan", report.minimum, report.failure_fraction, report.violation, config.scan.floor)


def create_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="INI run configuration")
    common.add_argument("--out", help="Report directory; overrides [output] directory")
    common.add_argument("--jobs", type=_jobs, help="Worker threads for grid scans (1..32)")
    common.add_argument("--tol", type=_positive, help="Overrides [scan] tol")
    common.add_argument("--floor", type=_positive, help="Overrides [scan] floor")
    common.add_argument("--seed", type=int, help="Overrides [model] seed")

    parser = CliArgumentParser(description="Viscous boundary-layer profiles, Evans functions and Lopatinski scans")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)

    audit = subparsers.add_parser("audit", parents=[common], help="Check the structural hypotheses of a model")
    audit.set_defaults(func=audit_command)
    profile = subparsers.add_parser("profile", parents=[common], help="Build a layer profile and test transversality")
    profile.set_defaults(func=profile_command)
    evans = subparsers.add_parser("evans-scan", parents=[common], help="Uniform Evans scan of a layer")
    evans.set_defaults(func=evans_scan_command)
    lop = subparsers.add_parser("lop-scan", parents=[common], help="Residual boundary condition and Lopatinski scan")
    lop.set_defaults(func=lop_scan_command)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    import numpy as np

    from src.core.errors import ConfigError, LayerlabError, ModelError, as_layerlab_error
    from src.core.logging import cli_logger, setup_logging
    from src.core.settings import settings

    setup_logging(os.getenv(settings.LOG_ENV_VAR))
    args = create_parser().parse_args(argv)
    try:
        return int(args.func(args) or 0)
    except (ConfigError, ModelError) as error:
        print(f"FAIL: configuration error: {type(error).__name__}: {error}")
        return EXIT_CONFIG
    except (LayerlabError, ValueError, np.linalg.LinAlgError) as raised:
        error = as_layerlab_error(raised)
        cli_logger.info(f"{args.command} stopped: {type(error).__name__}: {error}")
        print(f"FAIL: {type(error).__name__}: {error}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
