"""Run configuration: a flat INI file with [model], [bc], [scan] and [output] sections."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Mapping

from .errors import ConfigError, ConfigParse
from .logging import get_logger
from .settings import settings

config_logger = get_logger("config")

MODEL_IDS = ("isentropic_ns", "full_ns", "mhd", "scalar", "counterexample")
TEMPLATES = ("dirichlet", "neumann", "mixed", "outflow", "inflow_mixed")
MODEL_PARAMETERS = ("gamma", "pressure_coeff", "mu", "eta", "kappa", "gas_constant", "a", "b", "speed", "tangential_speed")


def _vector(text: str) -> tuple[float, ...]:
    return tuple(float(item) for item in text.split(",") if item.strip())


def _name(text: str) -> str:
    return text.strip()


def _complex(text: str) -> complex:
    return complex(text.strip().replace(" ", ""))


SECTIONS: dict[str, dict[str, Callable[[str], Any]]] = {
    "model": {
        "model_id": _name,
        **{key: float for key in MODEL_PARAMETERS},
        "state": _vector,
        "nu": _vector,
        "amplitude": float,
        "chart_radius": float,
        "sample_count": int,
        "seed": int,
    },
    "bc": {"template": _name, "g": _vector},
    "scan": {
        "radius": float,
        "hemisphere_points": int,
        "rho_points": int,
        "sphere_points": int,
        "rho_ladder": _vector,
        "lop_grid": int,
        "eta": _vector,
        "contour_center": _complex,
        "contour_radius": float,
        "contour_points": int,
        "floor": float,
        "tol": float,
    },
    "output": {"directory": _name, "prefix": _name},
}


@dataclass(frozen=True)
class ModelConfig:
    model_id: str
    params: Mapping[str, float] = field(default_factory=dict)
    state: tuple[float, ...] | None = None
    nu: tuple[float, ...] | None = None
    amplitude: float = 0.0
    chart_radius: float | None = None
    sample_count: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.model_id not in MODEL_IDS:
            raise ConfigParse(f"unknown model_id {self.model_id!r}", known=MODEL_IDS)
        from src.systems import PARAMETER_DEFAULTS

        foreign = sorted(set(self.params) - set(PARAMETER_DEFAULTS[self.model_id]))
        if foreign:
            raise ConfigParse(f"parameters not used by {self.model_id}", keys=tuple(foreign))
        if self.amplitude < 0.0:
            raise ConfigError("amplitude must be non-negative", amplitude=self.amplitude)
        if self.chart_radius is not None and not self.chart_radius > 0.0:
            raise ConfigError("chart_radius must be positive", chart_radius=self.chart_radius)
        if self.sample_count < 1:
            raise ConfigError("sample_count must be at least 1", sample_count=self.sample_count)


@dataclass(frozen=True)
class BoundaryConfig:
    template: str = "dirichlet"
    g: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.template not in TEMPLATES:
            raise ConfigParse(f"unknown boundary template {self.template!r}", known=TEMPLATES)


@dataclass(frozen=True)
class ScanConfig:
    radius: float = 10.0
    hemisphere_points: int = 16
    rho_points: int = 8
    sphere_points: int = 256
    rho_ladder: tuple[float, ...] = (1e-2, 5e-3, 2.5e-3)
    lop_grid: int = 64
    eta: tuple[float, ...] | None = None
    contour_center: complex | None = None
    contour_radius: float | None = None
    contour_points: int = 256
    floor: float = 1e-8
    tol: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("radius", "floor", "tol"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be positive", value=getattr(self, name))
        for name in ("hemisphere_points", "rho_points", "sphere_points", "lop_grid"):
            if getattr(self, name) < 2:
                raise ConfigError(f"{name} must be at least 2", value=getattr(self, name))
        if self.contour_points < 8:
            raise ConfigError("contour_points must be at least 8", value=self.contour_points)
        if len(self.rho_ladder) < 2 or any(rho <= 0.0 for rho in self.rho_ladder):
            raise ConfigError("rho_ladder needs at least two positive values", rho_ladder=self.rho_ladder)
        if self.contour_radius is not None and not self.contour_radius > 0.0:
            raise ConfigError("contour_radius must be positive", value=self.contour_radius)

    @property
    def has_contour(self) -> bool:
        return self.contour_center is not None and self.contour_radius is not None


@dataclass(frozen=True)
class OutputConfig:
    directory: str = settings.DEFAULT_OUTPUT_DIR
    prefix: str | None = None


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; CLI flags are applied through ``with_overrides``."""

    model: ModelConfig
    bc: BoundaryConfig = field(default_factory=BoundaryConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    jobs: int = settings.DEFAULT_JOBS

    def __post_init__(self) -> None:
        if not 1 <= self.jobs <= settings.MAX_JOBS:
            raise ConfigError(f"jobs must lie in 1..{settings.MAX_JOBS}", jobs=self.jobs)

    @property
    def prefix(self) -> str:
        return self.output.prefix or self.model.model_id

    @property
    def output_dir(self) -> Path:
        return Path(self.output.directory)

    def with_overrides(
        self,
        *,
        out: str | None = None,
        jobs: int | None = None,
        tol: float | None = None,
        floor: float | None = None,
        seed: int | None = None,
    ) -> "RunConfig":
        scan = self.scan
        if tol is not None:
            scan = replace(scan, tol=tol)
        if floor is not None:
            scan = replace(scan, floor=floor)
        return replace(
            self,
            model=replace(self.model, seed=seed) if seed is not None else self.model,
            scan=scan,
            output=replace(self.output, directory=out) if out is not None else self.output,
            jobs=jobs if jobs is not None else self.jobs,
        )


def _parse_sections(parser: configparser.ConfigParser) -> dict[str, dict[str, Any]]:
    values: dict[str, dict[str, Any]] = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigParse(f"unknown section [{section}]", known=tuple(SECTIONS))
        parsed: dict[str, Any] = {}
        for key, raw in parser.items(section):
            converter = SECTIONS[section].get(key)
            if converter is None:
                raise ConfigParse(f"unknown key {key!r} in [{section}]")
            try:
                parsed[key] = converter(raw)
            except ValueError as error:
                raise ConfigParse(f"invalid value for {section}.{key}: {raw!r}") from error
        values[section] = parsed
    return values


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    try:
        parser.read_string(text, source=source)
    except configparser.Error as error:
        raise ConfigParse(f"cannot parse {source}: {error}") from error
    values = _parse_sections(parser)
    model = dict(values.get("model", {}))
    if "model_id" not in model:
        raise ConfigParse("[model] model_id is required", source=source)
    params = {key: model.pop(key) for key in MODEL_PARAMETERS if key in model}
    config = RunConfig(
        model=ModelConfig(params=params, **model),
        bc=BoundaryConfig(**values.get("bc", {})),
        scan=ScanConfig(**values.get("scan", {})),
        output=OutputConfig(**values.get("output", {})),
    )
    config_logger.debug(f"loaded {source}: model={config.model.model_id}, bc={config.bc.template}, params={dict(params)}")
    return config


def load_config(path: str | Path) -> RunConfig:
    location = Path(path)
    try:
        text = location.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigParse(f"cannot read configuration {location}: {error.strerror}") from error
    return parse_config(text, source=str(location))


__all__ = [
    "BoundaryConfig",
    "MODEL_IDS",
    "ModelConfig",
    "OutputConfig",
    "RunConfig",
    "ScanConfig",
    "TEMPLATES",
    "load_config",
    "parse_config",
]
