"""Run configuration: profiles, TOML loading, resolved-config echo.

A config file is a shallow TOML document with [run], [ecology],
[economics], [landscape] and [calibration] sections.  Unknown keys are
rejected by name.  Every run writes its fully resolved configuration
next to its outputs; execution details (worker count, output directory)
are deliberately excluded so outputs stay byte-identical across
machines and job counts.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .ecology import EcologyParams
from .economics import EconParams

PROFILE_CHOICES = ("desk", "paper")

# desk keeps every pipeline stage inside a test budget; paper matches
# the published experiment sizes
PROFILE_DEFAULTS = {
    "desk": {"replicates": 10, "sobol_points": 256, "calibration_grid": 100},
    "paper": {"replicates": 100, "sobol_points": 4096, "calibration_grid": 200},
}

# the yield equation's math symbol, accepted as a convenience alias
ECOLOGY_KEY_ALIASES = {"q": "selectivity"}


@dataclass(frozen=True)
class RunConfig:
    profile: str = "desk"
    seed: int = 0
    replicates: int | None = None
    jobs: int = 1
    out_dir: str = "out"
    grid_rows: int = 200
    grid_cols: int = 200
    cell_area: float = 0.01
    sobol_points: int | None = None
    calibration_grid: int | None = None
    targets_path: str | None = None
    eco: EcologyParams = field(default_factory=EcologyParams)
    econ: EconParams = field(default_factory=EconParams)

    def __post_init__(self) -> None:
        if self.profile not in PROFILE_CHOICES:
            raise ValueError(f"profile must be one of {PROFILE_CHOICES}")
        if self.replicates is not None and self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise ValueError("grid dimensions must be positive")
        if self.cell_area <= 0:
            raise ValueError("cell_area must be positive")

    @property
    def resolved_replicates(self) -> int:
        if self.replicates is not None:
            return self.replicates
        return PROFILE_DEFAULTS[self.profile]["replicates"]

    @property
    def resolved_sobol_points(self) -> int:
        if self.sobol_points is not None:
            return self.sobol_points
        return PROFILE_DEFAULTS[self.profile]["sobol_points"]

    @property
    def resolved_calibration_grid(self) -> int:
        if self.calibration_grid is not None:
            return self.calibration_grid
        return PROFILE_DEFAULTS[self.profile]["calibration_grid"]


_RUN_KEYS = {
    "profile": str,
    "seed": int,
    "replicates": int,
    "jobs": int,
    "out_dir": str,
}
_LANDSCAPE_KEYS = {"grid_rows": int, "grid_cols": int, "cell_area": float}
_CALIBRATION_KEYS = {
    "sobol_points": int,
    "calibration_grid": int,
    "targets_path": str,
}


def _coerce(section: str, key: str, value, want):
    if want is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, want) or isinstance(value, bool) and want is not bool:
        raise ValueError(
            f"config key {section}.{key} expects {want.__name__}, "
            f"got {type(value).__name__}"
        )
    return value


_STR_FIELDS = ("sn_units", "density_norm", "yield_form")


def _section_params(section: str, data: dict, cls, aliases: dict[str, str]):
    field_names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        name = aliases.get(key, key)
        if name not in field_names:
            raise ValueError(f"unknown config key {section}.{key}")
        if name in _STR_FIELDS:
            if not isinstance(value, str):
                raise ValueError(f"config key {section}.{key} expects a string")
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"config key {section}.{key} expects a number")
            if name not in _INT_FIELDS.get(cls, ()):
                value = float(value)
        kwargs[name] = value
    return cls(**kwargs)


_INT_FIELDS = {
    EcologyParams: ("season_days", "equilibration_years"),
    EconParams: (),
}


def load_config(path: str | Path | None = None) -> RunConfig:
    """RunConfig from a TOML file; all defaults when path is None/empty."""
    if path is None:
        return RunConfig()
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)

    known_sections = ("run", "ecology", "economics", "landscape", "calibration")
    for section in doc:
        if section not in known_sections:
            raise ValueError(f"unknown config section {section!r}")

    kwargs: dict = {}
    for key, value in doc.get("run", {}).items():
        if key not in _RUN_KEYS:
            raise ValueError(f"unknown config key run.{key}")
        kwargs[key] = _coerce("run", key, value, _RUN_KEYS[key])
    for key, value in doc.get("landscape", {}).items():
        if key not in _LANDSCAPE_KEYS:
            raise ValueError(f"unknown config key landscape.{key}")
        kwargs[key] = _coerce("landscape", key, value, _LANDSCAPE_KEYS[key])
    for key, value in doc.get("calibration", {}).items():
        if key not in _CALIBRATION_KEYS:
            raise ValueError(f"unknown config key calibration.{key}")
        kwargs[key] = _coerce("calibration", key, value, _CALIBRATION_KEYS[key])
    kwargs["eco"] = _section_params(
        "ecology", doc.get("ecology", {}), EcologyParams, ECOLOGY_KEY_ALIASES
    )
    kwargs["econ"] = _section_params("economics", doc.get("economics", {}), EconParams, {})
    return RunConfig(**kwargs)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    return json.dumps(value)


def write_config(cfg: RunConfig, path: str | Path) -> None:
    """Resolved-config echo; loading it back reproduces cfg.

    Worker count and output directory are execution details, not model
    inputs, and are omitted so they never perturb output bytes.
    """
    lines = ["[run]"]
    lines.append(f"profile = {_toml_value(cfg.profile)}")
    lines.append(f"seed = {_toml_value(cfg.seed)}")
    if cfg.replicates is not None:
        lines.append(f"replicates = {_toml_value(cfg.replicates)}")

    lines.append("")
    lines.append("[landscape]")
    lines.append(f"grid_rows = {_toml_value(cfg.grid_rows)}")
    lines.append(f"grid_cols = {_toml_value(cfg.grid_cols)}")
    lines.append(f"cell_area = {_toml_value(cfg.cell_area)}")

    lines.append("")
    lines.append("[calibration]")
    if cfg.sobol_points is not None:
        lines.append(f"sobol_points = {_toml_value(cfg.sobol_points)}")
    if cfg.calibration_grid is not None:
        lines.append(f"calibration_grid = {_toml_value(cfg.calibration_grid)}")
    if cfg.targets_path is not None:
        lines.append(f"targets_path = {_toml_value(cfg.targets_path)}")

    lines.append("")
    lines.append("[ecology]")
    for f in dataclasses.fields(EcologyParams):
        value = getattr(cfg.eco, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {_toml_value(value)}")

    lines.append("")
    lines.append("[economics]")
    for f in dataclasses.fields(EconParams):
        lines.append(f"{f.name} = {_toml_value(getattr(cfg.econ, f.name))}")

    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def with_overrides(
    cfg: RunConfig,
    seed: int | None = None,
    profile: str | None = None,
    replicates: int | None = None,
    jobs: int | None = None,
    out_dir: str | None = None,
) -> RunConfig:
    updates: dict = {}
    if seed is not None:
        updates["seed"] = seed
    if profile is not None:
        updates["profile"] = profile
    if replicates is not None:
        updates["replicates"] = replicates
    if jobs is not None:
        updates["jobs"] = jobs
    if out_dir is not None:
        updates["out_dir"] = out_dir
    return replace(cfg, **updates) if updates else cfg
