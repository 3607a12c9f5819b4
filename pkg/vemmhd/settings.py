# vemmhd/settings.py
from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from vemmhd.errors import ConfigError

# Load .env file if it exists (from project root or current directory)
load_dotenv()

logger = logging.getLogger(__name__)

FAMILIES = ("tri", "quad", "perturbed_quad", "voronoi")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 100


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning(f"ignoring {name}={raw!r}: not a number")
        return default


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"ignoring {name}={raw!r}: not an integer")
        return default


def _env_default_settings() -> Dict[str, Any]:
    """
    Seed solver defaults from env vars when present.
    Env values are only defaults; YAML config and flags override them.
    """
    level = os.getenv("VEMMHD_LOG_LEVEL", "WARNING").strip().upper() or "WARNING"
    if level not in LOG_LEVELS:
        level = "WARNING"
    return {
        "tol": _env_float("VEMMHD_TOL", DEFAULT_TOL),
        "max_iter": _env_int("VEMMHD_MAX_ITER", DEFAULT_MAX_ITER),
        "threads": _env_int("VEMMHD_THREADS", 1),
        "quality_threshold": _env_float("VEMMHD_QUALITY_THRESHOLD", 0.05),
        "log_level": level,
    }


def _deep_merge(base: Dict[str, Any], patch: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for k, v in (patch or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out


class SolverSettings(BaseModel):
    """Knobs shared by every command: Oseen stopping rule, threading, diagnostics."""

    tol: float = Field(default=DEFAULT_TOL, gt=0, description="Relative Oseen increment tolerance")
    max_iter: int = Field(default=DEFAULT_MAX_ITER, ge=1, description="Oseen iteration cap")
    threads: int = Field(default=1, ge=1, description="Workers for per-element builds")
    quality_threshold: float = Field(default=0.05, gt=0, le=1, description="Mesh quality warning level")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "WARNING"

    @classmethod
    def from_env(cls) -> "SolverSettings":
        try:
            return cls.model_validate(_env_default_settings())
        except ValidationError as e:
            raise ConfigError(f"invalid VEMMHD_* environment settings: {e}") from e


class RunConfig(BaseModel):
    """Everything one CLI command needs, after env, YAML file and flags are layered."""

    command: Literal["convergence", "hartmann", "solve", "mesh-info"]
    k: int = Field(default=1, description="Polynomial degree")
    family: Literal["tri", "quad", "perturbed_quad", "voronoi"] = "quad"
    levels: int = Field(default=3, description="Number of refinement levels")
    n0: int = Field(default=4, ge=1, description="Subdivisions of the coarsest level; doubled per level")
    mesh: Optional[Path] = Field(default=None, description="Mesh file overriding family/levels")
    r_nu: float = Field(default=1.0, gt=0)
    r_m: float = Field(default=1.0, gt=0)
    s_c: float = Field(default=1.0, gt=0)
    G: float = Field(default=0.1, ge=0, description="Hartmann pressure gradient")
    preset: Optional[str] = None
    seed: int = 0
    out: Optional[Path] = None
    settings: SolverSettings = Field(default_factory=SolverSettings)

    @field_validator("k")
    @classmethod
    def _k_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("k must be >= 1")
        return v

    @field_validator("levels")
    @classmethod
    def _levels_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("levels must be >= 1")
        return v

    @property
    def subdivisions(self) -> List[int]:
        return [self.n0 * 2**i for i in range(self.levels)]


def load_config_file(path: Path) -> Dict[str, Any]:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"config file {path} is not valid YAML: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping")
    return data


def build_run_config(
    command: str,
    flags: Dict[str, Any],
    config_path: Optional[Path] = None,
) -> RunConfig:
    """
    Layer settings defaults <- YAML config file <- explicit flags.

    Args:
        command: CLI subcommand name.
        flags: explicitly given flags (None values are treated as "not given").
        config_path: optional YAML file.

    Returns:
        Validated RunConfig.
    """
    merged: Dict[str, Any] = {"settings": SolverSettings.from_env().model_dump()}
    if config_path is not None:
        merged = _deep_merge(merged, load_config_file(config_path))

    settings_keys = set(SolverSettings.model_fields)
    patch: Dict[str, Any] = {}
    for key, value in flags.items():
        if value is None:
            continue
        if key in settings_keys:
            patch.setdefault("settings", {})[key] = value
        else:
            patch[key] = value
    merged = _deep_merge(merged, patch)
    merged["command"] = command

    try:
        return RunConfig.model_validate(merged)
    except ValidationError as e:
        msgs = "; ".join(err["msg"] for err in e.errors())
        raise ConfigError(msgs, {"errors": e.errors(include_url=False)}) from e
