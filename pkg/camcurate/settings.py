"""
Run-time configuration for the curation pipeline.

A run is configured by one optional JSON file:

    {
      "filter":   {"tau_jump": 5.0, "tau_complex": 3.0, ...},
      "match":    {"max_trans_err": 0.1, "max_rot_err": 0.05, "n_candidates": 200},
      "template": {"n_frames": 81, "pan_deg": 30.0, ...},
      "ransac":   {"iterations": 256, "inlier_threshold_rel": 0.05, "seed": 0},
      "resample_k": 64, "rot_weight": 1.0, "jobs": 4, "seed": 0,
      "max_error_rate": 0.1
    }

Missing keys keep the defaults from config.py. CLI flags override the file.
"""

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .alignment import RansacParams
from .config import DEFAULT_SEED, JOBS_ENV_VAR, MAX_ERROR_RATE, RESAMPLE_K, ROT_WEIGHT
from .errors import CamCurateError, ConfigError
from .matching import MatchThresholds
from .metrics import FilterThresholds
from .motion_library import TemplateParams


def default_jobs() -> int:
    """Worker count from the CAMCURATE_JOBS environment variable, else the core count."""
    value = os.environ.get(JOBS_ENV_VAR)
    if value:
        try:
            jobs = int(value)
        except ValueError:
            raise ConfigError(f"{JOBS_ENV_VAR} must be an integer, got '{value}'") from None
        if jobs < 1:
            raise ConfigError(f"{JOBS_ENV_VAR} must be >= 1, got {jobs}")
        return jobs
    return os.cpu_count() or 1


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one pipeline run depends on."""

    filter: FilterThresholds = field(default_factory=FilterThresholds)
    match: MatchThresholds = field(default_factory=MatchThresholds)
    template: TemplateParams = field(default_factory=TemplateParams)
    ransac: RansacParams = field(default_factory=RansacParams)
    resample_k: int = RESAMPLE_K
    rot_weight: float = ROT_WEIGHT
    jobs: int = field(default_factory=default_jobs)
    seed: int = DEFAULT_SEED
    max_error_rate: float = MAX_ERROR_RATE

    def __post_init__(self):
        if int(self.resample_k) != self.resample_k or self.resample_k < 2:
            raise ConfigError(f"resample_k must be an integer >= 2, got {self.resample_k}")
        if not self.rot_weight >= 0:
            raise ConfigError(f"rot_weight must be >= 0, got {self.rot_weight}")
        if int(self.jobs) != self.jobs or self.jobs < 1:
            raise ConfigError(f"jobs must be an integer >= 1, got {self.jobs}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not 0 <= self.max_error_rate <= 1:
            raise ConfigError(f"max_error_rate must lie in [0, 1], got {self.max_error_rate}")


SECTIONS = {
    "filter": FilterThresholds,
    "match": MatchThresholds,
    "template": TemplateParams,
    "ransac": RansacParams,
}

SCALARS = {
    "resample_k": int,
    "rot_weight": float,
    "jobs": int,
    "seed": int,
    "max_error_rate": float,
}


def _coerce(key: str, value: Any, expected: type) -> Any:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{key}' must be a number, got {value!r}")
    if expected is int and value != int(value):
        raise ConfigError(f"'{key}' must be an integer, got {value!r}")
    return expected(value)


def _build_section(name: str, values: Any):
    cls = SECTIONS[name]
    if not isinstance(values, dict):
        raise ConfigError(f"section '{name}' must be an object")
    known = {f.name: f.type for f in fields(cls)}
    kwargs = {}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"unknown key '{name}.{key}'")
        expected = int if known[key] in (int, "int") else float
        kwargs[key] = _coerce(f"{name}.{key}", value, expected)
    try:
        return cls(**kwargs)
    except (CamCurateError, ValueError) as exc:
        raise ConfigError(f"section '{name}': {exc}") from exc


def config_from_dict(data: Dict[str, Any]) -> PipelineConfig:
    """Build a PipelineConfig from its JSON form, validating every key."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    kwargs = {}
    for key, value in data.items():
        if key in SECTIONS:
            kwargs[key] = _build_section(key, value)
        elif key in SCALARS:
            kwargs[key] = _coerce(key, value, SCALARS[key])
        else:
            raise ConfigError(f"unknown key '{key}'")
    return PipelineConfig(**kwargs)


def config_to_dict(config: PipelineConfig) -> Dict[str, Any]:
    """JSON form of a configuration (inverse of config_from_dict)."""
    return asdict(config)


def load_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None) -> PipelineConfig:
    """
    Load a pipeline configuration.

    Args:
        path: JSON config file, or None for all defaults
        overrides: Top-level scalar overrides (e.g. {"jobs": 4}); None values are ignored

    Returns:
        Validated PipelineConfig

    Raises:
        ConfigError: Missing or unreadable file, invalid JSON, unknown key or invalid value

    Example:
        >>> load_config(None, {"seed": 7}).seed
        7
    """
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

    config = config_from_dict(data)
    updates = {k: v for k, v in (overrides or {}).items() if v is not None}
    for key in updates:
        if key not in SCALARS:
            raise ConfigError(f"cannot override '{key}'")
    if updates:
        config = replace(config, **{k: _coerce(k, v, SCALARS[k]) for k, v in updates.items()})
    return config
