"""Run configuration.

Precedence, lowest first: built-in defaults, config file (YAML or JSON),
``PMLSEL_<FIELD>`` environment variables, command-line flags. The merged
result is validated against ``RUN_CONFIG_SCHEMA`` before a ``RunConfig``
is built, so every source gets the same checks.
"""

from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Mapping, Optional

import yaml
from jsonschema import Draft7Validator

from pml_select.errors import ConfigError
from pml_select.numerics import QuadratureRule, gauss_legendre
from pml_select.optimizer import SimplexConfig
from pml_select.reflectivity import HALF_PI, GridSpec, Sampling

logger = logging.getLogger(__name__)

ENV_PREFIX = "PMLSEL_"

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_COUNT = {"type": "integer", "minimum": 1}
_RANGE = {
    "type": "array",
    "items": [{"type": "number"}, {"type": "number"}, {"type": "integer", "minimum": 2}],
    "minItems": 3,
    "maxItems": 3,
}

RUN_CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "RunConfig",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "lambda0": _POSITIVE,
        "n0": _POSITIVE,
        "h": _POSITIVE,
        "m": _COUNT,
        "sampling": {"enum": [s.value for s in Sampling]},
        "quad_nodes": _COUNT,
        "max_evals": _COUNT,
        "workers": _COUNT,
        "scan_a2": _RANGE,
        "scan_ap": _RANGE,
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Discretization, quadrature and search settings for one run."""

    lambda0: float = 1.0
    n0: float = 1.0
    h: float = 0.05
    m: int = 5
    sampling: str = Sampling.MIDPOINT.value
    quad_nodes: int = 100
    max_evals: int = 2000
    workers: int = 1
    scan_a2: tuple[float, float, int] = (0.0, 50.0, 101)
    scan_ap: tuple[float, float, int] = (0.0, 300.0, 101)

    def grid(self) -> GridSpec:
        return GridSpec(
            lambda0=self.lambda0,
            n0=self.n0,
            h=self.h,
            m=self.m,
            sampling=Sampling(self.sampling),
        )

    def quadrature(self) -> QuadratureRule:
        return gauss_legendre(self.quad_nodes, 0.0, HALF_PI)

    def simplex_config(self) -> SimplexConfig:
        return SimplexConfig(max_evals=self.max_evals)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["scan_a2"] = list(self.scan_a2)
        out["scan_ap"] = list(self.scan_ap)
        return out


CONFIG_FIELDS = tuple(f.name for f in fields(RunConfig))


def validate_payload(payload: Mapping[str, Any], source: str) -> None:
    validator = Draft7Validator(RUN_CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(dict(payload)), key=lambda e: list(e.path))
    if errors:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err.path) or '<root>'}: {err.message}"
            for err in errors
        )
        raise ConfigError(f"invalid configuration from {source}: {details}")


def load_config_file(config_path: str | os.PathLike) -> dict[str, Any]:
    """Load a YAML or JSON config file (YAML parses both)."""
    path = Path(config_path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open("r", encoding="utf-8") as f:
            payload = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"could not parse {path}: {e}") from e
    if not isinstance(payload, dict):
        raise ConfigError(f"{path} must hold a mapping of settings")
    validate_payload(payload, str(path))
    logger.info("✓ Loaded config from %s", path)
    return payload


def environment_overrides(environ: Optional[Mapping[str, str]] = None) -> dict[str, Any]:
    """``PMLSEL_<FIELD>`` variables, values parsed as YAML scalars."""
    environ = os.environ if environ is None else environ
    out: dict[str, Any] = {}
    for name in CONFIG_FIELDS:
        raw = environ.get(ENV_PREFIX + name.upper())
        if raw is None or raw == "":
            continue
        try:
            out[name] = yaml.safe_load(raw)
        except yaml.YAMLError as e:
            raise ConfigError(f"could not parse {ENV_PREFIX}{name.upper()}={raw!r}") from e
    return out


def load_run_config(
    config_path: Optional[str | os.PathLike] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """Merge defaults, file, environment and explicit overrides."""
    merged: dict[str, Any] = RunConfig().to_dict()
    if config_path:
        merged.update(load_config_file(config_path))
    env = environment_overrides(environ)
    if env:
        logger.debug("Environment overrides: %s", sorted(env))
    merged.update(env)
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    validate_payload(merged, "merged settings")

    merged["scan_a2"] = tuple(merged["scan_a2"])
    merged["scan_ap"] = tuple(merged["scan_ap"])
    return RunConfig(**merged)
