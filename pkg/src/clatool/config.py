"""Tool configuration: defaults, YAML config files and override merging."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

import yaml

from clatool.errors import InputError
from clatool.reports import FORMATS

# Nested YAML sections flattened into top-level keys.
SECTIONS = {
    "caps": {"tests": "cap_tests", "universe": "cap_universe", "oracle_budget": "oracle_budget"},
    "generation": {
        "candidates": "candidates",
        "retries": "retries",
        "runs": "runs",
        "workers": "workers",
        "spot_checks": "spot_checks",
    },
}


@dataclass(frozen=True)
class ToolConfig:
    seed: int = 0
    cap_tests: int = 1_000_000
    cap_universe: int = 20_000
    candidates: int = 50
    retries: int = 100
    runs: int = 10
    workers: int = 1
    witness_limit: int = 100
    oracle_budget: int = 2_000_000
    spot_checks: int = 200
    format: str = "text"

    def __post_init__(self):
        for name in ("cap_tests", "cap_universe", "candidates", "runs", "workers", "witness_limit"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.retries < 0 or self.spot_checks < 0 or self.oracle_budget < 0:
            raise InputError("retries, spot_checks and oracle_budget must be non-negative")
        if self.format not in FORMATS:
            raise InputError(f"format must be one of {', '.join(FORMATS)}, got '{self.format}'")

    def merged(self, **overrides: Any) -> ToolConfig:
        """Copy with every non-None override applied."""
        return replace(self, **{key: value for key, value in overrides.items() if value is not None})

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def load_config_file(path: Path) -> dict[str, Any]:
    """Load a YAML config file and return it as a flat dict of ToolConfig keys."""
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except (UnicodeDecodeError, yaml.YAMLError) as e:
        raise InputError(f"Cannot parse config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise InputError(f"Config file {path} must contain a mapping")

    flat: dict[str, Any] = {}
    for section, keys in SECTIONS.items():
        nested = data.pop(section, None) or {}
        for key, value in nested.items():
            if key not in keys:
                raise InputError(f"Unknown key '{section}.{key}' in config file {path}")
            flat[keys[key]] = value
    flat.update(data)

    known = {field.name for field in fields(ToolConfig)}
    unknown = sorted(set(flat) - known)
    if unknown:
        raise InputError(f"Unknown keys in config file {path}: {', '.join(unknown)}")
    return flat


def build_config(config_file: Path | None = None, **overrides: Any) -> ToolConfig:
    """Defaults, then the config file, then explicit overrides."""
    config = ToolConfig()
    if config_file is not None:
        config = replace(config, **load_config_file(config_file))
    return config.merged(**overrides)
