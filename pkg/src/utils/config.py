import dataclasses
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterator, Mapping, Optional

from dotenv import load_dotenv

ENV_PREFIX = "L2APPROX_"


@dataclass(frozen=True)
class Settings:
    """Numeric knobs shared by every backend"""

    quotient_cap: int = 200_000
    dense_cap: int = 6000
    folner_cap: int = 6000
    k_epsilon: float = 2.0 ** -20
    jump_tolerance: float = 1e-9
    kernel_snap_tolerance: float = 1e-6
    decay_tolerance: float = 1e-12
    gap_tolerance: float = 1e-9
    parts_tolerance: float = 1e-10
    log_singularity: float = 1e-12
    quadrature_tolerance: float = 1e-4
    quadrature_start: int = 64
    quadrature_cap_1d: int = 2 ** 16
    quadrature_cap_2d: int = 2 ** 9
    sandwich_samples: int = 10_000
    sandwich_min_degree: int = 8
    sandwich_max_degree: int = 4096
    plus_steps: int = 20
    max_workers: int = 4

    def replace(self, **changes: Any) -> "Settings":
        return dataclasses.replace(self, **changes)


def _coerce(field: dataclasses.Field, raw: Any) -> Any:
    if field.type in (int, "int"):
        return int(raw)
    return float(raw)


def load_settings(config_path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> Settings:
    """
    Build Settings from defaults, the JSON config file, the environment and
    explicit overrides

    Precedence (lowest first): dataclass defaults, JSON file at
    L2APPROX_CONFIG_PATH, L2APPROX_<FIELD> environment variables, overrides.
    """
    load_dotenv()

    path = config_path or os.getenv(f"{ENV_PREFIX}CONFIG_PATH", "./config/defaults.json")
    values: Dict[str, Any] = {}
    if path and os.path.exists(path):
        with open(path, 'r') as f:
            values.update(json.load(f))

    fields = {f.name: f for f in dataclasses.fields(Settings)}
    unknown = set(values) - set(fields)
    if unknown:
        raise ValueError(f"Unknown settings in {path}: {sorted(unknown)}")

    for name in fields:
        env_value = os.getenv(f"{ENV_PREFIX}{name.upper()}")
        if env_value is not None:
            values[name] = env_value

    if overrides:
        unknown = set(overrides) - set(fields)
        if unknown:
            raise ValueError(f"Unknown setting overrides: {sorted(unknown)}")
        values.update(overrides)

    return Settings(**{name: _coerce(fields[name], raw) for name, raw in values.items()})


_overrides: Dict[str, Any] = {}


@lru_cache(maxsize=1)
def default_settings() -> Settings:
    """Process-wide settings, loaded once per override scope"""
    return load_settings(overrides=_overrides)


@contextmanager
def settings_overrides(**changes: Any) -> Iterator[Settings]:
    """
    Override default_settings() for the duration of the block

    Nothing is written to os.environ; the previous overrides and the cached
    settings are restored on exit, also when the block raises.
    """
    previous = dict(_overrides)
    _overrides.update(changes)
    default_settings.cache_clear()
    try:
        yield default_settings()
    finally:
        _overrides.clear()
        _overrides.update(previous)
        default_settings.cache_clear()
