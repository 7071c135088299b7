"""Runtime configuration: key=value file plus environment overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .teacher.types import TeacherBackendConfig

ENV_PREFIX = "TABLETUTOR_"


class ConfigError(Exception):
    pass


@dataclass
class Config:
    heuristic: str = "hmax"
    plan_probability: float = 0.5
    max_episode_steps: int = 30
    max_correction_iterations: int = 3
    teacher_backend: str = "scripted"
    teacher_endpoint: str = ""
    teacher_model: str = ""
    teacher_timeout: float = 60.0
    data_dir: str = "./data"

    def validate(self) -> "Config":
        if self.heuristic not in ("hmax", "goal_count", "blind"):
            raise ConfigError(f"unknown heuristic {self.heuristic!r}")
        if not 0.0 <= self.plan_probability <= 1.0:
            raise ConfigError("plan_probability must be in [0, 1]")
        if self.max_episode_steps < 1:
            raise ConfigError("max_episode_steps must be >= 1")
        if self.max_correction_iterations < 1:
            raise ConfigError("max_correction_iterations must be >= 1")
        if self.teacher_backend not in ("scripted", "remote"):
            raise ConfigError(
                f"unknown teacher backend {self.teacher_backend!r}"
            )
        return self

    def teacher_config(self, **overrides) -> TeacherBackendConfig:
        kwargs = dict(
            backend=self.teacher_backend,
            endpoint=self.teacher_endpoint,
            model=self.teacher_model,
            request_timeout=self.teacher_timeout,
            max_correction_iterations=self.max_correction_iterations,
        )
        kwargs.update(overrides)
        return TeacherBackendConfig(**kwargs)


def _coerce(name: str, raw: str, target_type):
    try:
        if target_type is float:
            return float(raw)
        if target_type is int:
            return int(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def load_config(path: Optional[str | Path] = None,
                env: Optional[dict] = None) -> Config:
    """Read `key = value` lines (# comments allowed), then apply
    TABLETUTOR_<KEY> environment overrides."""
    env = os.environ if env is None else env
    known = {f.name: f.type for f in fields(Config)}
    types = {"float": float, "int": int, "str": str}
    values: dict = {}
    if path is not None:
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, raw = line.partition("=")
            key, raw = key.strip(), raw.strip()
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _coerce(key, raw, types.get(known[key], str))
    for key, annotation in known.items():
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            values[key] = _coerce(key, raw, types.get(annotation, str))
    return Config(**values).validate()
