"""Run-wide numerical configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_PREFIX = "ABCMERO_"


@dataclass(frozen=True)
class RunConfig:
    quad_tol: float = 1e-10
    root_tol: float = 1e-12
    cluster_tol: float = 1e-9
    guard_rel: float = 1e-6  # refusal distance, relative to rho
    max_quad_points: int = 2 ** 20
    output_format: str = "json"
    workers: int = 1

    def __post_init__(self):
        for name in ("quad_tol", "root_tol", "cluster_tol", "guard_rel"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_quad_points < 64:
            raise ValueError("max_quad_points must be at least 64")
        if self.output_format not in ("json", "csv"):
            raise ValueError("output_format must be json or csv")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def guard(self, rho: float) -> float:
        return self.guard_rel * rho

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "RunConfig":
        """Defaults, then ABCMERO_<FIELD> variables, then explicit overrides (non-None)."""
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                values[f.name] = _cast(f.default, raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return replace(cls(), **values)


def _cast(default, raw: str):
    if isinstance(default, int) and not isinstance(default, bool):
        return int(float(raw))
    if isinstance(default, float):
        return float(raw)
    return raw


DEFAULT = RunConfig()
