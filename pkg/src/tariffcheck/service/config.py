"""Service configuration: YAML file plus GPVA_* environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import yaml

from tariffcheck.gir.model import EngineConfig
from tariffcheck.gpva.verify import VerifierConfig

ENV_PREFIX = "GPVA_"


@dataclass(frozen=True)
class ServiceConfig:
    kb_path: str = "kb.yaml"
    storage_path: str = "./casedata"
    listen_host: str = "127.0.0.1"
    listen_port: int = 8800
    theta_accept: float = 0.5
    theta_akin: float = 0.25
    tau_tier: float = 0.6
    manual_seconds_per_item: float = 90.0
    adapter: str = "synonym"
    adapter_concurrency: int = 4
    max_workers: int = 1

    def __post_init__(self) -> None:
        for name in ("theta_accept", "theta_akin", "tau_tier"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {value}")
        if self.manual_seconds_per_item <= 0:
            raise ValueError(
                f"manual_seconds_per_item must be > 0, got {self.manual_seconds_per_item}"
            )

    def engine(self) -> EngineConfig:
        return EngineConfig(theta_accept=self.theta_accept, theta_akin=self.theta_akin)

    def verifier(self) -> VerifierConfig:
        return VerifierConfig(
            engine=self.engine(),
            tau_tier=self.tau_tier,
            max_workers=self.max_workers,
            adapter_concurrency=self.adapter_concurrency,
        )


_FLOAT_FIELDS = ("theta_accept", "theta_akin", "tau_tier", "manual_seconds_per_item")
_INT_FIELDS = ("listen_port", "adapter_concurrency", "max_workers")
_STR_FIELDS = ("kb_path", "storage_path", "listen_host", "adapter")


def load_config(
    path: str | Path | None = None, env: Mapping[str, str] | None = None
) -> ServiceConfig:
    """File values first, then environment overrides (GPVA_<FIELD>)."""
    env = os.environ if env is None else env
    values: dict[str, object] = {}
    if path is not None:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        if not isinstance(raw, dict):
            raise ValueError(f"config file {path} must contain a mapping")
        values.update(raw)
    for name in _FLOAT_FIELDS + _INT_FIELDS + _STR_FIELDS:
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            values[name] = env[env_key]
    kwargs: dict[str, object] = {}
    for name, value in values.items():
        if name in _FLOAT_FIELDS:
            kwargs[name] = float(value)
        elif name in _INT_FIELDS:
            kwargs[name] = int(value)
        elif name in _STR_FIELDS:
            kwargs[name] = str(value)
        else:
            raise ValueError(f"unknown config field {name!r}")
    return ServiceConfig(**kwargs)
