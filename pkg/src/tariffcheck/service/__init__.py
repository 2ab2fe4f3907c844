"""HTTP API, CLI, metrics and runtime wiring."""

from tariffcheck.service.config import ServiceConfig, load_config
from tariffcheck.service.metrics import MetricsRecorder, MetricsSnapshot, simulate_throughput

__all__ = [
    "MetricsRecorder",
    "MetricsSnapshot",
    "ServiceConfig",
    "load_config",
    "simulate_throughput",
]
