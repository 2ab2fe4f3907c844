"""Throughput metrics and the manual-baseline comparison.

The manual baseline prices each code check at a configurable number of
seconds (default 90, i.e. 1 minute 30 seconds per code); the assisted
figure is measured wall time. 300 items at the default rate put the
baseline at exactly 450.0 minutes.
"""

from __future__ import annotations

import statistics
import threading
import time
from dataclasses import dataclass, field

from tariffcheck.gpva.model import FindingStatus, VerificationReport
from tariffcheck.gpva.verify import VerifierConfig, verify_application
from tariffcheck.intake.model import Application, LineItem
from tariffcheck.kb.hscode import HsCode
from tariffcheck.kb.model import KnowledgeBase


@dataclass(frozen=True)
class MetricsSnapshot:
    items_verified: int
    wall_seconds_assisted: float
    manual_seconds_per_item: float
    manual_baseline_seconds: float
    manual_baseline_minutes: float
    reduction_pct: float
    reduction_defined: bool
    findings_by_status: dict[str, int]
    per_application_latency: dict[str, float | int]

    def to_dict(self) -> dict:
        return {
            "items_verified": self.items_verified,
            "wall_seconds_assisted": self.wall_seconds_assisted,
            "manual_seconds_per_item": self.manual_seconds_per_item,
            "manual_baseline_seconds": self.manual_baseline_seconds,
            "manual_baseline_minutes": self.manual_baseline_minutes,
            "reduction_pct": self.reduction_pct,
            "reduction_defined": self.reduction_defined,
            "findings_by_status": dict(sorted(self.findings_by_status.items())),
            "per_application_latency": self.per_application_latency,
        }


def _reduction(wall: float, baseline: float) -> tuple[float, bool]:
    if baseline <= 0:
        return 0.0, False
    raw = 100.0 * (1.0 - wall / baseline)
    if wall <= baseline:
        raw = min(100.0, max(0.0, raw))
    return raw, True


def build_snapshot(
    items: int,
    wall_seconds: float,
    manual_seconds_per_item: float,
    findings_by_status: dict[str, int],
    latencies: list[float],
) -> MetricsSnapshot:
    baseline = items * manual_seconds_per_item
    reduction, defined = _reduction(wall_seconds, baseline)
    latency: dict[str, float | int] = {"count": len(latencies)}
    if latencies:
        latency.update(
            {
                "mean_seconds": statistics.fmean(latencies),
                "min_seconds": min(latencies),
                "max_seconds": max(latencies),
            }
        )
    return MetricsSnapshot(
        items_verified=items,
        wall_seconds_assisted=wall_seconds,
        manual_seconds_per_item=manual_seconds_per_item,
        manual_baseline_seconds=baseline,
        manual_baseline_minutes=baseline / 60.0,
        reduction_pct=reduction,
        reduction_defined=defined,
        findings_by_status=findings_by_status,
        per_application_latency=latency,
    )


@dataclass
class MetricsRecorder:
    """Accumulates verification work done by a running service."""

    manual_seconds_per_item: float = 90.0
    _items: int = 0
    _wall: float = 0.0
    _status_counts: dict[str, int] = field(
        default_factory=lambda: {s.value: 0 for s in FindingStatus}
    )
    _latencies: list[float] = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def record(self, report: VerificationReport, wall_seconds: float) -> None:
        with self._lock:
            self._items += len(report.findings)
            self._wall += wall_seconds
            for status, count in report.summary.items():
                self._status_counts[status] = self._status_counts.get(status, 0) + count
            self._latencies.append(wall_seconds)

    def snapshot(self) -> MetricsSnapshot:
        with self._lock:
            return build_snapshot(
                self._items,
                self._wall,
                self.manual_seconds_per_item,
                dict(self._status_counts),
                list(self._latencies),
            )


# --- Synthetic throughput run --------------------------------------------------

_TEMPLATES = (
    {
        "description": "Moulded plastic figure (toy), colourway {i}",
        "claimed": "3926.90.0000",
        "attrs": {"material": "plastic", "category": "toy"},
    },
    {
        "description": "Woven cotton handkerchief, size 65cm x 65cm, lot {i}",
        "claimed": "6213.00.0000",
        "attrs": {"material": "cotton", "category": "handkerchief", "width_cm": 65, "height_cm": 65},
    },
    {
        "description": "Woven cotton handkerchief, size 45cm x 45cm, lot {i}",
        "claimed": "6213.00.0000",
        "attrs": {"material": "cotton", "category": "handkerchief", "width_cm": 45, "height_cm": 45},
    },
    {
        "description": "Soft doll in gift box, series {i}",
        "claimed": "9503.00.0000",
        "attrs": {"category": "toy", "packaging.kind": "gift box", "packaging.reusable": "false"},
    },
)


def synthetic_application(n_items: int, app_id: str = "SIM-0001") -> Application:
    items = []
    for i in range(1, n_items + 1):
        template = _TEMPLATES[(i - 1) % len(_TEMPLATES)]
        items.append(
            LineItem(
                index=i,
                description=template["description"].format(i=i),
                attributes=dict(template["attrs"]),
                claimed_code=HsCode.parse(template["claimed"]),
                quantity=100 + i,
                declared_value=1000.0 + i,
            )
        )
    return Application(
        app_id=app_id,
        revision=1,
        applicant="Synthetic Throughput Run",
        items=tuple(items),
        submitted_at="2025-01-01T00:00:00Z",
    )


def simulate_throughput(
    kb: KnowledgeBase,
    n_items: int,
    manual_seconds_per_item: float = 90.0,
    config: VerifierConfig | None = None,
) -> dict:
    """Verify n synthetic items and compare against the manual baseline."""
    status_counts = {s.value: 0 for s in FindingStatus}
    wall = 0.0
    latencies: list[float] = []
    if n_items > 0:
        app = synthetic_application(n_items)
        started = time.perf_counter()
        report = verify_application(kb, app, config)
        wall = time.perf_counter() - started
        latencies.append(wall)
        for status, count in report.summary.items():
            status_counts[status] += count
    snapshot = build_snapshot(n_items, wall, manual_seconds_per_item, status_counts, latencies)
    return snapshot.to_dict()
