"""Engine result types and configuration."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from tariffcheck.kb.hscode import HsCode


class GirRule(str, Enum):
    GIR1 = "GIR1"
    GIR2A = "GIR2a"
    GIR2B = "GIR2b"
    GIR3A = "GIR3a"
    GIR3B = "GIR3b"
    GIR3C = "GIR3c"
    GIR4 = "GIR4"
    GIR5A = "GIR5a"
    GIR5B = "GIR5b"
    GIR6 = "GIR6"


# Hierarchy position used by the rule-order invariant.
RULE_ORDER = {
    GirRule.GIR1: 1,
    GirRule.GIR2A: 2,
    GirRule.GIR2B: 2,
    GirRule.GIR3A: 3,
    GirRule.GIR3B: 3,
    GirRule.GIR3C: 3,
    GirRule.GIR4: 4,
    GirRule.GIR5A: 5,
    GirRule.GIR5B: 5,
    GirRule.GIR6: 6,
}

RULE_DISPLAY = {
    GirRule.GIR1: "GIR 1",
    GirRule.GIR2A: "GIR 2(a)",
    GirRule.GIR2B: "GIR 2(b)",
    GirRule.GIR3A: "GIR 3(a)",
    GirRule.GIR3B: "GIR 3(b)",
    GirRule.GIR3C: "GIR 3(c)",
    GirRule.GIR4: "GIR 4",
    GirRule.GIR5A: "GIR 5(a)",
    GirRule.GIR5B: "GIR 5(b)",
    GirRule.GIR6: "GIR 6",
}


@dataclass(frozen=True)
class CandidateScore:
    """Lexical overlap between an item description and a heading's terms."""

    heading: str
    score: float
    matched_tokens: tuple[str, ...]


@dataclass(frozen=True)
class GirStep:
    """One explainable step of the rule cascade.

    ``needs_review`` marks steps that route the item to human review
    (reusable containers, conflicting exclusion notes).
    """

    rule: GirRule
    justification: str
    cited_notes: tuple[str, ...] = ()
    candidates_before: tuple[str, ...] = ()
    candidates_after: tuple[str, ...] = ()
    needs_review: bool = False


@dataclass(frozen=True)
class ClassificationResult:
    """Outcome of the cascade; ``code is None`` means undetermined."""

    code: HsCode | None
    trace: tuple[GirStep, ...]
    confidence: float
    evidence_incomplete: bool
    decided_by: GirRule | None = None
    missing_attrs: tuple[str, ...] = ()

    @property
    def undetermined(self) -> bool:
        return self.code is None

    @property
    def needs_review(self) -> bool:
        return any(step.needs_review for step in self.trace)


@dataclass(frozen=True)
class EngineConfig:
    """Decision thresholds, expressed as fractions of item tokens matched."""

    theta_accept: float = 0.5
    theta_akin: float = 0.25

    def __post_init__(self) -> None:
        for name in ("theta_accept", "theta_akin"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {value}")
