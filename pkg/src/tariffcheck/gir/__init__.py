"""Classification engine applying the six General Interpretative Rules."""

from tariffcheck.gir.engine import (
    apply_gir1,
    apply_gir2,
    apply_gir3,
    apply_gir4,
    apply_gir5,
    apply_gir6,
    candidate_headings,
    classify,
)
from tariffcheck.gir.model import (
    RULE_DISPLAY,
    RULE_ORDER,
    CandidateScore,
    ClassificationResult,
    EngineConfig,
    GirRule,
    GirStep,
)
from tariffcheck.gir.text import tokenize

__all__ = [
    "CandidateScore",
    "ClassificationResult",
    "EngineConfig",
    "GirRule",
    "GirStep",
    "RULE_DISPLAY",
    "RULE_ORDER",
    "apply_gir1",
    "apply_gir2",
    "apply_gir3",
    "apply_gir4",
    "apply_gir5",
    "apply_gir6",
    "candidate_headings",
    "classify",
    "tokenize",
]
