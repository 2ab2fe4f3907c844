"""Semantic ranking adapters.

The verification flow talks to "semantic analysis" only through the
``SemanticAdapter`` contract, an abstraction layer that keeps the core
system decoupled from any specific external LLM API. The default provider
is a deterministic synonym-table re-scorer so the whole acceptance path is
hermetic; an LLM-backed client is a drop-in replacement behind the same
contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence, runtime_checkable

from tariffcheck.gir.model import CandidateScore
from tariffcheck.gir.text import token_set, tokenize
from tariffcheck.kb.model import Heading

# Trade-description colloquialisms the lexical matcher would miss.
DEFAULT_SYNONYMS: Mapping[str, str] = {
    "hanky": "handkerchief",
    "kerchief": "handkerchief",
    "figurine": "figure",
    "plaything": "toy",
    "plushie": "toy",
    "bike": "bicycle",
    "pushbike": "bicycle",
    "cycle": "bicycle",
    "auto": "car",
    "automobile": "car",
    "tee": "shirt",
    "footwear": "shoe",
}


@dataclass(frozen=True)
class AdapterRanking:
    scores: tuple[CandidateScore, ...]
    rationale: str


@runtime_checkable
class SemanticAdapter(Protocol):
    name: str
    deterministic: bool

    def rank(self, description: str, candidates: Sequence[Heading]) -> AdapterRanking:
        ...


class SynonymAdapter:
    """Re-scores candidates after mapping description tokens through a
    synonym table. Deterministic, so verification stays reproducible."""

    name = "synonym"
    deterministic = True

    def __init__(self, table: Mapping[str, str] | None = None) -> None:
        self.table = dict(DEFAULT_SYNONYMS if table is None else table)

    def rank(self, description: str, candidates: Sequence[Heading]) -> AdapterRanking:
        original = tokenize(description)
        substituted = tuple(dict.fromkeys(self.table.get(t, t) for t in original))
        applied = sorted(f"{t}->{self.table[t]}" for t in original if t in self.table)
        scores: list[CandidateScore] = []
        if substituted:
            token_pool = set(substituted)
            for heading in sorted(candidates, key=lambda h: h.code.digits):
                matched = tuple(sorted(token_pool & token_set(heading.terms)))
                if matched:
                    scores.append(
                        CandidateScore(heading.code.digits, len(matched) / len(token_pool), matched)
                    )
        scores.sort(key=lambda c: (-c.score, c.heading))
        rationale = (
            "synonyms applied: " + ", ".join(applied) if applied else "no synonyms applicable"
        )
        return AdapterRanking(scores=tuple(scores), rationale=rationale)
