"""Knowledge base domain types and query operations.

A ``KnowledgeBase`` is an immutable snapshot: reloads build a fresh snapshot
and never touch one already handed out, so snapshots are safe to share
across concurrent readers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

from tariffcheck import canon
from tariffcheck.kb.conditions import (
    AttrMap,
    EvalResult,
    NoteCondition,
    eval_condition,
    render_condition,
)
from tariffcheck.kb.hscode import HsCode

NOTE_KINDS = ("exclusion", "inclusion", "definition")

_CHAPTER_SCOPE = re.compile(r"^chapter:([0-9]{2})$")
_SECTION_SCOPE = re.compile(r"^section:([0-9]{2})-([0-9]{2})$")


class KbQueryError(KeyError):
    """Query referenced a heading or chapter absent from the snapshot."""


@dataclass(frozen=True)
class Subheading:
    code: HsCode
    terms: tuple[str, ...]
    level: int
    is_residual: bool = False


@dataclass(frozen=True)
class Heading:
    code: HsCode
    terms: tuple[str, ...]
    subheadings: tuple[Subheading, ...] = ()

    @property
    def chapter(self) -> str:
        return self.code.chapter


@dataclass(frozen=True)
class LegalNote:
    """Section or Chapter Note with a machine-evaluable condition.

    ``scope`` is ``chapter:NN`` or ``section:NN-MM`` (inclusive chapter
    range). Exclusion notes either redirect matching goods to another
    heading or carry no redirect, meaning "classify elsewhere,
    undetermined".
    """

    id: str
    scope: str
    kind: str
    condition: NoteCondition
    redirect: HsCode | None
    source_text: str
    citation_uri: str

    @property
    def scope_kind(self) -> str:
        return "section" if self.scope.startswith("section:") else "chapter"

    def applies_to_chapter(self, chapter: str) -> bool:
        m = _CHAPTER_SCOPE.match(self.scope)
        if m:
            return m.group(1) == chapter
        m = _SECTION_SCOPE.match(self.scope)
        if m:
            return int(m.group(1)) <= int(chapter) <= int(m.group(2))
        return False


@dataclass(frozen=True)
class ExemptionEntry:
    prefix: HsCode
    condition: NoteCondition | None = None


@dataclass(frozen=True)
class ExemptionList:
    id: str
    entries: tuple[ExemptionEntry, ...]
    source: str


@dataclass(frozen=True)
class KnowledgeBase:
    version: str
    headings: Mapping[str, Heading]
    notes: tuple[LegalNote, ...]
    exemptions: Mapping[str, ExemptionList]

    @staticmethod
    def build(
        version: str,
        headings: Iterable[Heading],
        notes: Iterable[LegalNote],
        exemptions: Iterable[ExemptionList],
    ) -> "KnowledgeBase":
        return KnowledgeBase(
            version=version,
            headings=MappingProxyType({h.code.digits: h for h in headings}),
            notes=tuple(notes),
            exemptions=MappingProxyType({e.id: e for e in exemptions}),
        )

    def heading_codes(self) -> list[str]:
        return sorted(self.headings)


def notes_for(kb: KnowledgeBase, heading_or_chapter: str | HsCode) -> list[LegalNote]:
    """Notes applicable to a heading's chapter: section scope first, then
    chapter scope, each ordered by note id."""
    chapter = _resolve_chapter(kb, heading_or_chapter)
    applicable = [n for n in kb.notes if n.applies_to_chapter(chapter)]
    section = sorted((n for n in applicable if n.scope_kind == "section"), key=lambda n: n.id)
    chapter_notes = sorted((n for n in applicable if n.scope_kind == "chapter"), key=lambda n: n.id)
    return section + chapter_notes


def _resolve_chapter(kb: KnowledgeBase, ref: str | HsCode) -> str:
    if isinstance(ref, HsCode):
        key = ref.heading
    else:
        key = ref.strip()
    if len(key) == 2 and key.isdigit():
        if not any(h.chapter == key for h in kb.headings.values()):
            raise KbQueryError(f"unknown chapter {key!r}")
        return key
    heading = key[:4]
    if heading not in kb.headings:
        raise KbQueryError(f"unknown heading {heading!r}")
    return kb.headings[heading].chapter


@dataclass(frozen=True)
class ExemptionStatus:
    """Longest-prefix eligibility verdict.

    ``verdict`` is ``eligible``, ``ineligible`` or ``conditional``;
    conditional means the matched entry's condition could not be settled
    because evidence was incomplete.
    """

    verdict: str
    list_id: str | None = None
    prefix: str | None = None
    condition_result: EvalResult | None = None

    @property
    def eligible(self) -> bool:
        return self.verdict == "eligible"


def exemption_status(kb: KnowledgeBase, code: HsCode, attrs: AttrMap) -> ExemptionStatus:
    """Longest-prefix match across all exemption lists; no match is ineligible."""
    best: tuple[int, str, ExemptionEntry] | None = None
    for list_id in sorted(kb.exemptions):
        for entry in kb.exemptions[list_id].entries:
            if not code.digits.startswith(entry.prefix.digits):
                continue
            length = len(entry.prefix.digits)
            if best is None or length > best[0]:
                best = (length, list_id, entry)
    if best is None:
        return ExemptionStatus("ineligible")
    _, list_id, entry = best
    if entry.condition is None:
        return ExemptionStatus("eligible", list_id, entry.prefix.digits)
    result = eval_condition(entry.condition, attrs)
    if result.value:
        return ExemptionStatus("eligible", list_id, entry.prefix.digits, result)
    if result.evidence_incomplete:
        return ExemptionStatus("conditional", list_id, entry.prefix.digits, result)
    return ExemptionStatus("ineligible", list_id, entry.prefix.digits, result)


# --- Snapshot fingerprint ----------------------------------------------------


def kb_to_dict(kb: KnowledgeBase) -> dict:
    return {
        "version": kb.version,
        "headings": [
            {
                "code": h.code.digits,
                "terms": list(h.terms),
                "subheadings": [
                    {
                        "code": s.code.digits,
                        "terms": list(s.terms),
                        "level": s.level,
                        "is_residual": s.is_residual,
                    }
                    for s in h.subheadings
                ],
            }
            for _, h in sorted(kb.headings.items())
        ],
        "notes": [
            {
                "id": n.id,
                "scope": n.scope,
                "kind": n.kind,
                "condition": render_condition(n.condition),
                "redirect": n.redirect.digits if n.redirect else None,
                "source_text": n.source_text,
                "citation_uri": n.citation_uri,
            }
            for n in kb.notes
        ],
        "exemptions": [
            {
                "id": e.id,
                "source": e.source,
                "entries": [
                    {
                        "prefix": entry.prefix.digits,
                        "condition": render_condition(entry.condition) if entry.condition else None,
                    }
                    for entry in e.entries
                ],
            }
            for _, e in sorted(kb.exemptions.items())
        ],
    }


def kb_fingerprint(kb: KnowledgeBase) -> str:
    """Content hash of the snapshot; equal hashes mean equal snapshots."""
    return canon.digest(kb_to_dict(kb))
