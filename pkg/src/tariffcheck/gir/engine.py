"""GIR 1-6 cascade over a knowledge base snapshot.

All functions are pure: they read the immutable snapshot and the item and
return new values, so unlimited parallel invocation is safe. The claimed
code on an item is never consulted; classification depends only on the
description and attributes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Protocol, Sequence

from tariffcheck.gir.model import (
    CandidateScore,
    ClassificationResult,
    EngineConfig,
    GirRule,
    GirStep,
)
from tariffcheck.gir.text import token_set, tokenize
from tariffcheck.kb.conditions import eval_condition
from tariffcheck.kb.hscode import HsCode
from tariffcheck.kb.model import Heading, KnowledgeBase, LegalNote, Subheading, notes_for

_ASSEMBLY_STATES = ("unassembled", "incomplete", "disassembled")
_CONTAINER_WORDS = frozenset({"case", "box", "chest", "holster"})


class ClassifiableItem(Protocol):
    """Anything with a description and an attribute map can be classified."""

    description: str
    attributes: Mapping[str, object]


# --- Candidate scoring -------------------------------------------------------


def candidate_headings(kb: KnowledgeBase, item: ClassifiableItem) -> list[CandidateScore]:
    """Token-overlap scores against every heading; only positive scores,
    ordered by score descending then code ascending."""
    item_tokens = set(tokenize(item.description))
    if not item_tokens:
        return []
    out: list[CandidateScore] = []
    for code in sorted(kb.headings):
        heading = kb.headings[code]
        matched = tuple(sorted(item_tokens & token_set(heading.terms)))
        if matched:
            out.append(CandidateScore(code, len(matched) / len(item_tokens), matched))
    out.sort(key=lambda c: (-c.score, c.heading))
    return out


def _ordered(candidates: Sequence[CandidateScore]) -> tuple[CandidateScore, ...]:
    return tuple(sorted(candidates, key=lambda c: (-c.score, c.heading)))


def _specificity(kb: KnowledgeBase, heading: str, item_tokens: frozenset[str]) -> int:
    """GIR 3(a) metric: count of item tokens matched by the heading's terms."""
    return len(item_tokens & token_set(kb.headings[heading].terms))


def _unique_best_heading(kb: KnowledgeBase, tokens: frozenset[str]) -> str | None:
    """Heading with the strictly highest token match against ``tokens``."""
    best: list[str] = []
    best_count = 0
    for code in sorted(kb.headings):
        count = len(tokens & token_set(kb.headings[code].terms))
        if count > best_count:
            best, best_count = [code], count
        elif count == best_count and count > 0:
            best.append(code)
    return best[0] if len(best) == 1 else None


def _best_headings(kb: KnowledgeBase, tokens: frozenset[str]) -> list[str]:
    """All headings tied at the highest positive token match."""
    best: list[str] = []
    best_count = 0
    for code in sorted(kb.headings):
        count = len(tokens & token_set(kb.headings[code].terms))
        if count > best_count:
            best, best_count = [code], count
        elif count == best_count and count > 0:
            best.append(code)
    return best


# --- GIR 1 -------------------------------------------------------------------


@dataclass(frozen=True)
class Gir1Outcome:
    decided: str | None
    by_note: bool
    candidates: tuple[CandidateScore, ...]
    excluded: tuple[str, ...]
    confirmed: frozenset[str]
    steps: tuple[GirStep, ...]
    missing_attrs: tuple[str, ...]
    conflict_review: bool


def apply_gir1(
    kb: KnowledgeBase,
    item: ClassifiableItem,
    candidates: Sequence[CandidateScore],
    config: EngineConfig,
) -> Gir1Outcome:
    """Classify by heading terms and Section/Chapter Notes.

    Matching exclusion notes remove a candidate; a redirect adds (or, when
    it points back at the candidate, confirms) the target heading. A single
    remaining candidate decides when it is note-confirmed or its score
    meets the acceptance threshold. Two matching exclusion notes that
    disagree on the redirect remove the candidate without guessing and mark
    the step for human review.
    """
    ordered = _ordered(candidates)
    if not ordered:
        return Gir1Outcome(None, False, (), (), frozenset(), (), (), False)

    work: dict[str, CandidateScore] = {c.heading: c for c in ordered}
    original = {c.heading: c for c in ordered}
    excluded: list[str] = []
    confirmed: set[str] = set()
    cited: list[str] = []
    missing: list[str] = []
    conflict = False
    eval_cache: dict[str, tuple[bool, tuple[str, ...]]] = {}

    def note_matches(note: LegalNote) -> bool:
        if note.id not in eval_cache:
            result = eval_condition(note.condition, item.attributes)
            eval_cache[note.id] = (result.value, result.missing_attrs)
            missing.extend(result.missing_attrs)
        return eval_cache[note.id][0]

    for cand in ordered:
        applicable = notes_for(kb, cand.heading)
        matching_exclusions: list[LegalNote] = []
        for note in applicable:
            if note.kind == "definition":
                continue
            if not note_matches(note):
                continue
            if note.kind == "inclusion":
                confirmed.add(cand.heading)
                cited.append(note.id)
            else:
                matching_exclusions.append(note)
        if not matching_exclusions:
            continue
        cited.extend(n.id for n in matching_exclusions)
        targets = {n.redirect.heading if n.redirect else None for n in matching_exclusions}
        if cand.heading in targets:
            if len(targets) == 1:
                confirmed.add(cand.heading)
            else:
                # Notes disagree on where the goods go; do not guess.
                conflict = True
                work.pop(cand.heading, None)
                excluded.append(cand.heading)
            continue
        real_targets = sorted(t for t in targets if t is not None)
        work.pop(cand.heading, None)
        excluded.append(cand.heading)
        if len(real_targets) > 1:
            conflict = True
            continue
        if real_targets:
            target = real_targets[0]
            if target not in excluded and target not in work:
                base = original.get(target)
                work[target] = base if base else CandidateScore(target, 0.0, ())
            if target not in excluded:
                confirmed.add(target)

    survivors = _ordered(work.values())
    decided: str | None = None
    by_note = False
    if len(survivors) == 1:
        only = survivors[0]
        if only.heading in confirmed:
            decided, by_note = only.heading, True
        elif only.score >= config.theta_accept:
            decided = only.heading

    cited_unique = tuple(dict.fromkeys(cited))
    step = GirStep(
        rule=GirRule.GIR1,
        justification=_gir1_justification(decided, by_note, survivors, cited_unique, conflict),
        cited_notes=cited_unique,
        candidates_before=tuple(c.heading for c in ordered),
        candidates_after=tuple(c.heading for c in survivors),
        needs_review=conflict,
    )
    return Gir1Outcome(
        decided=decided,
        by_note=by_note,
        candidates=survivors,
        excluded=tuple(excluded),
        confirmed=frozenset(confirmed),
        steps=(step,),
        missing_attrs=tuple(dict.fromkeys(missing)),
        conflict_review=conflict,
    )


def _gir1_justification(
    decided: str | None,
    by_note: bool,
    survivors: tuple[CandidateScore, ...],
    cited: tuple[str, ...],
    conflict: bool,
) -> str:
    if conflict:
        return (
            "Conflicting exclusion notes ("
            + ", ".join(cited)
            + ") point to different headings; routed to review instead of guessing."
        )
    if decided and by_note:
        return (
            f"Classification determined at heading {_dotted(decided)} by the heading terms "
            f"and legal note(s) {', '.join(cited)}."
        )
    if decided:
        return (
            f"Classification determined at heading {_dotted(decided)} by the terms of the "
            "heading; no applicable note altered the candidate set."
        )
    if not survivors:
        return "All candidate headings were excluded by legal notes."
    return (
        f"Heading terms and notes leave {len(survivors)} candidate(s): "
        + ", ".join(_dotted(c.heading) for c in survivors)
        + "; classification not yet determined."
    )


# --- GIR 2 -------------------------------------------------------------------


@dataclass(frozen=True)
class Gir2Outcome:
    candidates: tuple[CandidateScore, ...]
    steps: tuple[GirStep, ...]


def apply_gir2(
    kb: KnowledgeBase,
    item: ClassifiableItem,
    candidates: Sequence[CandidateScore],
    excluded: Sequence[str],
    config: EngineConfig,
) -> Gir2Outcome:
    """GIR 2(a) retains the essential-character heading for incomplete or
    unassembled goods; GIR 2(b) expands candidates with each declared
    material's best headings, handing the mixture to GIR 3."""
    attrs = item.attributes
    item_tokens = frozenset(tokenize(item.description))
    work: dict[str, CandidateScore] = {c.heading: c for c in _ordered(candidates)}
    steps: list[GirStep] = []

    assembly = str(attrs.get("assembly_state", "")).strip().lower()
    essential = str(attrs.get("essential_character", "")).strip()
    if assembly in _ASSEMBLY_STATES and essential:
        target = _unique_best_heading(kb, frozenset(tokenize(essential)))
        if target and target not in excluded:
            before = tuple(c.heading for c in _ordered(work.values()))
            if target not in work:
                matched = tuple(sorted(item_tokens & token_set(kb.headings[target].terms)))
                work[target] = CandidateScore(
                    target, len(matched) / max(len(item_tokens), 1), matched
                )
            steps.append(
                GirStep(
                    rule=GirRule.GIR2A,
                    justification=(
                        f"Goods presented {assembly} possess the essential character of "
                        f"{essential!r}; heading {_dotted(target)} retained as if complete."
                    ),
                    candidates_before=before,
                    candidates_after=tuple(c.heading for c in _ordered(work.values())),
                )
            )

    materials = attrs.get("materials")
    if isinstance(materials, (list, tuple)) and len(materials) > 1:
        before = tuple(c.heading for c in _ordered(work.values()))
        added: list[str] = []
        for material in materials:
            for target in _best_headings(kb, frozenset(tokenize(str(material)))):
                if target in excluded or target in work:
                    continue
                tokens = item_tokens & token_set(kb.headings[target].terms)
                work[target] = CandidateScore(
                    target,
                    len(tokens) / max(len(item_tokens), 1),
                    tuple(sorted(tokens)),
                )
                added.append(target)
        steps.append(
            GirStep(
                rule=GirRule.GIR2B,
                justification=(
                    "Goods consist of more than one material ("
                    + ", ".join(str(m) for m in materials)
                    + "); candidates expanded"
                    + (f" with {', '.join(_dotted(a) for a in sorted(added))}" if added else "")
                    + " and handed to GIR 3."
                ),
                candidates_before=before,
                candidates_after=tuple(c.heading for c in _ordered(work.values())),
            )
        )

    return Gir2Outcome(candidates=_ordered(work.values()), steps=tuple(steps))


# --- GIR 3 -------------------------------------------------------------------


@dataclass(frozen=True)
class Gir3Outcome:
    decided: str | None
    rule: GirRule | None
    winning_score: float
    steps: tuple[GirStep, ...]


def apply_gir3(
    kb: KnowledgeBase,
    item: ClassifiableItem,
    candidates: Sequence[CandidateScore],
    config: EngineConfig,
) -> Gir3Outcome:
    """Resolve goods classifiable under multiple headings.

    3(a) most specific description (strict maximum of matched-token count),
    3(b) declared essential character, 3(c) heading last in numerical
    order. Every sub-rule tried records a step, decided or not.
    """
    ordered = _ordered(candidates)
    assert len(ordered) >= 2, "GIR 3 requires at least two candidates"
    item_tokens = frozenset(tokenize(item.description))
    headings = tuple(c.heading for c in ordered)
    scores = {c.heading: c.score for c in ordered}
    steps: list[GirStep] = []

    counts = {h: _specificity(kb, h, item_tokens) for h in headings}
    top = max(counts.values())
    tied = sorted(h for h, n in counts.items() if n == top)
    if len(tied) == 1:
        winner = tied[0]
        steps.append(
            GirStep(
                rule=GirRule.GIR3A,
                justification=(
                    f"Heading {_dotted(winner)} gives the most specific description "
                    f"({top} item token(s) matched)."
                ),
                candidates_before=headings,
                candidates_after=(winner,),
            )
        )
        return Gir3Outcome(winner, GirRule.GIR3A, scores[winner], tuple(steps))
    steps.append(
        GirStep(
            rule=GirRule.GIR3A,
            justification=(
                f"Specificity tied at {top} matched token(s) among "
                + ", ".join(_dotted(h) for h in tied)
                + "; not determinative."
            ),
            candidates_before=headings,
            candidates_after=headings,
        )
    )

    essential = str(item.attributes.get("essential_character", "")).strip()
    if essential:
        target = _unique_best_heading(kb, frozenset(tokenize(essential)))
        if target and target in scores:
            steps.append(
                GirStep(
                    rule=GirRule.GIR3B,
                    justification=(
                        f"Essential character {essential!r} is given by heading {_dotted(target)}."
                    ),
                    candidates_before=headings,
                    candidates_after=(target,),
                )
            )
            return Gir3Outcome(target, GirRule.GIR3B, scores[target], tuple(steps))
        reason = (
            "declared essential character does not pick a single candidate heading"
            if target is None or target not in scores
            else "not determinative"
        )
        steps.append(
            GirStep(
                rule=GirRule.GIR3B,
                justification=f"Essential character {essential!r} considered; {reason}.",
                candidates_before=headings,
                candidates_after=headings,
            )
        )
    else:
        steps.append(
            GirStep(
                rule=GirRule.GIR3B,
                justification="No essential character declared; not determinative.",
                candidates_before=headings,
                candidates_after=headings,
            )
        )

    winner = max(headings, key=lambda h: int(h))
    steps.append(
        GirStep(
            rule=GirRule.GIR3C,
            justification=(
                f"Heading {_dotted(winner)} occurs last in numerical order among the "
                "equally meritable candidates."
            ),
            candidates_before=headings,
            candidates_after=(winner,),
        )
    )
    return Gir3Outcome(winner, GirRule.GIR3C, scores[winner], tuple(steps))


# --- GIR 4 -------------------------------------------------------------------


@dataclass(frozen=True)
class Gir4Outcome:
    decided: str | None
    winning_score: float
    steps: tuple[GirStep, ...]


def apply_gir4(
    kb: KnowledgeBase,
    item: ClassifiableItem,
    candidates: Sequence[CandidateScore],
    config: EngineConfig,
) -> Gir4Outcome:
    """Classify with the goods the item is most akin to, or give up."""
    ordered = _ordered(candidates)
    best = ordered[0] if ordered else None
    headings = tuple(c.heading for c in ordered)
    if best is not None and best.score >= config.theta_akin:
        step = GirStep(
            rule=GirRule.GIR4,
            justification=(
                f"Goods are most akin to heading {_dotted(best.heading)} "
                f"(score {best.score:.2f} >= {config.theta_akin:.2f})."
            ),
            candidates_before=headings,
            candidates_after=(best.heading,),
        )
        return Gir4Outcome(best.heading, best.score, (step,))
    step = GirStep(
        rule=GirRule.GIR4,
        justification=(
            "No heading is sufficiently akin"
            + (f" (best score {best.score:.2f} < {config.theta_akin:.2f})" if best else "")
            + "; classification undetermined."
        ),
        candidates_before=headings,
        candidates_after=(),
    )
    return Gir4Outcome(None, best.score if best else 0.0, (step,))


# --- GIR 5 -------------------------------------------------------------------


def apply_gir5(kb: KnowledgeBase, item: ClassifiableItem) -> GirStep | None:
    """Packaging overlay; never changes the code.

    Non-reusable or specially shaped containers are classified with their
    contents. Reusable containers require a separate classification, which
    is outside this engine, so the step carries a review marker.
    """
    attrs = item.attributes
    packaging = {k: v for k, v in attrs.items() if k.startswith("packaging.")}
    if not packaging:
        return None
    kind = str(packaging.get("packaging.kind", "container"))
    if _truthy(packaging.get("packaging.reusable")):
        return GirStep(
            rule=GirRule.GIR5B,
            justification=(
                f"Packaging {kind!r} is suitable for repetitive use and must be "
                "classified separately; routed to review."
            ),
            needs_review=True,
        )
    shaped = _truthy(packaging.get("packaging.specially_shaped"))
    kind_tokens = set(tokenize(kind))
    if shaped or kind_tokens & _CONTAINER_WORDS:
        rule, label = GirRule.GIR5A, "specially fitted container"
    else:
        rule, label = GirRule.GIR5B, "packing material"
    return GirStep(
        rule=rule,
        justification=f"Packaging {kind!r} treated as {label}, classified with the goods; no code change.",
    )


def _truthy(value: object) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return bool(value)
    return str(value).strip().lower() in ("true", "yes", "1")


# --- GIR 6 -------------------------------------------------------------------


def apply_gir6(
    kb: KnowledgeBase,
    item: ClassifiableItem,
    heading: Heading,
    config: EngineConfig,
) -> tuple[HsCode, tuple[GirStep, ...], bool]:
    """Descend subheadings level by level, comparing only siblings.

    Term matching and the specificity/numerical-order analogs of GIR 1-3
    choose among siblings; with no match the residual sibling is taken.
    With no match and no residual, descent stops and the result is flagged
    evidence-incomplete.
    """
    item_tokens = frozenset(tokenize(item.description))
    ec_tokens = frozenset(tokenize(str(item.attributes.get("essential_character", ""))))
    current: HsCode = heading.code
    group = sorted(
        (s for s in heading.subheadings if s.level == 1), key=lambda s: s.code.digits
    )
    steps: list[GirStep] = []
    incomplete = False

    while group:
        chosen, why = _choose_subheading(group, item_tokens, ec_tokens)
        if chosen is None:
            incomplete = True
            steps.append(
                GirStep(
                    rule=GirRule.GIR6,
                    justification=(
                        "No subheading term matches and no residual entry exists; "
                        f"stopping at {_dotted(current.digits)} with incomplete evidence."
                    ),
                    candidates_before=tuple(s.code.digits for s in group),
                    candidates_after=(current.digits,),
                )
            )
            break
        steps.append(
            GirStep(
                rule=GirRule.GIR6,
                justification=f"Subheading {chosen.code.display()} selected: {why}.",
                candidates_before=tuple(s.code.digits for s in group),
                candidates_after=(chosen.code.digits,),
            )
        )
        current = chosen.code
        group = sorted(
            (
                s
                for s in heading.subheadings
                if s.level == chosen.level + 1 and s.code.digits.startswith(chosen.code.digits)
            ),
            key=lambda s: s.code.digits,
        )

    return current, tuple(steps), incomplete


def _choose_subheading(
    group: list[Subheading],
    item_tokens: frozenset[str],
    ec_tokens: frozenset[str],
) -> tuple[Subheading | None, str]:
    counts = {s.code.digits: len(item_tokens & token_set(s.terms)) for s in group}
    positives = [s for s in group if counts[s.code.digits] > 0]
    if positives:
        top = max(counts[s.code.digits] for s in positives)
        tied = [s for s in positives if counts[s.code.digits] == top]
        if len(tied) == 1:
            return tied[0], f"terms match {top} item token(s)"
        if ec_tokens:
            ec_counts = {s.code.digits: len(ec_tokens & token_set(s.terms)) for s in tied}
            ec_top = max(ec_counts.values())
            ec_tied = [s for s in tied if ec_counts[s.code.digits] == ec_top]
            if ec_top > 0 and len(ec_tied) == 1:
                return ec_tied[0], "essential character matches its terms"
        last = max(tied, key=lambda s: int(s.code.digits))
        return last, "numerically last among equally specific subheadings"
    residuals = [s for s in group if s.is_residual]
    if residuals:
        return residuals[0], "residual ('other') entry covers unmatched goods"
    return None, ""


# --- Orchestration -----------------------------------------------------------


def classify(
    kb: KnowledgeBase,
    item: ClassifiableItem,
    config: EngineConfig | None = None,
    candidate_scores: Sequence[CandidateScore] | None = None,
) -> ClassificationResult:
    """Run the full cascade and return the traced result.

    ``candidate_scores`` lets a caller substitute pre-ranked candidates
    (e.g. after semantic re-scoring); by default the lexical matcher runs.
    Undetermined classification is a value, not an error.
    """
    cfg = config or EngineConfig()
    scores = (
        _ordered(candidate_scores)
        if candidate_scores is not None
        else tuple(candidate_headings(kb, item))
    )

    steps: list[GirStep] = []
    missing: list[str] = []
    evidence_incomplete = False
    decided: str | None = None
    decided_by: GirRule | None = None
    winning = 0.0
    by_note = False

    o1 = apply_gir1(kb, item, scores, cfg)
    steps.extend(o1.steps)
    missing.extend(o1.missing_attrs)
    evidence_incomplete = evidence_incomplete or bool(o1.missing_attrs)
    candidates = o1.candidates
    excluded = o1.excluded

    if o1.decided is not None:
        decided, decided_by, by_note = o1.decided, GirRule.GIR1, o1.by_note
        winning = next((c.score for c in candidates if c.heading == decided), 0.0)
    else:
        o2 = apply_gir2(kb, item, candidates, excluded, cfg)
        steps.extend(o2.steps)
        candidates = o2.candidates
        if len(candidates) >= 2:
            o3 = apply_gir3(kb, item, candidates, cfg)
            steps.extend(o3.steps)
            decided, decided_by, winning = o3.decided, o3.rule, o3.winning_score
        else:
            o4 = apply_gir4(kb, item, candidates, cfg)
            steps.extend(o4.steps)
            if o4.decided is not None:
                decided, decided_by = o4.decided, GirRule.GIR4
            winning = o4.winning_score

    final_code: HsCode | None = None
    if decided is not None:
        overlay = apply_gir5(kb, item)
        if overlay is not None:
            steps.append(
                replace(overlay, candidates_before=(decided,), candidates_after=(decided,))
            )
        code6, steps6, stalled = apply_gir6(kb, item, kb.headings[decided], cfg)
        steps.extend(steps6)
        evidence_incomplete = evidence_incomplete or stalled
        final_code = code6

    return ClassificationResult(
        code=final_code,
        trace=tuple(steps),
        confidence=_confidence(decided_by, by_note, winning) if decided is not None else 0.0,
        evidence_incomplete=evidence_incomplete,
        decided_by=decided_by if decided is not None else None,
        missing_attrs=tuple(dict.fromkeys(missing)),
    )


def _confidence(rule: GirRule | None, by_note: bool, score: float) -> float:
    if rule == GirRule.GIR1:
        value = min(1.0, score + 0.4) if by_note else score
    elif rule in (GirRule.GIR3A, GirRule.GIR3B):
        value = score
    elif rule == GirRule.GIR3C:
        value = min(score, 0.5)
    elif rule == GirRule.GIR4:
        value = min(score, 0.3)
    else:
        value = score
    return max(0.0, min(1.0, value))


def _dotted(heading: str) -> str:
    return f"{heading[:2]}.{heading[2:]}" if len(heading) == 4 else heading
