"""Knowledge base file parsing and validation.

The canonical KB document is YAML with top-level sections ``version``,
``headings``, ``notes`` and ``exemptions``:

    version: "2025.01"
    headings:
      - code: "3926"
        terms: [other articles of plastics]
        subheadings:
          - {code: "392690", terms: [other], level: 1, is_residual: true}
    notes:
      - id: "CH39-N2y"
        scope: "chapter:39"
        kind: exclusion
        condition: "category contains 'toy'"
        redirect: "9503"
        source_text: "..."
        citation_uri: "kb://notes/ch39/2y"
    exemptions:
      - id: "LIST-1"
        source: "kb://exemptions/list-1"
        entries:
          - prefix: "9503"
          - {prefix: "6214", condition: "material = 'cotton'"}

Exclusion notes without a ``redirect`` must set ``undetermined: true`` to
acknowledge "classify elsewhere, undetermined" explicitly.
"""

from __future__ import annotations

import re
from collections import Counter

import yaml

from tariffcheck.kb.conditions import ConditionSyntaxError, parse_condition
from tariffcheck.kb.hscode import HsCode, HsCodeError
from tariffcheck.kb.model import (
    NOTE_KINDS,
    ExemptionEntry,
    ExemptionList,
    Heading,
    KnowledgeBase,
    LegalNote,
    Subheading,
)


class KbFormatError(ValueError):
    """KB document is malformed or violates a structural invariant."""


def parse_kb(document: bytes | str, format_tag: str = "yaml") -> KnowledgeBase:
    """Parse and fully validate a KB document into an immutable snapshot."""
    if format_tag != "yaml":
        raise KbFormatError(f"unsupported KB format {format_tag!r} (expected 'yaml')")
    text = document.decode("utf-8") if isinstance(document, bytes) else document
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise KbFormatError(f"KB syntax error{where}: {getattr(exc, 'problem', exc)}") from exc
    if not isinstance(raw, dict):
        raise KbFormatError("KB document must be a mapping with version/headings/notes/exemptions")

    version = raw.get("version")
    if not isinstance(version, str) or not version.strip():
        raise KbFormatError("KB 'version' must be a non-empty string")

    headings = _parse_headings(raw.get("headings"))
    notes = _parse_notes(raw.get("notes") or [])
    exemptions = _parse_exemptions(raw.get("exemptions") or [])

    heading_codes = {h.code.digits for h in headings}
    for note in notes:
        if note.redirect is not None and note.redirect.heading not in heading_codes:
            raise KbFormatError(
                f"note {note.id!r} redirects to {note.redirect.digits!r} which is not a known heading"
            )
    return KnowledgeBase.build(version.strip(), headings, notes, exemptions)


def _parse_headings(raw: object) -> list[Heading]:
    if not raw:
        raise KbFormatError("no headings")
    if not isinstance(raw, list):
        raise KbFormatError("'headings' must be a list")
    headings: list[Heading] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise KbFormatError(f"heading #{i + 1} must be a mapping")
        code = _code(entry.get("code"), f"heading #{i + 1}")
        if len(code.digits) != 4:
            raise KbFormatError(f"heading {code.digits!r} must have exactly 4 digits")
        if code.digits in seen:
            raise KbFormatError(f"duplicate heading code {code.digits!r}")
        seen.add(code.digits)
        terms = _terms(entry.get("terms"), f"heading {code.digits}")
        subs = _parse_subheadings(entry.get("subheadings") or [], code)
        headings.append(Heading(code=code, terms=terms, subheadings=subs))
    return headings


def _parse_subheadings(raw: object, heading_code: HsCode) -> tuple[Subheading, ...]:
    if not isinstance(raw, list):
        raise KbFormatError(f"'subheadings' of heading {heading_code.digits} must be a list")
    subs: list[Subheading] = []
    for i, entry in enumerate(raw):
        where = f"heading {heading_code.digits} subheading #{i + 1}"
        if not isinstance(entry, dict):
            raise KbFormatError(f"{where} must be a mapping")
        code = _code(entry.get("code"), where)
        if not code.digits.startswith(heading_code.digits):
            raise KbFormatError(f"{where}: code {code.digits!r} is not under the heading")
        if len(code.digits) < 6:
            raise KbFormatError(f"{where}: subheading codes need at least 6 digits")
        level = entry.get("level")
        expected_level = (len(code.digits) - 4) // 2
        if level is None:
            level = expected_level
        if level != expected_level:
            raise KbFormatError(
                f"{where}: level {level} inconsistent with {len(code.digits)}-digit code"
            )
        subs.append(
            Subheading(
                code=code,
                terms=_terms(entry.get("terms"), where),
                level=int(level),
                is_residual=bool(entry.get("is_residual", False)),
            )
        )
    _check_nesting(subs, heading_code)
    return tuple(subs)


def _check_nesting(subs: list[Subheading], heading_code: HsCode) -> None:
    codes = {s.code.digits for s in subs}
    if len(codes) != len(subs):
        dupes = [c for c, n in Counter(s.code.digits for s in subs).items() if n > 1]
        raise KbFormatError(f"duplicate subheading codes under {heading_code.digits}: {dupes}")
    groups: dict[str, list[Subheading]] = {}
    for s in subs:
        parent = s.code.digits[:-2]
        if s.level > 1 and parent not in codes:
            raise KbFormatError(
                f"subheading {s.code.digits} of {heading_code.digits} has no parent {parent}"
            )
        groups.setdefault(parent, []).append(s)
    for parent, siblings in groups.items():
        residuals = [s for s in siblings if s.is_residual]
        if len(residuals) > 1:
            raise KbFormatError(
                f"more than one residual subheading under {parent}: "
                f"{[s.code.digits for s in residuals]}"
            )


def _parse_notes(raw: object) -> list[LegalNote]:
    if not isinstance(raw, list):
        raise KbFormatError("'notes' must be a list")
    notes: list[LegalNote] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise KbFormatError(f"note #{i + 1} must be a mapping")
        note_id = entry.get("id")
        if not isinstance(note_id, str) or not note_id.strip():
            raise KbFormatError(f"note #{i + 1} is missing an id")
        note_id = note_id.strip()
        if note_id in seen:
            raise KbFormatError(f"duplicate note id {note_id!r}")
        seen.add(note_id)
        kind = entry.get("kind")
        if kind not in NOTE_KINDS:
            raise KbFormatError(f"note {note_id!r}: kind must be one of {NOTE_KINDS}, got {kind!r}")
        scope = entry.get("scope")
        if not isinstance(scope, str) or not _valid_scope(scope):
            raise KbFormatError(
                f"note {note_id!r}: scope must be 'chapter:NN' or 'section:NN-MM', got {scope!r}"
            )
        cond_src = entry.get("condition")
        if not isinstance(cond_src, str) or not cond_src.strip():
            raise KbFormatError(f"note {note_id!r}: missing condition")
        try:
            condition = parse_condition(cond_src)
        except ConditionSyntaxError as exc:
            raise KbFormatError(f"note {note_id!r} condition: {exc}") from exc
        redirect_raw = entry.get("redirect")
        redirect = None
        if redirect_raw is not None:
            redirect = _code(str(redirect_raw), f"note {note_id!r} redirect")
        if kind == "exclusion" and redirect is None and not entry.get("undetermined"):
            raise KbFormatError(
                f"exclusion note {note_id!r} needs a redirect or 'undetermined: true'"
            )
        notes.append(
            LegalNote(
                id=note_id,
                scope=scope,
                kind=kind,
                condition=condition,
                redirect=redirect,
                source_text=str(entry.get("source_text") or "").strip(),
                citation_uri=str(entry.get("citation_uri") or "").strip(),
            )
        )
    return notes


def _parse_exemptions(raw: object) -> list[ExemptionList]:
    if not isinstance(raw, list):
        raise KbFormatError("'exemptions' must be a list")
    lists: list[ExemptionList] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise KbFormatError(f"exemption list #{i + 1} must be a mapping")
        list_id = entry.get("id")
        if not isinstance(list_id, str) or not list_id.strip():
            raise KbFormatError(f"exemption list #{i + 1} is missing an id")
        list_id = list_id.strip()
        if list_id in seen:
            raise KbFormatError(f"duplicate exemption list id {list_id!r}")
        seen.add(list_id)
        entries: list[ExemptionEntry] = []
        prefixes: set[str] = set()
        for j, item in enumerate(entry.get("entries") or []):
            where = f"exemption list {list_id!r} entry #{j + 1}"
            if not isinstance(item, dict):
                raise KbFormatError(f"{where} must be a mapping")
            prefix = _code(str(item.get("prefix", "")), where)
            if len(prefix.digits) not in (4, 6):
                raise KbFormatError(f"{where}: prefix must be 4 or 6 digits")
            if prefix.digits in prefixes:
                raise KbFormatError(f"{where}: duplicate prefix {prefix.digits!r}")
            prefixes.add(prefix.digits)
            condition = None
            if item.get("condition"):
                try:
                    condition = parse_condition(str(item["condition"]))
                except ConditionSyntaxError as exc:
                    raise KbFormatError(f"{where} condition: {exc}") from exc
            entries.append(ExemptionEntry(prefix=prefix, condition=condition))
        lists.append(
            ExemptionList(
                id=list_id,
                entries=tuple(entries),
                source=str(entry.get("source") or "").strip(),
            )
        )
    return lists


def _valid_scope(scope: str) -> bool:
    return bool(re.match(r"^chapter:[0-9]{2}$", scope) or re.match(r"^section:[0-9]{2}-[0-9]{2}$", scope))


def _code(value: object, where: str) -> HsCode:
    if not isinstance(value, str) or not value.strip():
        raise KbFormatError(f"{where}: missing HS code")
    try:
        return HsCode.parse(value)
    except HsCodeError as exc:
        raise KbFormatError(f"{where}: {exc}") from exc


def _terms(value: object, where: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not value:
        raise KbFormatError(f"{where}: 'terms' must be a non-empty list")
    terms = tuple(str(t).strip() for t in value)
    if any(not t for t in terms):
        raise KbFormatError(f"{where}: empty term")
    return terms
