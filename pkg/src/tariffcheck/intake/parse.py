"""Canonical application document format.

A document is a header block followed by repeated ``[item]`` blocks:

    app_id = FDI-2025-0001
    applicant = Mekar Components Sdn Bhd
    revision = 1
    submitted_at = 2025-03-02T04:15:00Z

    [item]
    index = 1
    description = Doraemon plastic figure (toy)
    claimed_code = 3926.90.0000
    quantity = 1200
    value = 54000
    currency = MYR
    attr.material = plastic
    attr.category = toy

Values are typed: numeric literals become numbers, unquoted values with
commas become lists, quoted values stay verbatim strings. Item-level
problems are collected into one structured report instead of failing at
the first bad field; document-level problems (unreadable input, zero
items, duplicate indices) abort parsing outright.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from tariffcheck.intake.model import Application, AttrValue, LineItem
from tariffcheck.kb.hscode import HsCode, HsCodeError

_APP_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")
_ATTR_KEY = re.compile(r"^[a-z_][a-z0-9_]*(\.[a-z0-9_]+)*$")
_NUMBER = re.compile(r"^-?[0-9]+(\.[0-9]+)?$")
_HEADER_FIELDS = ("app_id", "applicant", "revision", "submitted_at")
_ITEM_FIELDS = ("index", "description", "claimed_code", "quantity", "value", "currency")


def normalize_hs(text: str) -> HsCode:
    """Strip dot/space separators and validate; all digits are preserved."""
    return HsCode.parse(text)


@dataclass(frozen=True)
class ItemProblem:
    """One field-level parse problem, addressable by item index."""

    index: int | None
    field: str
    message: str


@dataclass(frozen=True)
class ValidationFinding:
    """Content-level issue on an already-parsed item."""

    index: int
    field: str
    message: str


class ApplicationParseError(ValueError):
    """Document could not be turned into a valid Application.

    ``problems`` holds every collected field-level problem (not just the
    first); ``parsed_items`` holds the items that did parse cleanly.
    """

    def __init__(
        self,
        message: str,
        problems: list[ItemProblem] | None = None,
        parsed_items: list[LineItem] | None = None,
    ) -> None:
        super().__init__(message)
        self.problems = problems or []
        self.parsed_items = parsed_items or []

    def report(self) -> dict:
        return {
            "error": str(self),
            "problems": [
                {"index": p.index, "field": p.field, "message": p.message} for p in self.problems
            ],
        }


def parse_application(document: bytes | str) -> Application:
    """Parse the canonical text format; collects item problems before failing."""
    if isinstance(document, bytes):
        try:
            text = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ApplicationParseError(f"unreadable document: {exc}") from exc
    else:
        text = document

    header, item_blocks = _split_blocks(text)

    app_id = header.get("app_id", "").strip()
    if not _APP_ID.match(app_id):
        raise ApplicationParseError(f"invalid or missing app_id {app_id!r}")
    applicant = header.get("applicant", "").strip()
    if not applicant:
        raise ApplicationParseError("missing applicant")
    try:
        revision = int(header.get("revision", "1"))
    except ValueError:
        raise ApplicationParseError(f"revision is not an integer: {header.get('revision')!r}")
    submitted_at = header.get("submitted_at", "").strip()
    if not _valid_timestamp(submitted_at):
        raise ApplicationParseError(f"submitted_at is not an ISO-8601 timestamp: {submitted_at!r}")

    if not item_blocks:
        raise ApplicationParseError("zero items")

    problems: list[ItemProblem] = []
    items: list[LineItem] = []
    seen_indices: list[int] = []
    for ordinal, block in enumerate(item_blocks, start=1):
        index = _block_index(block, ordinal)
        if index is None:
            raise ApplicationParseError(f"item block #{ordinal} has no usable index")
        seen_indices.append(index)
        item, block_problems = _parse_item(block, index)
        problems.extend(block_problems)
        if item is not None:
            items.append(item)

    duplicates = sorted({i for i in seen_indices if seen_indices.count(i) > 1})
    if duplicates:
        raise ApplicationParseError(f"duplicate item indices: {duplicates}")

    if problems:
        raise ApplicationParseError(
            f"{len(problems)} item-level problem(s); see report",
            problems=problems,
            parsed_items=items,
        )

    items.sort(key=lambda it: it.index)
    if [it.index for it in items] != list(range(1, len(items) + 1)):
        raise ApplicationParseError(
            f"item indices must be contiguous from 1, got {[it.index for it in items]}"
        )
    return Application(
        app_id=app_id,
        revision=revision,
        applicant=applicant,
        items=tuple(items),
        submitted_at=submitted_at,
    )


def _split_blocks(text: str) -> tuple[dict[str, str], list[list[tuple[str, str]]]]:
    header: dict[str, str] = {}
    blocks: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[item]":
            current = []
            blocks.append(current)
            continue
        if "=" not in line:
            raise ApplicationParseError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if current is None:
            if key not in _HEADER_FIELDS:
                raise ApplicationParseError(f"line {lineno}: unknown header field {key!r}")
            header[key] = value
        else:
            current.append((key, value))
    return header, blocks


def _block_index(block: list[tuple[str, str]], ordinal: int) -> int | None:
    for key, value in block:
        if key == "index":
            try:
                return int(value)
            except ValueError:
                return None
    return None


def _parse_item(block: list[tuple[str, str]], index: int) -> tuple[LineItem | None, list[ItemProblem]]:
    problems: list[ItemProblem] = []
    fields: dict[str, str] = {}
    attrs: dict[str, AttrValue] = {}
    for key, value in block:
        if key.startswith("attr."):
            attr_key = key[len("attr."):].strip().lower()
            if not _ATTR_KEY.match(attr_key):
                problems.append(
                    ItemProblem(index, key, f"attribute key {attr_key!r} is not a dotted identifier")
                )
                continue
            attrs[attr_key] = _typed_value(value)
        elif key in _ITEM_FIELDS:
            fields[key] = value
        else:
            problems.append(ItemProblem(index, key, f"unknown item field {key!r}"))

    description = fields.get("description", "").strip()
    if not description:
        problems.append(ItemProblem(index, "description", "missing description"))

    claimed: HsCode | None = None
    if fields.get("claimed_code", "").strip():
        try:
            claimed = normalize_hs(fields["claimed_code"])
        except HsCodeError as exc:
            problems.append(ItemProblem(index, "claimed_code", str(exc)))

    quantity = _parse_number(fields.get("quantity", "0"), index, "quantity", problems)
    value = _parse_number(fields.get("value", "0"), index, "value", problems)
    currency = fields.get("currency", "MYR").strip() or "MYR"

    if any(p.index == index for p in problems):
        return None, problems
    return (
        LineItem(
            index=index,
            description=description,
            attributes=attrs,
            claimed_code=claimed,
            quantity=quantity,
            declared_value=value,
            currency=currency,
        ),
        problems,
    )


def _parse_number(text: str, index: int, field: str, problems: list[ItemProblem]) -> float:
    try:
        return float(text)
    except ValueError:
        problems.append(ItemProblem(index, field, f"{field} is not a number: {text!r}"))
        return 0.0


def _typed_value(text: str) -> AttrValue:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    if "," in text:
        return tuple(_typed_scalar(part) for part in text.split(",") if part.strip())
    return _typed_scalar(text)


def _typed_scalar(text: str) -> str | int | float:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    if _NUMBER.match(text):
        return float(text) if "." in text else int(text)
    return text


def _valid_timestamp(text: str) -> bool:
    if not text:
        return False
    try:
        datetime.fromisoformat(text.replace("Z", "+00:00"))
        return True
    except ValueError:
        return False


# --- Rendering ---------------------------------------------------------------


def render_application(app: Application) -> str:
    """Serialize back to the canonical text format (round-trips via parse)."""
    lines = [
        f"app_id = {app.app_id}",
        f"applicant = {app.applicant}",
        f"revision = {app.revision}",
        f"submitted_at = {app.submitted_at}",
    ]
    for item in app.items:
        lines.append("")
        lines.append("[item]")
        lines.append(f"index = {item.index}")
        lines.append(f"description = {item.description}")
        if item.claimed_code is not None:
            lines.append(f"claimed_code = {item.claimed_code.digits}")
        lines.append(f"quantity = {_render_number(item.quantity)}")
        lines.append(f"value = {_render_number(item.declared_value)}")
        lines.append(f"currency = {item.currency}")
        for key in sorted(item.attributes):
            lines.append(f"attr.{key} = {_render_attr(item.attributes[key])}")
    return "\n".join(lines) + "\n"


def _render_number(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def _render_scalar(value: object) -> str:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return _render_number(float(value)) if isinstance(value, float) else str(value)
    text = str(value)
    needs_quotes = (
        not text
        or text != text.strip()
        or "," in text
        or _NUMBER.match(text)
        or text[0] in "'\""
    )
    return f"'{text}'" if needs_quotes else text


def _render_attr(value: AttrValue) -> str:
    if isinstance(value, tuple):
        return ", ".join(_render_scalar(v) for v in value)
    return _render_scalar(value)


# --- Validation --------------------------------------------------------------


def validate_items(app: Application) -> list[ValidationFinding]:
    """Content checks on parsed items; an empty list means clean.

    Pure and order-insensitive: findings depend only on each item.
    """
    findings: list[ValidationFinding] = []
    for item in app.items:
        if item.claimed_code is None:
            findings.append(ValidationFinding(item.index, "claimed_code", "missing claimed code"))
        if item.quantity <= 0:
            findings.append(ValidationFinding(item.index, "quantity", "non-positive quantity"))
        if item.declared_value <= 0:
            findings.append(ValidationFinding(item.index, "value", "non-positive value"))
    return findings


# --- Dict codecs (audit payloads, API bodies) ---------------------------------


def item_to_dict(item: LineItem) -> dict:
    return {
        "index": item.index,
        "description": item.description,
        "attributes": {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(item.attributes.items())},
        "claimed_code": item.claimed_code.digits if item.claimed_code else None,
        "quantity": item.quantity,
        "declared_value": item.declared_value,
        "currency": item.currency,
    }


def item_from_dict(data: dict) -> LineItem:
    return LineItem(
        index=int(data["index"]),
        description=data["description"],
        attributes={
            k: tuple(v) if isinstance(v, list) else v
            for k, v in (data.get("attributes") or {}).items()
        },
        claimed_code=HsCode(data["claimed_code"]) if data.get("claimed_code") else None,
        quantity=float(data.get("quantity", 0.0)),
        declared_value=float(data.get("declared_value", 0.0)),
        currency=data.get("currency", "MYR"),
    )


def app_to_dict(app: Application) -> dict:
    return {
        "app_id": app.app_id,
        "revision": app.revision,
        "applicant": app.applicant,
        "submitted_at": app.submitted_at,
        "items": [item_to_dict(item) for item in app.items],
    }


def app_from_dict(data: dict) -> Application:
    return Application(
        app_id=data["app_id"],
        revision=int(data["revision"]),
        applicant=data["applicant"],
        items=tuple(item_from_dict(d) for d in data["items"]),
        submitted_at=data["submitted_at"],
    )


def parse_item_block(text: str, index: int = 1) -> LineItem:
    """Parse a standalone item file (key = value lines, no header)."""
    block: list[tuple[str, str]] = [("index", str(index))]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line == "[item]":
            continue
        if "=" not in line:
            raise ApplicationParseError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        if key.strip() == "index":
            continue
        block.append((key.strip(), value.strip()))
    item, problems = _parse_item(block, index)
    if item is None or problems:
        raise ApplicationParseError("invalid item", problems=problems)
    return item
