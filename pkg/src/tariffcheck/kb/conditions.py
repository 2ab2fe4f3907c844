"""Condition DSL used by legal notes and exemption entries.

Grammar (EBNF):

    cond := or
    or   := and ("or" and)*
    and  := not ("and" not)* | "all(" cond ("," cond)* ")" | "any(" cond ("," cond)* ")"
    not  := "not" atom | atom
    atom := ident op literal
          | "any_side_" unit op number
          | "category contains" string
          | "(" cond ")"

Operators: ``=  !=  <  <=  >  >=  contains`` (unicode forms ``≠ ≤ ≥``
accepted on input, normalized to ASCII). String literals are quoted with
``'`` or ``"``; attribute paths are lowercase dotted identifiers.

Evaluation is total and three-valued internally: a leaf that touches a
missing attribute yields "unknown", which propagates and collapses to
``False`` at the root with ``evidence_incomplete`` set. String comparison
is case-insensitive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

Literal = Union[str, int, float]

COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=", "contains")
_OP_ALIASES = {"≠": "!=", "≤": "<=", "≥": ">=", "==": "="}
_ORDERED_OPS = ("<", "<=", ">", ">=")


class ConditionSyntaxError(ValueError):
    """Condition text does not conform to the DSL grammar."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Compare:
    attr_path: str
    op: str
    literal: Literal


@dataclass(frozen=True)
class AnySide:
    """True when any dimensional attribute ``*_<unit>`` satisfies the bound."""

    op: str
    threshold: Union[int, float]
    unit: str


@dataclass(frozen=True)
class HasCategory:
    category: str


@dataclass(frozen=True)
class AllOf:
    children: tuple["NoteCondition", ...]


@dataclass(frozen=True)
class AnyOf:
    children: tuple["NoteCondition", ...]


@dataclass(frozen=True)
class Not:
    child: "NoteCondition"


NoteCondition = Union[Compare, AnySide, HasCategory, AllOf, AnyOf, Not]
_LEAF_TYPES = (Compare, AnySide, HasCategory)


# --- Lexer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>-?[0-9]+(\.[0-9]+)?)
  | (?P<string>'[^']*'|"[^"]*")
  | (?P<op><=|>=|!=|≤|≥|≠|=|<|>)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z0-9_]+)*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ConditionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup or ""
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


# --- Parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: Sequence[_Token]) -> None:
        self.tokens = tokens
        self.i = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ConditionSyntaxError(f"expected {what}, got {tok.text or 'end of input'!r}", tok.offset)
        return tok

    def parse_cond(self) -> NoteCondition:
        node = self.parse_and()
        alts = [node]
        while self.peek().kind == "ident" and self.peek().text == "or":
            self.next()
            alts.append(self.parse_and())
        if len(alts) == 1:
            return node
        return AnyOf(tuple(alts))

    def parse_and(self) -> NoteCondition:
        head = self.peek()
        if head.kind == "ident" and head.text in ("all", "any") and self.peek(1).kind == "lparen":
            self.next()
            self.next()
            children = [self.parse_cond()]
            while self.peek().kind == "comma":
                self.next()
                children.append(self.parse_cond())
            self.expect("rparen", "')'")
            return AllOf(tuple(children)) if head.text == "all" else AnyOf(tuple(children))
        node = self.parse_not()
        parts = [node]
        while self.peek().kind == "ident" and self.peek().text == "and":
            self.next()
            parts.append(self.parse_not())
        if len(parts) == 1:
            return node
        return AllOf(tuple(parts))

    def parse_not(self) -> NoteCondition:
        if self.peek().kind == "ident" and self.peek().text == "not":
            self.next()
            return Not(self.parse_atom())
        return self.parse_atom()

    def parse_atom(self) -> NoteCondition:
        tok = self.peek()
        if tok.kind == "lparen":
            self.next()
            inner = self.parse_cond()
            self.expect("rparen", "')'")
            return inner
        if tok.kind != "ident":
            raise ConditionSyntaxError(
                f"expected attribute, 'category', 'not' or '(', got {tok.text or 'end of input'!r}",
                tok.offset,
            )
        ident = self.next()
        # "category contains '<tag>'" is the HasCategory form; with a
        # non-string literal it degrades to a generic Compare.
        if (
            ident.text == "category"
            and self.peek().kind == "ident"
            and self.peek().text == "contains"
            and self.peek(1).kind == "string"
        ):
            self.next()
            lit = self.next()
            return HasCategory(lit.text[1:-1])
        op = self._parse_op()
        if ident.text.startswith("any_side_"):
            unit = ident.text[len("any_side_"):]
            if not unit:
                raise ConditionSyntaxError("any_side_ requires a unit suffix", ident.offset)
            num = self.next()
            if num.kind != "number":
                raise ConditionSyntaxError(f"bad number literal {num.text!r}", num.offset)
            return AnySide(op, _to_number(num.text), unit)
        lit_tok = self.next()
        if lit_tok.kind == "number":
            return Compare(ident.text.lower(), op, _to_number(lit_tok.text))
        if lit_tok.kind == "string":
            return Compare(ident.text.lower(), op, lit_tok.text[1:-1])
        raise ConditionSyntaxError(
            f"expected literal after operator, got {lit_tok.text or 'end of input'!r}", lit_tok.offset
        )

    def _parse_op(self) -> str:
        tok = self.next()
        if tok.kind == "op":
            return _OP_ALIASES.get(tok.text, tok.text)
        if tok.kind == "ident" and tok.text == "contains":
            return "contains"
        raise ConditionSyntaxError(f"unknown operator {tok.text or 'end of input'!r}", tok.offset)


def parse_condition(text: str) -> NoteCondition:
    """Parse DSL source into an AST. Raises ConditionSyntaxError with offset."""
    if not text or not text.strip():
        raise ConditionSyntaxError("empty condition", 0)
    parser = _Parser(_lex(text))
    node = parser.parse_cond()
    trailing = parser.peek()
    if trailing.kind != "eof":
        raise ConditionSyntaxError(f"unexpected trailing input {trailing.text!r}", trailing.offset)
    return node


def _to_number(text: str) -> Union[int, float]:
    return float(text) if "." in text else int(text)


# --- Rendering -------------------------------------------------------------


def render_condition(cond: NoteCondition) -> str:
    """Canonical source form; ``parse(render(ast))`` equals ``ast``."""
    if isinstance(cond, Compare):
        return f"{cond.attr_path} {cond.op} {_render_literal(cond.literal)}"
    if isinstance(cond, AnySide):
        return f"any_side_{cond.unit} {cond.op} {_render_number(cond.threshold)}"
    if isinstance(cond, HasCategory):
        return f"category contains '{cond.category}'"
    if isinstance(cond, AllOf):
        return "all(" + ", ".join(render_condition(c) for c in cond.children) + ")"
    if isinstance(cond, AnyOf):
        return "any(" + ", ".join(render_condition(c) for c in cond.children) + ")"
    if isinstance(cond, Not):
        if isinstance(cond.child, _LEAF_TYPES):
            return f"not {render_condition(cond.child)}"
        return f"not ({render_condition(cond.child)})"
    raise TypeError(f"not a condition node: {cond!r}")


def _render_literal(lit: Literal) -> str:
    if isinstance(lit, bool):  # guard: bool is an int subclass
        raise TypeError("boolean literals are not part of the DSL")
    if isinstance(lit, (int, float)):
        return _render_number(lit)
    return f"'{lit}'"


def _render_number(n: Union[int, float]) -> str:
    return repr(n)


# --- Evaluation ------------------------------------------------------------

AttrValue = Union[str, int, float, Sequence[object]]
AttrMap = Mapping[str, AttrValue]


@dataclass(frozen=True)
class EvalResult:
    """Root verdict plus evidence bookkeeping.

    ``evidence_incomplete`` is set iff any leaf touched a missing attribute;
    ``matched_clauses`` lists the rendered leaves that evaluated true.
    """

    value: bool
    evidence_incomplete: bool
    matched_clauses: tuple[str, ...] = ()
    missing_attrs: tuple[str, ...] = ()


@dataclass
class _EvalState:
    matched: list[str] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)


def eval_condition(cond: NoteCondition, attrs: AttrMap) -> EvalResult:
    """Evaluate against an attribute map; total over any input."""
    state = _EvalState()
    verdict = _eval(cond, attrs, state)
    missing = tuple(dict.fromkeys(state.missing))
    return EvalResult(
        value=bool(verdict),
        evidence_incomplete=bool(missing),
        matched_clauses=tuple(state.matched),
        missing_attrs=missing,
    )


def _eval(cond: NoteCondition, attrs: AttrMap, state: _EvalState) -> bool | None:
    if isinstance(cond, Compare):
        if cond.attr_path not in attrs:
            state.missing.append(cond.attr_path)
            return None
        outcome = _compare(attrs[cond.attr_path], cond.op, cond.literal)
        if outcome:
            state.matched.append(render_condition(cond))
        return outcome
    if isinstance(cond, AnySide):
        sides = _dimensional_values(attrs, cond.unit)
        if not sides:
            state.missing.append(f"any_side_{cond.unit}")
            return None
        outcome = any(_numeric_compare(v, cond.op, cond.threshold) for v in sides)
        if outcome:
            state.matched.append(render_condition(cond))
        return outcome
    if isinstance(cond, HasCategory):
        if "category" not in attrs:
            state.missing.append("category")
            return None
        outcome = cond.category.lower() in _category_tags(attrs["category"])
        if outcome:
            state.matched.append(render_condition(cond))
        return outcome
    if isinstance(cond, AllOf):
        # No short-circuit: every leaf is touched so missing evidence is recorded.
        results = [_eval(c, attrs, state) for c in cond.children]
        if any(r is False for r in results):
            return False
        if any(r is None for r in results):
            return None
        return True
    if isinstance(cond, AnyOf):
        results = [_eval(c, attrs, state) for c in cond.children]
        if any(r is True for r in results):
            return True
        if any(r is None for r in results):
            return None
        return False
    if isinstance(cond, Not):
        inner = _eval(cond.child, attrs, state)
        return None if inner is None else not inner
    raise TypeError(f"not a condition node: {cond!r}")


def _dimensional_values(attrs: AttrMap, unit: str) -> list[float]:
    suffix = f"_{unit}"
    values: list[float] = []
    for key in sorted(attrs):
        if key.split(".")[-1].endswith(suffix):
            num = _as_number(attrs[key])
            if num is not None:
                values.append(num)
    return values


def _category_tags(value: AttrValue) -> set[str]:
    if isinstance(value, (list, tuple)):
        return {str(v).strip().lower() for v in value}
    return {t for t in re.split(r"[,;\s]+", str(value).strip().lower()) if t}


def _as_number(value: object) -> float | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return None
    return None


def _numeric_compare(value: float, op: str, threshold: Union[int, float]) -> bool:
    t = float(threshold)
    if op == "=":
        return value == t
    if op == "!=":
        return value != t
    if op == "<":
        return value < t
    if op == "<=":
        return value <= t
    if op == ">":
        return value > t
    if op == ">=":
        return value >= t
    return False  # 'contains' over numbers never matches


def _compare(value: AttrValue, op: str, literal: Literal) -> bool:
    if op == "contains":
        if isinstance(value, (list, tuple)):
            return any(str(v).strip().lower() == str(literal).strip().lower() for v in value)
        return str(literal).lower() in str(value).lower()
    v_num, l_num = _as_number(value), _as_number(literal)
    if op in _ORDERED_OPS:
        # Ordering over non-numeric values is defined false (total, documented).
        if v_num is None or l_num is None:
            return False
        return _numeric_compare(v_num, op, l_num)
    if v_num is not None and l_num is not None:
        equal = v_num == l_num
    elif isinstance(value, (list, tuple)):
        equal = any(str(v).strip().lower() == str(literal).strip().lower() for v in value)
    else:
        equal = str(value).strip().lower() == str(literal).strip().lower()
    return equal if op == "=" else not equal
