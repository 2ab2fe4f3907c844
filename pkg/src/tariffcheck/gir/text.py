"""Deterministic text normalization for lexical matching."""

from __future__ import annotations

import re

_WORD = re.compile(r"[a-z0-9]+")


def singularize(token: str) -> str:
    """Strip common plural suffixes (toys -> toy, plastics -> plastic)."""
    if len(token) > 4 and token.endswith("ies"):
        return token[:-3] + "y"
    if len(token) > 3 and token.endswith("es") and token[-3] in "sxz":
        return token[:-2]
    if len(token) > 3 and token.endswith("s") and not token.endswith("ss"):
        return token[:-1]
    return token


def tokenize(text: str) -> tuple[str, ...]:
    """Lowercased, punctuation-stripped, de-pluralized unique tokens in
    first-occurrence order."""
    tokens = [singularize(t) for t in _WORD.findall(text.lower())]
    return tuple(dict.fromkeys(tokens))


def token_set(phrases: tuple[str, ...] | list[str]) -> frozenset[str]:
    out: set[str] = set()
    for phrase in phrases:
        out.update(tokenize(phrase))
    return frozenset(out)
