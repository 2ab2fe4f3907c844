"""Harmonized System code values.

Codes nest chapter (2 digits) -> heading (4) -> subheading (6) -> national
suffix (8 or 10 digits total). Input may carry dots or spaces as visual
separators; the normalized form keeps digits only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_DIGITS = re.compile(r"^[0-9]+$")
VALID_LENGTHS = (4, 6, 8, 10)


class HsCodeError(ValueError):
    """Input cannot be normalized into a valid HS code."""


@dataclass(frozen=True, order=True)
class HsCode:
    """Normalized HS code; ``digits`` is 4, 6, 8 or 10 decimal digits."""

    digits: str

    def __post_init__(self) -> None:
        if not _DIGITS.match(self.digits):
            raise HsCodeError(f"HS code contains non-digit characters: {self.digits!r}")
        if len(self.digits) not in VALID_LENGTHS:
            raise HsCodeError(
                f"HS code length {len(self.digits)} not in {set(VALID_LENGTHS)}: {self.digits!r}"
            )

    @classmethod
    def parse(cls, text: str) -> "HsCode":
        """Strip dot/space separators and validate the digit grammar."""
        if not text or not text.strip():
            raise HsCodeError("empty HS code")
        return cls(re.sub(r"[.\s]", "", text.strip()))

    @property
    def chapter(self) -> str:
        return self.digits[:2]

    @property
    def heading(self) -> str:
        return self.digits[:4]

    @property
    def subheading(self) -> str | None:
        return self.digits[:6] if len(self.digits) >= 6 else None

    @property
    def national_suffix(self) -> str | None:
        return self.digits[6:] if len(self.digits) > 6 else None

    def display(self) -> str:
        """Dotted presentation form, e.g. ``3926.90.0000`` or ``62.14``."""
        d = self.digits
        if len(d) == 4:
            return f"{d[:2]}.{d[2:]}"
        parts = [d[:4], d[4:6]]
        if len(d) > 6:
            parts.append(d[6:])
        return ".".join(parts)

    def is_prefix_of(self, other: "HsCode") -> bool:
        return other.digits.startswith(self.digits)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.digits
