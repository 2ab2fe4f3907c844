"""Application and line-item records."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Union

from tariffcheck.kb.hscode import HsCode

AttrValue = Union[str, int, float, tuple]


@dataclass(frozen=True)
class LineItem:
    """One application row.

    Attributes are free-form typed values keyed by lowercase dotted names
    (``material``, ``width_cm``, ``packaging.reusable`` ...) so legal-note
    conditions can reference whatever the notes need.
    """

    index: int
    description: str
    attributes: Mapping[str, AttrValue] = field(default_factory=dict)
    claimed_code: HsCode | None = None
    quantity: float = 0.0
    declared_value: float = 0.0
    currency: str = "MYR"

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"item index must be >= 1, got {self.index}")
        if not self.description.strip():
            raise ValueError(f"item {self.index}: description is empty")
        object.__setattr__(self, "attributes", MappingProxyType(dict(self.attributes)))


@dataclass(frozen=True)
class Application:
    """A submitted application revision; indices are unique and contiguous."""

    app_id: str
    revision: int
    applicant: str
    items: tuple[LineItem, ...]
    submitted_at: str

    def __post_init__(self) -> None:
        if self.revision < 1:
            raise ValueError(f"revision must be >= 1, got {self.revision}")
        indices = [item.index for item in self.items]
        if indices != list(range(1, len(indices) + 1)):
            raise ValueError(f"item indices must be contiguous from 1, got {indices}")

    def item(self, index: int) -> LineItem:
        return self.items[index - 1]
