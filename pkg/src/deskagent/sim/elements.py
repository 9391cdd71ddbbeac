"""Interactive screen elements."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class ElementKind(str, Enum):
    BUTTON = "button"
    MENU_ITEM = "menu-item"
    TEXT_FIELD = "text-field"
    TAB = "tab"
    ICON = "icon"
    LIST_ITEM = "list-item"


@dataclass(frozen=True)
class BBox:
    x: int
    y: int
    w: int
    h: int

    def contains(self, px: int, py: int) -> bool:
        return self.x <= px < self.x + self.w and self.y <= py < self.y + self.h

    def center(self) -> tuple[int, int]:
        return self.x + self.w // 2, self.y + self.h // 2


@dataclass(frozen=True)
class ScreenElement:
    """One interactive element.

    ``effect`` names what a click does (see the action semantics doc);
    ``toggled`` and ``text`` carry the element's own interaction state, and
    ``container_id`` links list items to the element that holds them.
    """

    id: str
    label: str
    kind: ElementKind
    bbox: BBox
    enabled: bool = True
    app_id: str = ""
    effect: str | None = None
    toggled: bool = False
    text: str = ""
    container_id: str | None = None
