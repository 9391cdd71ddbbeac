"""Desktop state: applications, focus, clipboard, popup distractors.

States are immutable snapshots; every transition builds a new value, which
makes them safe to hand across threads and lets tests compare states
structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..errors import SuiteError, UnknownApp
from .elements import ScreenElement
from .sheet import Spreadsheet
from .textdoc import TextDocument

DEFAULT_SCREEN = (1920, 1080)


@dataclass(frozen=True)
class AppState:
    id: str
    name: str = ""
    elements: tuple[ScreenElement, ...] = ()
    document: TextDocument | None = None
    sheet: Spreadsheet | None = None
    keybindings: dict[str, str] = field(default_factory=dict)
    scroll_row: int = 0
    flags: dict[str, str] = field(default_factory=dict)

    def element(self, element_id: str) -> ScreenElement | None:
        for el in self.elements:
            if el.id == element_id:
                return el
        return None

    def replace_element(self, new: ScreenElement) -> "AppState":
        elements = tuple(new if el.id == new.id else el for el in self.elements)
        return replace(self, elements=elements)


@dataclass(frozen=True)
class DesktopState:
    apps: tuple[AppState, ...]
    focused_app: str
    clipboard: str = ""
    popups: tuple[ScreenElement, ...] = ()
    screen_size: tuple[int, int] = DEFAULT_SCREEN

    def app(self, ident: str) -> AppState:
        """Look an app up by id, falling back to display name."""
        for a in self.apps:
            if a.id == ident:
                return a
        for a in self.apps:
            if a.name == ident:
                return a
        raise UnknownApp(f"no application {ident!r}")

    def focused(self) -> AppState:
        return self.app(self.focused_app)

    def replace_app(self, new: AppState) -> "DesktopState":
        apps = tuple(new if a.id == new.id else a for a in self.apps)
        return replace(self, apps=apps)

    def validate(self) -> None:
        """Check structural invariants; raises SuiteError on violation."""
        w, h = self.screen_size
        if not any(a.id == self.focused_app for a in self.apps):
            raise SuiteError(f"focused app {self.focused_app!r} does not exist")
        seen_app_ids = set()
        for a in self.apps:
            if a.id in seen_app_ids:
                raise SuiteError(f"duplicate app id {a.id!r}")
            seen_app_ids.add(a.id)
            ids = set()
            for el in a.elements:
                if el.id in ids:
                    raise SuiteError(f"duplicate element id {el.id!r} in app {a.id!r}")
                ids.add(el.id)
                _check_bbox(el, w, h)
        popup_ids = set()
        all_element_ids = {el.id for a in self.apps for el in a.elements}
        for el in self.popups:
            if el.id in popup_ids or el.id in all_element_ids:
                raise SuiteError(f"popup id {el.id!r} collides with another element")
            popup_ids.add(el.id)
            _check_bbox(el, w, h)


def _check_bbox(el: ScreenElement, w: int, h: int) -> None:
    b = el.bbox
    if b.w <= 0 or b.h <= 0 or b.x < 0 or b.y < 0 or b.x + b.w > w or b.y + b.h > h:
        raise SuiteError(
            f"element {el.id!r} bbox ({b.x},{b.y},{b.w},{b.h}) not within {w}x{h} screen"
        )
