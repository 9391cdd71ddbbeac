"""Rendering: desktop state -> what the agent sees.

The observation is a screenshot proxy: the focused app's element registry
plus a character grid of all visible text (document and spreadsheet cells),
with popup overlays on top.  Background app internals never leak into the
observation; only the app names do, the way a taskbar would show them.
Rendering is deterministic: equal states produce equal observations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .elements import ScreenElement
from .sheet import Spreadsheet
from .state import DesktopState
from .textdoc import CHAR_W, LINE_H, CharBox, TextDocument


@dataclass(frozen=True)
class Observation:
    elements: tuple[ScreenElement, ...]
    char_grid: tuple[CharBox, ...]
    step_index: int
    screen_size: tuple[int, int]
    focused_app: str
    app_names: tuple[str, ...]


def render(state: DesktopState, step_index: int = 0) -> Observation:
    app = state.focused()
    chars: list[CharBox] = []
    if app.document is not None:
        chars.extend(_visible_document_chars(app.document, app.scroll_row, state.screen_size))
    if app.sheet is not None:
        chars.extend(_visible_sheet_chars(app.sheet, app.scroll_row, state.screen_size))
    return Observation(
        elements=app.elements + state.popups,
        char_grid=tuple(chars),
        step_index=step_index,
        screen_size=state.screen_size,
        focused_app=app.id,
        app_names=tuple(a.name or a.id for a in state.apps),
    )


def _visible_document_chars(
    doc: TextDocument, scroll_row: int, screen: tuple[int, int]
) -> list[CharBox]:
    w, h = screen
    dy = scroll_row * LINE_H
    top = doc.origin[1]
    out = []
    for token in doc.tokens:
        for c in token.chars:
            y = c.y - dy
            if y < top or y + c.h > h or c.x < 0 or c.x + c.w > w:
                continue
            out.append(CharBox(c.ch, c.x, y, c.w, c.h))
    return out


def _visible_sheet_chars(
    sheet: Spreadsheet, scroll_row: int, screen: tuple[int, int]
) -> list[CharBox]:
    w, h = screen
    out = []
    cells = sheet.sheets.get(sheet.active, {})
    for (row, col), value in sorted(cells.items()):
        if row < scroll_row:
            continue
        cy = sheet.row_y(row, first_visible_row=scroll_row)
        cx = sheet.col_x(col) + 2
        cy += 2
        for i, ch in enumerate(str(value)):
            x = cx + i * CHAR_W
            if x < 0 or x + CHAR_W > w or cy < 0 or cy + LINE_H > h:
                continue
            out.append(CharBox(ch, x, cy, CHAR_W, LINE_H))
    return out


def extract_text(char_grid) -> str:
    """Concatenate grid characters in reading order."""
    return "".join(c.ch for c in sorted(char_grid, key=lambda c: (c.y, c.x)))


def digest(obs: Observation, limit: int = 4000) -> str:
    """Serialize an observation for a model prompt.

    Elements come first, in reading order, then the extracted text; the
    whole digest is truncated at ``limit`` characters.
    """
    lines = [
        f"focused app: {obs.focused_app}",
        f"open apps: {', '.join(obs.app_names)}",
        "elements:",
    ]
    for el in sorted(obs.elements, key=lambda e: (e.bbox.y, e.bbox.x, e.id)):
        marks = ""
        if el.toggled:
            marks += " [on]"
        if not el.enabled:
            marks += " [disabled]"
        if el.text:
            marks += f' text="{el.text}"'
        lines.append(
            f'- [{el.kind.value}] "{el.label}" at '
            f"({el.bbox.x},{el.bbox.y},{el.bbox.w},{el.bbox.h}){marks}"
        )
    text = extract_text(obs.char_grid)
    if text:
        lines.append("visible text:")
        lines.append(text)
    out = "\n".join(lines)
    if len(out) > limit:
        out = out[: limit - 1] + "…"
    return out
