"""State transitions: one grounded action -> the successor desktop state.

Semantics are documented bit-exactly in docs/action_semantics.md.  apply is
pure and total on well-formed states: actions that hit nothing (a click on
an empty region, a hotkey with no registered binding) return the state
unchanged, and the only errors are OutOfBounds coordinates and unknown
app/sheet targets.

Clicks run the target element's ``effect``; hotkeys and hold-and-press run
the focused app's registered keybinding effects.  The effect vocabulary:

    element effects:   toggle | dismiss | open_app:<app> | set_flag:<k>=<v>
    keybinding effects: toggle:<element> | set_flag:<k>=<v> | open_app:<app>
                        | style_selection:<attr> | unstyle_selection:<attr>
                        | clear_selection | copy_selection | noop
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from ..actions import (
    Action,
    Click,
    Done,
    DragAndDrop,
    Fail,
    HighlightTextSpan,
    HoldAndPress,
    Hotkey,
    SaveToKnowledge,
    Scroll,
    SetCellValues,
    SwitchApplications,
    TypeText,
    Wait,
)
from ..errors import OutOfBounds, SuiteError
from ..grounding.a1 import CellAddress
from ..grounding.coords import PointCoordinate, SpanCoordinates
from .elements import ElementKind, ScreenElement
from .state import DesktopState
from .textdoc import LINE_H, TextDocument

SELECTED = "selected"

ELEMENT_EFFECTS = ("toggle", "dismiss", "open_app", "set_flag")
KEYBINDING_EFFECTS = (
    "toggle",
    "set_flag",
    "open_app",
    "style_selection",
    "unstyle_selection",
    "clear_selection",
    "copy_selection",
    "noop",
)


@dataclass(frozen=True)
class GroundedAction:
    """An action whose targets have been resolved by a grounding expert."""

    action: Action
    point: PointCoordinate | None = None
    point2: PointCoordinate | None = None
    span: SpanCoordinates | None = None
    writes: tuple[tuple[CellAddress, Any], ...] | None = None


def apply(state: DesktopState, grounded: GroundedAction) -> DesktopState:
    action = grounded.action
    _check_in_bounds(state, grounded)
    if isinstance(action, Click):
        return _apply_click(state, grounded.point)
    if isinstance(action, TypeText):
        return _apply_type(state, grounded.point, action)
    if isinstance(action, Scroll):
        return _apply_scroll(state, action.clicks)
    if isinstance(action, Hotkey):
        return _apply_combo(state, _combo(action.keys))
    if isinstance(action, HoldAndPress):
        return _apply_combo(state, _combo(action.hold_keys + action.press_keys))
    if isinstance(action, DragAndDrop):
        return _apply_drag(state, grounded.point, grounded.point2)
    if isinstance(action, SwitchApplications):
        target = state.app(action.app_name)
        return replace(state, focused_app=target.id)
    if isinstance(action, HighlightTextSpan):
        return _apply_highlight(state, grounded.span, grounded.point)
    if isinstance(action, SetCellValues):
        return _apply_cell_writes(state, action, grounded.writes)
    if isinstance(action, (Wait, Done, Fail, SaveToKnowledge)):
        return state
    raise TypeError(f"unhandled action {action!r}")


def _check_in_bounds(state: DesktopState, grounded: GroundedAction) -> None:
    w, h = state.screen_size
    points = [grounded.point, grounded.point2]
    if grounded.span is not None:
        points += [grounded.span.start, grounded.span.end]
    for p in points:
        if p is not None and not (0 <= p.x < w and 0 <= p.y < h):
            raise OutOfBounds(f"({p.x}, {p.y}) outside {w}x{h} screen")


def _combo(keys: tuple[str, ...]) -> str:
    return "+".join(k.lower() for k in keys)


def _element_under(state: DesktopState, point: PointCoordinate) -> ScreenElement | None:
    """Topmost element under the point: popups overlay app elements, and
    later elements overlay earlier ones."""
    app = state.focused()
    hit = None
    for el in app.elements + state.popups:
        if el.bbox.contains(point.x, point.y):
            hit = el
    return hit


def _is_popup(state: DesktopState, el: ScreenElement) -> bool:
    return any(p.id == el.id for p in state.popups)


def _apply_click(state: DesktopState, point: PointCoordinate | None) -> DesktopState:
    if point is None:
        return state
    el = _element_under(state, point)
    if el is None or not el.enabled or el.effect is None:
        return state
    effect, _, arg = el.effect.partition(":")
    if effect == "toggle":
        return _swap_element(state, replace(el, toggled=not el.toggled))
    if effect == "dismiss":
        if _is_popup(state, el):
            return replace(state, popups=tuple(p for p in state.popups if p.id != el.id))
        app = state.focused()
        return state.replace_app(
            replace(app, elements=tuple(e for e in app.elements if e.id != el.id))
        )
    if effect == "open_app":
        target = state.app(arg)
        return replace(state, focused_app=target.id)
    if effect == "set_flag":
        key, _, value = arg.partition("=")
        return _set_flag(state, key, value)
    raise SuiteError(f"unknown element effect {el.effect!r} on {el.id!r}")


def _swap_element(state: DesktopState, new: ScreenElement) -> DesktopState:
    if _is_popup(state, new):
        popups = tuple(new if p.id == new.id else p for p in state.popups)
        return replace(state, popups=popups)
    return state.replace_app(state.focused().replace_element(new))


def _set_flag(state: DesktopState, key: str, value: str) -> DesktopState:
    app = state.focused()
    flags = dict(app.flags)
    flags[key] = value
    return state.replace_app(replace(app, flags=flags))


def _apply_type(
    state: DesktopState, point: PointCoordinate | None, action: TypeText
) -> DesktopState:
    if point is None:
        return state
    el = _element_under(state, point)
    if el is None or el.kind is not ElementKind.TEXT_FIELD or not el.enabled:
        return state
    text = action.text if action.overwrite else el.text + action.text
    state = _swap_element(state, replace(el, text=text))
    if action.enter:
        state = _apply_combo(state, "enter")
    return state


def _apply_scroll(state: DesktopState, clicks: int) -> DesktopState:
    app = state.focused()
    row = max(0, app.scroll_row + clicks)
    if row == app.scroll_row:
        return state
    return state.replace_app(replace(app, scroll_row=row))


def _apply_combo(state: DesktopState, combo: str) -> DesktopState:
    app = state.focused()
    effect = app.keybindings.get(combo)
    if effect is None:
        return state
    return _run_keybinding_effect(state, effect)


def _run_keybinding_effect(state: DesktopState, effect: str) -> DesktopState:
    app = state.focused()
    kind, _, arg = effect.partition(":")
    if kind == "noop":
        return state
    if kind == "toggle":
        el = app.element(arg)
        if el is None:
            return state
        return state.replace_app(app.replace_element(replace(el, toggled=not el.toggled)))
    if kind == "set_flag":
        key, _, value = arg.partition("=")
        return _set_flag(state, key, value)
    if kind == "open_app":
        return replace(state, focused_app=state.app(arg).id)
    if kind in ("style_selection", "unstyle_selection"):
        if app.document is None:
            return state
        add = kind == "style_selection"
        restyled = {}
        for i, tok in enumerate(app.document.tokens):
            if SELECTED not in tok.styles:
                continue
            styles = set(tok.styles)
            if add:
                styles.add(arg)
            else:
                styles.discard(arg)
            restyled[i] = frozenset(styles)
        return state.replace_app(replace(app, document=app.document.restyle(restyled)))
    if kind == "clear_selection":
        if app.document is None:
            return state
        restyled = {
            i: frozenset(t.styles - {SELECTED})
            for i, t in enumerate(app.document.tokens)
            if SELECTED in t.styles
        }
        return state.replace_app(replace(app, document=app.document.restyle(restyled)))
    if kind == "copy_selection":
        if app.document is None:
            return state
        copied = "".join(t.text for t in app.document.tokens if SELECTED in t.styles)
        return replace(state, clipboard=copied)
    raise SuiteError(f"unknown keybinding effect {effect!r}")


def _apply_drag(
    state: DesktopState, p1: PointCoordinate | None, p2: PointCoordinate | None
) -> DesktopState:
    if p1 is None or p2 is None:
        return state
    item = _element_under(state, p1)
    if item is None or item.kind is not ElementKind.LIST_ITEM or not item.enabled:
        return state
    target = _element_under(state, p2)
    if target is None or target.id == item.id:
        return state
    app = state.focused()
    siblings = sum(
        1 for e in app.elements if e.kind is ElementKind.LIST_ITEM
        and e.container_id == target.id and e.id != item.id
    )
    w, h = state.screen_size
    nx = min(target.bbox.x + 4, w - item.bbox.w)
    ny = min(target.bbox.y + 4 + 24 * siblings, h - item.bbox.h)
    moved = replace(
        item,
        container_id=target.id,
        bbox=replace(item.bbox, x=max(0, nx), y=max(0, ny)),
    )
    return _swap_element(state, moved)


def _doc_chars_with_index(doc: TextDocument):
    for ti, tok in enumerate(doc.tokens):
        for c in tok.chars:
            yield ti, c


def _char_token_at(doc: TextDocument, x: int, y: int) -> int | None:
    """Token index of the character box containing (x, y) in document space."""
    for ti, c in _doc_chars_with_index(doc):
        if c.w > 0 and c.x <= x < c.x + c.w and c.y <= y < c.y + c.h:
            return ti
    return None


def _apply_highlight(
    state: DesktopState, span: SpanCoordinates | None, point: PointCoordinate | None
) -> DesktopState:
    app = state.focused()
    if app.document is None:
        return state
    dy = app.scroll_row * LINE_H
    doc = app.document
    if span is not None:
        start_tok = _char_token_at(doc, span.start.x, span.start.y + dy)
        end_tok = _char_token_at(doc, span.end.x, span.end.y + dy)
        if start_tok is None or end_tok is None:
            return state
        low = _key_of_corner(doc, span.start.x, span.start.y + dy)
        high = _key_of_corner(doc, span.end.x, span.end.y + dy)
        selected = set()
        for ti, c in _doc_chars_with_index(doc):
            if c.w > 0 and low <= (c.y, c.x) <= high:
                selected.add(ti)
    elif point is not None:
        tok = _char_token_at(doc, point.x, point.y + dy)
        if tok is None:
            return state
        selected = {tok}
    else:
        return state
    restyled = {}
    for i, tok in enumerate(doc.tokens):
        want = i in selected
        have = SELECTED in tok.styles
        if want and not have:
            restyled[i] = frozenset(tok.styles | {SELECTED})
        elif have and not want:
            restyled[i] = frozenset(tok.styles - {SELECTED})
    return state.replace_app(replace(app, document=doc.restyle(restyled)))


def _key_of_corner(doc: TextDocument, x: int, y: int) -> tuple[int, int]:
    """Reading-order key (top, left) of the char box containing (x, y)."""
    for _ti, c in _doc_chars_with_index(doc):
        if c.w > 0 and c.x <= x < c.x + c.w and c.y <= y < c.y + c.h:
            return (c.y, c.x)
    return (y, x)


def _apply_cell_writes(
    state: DesktopState,
    action: SetCellValues,
    writes: tuple[tuple[CellAddress, Any], ...] | None,
) -> DesktopState:
    if writes is None:
        # Degraded (mixture-disabled) grounding produced a bare point; a
        # poke at the grid writes nothing.
        return state
    app = state.app(action.app_name)
    if app.sheet is None:
        from ..errors import UnknownSheet

        raise UnknownSheet(f"app {action.app_name!r} has no spreadsheet")
    return state.replace_app(
        replace(app, sheet=app.sheet.with_writes(action.sheet_name, writes))
    )
