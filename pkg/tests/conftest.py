"""Shared builders for tests."""

from __future__ import annotations

import pytest

from deskagent.sim import (
    AppState,
    BBox,
    DesktopState,
    ElementKind,
    ScreenElement,
    Spreadsheet,
    TaskSpec,
    layout_document,
    render,
)


def button(el_id, label, x=100, y=100, w=200, h=40, app_id="app", **kw):
    return ScreenElement(
        id=el_id, label=label, kind=ElementKind.BUTTON, bbox=BBox(x, y, w, h),
        app_id=app_id, **kw,
    )


def text_field(el_id, label, x=100, y=100, w=300, h=36, app_id="app", **kw):
    return ScreenElement(
        id=el_id, label=label, kind=ElementKind.TEXT_FIELD, bbox=BBox(x, y, w, h),
        app_id=app_id, **kw,
    )


def editor_state(text="Hello", origin=(60, 120), elements=(), keybindings=None,
                 scroll_row=0, popups=()):
    app = AppState(
        id="editor",
        name="Editor",
        elements=tuple(elements),
        document=layout_document(text, origin=origin),
        keybindings=dict(keybindings or {}),
        scroll_row=scroll_row,
    )
    return DesktopState(apps=(app,), focused_app="editor", popups=tuple(popups))


def sheet_state(cells=None, active="Sheet1", origin=(100, 120), elements=(),
                col_widths=None, row_heights=None):
    sheet = Spreadsheet(
        sheets={active: dict(cells or {})},
        active=active,
        origin=origin,
        col_widths=dict(col_widths or {}),
        row_heights=dict(row_heights or {}),
    )
    app = AppState(id="calc", name="Calc", elements=tuple(elements), sheet=sheet)
    return DesktopState(apps=(app,), focused_app="calc")


def settings_state(elements, popups=(), keybindings=None, extra_apps=()):
    app = AppState(
        id="settings", name="Settings", elements=tuple(elements),
        keybindings=dict(keybindings or {}),
    )
    return DesktopState(
        apps=(app,) + tuple(extra_apps), focused_app="settings", popups=tuple(popups)
    )


def simple_task(state, evaluator="focused_app_is", params=None, task_id="t", **kw):
    return TaskSpec(
        id=task_id,
        instruction=kw.pop("instruction", "do the thing"),
        initial_state=state,
        evaluator=evaluator,
        evaluator_params=params or {"app": state.focused_app},
        **kw,
    )


@pytest.fixture
def hello_obs():
    return render(editor_state("Hello"))
