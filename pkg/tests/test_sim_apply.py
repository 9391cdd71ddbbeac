"""Transition semantics, action by action."""

from __future__ import annotations

import pytest

from deskagent.actions import (
    Click,
    DragAndDrop,
    HighlightTextSpan,
    HoldAndPress,
    Hotkey,
    Scroll,
    SwitchApplications,
    TypeText,
    Wait,
)
from deskagent.errors import OutOfBounds, UnknownApp
from deskagent.grounding import PointCoordinate, ground_textual
from deskagent.sim import (
    SELECTED,
    AppState,
    BBox,
    DesktopState,
    ElementKind,
    GroundedAction,
    ScreenElement,
    apply,
    render,
)

from conftest import button, editor_state, settings_state, text_field


def center(el):
    return PointCoordinate(*el.bbox.center())


class TestClick:
    def test_toggle_effect_flips(self):
        el = button("dim", "Dim Screen", effect="toggle", app_id="settings")
        state = settings_state([el])
        new = apply(state, GroundedAction(Click("Dim Screen"), point=center(el)))
        assert new.app("settings").element("dim").toggled is True

    def test_click_empty_region_unchanged(self):
        state = settings_state([button("a", "A", x=100, y=100)])
        new = apply(state, GroundedAction(Click("nothing"), point=PointCoordinate(1500, 900)))
        assert new == state

    def test_disabled_element_ignores_click(self):
        el = button("d", "Danger", effect="toggle", enabled=False, app_id="settings")
        state = settings_state([el])
        new = apply(state, GroundedAction(Click("Danger"), point=center(el)))
        assert new == state

    def test_popup_on_top_and_dismissable(self):
        covered = button("under", "Under", x=100, y=100, effect="toggle", app_id="settings")
        popup = button("pop", "Notice", x=90, y=90, w=300, h=80, app_id="popup", effect="dismiss")
        state = settings_state([covered], popups=[popup])
        new = apply(state, GroundedAction(Click("Under"), point=center(covered)))
        assert new.popups == ()  # the popup swallowed the click
        assert new.app("settings").element("under").toggled is False

    def test_out_of_bounds_click(self):
        state = settings_state([button("a", "A")])
        with pytest.raises(OutOfBounds):
            apply(state, GroundedAction(Click("A"), point=PointCoordinate(5000, 10)))

    def test_open_app_effect(self):
        other = AppState(id="music", name="Music")
        el = button("launch", "Music", effect="open_app:music", app_id="settings")
        state = settings_state([el], extra_apps=[other])
        new = apply(state, GroundedAction(Click("Music"), point=center(el)))
        assert new.focused_app == "music"


class TestType:
    def test_append_semantics(self):
        field = text_field("f", "Name", text="x", app_id="settings")
        state = settings_state([field])
        action = TypeText("Name", "abc", overwrite=False)
        new = apply(state, GroundedAction(action, point=center(field)))
        assert new.app("settings").element("f").text == "xabc"

    def test_overwrite_semantics(self):
        field = text_field("f", "Name", text="old", app_id="settings")
        state = settings_state([field])
        new = apply(
            state, GroundedAction(TypeText("Name", "new", overwrite=True), point=center(field))
        )
        assert new.app("settings").element("f").text == "new"

    def test_enter_triggers_keybinding(self):
        field = text_field("f", "Search", app_id="settings")
        state = settings_state([field], keybindings={"enter": "set_flag:searched=yes"})
        new = apply(
            state, GroundedAction(TypeText("Search", "dim", enter=True), point=center(field))
        )
        assert new.app("settings").flags["searched"] == "yes"

    def test_type_on_button_is_noop(self):
        el = button("b", "Button", app_id="settings")
        state = settings_state([el])
        new = apply(state, GroundedAction(TypeText("Button", "hi"), point=center(el)))
        assert new == state


class TestKeyboard:
    def test_hotkey_runs_registered_effect(self):
        el = button("dim", "Dim", effect="toggle", app_id="settings")
        state = settings_state([el], keybindings={"ctrl+d": "toggle:dim"})
        new = apply(state, GroundedAction(Hotkey(("Ctrl", "D"))))
        assert new.app("settings").element("dim").toggled

    def test_unregistered_hotkey_noop(self):
        state = settings_state([button("a", "A")])
        assert apply(state, GroundedAction(Hotkey(("ctrl", "q")))) == state

    def test_hold_and_press_combo(self):
        state = settings_state([], keybindings={"alt+tab": "set_flag:switched=1"})
        new = apply(state, GroundedAction(HoldAndPress(press_keys=("tab",), hold_keys=("alt",))))
        assert new.app("settings").flags["switched"] == "1"


class TestScrollAndSwitch:
    def test_scroll_shifts_window(self):
        state = editor_state("a\nb\nc\nd")
        el_point = PointCoordinate(100, 130)
        new = apply(state, GroundedAction(Scroll("doc", 2), point=el_point))
        assert new.app("editor").scroll_row == 2

    def test_scroll_clamped_at_zero(self):
        state = editor_state("a\nb")
        new = apply(state, GroundedAction(Scroll("doc", -5), point=PointCoordinate(100, 130)))
        assert new.app("editor").scroll_row == 0

    def test_switch_applications(self):
        state = settings_state([], extra_apps=[AppState(id="calc", name="Calc")])
        new = apply(state, GroundedAction(SwitchApplications("Calc")))
        assert new.focused_app == "calc"

    def test_switch_unknown_app(self):
        state = settings_state([])
        with pytest.raises(UnknownApp):
            apply(state, GroundedAction(SwitchApplications("ghost")))

    def test_wait_changes_nothing(self):
        state = settings_state([button("a", "A")])
        assert apply(state, GroundedAction(Wait(3))) is state


class TestDragAndDrop:
    def _state(self):
        item = ScreenElement(
            id="card", label="Card", kind=ElementKind.LIST_ITEM,
            bbox=BBox(100, 100, 120, 30), app_id="board", container_id="todo",
        )
        todo = button("todo", "Todo", x=80, y=80, w=200, h=400, app_id="board")
        done_col = button("done-col", "Done column", x=400, y=80, w=200, h=400, app_id="board")
        app = AppState(id="board", name="Board", elements=(todo, done_col, item))
        return DesktopState(apps=(app,), focused_app="board"), item, done_col

    def test_moves_item_between_containers(self):
        state, item, target = self._state()
        new = apply(
            state,
            GroundedAction(DragAndDrop("Card", "Done column"), point=center(item), point2=center(target)),
        )
        moved = new.app("board").element("card")
        assert moved.container_id == "done-col"
        assert target.bbox.contains(moved.bbox.x, moved.bbox.y)

    def test_drag_from_non_item_is_noop(self):
        state, _, target = self._state()
        todo = state.app("board").element("todo")
        new = apply(
            state,
            GroundedAction(DragAndDrop("Todo", "Done column"),
                           point=PointCoordinate(90, 85), point2=center(target)),
        )
        assert new == state
        assert todo.container_id is None


class TestHighlight:
    def test_span_selects_exact_tokens_reference_interpreter(self):
        text = "alpha beta gamma delta epsilon zeta eta theta"
        state = editor_state(text)
        obs = render(state)
        span = ground_textual(obs, "delta", "zeta")
        new = apply(state, GroundedAction(HighlightTextSpan("delta", "zeta"), span=span))
        doc = new.app("editor").document

        # reference interpreter: style token-by-token from the span corners
        ref = []
        lo = hi = None
        for tok in state.apps[0].document.tokens:
            for c in tok.chars:
                if c.w > 0 and c.x <= span.start.x < c.x + c.w and c.y <= span.start.y < c.y + c.h:
                    lo = (c.y, c.x)
                if c.w > 0 and c.x <= span.end.x < c.x + c.w and c.y <= span.end.y < c.y + c.h:
                    hi = (c.y, c.x)
        for tok in state.apps[0].document.tokens:
            ref.append(any(lo <= (c.y, c.x) <= hi for c in tok.chars if c.w > 0))

        got = [SELECTED in tok.styles for tok in doc.tokens]
        assert got == ref
        selected_words = [t.text for t in doc.tokens if SELECTED in t.styles and t.is_word]
        assert selected_words == ["delta", "epsilon", "zeta"]

    def test_highlight_replaces_prior_selection(self):
        state = editor_state("one two three")
        obs = render(state)
        first = ground_textual(obs, "one", "one")
        state2 = apply(state, GroundedAction(HighlightTextSpan("one", "one"), span=first))
        second = ground_textual(render(state2), "three", "three")
        state3 = apply(state2, GroundedAction(HighlightTextSpan("three", "three"), span=second))
        words = {t.text: (SELECTED in t.styles) for t in state3.app("editor").document.words()}
        assert words == {"one": False, "two": False, "three": True}

    def test_degraded_point_selects_single_token(self):
        state = editor_state("alpha beta gamma")
        doc = state.apps[0].document
        beta_char = doc.tokens[2].chars[0]
        point = PointCoordinate(beta_char.x, beta_char.y)
        new = apply(state, GroundedAction(HighlightTextSpan("x", "y"), point=point))
        words = [t.text for t in new.app("editor").document.tokens if SELECTED in t.styles]
        assert words == ["beta"]

    def test_scrolled_span_maps_back_to_document(self):
        state = editor_state("l0\nl1\nl2\nl3\nl4", scroll_row=2)
        obs = render(state)
        span = ground_textual(obs, "l3", "l3")
        new = apply(state, GroundedAction(HighlightTextSpan("l3", "l3"), span=span))
        selected = [t.text for t in new.app("editor").document.words() if SELECTED in t.styles]
        assert selected == ["l3"]


class TestDeterminism:
    def test_apply_twice_equal(self):
        el = button("dim", "Dim", effect="toggle", app_id="settings")
        state = settings_state([el])
        ga = GroundedAction(Click("Dim"), point=center(el))
        assert apply(state, ga) == apply(state, ga)
