"""Task evaluators: named, parameterized pass/fail checks over final state.

Every evaluator is a pure function of the desktop state; tasks flagged
infeasible are rewarded instead on whether the agent's final action was
``fail``.  Rewards are binary.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Callable, Mapping

from ..actions import Action, Fail
from ..errors import UnknownApp, UnknownEvaluator, UnknownSheet
from ..grounding.a1 import parse_a1
from .apply import SELECTED
from .state import DesktopState

if TYPE_CHECKING:
    from .task import TaskSpec

Evaluator = Callable[[DesktopState, Mapping[str, Any]], bool]

EVALUATORS: dict[str, Evaluator] = {}


def register_evaluator(name: str):
    def deco(fn: Evaluator) -> Evaluator:
        EVALUATORS[name] = fn
        return fn

    return deco


def evaluate(task: "TaskSpec", final_state: DesktopState, final_action: Action | None) -> float:
    """Binary reward for a finished episode."""
    if not task.feasible:
        return 1.0 if isinstance(final_action, Fail) else 0.0
    try:
        fn = EVALUATORS[task.evaluator]
    except KeyError:
        raise UnknownEvaluator(f"no evaluator named {task.evaluator!r}") from None
    return 1.0 if fn(final_state, task.evaluator_params) else 0.0


def values_equal(actual: Any, expected: Any) -> bool:
    """Cell-value comparison: exact as strings, or numerically equal."""
    if actual is None:
        return expected in (None, "")
    if str(actual) == str(expected):
        return True
    try:
        return float(actual) == float(expected)
    except (TypeError, ValueError):
        return False


def _cell_value(state: DesktopState, app: str, sheet: str, cell: str):
    a = state.app(app)
    if a.sheet is None:
        raise UnknownSheet(f"app {app!r} has no spreadsheet")
    addr = parse_a1(cell)
    return a.sheet.get(addr.sheet or sheet, addr.row, addr.column)


@register_evaluator("cell_equals")
def _eval_cell_equals(state, params):
    actual = _cell_value(state, params["app"], params["sheet"], params["cell"])
    return values_equal(actual, params["value"])


@register_evaluator("cells_equal")
def _eval_cells_equal(state, params):
    for cell, expected in params["cells"].items():
        actual = _cell_value(state, params["app"], params["sheet"], cell)
        if not values_equal(actual, expected):
            return False
    return True


@register_evaluator("element_toggled")
def _eval_element_toggled(state, params):
    el = state.app(params["app"]).element(params["element"])
    if el is None:
        return False
    return el.toggled == params.get("expected", True)


@register_evaluator("field_text_equals")
def _eval_field_text_equals(state, params):
    el = state.app(params["app"]).element(params["element"])
    return el is not None and el.text == params["value"]


@register_evaluator("flag_equals")
def _eval_flag_equals(state, params):
    try:
        app = state.app(params["app"])
    except UnknownApp:
        return False
    return app.flags.get(params["flag"]) == params["value"]


@register_evaluator("span_styled")
def _eval_span_styled(state, params):
    """Every word token from the start phrase through the end phrase carries
    the given style attribute."""
    app = state.app(params["app"])
    if app.document is None:
        return False
    words = app.document.words()
    texts = [w.text for w in words]
    seq1 = str(params["start_phrase"]).split()
    seq2 = str(params["end_phrase"]).split()
    i1 = _find_words(texts, seq1, 0)
    if i1 is None:
        return False
    i2 = _find_words(texts, seq2, i1)
    if i2 is None:
        return False
    attr = params["attr"]
    return all(attr in w.styles for w in words[i1 : i2 + len(seq2)])


def _find_words(texts: list[str], seq: list[str], start: int) -> int | None:
    for i in range(start, len(texts) - len(seq) + 1):
        if texts[i : i + len(seq)] == seq:
            return i
    return None


@register_evaluator("selection_covers")
def _eval_selection_covers(state, params):
    p = dict(params)
    p["attr"] = SELECTED
    return _eval_span_styled(state, p)


@register_evaluator("focused_app_is")
def _eval_focused_app_is(state, params):
    return state.focused().id == params["app"]


@register_evaluator("clipboard_equals")
def _eval_clipboard_equals(state, params):
    return state.clipboard == params["value"]


@register_evaluator("item_in_container")
def _eval_item_in_container(state, params):
    el = state.app(params["app"]).element(params["element"])
    return el is not None and el.container_id == params["container"]


@register_evaluator("scrolled_to_at_least")
def _eval_scrolled_to_at_least(state, params):
    return state.app(params["app"]).scroll_row >= int(params["row"])


@register_evaluator("popup_dismissed")
def _eval_popup_dismissed(state, params):
    return all(p.id != params["popup"] for p in state.popups)


@register_evaluator("all_of")
def _eval_all_of(state, params):
    for check in params["checks"]:
        fn = EVALUATORS.get(check["name"])
        if fn is None:
            raise UnknownEvaluator(f"no evaluator named {check['name']!r}")
        if not fn(state, check.get("params", {})):
            return False
    return True


@register_evaluator("infeasible")
def _eval_infeasible(state, params):
    # The reward for infeasible tasks comes from the final-action rule in
    # evaluate(); as a state check this never passes.
    return False
