"""Dispatch of worker actions to grounding experts.

The route is a pure function of the action kind: actions that name their
target with an element description go to the visual expert, span selection
goes to the textual expert, cell writes go to the structural expert, and
everything else needs no grounding at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

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


class Expert(str, Enum):
    VISUAL = "visual"
    TEXTUAL = "textual"
    STRUCTURAL = "structural"
    NONE = "none"


@dataclass(frozen=True)
class GroundingRoute:
    expert: Expert
    rationale: str


_ROUTES: dict[type, tuple[Expert, str]] = {
    Click: (Expert.VISUAL, "target named by an element description"),
    TypeText: (Expert.VISUAL, "target named by an element description"),
    Scroll: (Expert.VISUAL, "target named by an element description"),
    DragAndDrop: (Expert.VISUAL, "both endpoints named by element descriptions"),
    HighlightTextSpan: (Expert.TEXTUAL, "span bounded by exact word sequences"),
    SetCellValues: (Expert.STRUCTURAL, "cells addressed directly, bypassing pixels"),
    Hotkey: (Expert.NONE, "keyboard-only, no screen target"),
    HoldAndPress: (Expert.NONE, "keyboard-only, no screen target"),
    SaveToKnowledge: (Expert.NONE, "writes agent memory, not the screen"),
    SwitchApplications: (Expert.NONE, "targets an app by name"),
    Wait: (Expert.NONE, "no target"),
    Done: (Expert.NONE, "no target"),
    Fail: (Expert.NONE, "no target"),
}


def route(action: Action) -> GroundingRoute:
    """Total, deterministic routing over all 13 action kinds."""
    expert, why = _ROUTES[type(action)]
    return GroundingRoute(expert, why)


def routing_table() -> dict[str, str]:
    """Call name -> expert value, as shipped in data/routing_table.json."""
    from ..actions import ACTION_SPECS

    return {name: _ROUTES[cls][0].value for name, (cls, _) in ACTION_SPECS.items()}


def ablation_route(action: Action) -> tuple[GroundingRoute, str | None]:
    """Route used by the no-mixture ablation arm.

    Textual and structural routes are rewritten to the visual expert with a
    description synthesized from the action's own arguments; the returned
    description is None when the route was not rewritten.
    """
    base = route(action)
    if isinstance(action, HighlightTextSpan):
        desc = f'text starting "{action.starting_phrase}" ending "{action.ending_phrase}"'
        return GroundingRoute(Expert.VISUAL, "rewritten: mixture disabled"), desc
    if isinstance(action, SetCellValues):
        keys = ", ".join(action.cell_values)
        desc = f"cells {keys} in sheet {action.sheet_name}"
        return GroundingRoute(Expert.VISUAL, "rewritten: mixture disabled"), desc
    return base, None
