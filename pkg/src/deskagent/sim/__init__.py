"""Deterministic simulated desktop: state, rendering, transitions, rewards."""

from .apply import SELECTED, GroundedAction, apply
from .elements import BBox, ElementKind, ScreenElement
from .env import DesktopEnv, apply_mutation_op
from .evaluate import EVALUATORS, evaluate, register_evaluator, values_equal
from .render import Observation, digest, extract_text, render
from .sheet import DEFAULT_COL_W, DEFAULT_ROW_H, Spreadsheet
from .state import DEFAULT_SCREEN, AppState, DesktopState
from .task import Mutation, TaskSpec
from .textdoc import CHAR_W, LINE_H, CharBox, TextDocument, TextToken, layout_document

__all__ = [
    "AppState",
    "BBox",
    "CHAR_W",
    "CharBox",
    "DEFAULT_COL_W",
    "DEFAULT_ROW_H",
    "DEFAULT_SCREEN",
    "DesktopEnv",
    "DesktopState",
    "ElementKind",
    "EVALUATORS",
    "GroundedAction",
    "LINE_H",
    "Mutation",
    "Observation",
    "SELECTED",
    "ScreenElement",
    "Spreadsheet",
    "TaskSpec",
    "TextDocument",
    "TextToken",
    "apply",
    "apply_mutation_op",
    "digest",
    "evaluate",
    "extract_text",
    "layout_document",
    "register_evaluator",
    "render",
    "values_equal",
]
