"""The 13-kind action vocabulary, its call syntax, and the call parser.

The wire syntax is ``name(arg=value, ...)`` with keyword arguments only.
Values are double-quoted strings, integers, booleans, lists of strings, or
string-to-string maps.  ``parse_action_call`` extracts the *last* call
embedded in free-form model output (models reason before they decide);
``Action.to_call()`` renders the canonical form, which round-trips through
the parser.
"""

from __future__ import annotations

import ast
import json
import re
from dataclasses import dataclass
from typing import Any, Union

from .errors import ParseError

# Argument value kinds admitted by the call grammar.  Floats are not part
# of the grammar; durations and counts are integers.
STR = "str"
INT = "int"
BOOL = "bool"
STR_LIST = "str_list"
STR_MAP = "str_map"

_REQUIRED = object()


@dataclass(frozen=True)
class ArgSpec:
    name: str
    kind: str
    default: Any = _REQUIRED

    @property
    def required(self) -> bool:
        return self.default is _REQUIRED


@dataclass(frozen=True)
class Click:
    element_description: str
    num_clicks: int = 1
    button_type: str = "left"
    hold_keys: tuple[str, ...] = ()


@dataclass(frozen=True)
class TypeText:
    element_description: str
    text: str
    overwrite: bool = False
    enter: bool = False


@dataclass(frozen=True)
class Scroll:
    element_description: str
    clicks: int
    shift: bool = False


@dataclass(frozen=True)
class Hotkey:
    keys: tuple[str, ...]


@dataclass(frozen=True)
class HoldAndPress:
    press_keys: tuple[str, ...]
    hold_keys: tuple[str, ...] = ()


@dataclass(frozen=True)
class DragAndDrop:
    element_description_1: str
    element_description_2: str
    hold_keys: tuple[str, ...] = ()


@dataclass(frozen=True)
class SaveToKnowledge:
    text: str


@dataclass(frozen=True)
class SwitchApplications:
    app_name: str


@dataclass(frozen=True)
class HighlightTextSpan:
    starting_phrase: str
    ending_phrase: str


@dataclass(frozen=True)
class SetCellValues:
    cell_values: dict[str, str]
    app_name: str
    sheet_name: str

    def __post_init__(self):
        # Dicts keep the parser honest but must never be shared mutably.
        object.__setattr__(self, "cell_values", dict(self.cell_values))

    def __eq__(self, other):
        if not isinstance(other, SetCellValues):
            return NotImplemented
        return (
            self.cell_values == other.cell_values
            and self.app_name == other.app_name
            and self.sheet_name == other.sheet_name
        )


@dataclass(frozen=True)
class Wait:
    time: int


@dataclass(frozen=True)
class Done:
    pass


@dataclass(frozen=True)
class Fail:
    pass


Action = Union[
    Click,
    TypeText,
    Scroll,
    Hotkey,
    HoldAndPress,
    DragAndDrop,
    SaveToKnowledge,
    SwitchApplications,
    HighlightTextSpan,
    SetCellValues,
    Wait,
    Done,
    Fail,
]

# Call name -> (action class, argument specs in wire order).
ACTION_SPECS: dict[str, tuple[type, tuple[ArgSpec, ...]]] = {
    "click": (
        Click,
        (
            ArgSpec("element_description", STR),
            ArgSpec("num_clicks", INT, 1),
            ArgSpec("button_type", STR, "left"),
            ArgSpec("hold_keys", STR_LIST, ()),
        ),
    ),
    "type": (
        TypeText,
        (
            ArgSpec("element_description", STR),
            ArgSpec("text", STR),
            ArgSpec("overwrite", BOOL, False),
            ArgSpec("enter", BOOL, False),
        ),
    ),
    "scroll": (
        Scroll,
        (
            ArgSpec("element_description", STR),
            ArgSpec("clicks", INT),
            ArgSpec("shift", BOOL, False),
        ),
    ),
    "hotkey": (Hotkey, (ArgSpec("keys", STR_LIST),)),
    "hold_and_press": (
        HoldAndPress,
        (
            ArgSpec("hold_keys", STR_LIST, ()),
            ArgSpec("press_keys", STR_LIST),
        ),
    ),
    "drag_and_drop": (
        DragAndDrop,
        (
            ArgSpec("element_description_1", STR),
            ArgSpec("element_description_2", STR),
            ArgSpec("hold_keys", STR_LIST, ()),
        ),
    ),
    "save_to_knowledge": (SaveToKnowledge, (ArgSpec("text", STR),)),
    "switch_applications": (SwitchApplications, (ArgSpec("app_name", STR),)),
    "highlight_text_span": (
        HighlightTextSpan,
        (
            ArgSpec("starting_phrase", STR),
            ArgSpec("ending_phrase", STR),
        ),
    ),
    "set_cell_values": (
        SetCellValues,
        (
            ArgSpec("cell_values", STR_MAP),
            ArgSpec("app_name", STR),
            ArgSpec("sheet_name", STR),
        ),
    ),
    "wait": (Wait, (ArgSpec("time", INT),)),
    "done": (Done, ()),
    "fail": (Fail, ()),
}

_CLASS_TO_NAME = {cls: name for name, (cls, _) in ACTION_SPECS.items()}

ACTION_NAMES = tuple(ACTION_SPECS)


def call_name(action: Action) -> str:
    return _CLASS_TO_NAME[type(action)]


def _quote(s: str) -> str:
    # json escaping is a strict subset of Python string-literal escaping,
    # and ensure_ascii=False keeps astral characters intact (surrogate-pair
    # escapes would not survive a round trip through a Python literal).
    return json.dumps(s, ensure_ascii=False)


def _render_value(value: Any) -> str:
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return _quote(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(_quote(v) for v in value) + "]"
    if isinstance(value, dict):
        items = ", ".join(f"{_quote(k)}: {_quote(v)}" for k, v in value.items())
        return "{" + items + "}"
    raise TypeError(f"cannot render argument value {value!r}")


def to_call(action: Action) -> str:
    """Render the canonical single-line call for ``action``.

    Every argument is written out explicitly, defaults included, in the
    documented argument order.
    """
    name = call_name(action)
    _, argspecs = ACTION_SPECS[name]
    parts = [f"{a.name}={_render_value(getattr(action, a.name))}" for a in argspecs]
    return f"{name}({', '.join(parts)})"


# to_call is also reachable as a method for convenience.
for _cls in set(_CLASS_TO_NAME):
    _cls.to_call = to_call
del _cls


_NAME_RE = re.compile(
    r"\b(" + "|".join(sorted(ACTION_SPECS, key=len, reverse=True)) + r")\s*\("
)


def _balanced_call_end(text: str, open_paren: int) -> int | None:
    """Index one past the ``)`` closing the call whose ``(`` is at open_paren."""
    depth = 0
    quote: str | None = None
    i = open_paren
    n = len(text)
    while i < n:
        ch = text[i]
        if quote is not None:
            if ch == "\\":
                i += 2
                continue
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return None


class _NotALiteral(Exception):
    pass


def _decode_node(node: ast.expr) -> Any:
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or isinstance(node.value, (int, str)):
            return node.value
        raise _NotALiteral
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        inner = _decode_node(node.operand)
        if isinstance(inner, bool) or not isinstance(inner, int):
            raise _NotALiteral
        return -inner
    if isinstance(node, ast.Name) and node.id in ("true", "false"):
        return node.id == "true"
    if isinstance(node, ast.List):
        return [_decode_node(el) for el in node.elts]
    if isinstance(node, ast.Dict):
        if any(k is None for k in node.keys):
            raise _NotALiteral
        return {_decode_node(k): _decode_node(v) for k, v in zip(node.keys, node.values)}
    raise _NotALiteral


@dataclass(frozen=True)
class _Candidate:
    position: int
    name: str
    positional: int
    kwargs: dict[str, Any]


def _iter_candidates(text: str):
    """Yield call-shaped substrings: a known name applied to literal args."""
    pos = 0
    while True:
        m = _NAME_RE.search(text, pos)
        if m is None:
            return
        end = _balanced_call_end(text, m.end() - 1)
        if end is None:
            pos = m.end()
            continue
        try:
            tree = ast.parse(text[m.start():end].strip(), mode="eval")
        except SyntaxError:
            pos = m.end()
            continue
        call = tree.body
        if not (isinstance(call, ast.Call) and isinstance(call.func, ast.Name)):
            pos = m.end()
            continue
        try:
            kwargs = {}
            for kw in call.keywords:
                if kw.arg is None:  # **splat
                    raise _NotALiteral
                kwargs[kw.arg] = _decode_node(kw.value)
            for a in call.args:
                _decode_node(a)
        except _NotALiteral:
            pos = m.end()
            continue
        yield _Candidate(m.start(), call.func.id, len(call.args), kwargs)
        # Resume after the accepted call so text inside its string
        # arguments is not re-scanned as a nested candidate.
        pos = end


def _check_kind(value: Any, kind: str) -> Any:
    if kind == STR and isinstance(value, str):
        return value
    if kind == INT and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind == BOOL and isinstance(value, bool):
        return value
    if kind == STR_LIST and isinstance(value, list) and all(isinstance(v, str) for v in value):
        return tuple(value)
    if kind == STR_MAP and isinstance(value, dict) and all(
        isinstance(k, str) and isinstance(v, str) for k, v in value.items()
    ):
        return dict(value)
    raise ParseError(f"argument value {value!r} is not a valid {kind}")


def build_action(name: str, kwargs: dict[str, Any], position: int = 0) -> Action:
    """Validate parsed keyword arguments against the vocabulary and build."""
    cls, argspecs = ACTION_SPECS[name]
    by_name = {a.name: a for a in argspecs}
    values: dict[str, Any] = {}
    for key, raw in kwargs.items():
        spec = by_name.get(key)
        if spec is None:
            raise ParseError(f"unknown argument {key!r} for {name}", position)
        try:
            values[key] = _check_kind(raw, spec.kind)
        except ParseError as exc:
            raise ParseError(f"argument {key!r} of {name}: {exc.reason}", position) from None
    for spec in argspecs:
        if spec.name not in values:
            if spec.required:
                raise ParseError(f"missing required argument {spec.name!r} for {name}", position)
            values[spec.name] = spec.default
    return cls(**values)


def parse_action_call(text: str) -> Action:
    """Parse the last valid action call embedded in model output.

    Candidates are substrings shaped like a call to one of the 13 action
    names with literal arguments.  The last candidate is then validated
    strictly: keyword arguments only, known names, correct types, required
    arguments present.  Raises ParseError otherwise.
    """
    last: _Candidate | None = None
    for cand in _iter_candidates(text):
        last = cand
    if last is None:
        raise ParseError("no action call found")
    if last.positional:
        raise ParseError(
            f"{last.name} uses positional arguments; only keyword arguments are allowed",
            last.position,
        )
    return build_action(last.name, last.kwargs, last.position)
