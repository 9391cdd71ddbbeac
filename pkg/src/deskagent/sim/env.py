"""Episode-scoped environment: evolving state plus the step counter.

States themselves are immutable; the env owns the current snapshot, counts
worker steps for the observation, and fires a task's scripted mid-episode
mutations when their step thresholds pass.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Any, Mapping

from ..errors import SuiteError
from .apply import GroundedAction, apply
from .elements import BBox, ElementKind, ScreenElement
from .render import Observation, render
from .state import DesktopState
from .task import TaskSpec
from .textdoc import layout_document


class DesktopEnv:
    def __init__(self, task: TaskSpec, initial_state: DesktopState | None = None):
        self.task = task
        self.state = initial_state if initial_state is not None else task.initial_state
        self.state.validate()
        self.step_index = 0
        self._pending_mutations = sorted(task.mutations, key=lambda m: m.after_steps)

    def observe(self) -> Observation:
        return render(self.state, self.step_index)

    def step(self, grounded: GroundedAction) -> DesktopState:
        """Apply one grounded action; exceptions leave the state untouched."""
        self.state = apply(self.state, grounded)
        return self.state

    def tick(self, steps_used: int) -> None:
        """Advance the step counter and fire any due scripted mutations."""
        self.step_index = steps_used
        while self._pending_mutations and self._pending_mutations[0].after_steps <= steps_used:
            mutation = self._pending_mutations.pop(0)
            for op in mutation.ops:
                self.state = apply_mutation_op(self.state, op)
            self.state.validate()


def apply_mutation_op(state: DesktopState, op: Mapping[str, Any]) -> DesktopState:
    kind = op.get("op")
    if kind == "relabel":
        app = state.app(op["app"])
        el = app.element(op["element"])
        if el is None:
            raise SuiteError(f"mutation references missing element {op['element']!r}")
        return state.replace_app(app.replace_element(replace(el, label=op["label"])))
    if kind == "move":
        app = state.app(op["app"])
        el = app.element(op["element"])
        if el is None:
            raise SuiteError(f"mutation references missing element {op['element']!r}")
        x, y, w, h = op["bbox"]
        return state.replace_app(app.replace_element(replace(el, bbox=BBox(x, y, w, h))))
    if kind == "remove_element":
        app = state.app(op["app"])
        elements = tuple(e for e in app.elements if e.id != op["element"])
        return state.replace_app(replace(app, elements=elements))
    if kind == "add_popup":
        spec = op["element"]
        popup = ScreenElement(
            id=spec["id"],
            label=spec.get("label", ""),
            kind=ElementKind(spec.get("kind", "button")),
            bbox=BBox(*spec["bbox"]),
            app_id="popup",
            effect=spec.get("effect", "dismiss"),
        )
        return replace(state, popups=state.popups + (popup,))
    if kind == "set_cell":
        from ..grounding.a1 import parse_a1

        app = state.app(op["app"])
        if app.sheet is None:
            raise SuiteError(f"mutation targets app {op['app']!r} without a sheet")
        addr = parse_a1(op["cell"])
        sheet = app.sheet.with_writes(op["sheet"], [(addr, op["value"])])
        return state.replace_app(replace(app, sheet=sheet))
    if kind == "set_document":
        app = state.app(op["app"])
        if app.document is None:
            raise SuiteError(f"mutation targets app {op['app']!r} without a document")
        doc = layout_document(op["text"], origin=app.document.origin)
        return state.replace_app(replace(app, document=doc))
    raise SuiteError(f"unknown mutation op {kind!r}")
