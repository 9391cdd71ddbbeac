"""Task suite files: loading, construction, validation.

Suites are human-editable YAML (line-oriented key/value with nested
blocks); the full schema lives in docs/task_format.md with one canonical
example per evaluator kind.  ``bundled:NAME`` resolves a suite shipped
inside the package.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..backends import ModelRole, ScriptedRule
from ..errors import BadAddress, SuiteError
from ..grounding.a1 import parse_a1
from ..sim import (
    AppState,
    BBox,
    DesktopState,
    ElementKind,
    EVALUATORS,
    Mutation,
    ScreenElement,
    Spreadsheet,
    TaskSpec,
    layout_document,
)
from ..sim.apply import ELEMENT_EFFECTS, KEYBINDING_EFFECTS


def resolve_suite_path(spec: str | Path) -> Path:
    spec = str(spec)
    if spec.startswith("bundled:"):
        name = spec.split(":", 1)[1]
        return Path(str(resources.files("deskagent").joinpath("suites").joinpath(f"{name}.yaml")))
    return Path(spec)


def load_suite(spec: str | Path) -> tuple[str, list[TaskSpec]]:
    path = resolve_suite_path(spec)
    try:
        data = yaml.safe_load(path.read_text("utf-8"))
    except FileNotFoundError:
        raise SuiteError(f"suite file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise SuiteError(f"suite file {path} is not valid YAML: {exc}") from None
    if not isinstance(data, Mapping) or "tasks" not in data:
        raise SuiteError(f"suite file {path} must be a mapping with a 'tasks' list")
    name = data.get("suite", path.stem)
    tasks = []
    seen_ids = set()
    for raw in data["tasks"]:
        task = build_task(raw)
        if task.id in seen_ids:
            raise SuiteError(f"duplicate task id {task.id!r}")
        seen_ids.add(task.id)
        tasks.append(task)
    if not tasks:
        raise SuiteError(f"suite {name!r} has no tasks")
    return name, tasks


def build_task(raw: Mapping[str, Any]) -> TaskSpec:
    task_id = raw.get("id")
    if not task_id:
        raise SuiteError("task without an id")
    try:
        return _build_task_inner(raw)
    except SuiteError as exc:
        raise SuiteError(f"task {task_id!r}: {exc}") from None
    except (KeyError, TypeError, ValueError, BadAddress) as exc:
        raise SuiteError(f"task {task_id!r}: {exc}") from None


def _build_task_inner(raw: Mapping[str, Any]) -> TaskSpec:
    evaluator = raw.get("evaluator")
    if not isinstance(evaluator, Mapping) or "name" not in evaluator:
        raise SuiteError("evaluator must be a mapping with a 'name'")
    if evaluator["name"] not in EVALUATORS:
        raise SuiteError(f"unregistered evaluator {evaluator['name']!r}")
    state = build_state(raw)
    state.validate()
    mutations = tuple(
        Mutation(after_steps=int(m["after_steps"]), ops=tuple(m.get("ops", ())))
        for m in raw.get("mutations", ())
    )
    script = tuple(raw.get("script", ()))
    for rule in script:
        _check_rule(rule)
    return TaskSpec(
        id=str(raw["id"]),
        instruction=str(raw.get("instruction", "")),
        initial_state=state,
        evaluator=evaluator["name"],
        evaluator_params=dict(evaluator.get("params", {})),
        category=str(raw.get("category", "general")),
        feasible=bool(raw.get("feasible", True)),
        mutations=mutations,
        script=script,
    )


def _check_rule(rule: Mapping[str, Any]) -> None:
    if "role" not in rule or "response" not in rule:
        raise SuiteError(f"script rule needs 'role' and 'response': {rule!r}")
    ModelRole(rule["role"])


def scripted_rules(task: TaskSpec) -> tuple[ScriptedRule, ...]:
    return tuple(
        ScriptedRule(
            role=ModelRole(r["role"]),
            response=str(r["response"]),
            contains=r.get("contains"),
            ordinal=r.get("ordinal"),
        )
        for r in task.script
    )


def build_state(raw: Mapping[str, Any]) -> DesktopState:
    screen = tuple(raw.get("screen", (1920, 1080)))
    apps = tuple(_build_app(a, screen) for a in raw.get("apps", ()))
    if not apps:
        raise SuiteError("a task needs at least one app")
    focused = raw.get("focused_app", apps[0].id)
    popups = tuple(_build_element(p, app_id="popup") for p in raw.get("popups", ()))
    return DesktopState(
        apps=apps,
        focused_app=focused,
        clipboard=str(raw.get("clipboard", "")),
        popups=popups,
        screen_size=(int(screen[0]), int(screen[1])),
    )


def _build_app(raw: Mapping[str, Any], screen: tuple[int, int]) -> AppState:
    app_id = raw.get("id")
    if not app_id:
        raise SuiteError("app without an id")
    elements = tuple(_build_element(e, app_id=app_id) for e in raw.get("elements", ()))
    document = None
    if "document" in raw:
        d = raw["document"]
        origin = tuple(d.get("origin", (60, 120)))
        document = layout_document(str(d["text"]), origin=(int(origin[0]), int(origin[1])))
    sheet = None
    if "sheet" in raw:
        sheet = _build_sheet(raw["sheet"])
    keybindings = {str(k): str(v) for k, v in raw.get("keybindings", {}).items()}
    for combo, effect in keybindings.items():
        kind = effect.partition(":")[0]
        if kind not in KEYBINDING_EFFECTS:
            raise SuiteError(f"unknown keybinding effect {effect!r} for {combo!r}")
    return AppState(
        id=str(app_id),
        name=str(raw.get("name", app_id)),
        elements=elements,
        document=document,
        sheet=sheet,
        keybindings=keybindings,
        scroll_row=int(raw.get("scroll_row", 0)),
        flags={str(k): str(v) for k, v in raw.get("flags", {}).items()},
    )


def _build_element(raw: Mapping[str, Any], app_id: str) -> ScreenElement:
    bbox = raw.get("bbox")
    if not bbox or len(bbox) != 4:
        raise SuiteError(f"element {raw.get('id')!r} needs bbox [x, y, w, h]")
    effect = raw.get("effect")
    if effect is not None and effect.partition(":")[0] not in ELEMENT_EFFECTS:
        raise SuiteError(f"unknown element effect {effect!r} on {raw.get('id')!r}")
    try:
        kind = ElementKind(raw.get("kind", "button"))
    except ValueError:
        raise SuiteError(f"unknown element kind {raw.get('kind')!r}") from None
    return ScreenElement(
        id=str(raw["id"]),
        label=str(raw.get("label", "")),
        kind=kind,
        bbox=BBox(*(int(v) for v in bbox)),
        enabled=bool(raw.get("enabled", True)),
        app_id=app_id,
        effect=effect,
        toggled=bool(raw.get("toggled", False)),
        text=str(raw.get("text", "")),
        container_id=raw.get("container"),
    )


def _build_sheet(raw: Mapping[str, Any]) -> Spreadsheet:
    sheets: dict[str, dict[tuple[int, int], Any]] = {}
    for name, spec in raw.get("sheets", {}).items():
        cells: dict[tuple[int, int], Any] = {}
        for key, value in (spec or {}).items():
            addr = parse_a1(str(key))
            cells[(addr.row, addr.column)] = value
        sheets[str(name)] = cells
    if not sheets:
        raise SuiteError("sheet block needs at least one named sheet")
    active = raw.get("active", next(iter(sheets)))
    if active not in sheets:
        raise SuiteError(f"active sheet {active!r} is not defined")
    origin = tuple(raw.get("origin", (100, 120)))
    return Spreadsheet(
        sheets=sheets,
        active=str(active),
        origin=(int(origin[0]), int(origin[1])),
        col_widths={int(k): int(v) for k, v in (raw.get("col_widths") or {}).items()},
        row_heights={int(k): int(v) for k, v in (raw.get("row_heights") or {}).items()},
    )
