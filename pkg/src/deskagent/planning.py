"""Manager/worker hierarchy and the episode loop.

The manager decomposes an instruction into subgoals; the worker emits one
action per step for the active subgoal, each action routed to a grounding
expert and applied to the environment.  Proactive mode consults the manager
after *every* concluded subgoal; reactive mode only after failures;
worker-only mode treats the instruction itself as the single subgoal.

An episode ends when the manager confirms nothing remains (an empty replan
with every prior subgoal successful), when a fixed plan runs out, or when
the step budget is exhausted — which scores 0 regardless of the state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources

from .actions import (
    Action,
    Click,
    Done,
    DragAndDrop,
    Fail,
    HighlightTextSpan,
    SaveToKnowledge,
    Scroll,
    TypeText,
    call_name,
    parse_action_call,
    to_call,
)
from .backends import ModelBackend, ModelRequest, ModelRole, parse_plan
from .errors import (
    BadAddress,
    EmptyPlan,
    NoMatch,
    NoRule,
    OrderViolation,
    OutOfBounds,
    ParseError,
    PhraseNotFound,
    RateLimited,
    TransportError,
    UnknownApp,
    UnknownSheet,
)
from .grounding import (
    Expert,
    TokenOverlapGrounder,
    ablation_route,
    format_a1,
    ground_structural,
    ground_textual,
    ground_visual,
    route,
)
from .records import (
    EpisodeRecord,
    StepRecord,
    TerminationReason,
    infer_failure_tag,
    with_failure_tag,
)
from .sim import DesktopEnv, GroundedAction, Observation, TaskSpec, digest, evaluate


class PlanningMode(str, Enum):
    PROACTIVE = "proactive"
    REACTIVE = "reactive"
    WORKER_ONLY = "worker-only"


class SubgoalStatus(str, Enum):
    PENDING = "pending"
    ACTIVE = "active"
    SUCCESS = "success"
    FAILURE = "failure"


_GROUNDING_ERRORS = (NoMatch, PhraseNotFound, OrderViolation, BadAddress)
_APPLY_ERRORS = (OutOfBounds, UnknownApp, UnknownSheet)
_BACKEND_ERRORS = (NoRule, TransportError, RateLimited)


@dataclass
class Subgoal:
    text: str
    status: SubgoalStatus = SubgoalStatus.PENDING
    actions: list[Action] = field(default_factory=list)

    def activate(self) -> None:
        if self.status is not SubgoalStatus.PENDING:
            raise ValueError(f"cannot activate a {self.status.value} subgoal")
        self.status = SubgoalStatus.ACTIVE

    def conclude(self, verdict: SubgoalStatus) -> None:
        if self.status is not SubgoalStatus.ACTIVE:
            raise ValueError(f"cannot conclude a {self.status.value} subgoal")
        if verdict not in (SubgoalStatus.SUCCESS, SubgoalStatus.FAILURE):
            raise ValueError(f"verdict must be success or failure, got {verdict}")
        self.status = verdict


@dataclass(frozen=True)
class SubgoalOutcome:
    verdict: str  # "SUCCESS" | "FAILURE"
    steps_used: int

    def __post_init__(self):
        if self.verdict not in ("SUCCESS", "FAILURE"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.steps_used < 1:
            raise ValueError("a concluded subgoal consumed at least one step")


@dataclass
class Plan:
    instruction: str
    subgoals: list[Subgoal] = field(default_factory=list)
    revision: int = 0

    def pending(self) -> list[Subgoal]:
        return [s for s in self.subgoals if s.status is SubgoalStatus.PENDING]

    def active(self) -> Subgoal | None:
        for s in self.subgoals:
            if s.status is SubgoalStatus.ACTIVE:
                return s
        return None

    def concluded(self) -> list[Subgoal]:
        return [
            s
            for s in self.subgoals
            if s.status in (SubgoalStatus.SUCCESS, SubgoalStatus.FAILURE)
        ]

    def all_concluded_success(self) -> bool:
        return all(s.status is SubgoalStatus.SUCCESS for s in self.concluded())

    def replace_pending(self, new_subgoals: list[Subgoal]) -> None:
        """Swap all pending subgoals for a fresh list; one planner pass."""
        if self.active() is not None:
            raise ValueError("cannot replan while a subgoal is active")
        if any(s.status is not SubgoalStatus.PENDING for s in new_subgoals):
            raise ValueError("replacement subgoals must be pending")
        self.subgoals = self.concluded() + list(new_subgoals)
        self.revision += 1

    def activate_next(self) -> Subgoal | None:
        if self.active() is not None:
            raise ValueError("a subgoal is already active")
        for s in self.subgoals:
            if s.status is SubgoalStatus.PENDING:
                s.activate()
                return s
        return None

    def check_invariants(self) -> None:
        """Concluded prefix, at most one active, pending suffix."""
        phase = 0  # 0 concluded, 1 active, 2 pending
        actives = 0
        for s in self.subgoals:
            if s.status in (SubgoalStatus.SUCCESS, SubgoalStatus.FAILURE):
                assert phase == 0, "concluded subgoal after active/pending"
            elif s.status is SubgoalStatus.ACTIVE:
                actives += 1
                assert phase <= 1, "active subgoal after pending"
                phase = 1
            else:
                phase = 2
        assert actives <= 1, "more than one active subgoal"


class TaskMemory:
    """Append-only per-task scratchpad; a fresh one is made per episode."""

    def __init__(self):
        self._entries: list[str] = []

    def add(self, text: str) -> None:
        self._entries.append(text)

    @property
    def entries(self) -> tuple[str, ...]:
        return tuple(self._entries)


@lru_cache(maxsize=None)
def _template(name: str) -> str:
    text = (
        resources.files("deskagent").joinpath("prompts").joinpath(f"{name}.txt")
        .read_text("utf-8")
    )
    lines = text.splitlines()
    if lines and lines[0].startswith("#"):
        lines = lines[1:]
    return "\n".join(lines).strip("\n")


def _bullet_lines(items: list[str]) -> str:
    return "\n".join(f"- {it}" for it in items) if items else "(none)"


def render_manager_prompt(
    instruction: str, obs: Observation, prior: list[Subgoal], memory: TaskMemory
) -> str:
    prior_lines = _bullet_lines(
        [f"{s.text} [{s.status.value.upper()}]" for s in prior]
    )
    return _template("manager").format(
        instruction=instruction,
        observation=digest(obs),
        prior_subgoals=prior_lines,
        memory=_bullet_lines(list(memory.entries)),
    )


def render_worker_prompt(
    subgoal: Subgoal,
    obs: Observation,
    history: list[str],
    memory: TaskMemory,
    error_hint: str = "",
) -> str:
    return _template("worker").format(
        subgoal=subgoal.text,
        observation=digest(obs),
        history="\n".join(history) if history else "(none)",
        memory=_bullet_lines(list(memory.entries)),
        error_hint=error_hint,
    )


def render_grounder_prompt(obs: Observation, description: str) -> str:
    return _template("grounder").format(observation=digest(obs), description=description)


def manager_plan(
    instruction: str,
    obs: Observation,
    prior: list[Subgoal],
    memory: TaskMemory,
    backend: ModelBackend,
    context_id: str = "",
) -> list[Subgoal]:
    """One planner pass: prior outcomes + latest observation -> new pending
    subgoals.  Raises EmptyPlan when the backend lists nothing."""
    prompt = render_manager_prompt(instruction, obs, prior, memory)
    response = backend.complete(ModelRequest(ModelRole.MANAGER, prompt, context_id))
    return [Subgoal(text) for text in parse_plan(response)]


def _validate_targets(action: Action) -> None:
    descs: list[str] = []
    if isinstance(action, (Click, TypeText, Scroll)):
        descs.append(action.element_description)
    elif isinstance(action, DragAndDrop):
        descs += [action.element_description_1, action.element_description_2]
    elif isinstance(action, HighlightTextSpan):
        descs += [action.starting_phrase, action.ending_phrase]
    for d in descs:
        if not d.strip():
            raise ParseError(f"{call_name(action)} requires a non-empty target description")


def worker_step(
    subgoal: Subgoal,
    obs: Observation,
    history: list[str],
    memory: TaskMemory,
    backend: ModelBackend,
    context_id: str = "",
    error_hint: str = "",
) -> Action:
    """One worker decision for the active subgoal.

    done()/fail() conclude the subgoal on the spot.  Raises ParseError when
    the backend's reply holds no valid action call; the caller retries once
    with the parser's complaint appended.
    """
    if subgoal.status is not SubgoalStatus.ACTIVE:
        raise ValueError("worker_step requires an active subgoal")
    prompt = render_worker_prompt(subgoal, obs, history, memory, error_hint)
    response = backend.complete(ModelRequest(ModelRole.WORKER, prompt, context_id))
    action = parse_action_call(response)
    _validate_targets(action)
    if isinstance(action, Done):
        subgoal.conclude(SubgoalStatus.SUCCESS)
    elif isinstance(action, Fail):
        subgoal.conclude(SubgoalStatus.FAILURE)
    return action


def _ground(action, obs, grounder, expert: Expert, synth_description: str | None):
    """Resolve targets; returns (GroundedAction, loggable target dict)."""
    if expert is Expert.VISUAL:
        if synth_description is not None:
            point = ground_visual(obs, synth_description, grounder)
            return GroundedAction(action, point=point), {"x": point.x, "y": point.y}
        if isinstance(action, DragAndDrop):
            p1 = ground_visual(obs, action.element_description_1, grounder)
            p2 = ground_visual(obs, action.element_description_2, grounder)
            return (
                GroundedAction(action, point=p1, point2=p2),
                {"x": p1.x, "y": p1.y, "x2": p2.x, "y2": p2.y},
            )
        point = ground_visual(obs, action.element_description, grounder)
        return GroundedAction(action, point=point), {"x": point.x, "y": point.y}
    if expert is Expert.TEXTUAL:
        span = ground_textual(obs, action.starting_phrase, action.ending_phrase)
        target = {
            "x1": span.start.x,
            "y1": span.start.y,
            "x2": span.end.x,
            "y2": span.end.y,
        }
        return GroundedAction(action, span=span), target
    if expert is Expert.STRUCTURAL:
        writes = ground_structural((action.app_name, action.sheet_name), action.cell_values)
        target = {"writes": [[format_a1(a), str(v)] for a, v in writes]}
        return GroundedAction(action, writes=writes), target
    return GroundedAction(action), None


def _execute(action, obs, env, grounder, memory, mog_enabled):
    """Route, ground, and apply one action; errors become step data."""
    if isinstance(action, (Done, Fail)):
        return Expert.NONE.value, None, None
    if isinstance(action, SaveToKnowledge):
        memory.add(action.text)
        return Expert.NONE.value, None, None
    if mog_enabled:
        r, synth = route(action), None
    else:
        r, synth = ablation_route(action)
    try:
        grounded, target = _ground(action, obs, grounder, r.expert, synth)
    except _GROUNDING_ERRORS as exc:
        return r.expert.value, None, f"{type(exc).__name__}: {exc}"
    try:
        env.step(grounded)
    except (_APPLY_ERRORS) as exc:
        return r.expert.value, target, f"{type(exc).__name__}: {exc}"
    return r.expert.value, target, None


def _history_lines(steps: list[StepRecord], subgoal_index: int) -> list[str]:
    lines = []
    for s in steps:
        if s.subgoal_index != subgoal_index:
            continue
        shown = s.action or "(reply did not parse)"
        outcome = f"error: {s.error}" if s.error else "ok"
        lines.append(f"{len(lines) + 1}. {shown} -> {outcome}")
    return lines


def run_episode(
    task: TaskSpec,
    mode: PlanningMode | str,
    budget: int,
    backend: ModelBackend,
    env: DesktopEnv | None = None,
    *,
    visual_grounder=None,
    mog_enabled: bool = True,
    plan_observer=None,
) -> EpisodeRecord:
    """Run one full episode and return its trajectory record.

    The budget counts worker calls (manager passes are free); a reply that
    fails to parse still consumes its step.  Never raises: backend and
    grounding mishaps are recorded in the trajectory.
    """
    mode = PlanningMode(mode)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    env = env if env is not None else DesktopEnv(task)
    grounder = visual_grounder if visual_grounder is not None else TokenOverlapGrounder()
    memory = TaskMemory()
    steps: list[StepRecord] = []
    manager_invocations = 0
    final_action: Action | None = None
    termination: TerminationReason | None = None
    plan = Plan(task.instruction)

    def notify():
        if plan_observer is not None:
            plan.check_invariants()
            plan_observer(plan)

    if mode is PlanningMode.WORKER_ONLY:
        plan.subgoals = [Subgoal(task.instruction)]
    else:
        try:
            subs = manager_plan(
                task.instruction, env.observe(), [], memory, backend, context_id=task.id
            )
            manager_invocations += 1
            plan.replace_pending(subs)
            notify()
        except (EmptyPlan, *_BACKEND_ERRORS):
            manager_invocations += 1
            termination = TerminationReason.ABORTED

    subgoal_index = -1
    while termination is None:
        sub = plan.activate_next()
        notify()
        if sub is None:
            # A fixed plan ran out (reactive / worker-only); proactive mode
            # always consults the manager at conclusion time instead.
            termination = TerminationReason.COMPLETED
            break
        subgoal_index += 1
        error_hint = ""
        parse_failures = 0
        breakdown = False

        while sub.status is SubgoalStatus.ACTIVE:
            if len(steps) >= budget:
                termination = TerminationReason.BUDGET_EXHAUSTED
                break
            obs = env.observe()
            history = _history_lines(steps, subgoal_index)
            try:
                action = worker_step(
                    sub, obs, history, memory, backend,
                    context_id=task.id, error_hint=error_hint,
                )
            except ParseError as exc:
                steps.append(
                    StepRecord(
                        len(steps) + 1, sub.text, subgoal_index,
                        "", Expert.NONE.value, None, f"parse error: {exc}",
                    )
                )
                env.tick(len(steps))
                parse_failures += 1
                if parse_failures >= 2:
                    sub.conclude(SubgoalStatus.FAILURE)
                    breakdown = True
                    break
                error_hint = (
                    f"Your previous reply was not a valid action call ({exc}). "
                    "Reply with exactly one action call."
                )
                continue
            except _BACKEND_ERRORS as exc:
                steps.append(
                    StepRecord(
                        len(steps) + 1, sub.text, subgoal_index,
                        "", Expert.NONE.value, None, f"backend error: {exc}",
                    )
                )
                env.tick(len(steps))
                sub.conclude(SubgoalStatus.FAILURE)
                breakdown = True
                break
            parse_failures = 0
            error_hint = ""
            final_action = action
            sub.actions.append(action)
            route_value, target, error = _execute(
                action, obs, env, grounder, memory, mog_enabled
            )
            steps.append(
                StepRecord(
                    len(steps) + 1, sub.text, subgoal_index,
                    to_call(action), route_value, target, error,
                )
            )
            env.tick(len(steps))

        if termination is not None:
            break
        if mode is PlanningMode.WORKER_ONLY:
            termination = (
                TerminationReason.ABORTED if breakdown else TerminationReason.COMPLETED
            )
            break
        if mode is PlanningMode.PROACTIVE or sub.status is SubgoalStatus.FAILURE:
            try:
                subs = manager_plan(
                    task.instruction, env.observe(), plan.concluded(), memory,
                    backend, context_id=task.id,
                )
                manager_invocations += 1
                plan.replace_pending(subs)
                notify()
            except EmptyPlan:
                manager_invocations += 1
                termination = (
                    TerminationReason.COMPLETED
                    if plan.all_concluded_success()
                    else TerminationReason.ABORTED
                )
                break
            except _BACKEND_ERRORS:
                manager_invocations += 1
                termination = TerminationReason.ABORTED
                break

    if termination is TerminationReason.BUDGET_EXHAUSTED:
        reward = 0.0
    else:
        reward = evaluate(task, env.state, final_action)
    record = EpisodeRecord(
        task_id=task.id,
        category=task.category,
        mode=mode.value,
        budget=budget,
        steps=tuple(steps),
        manager_invocations=manager_invocations,
        termination_reason=termination,
        reward=reward,
    )
    tag = infer_failure_tag(
        record, task.feasible, call_name(final_action) if final_action else None
    )
    record = with_failure_tag(record, tag)
    record.check_invariants()
    return record


def worker_only_mode(
    task: TaskSpec,
    budget: int,
    backend: ModelBackend,
    env: DesktopEnv | None = None,
    **kwargs,
) -> EpisodeRecord:
    """Run without a manager: the instruction is the single subgoal."""
    return run_episode(task, PlanningMode.WORKER_ONLY, budget, backend, env, **kwargs)
