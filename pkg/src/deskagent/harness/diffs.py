"""Behavior tags from comparing two trajectories of the same task.

The tags are documented heuristics (docs/failure_tags.md) over what the
agent *did*, meant for eyeballing how one configuration's run differs from
another's (say, a short budget against a long one):

- adaptive-navigation: the same target description was grounded under two
  different subgoals.
- adaptive-interaction: one trajectory hits the same target with two or
  more distinct action kinds.
- backward-correction: an action targets something last touched two or
  more subgoals earlier.
- task-complexity: a successful run needed more than 15 steps.
"""

from __future__ import annotations

from enum import Enum

from ..actions import call_name, parse_action_call
from ..errors import MismatchedTask, ParseError
from ..grounding.visual import normalize_tokens
from ..records import EpisodeRecord

COMPLEXITY_STEP_THRESHOLD = 15


class BehaviorTag(str, Enum):
    ADAPTIVE_NAVIGATION = "adaptive-navigation"
    ADAPTIVE_INTERACTION = "adaptive-interaction"
    BACKWARD_CORRECTION = "backward-correction"
    TASK_COMPLEXITY = "task-complexity"


def _parsed_steps(record: EpisodeRecord):
    for s in record.steps:
        if not s.action:
            continue
        try:
            yield s, parse_action_call(s.action)
        except ParseError:
            continue


def _target_text(action) -> str | None:
    name = call_name(action)
    if name in ("click", "type", "scroll"):
        return action.element_description
    if name == "drag_and_drop":
        return action.element_description_1
    if name == "highlight_text_span":
        return f"{action.starting_phrase} {action.ending_phrase}"
    if name == "set_cell_values":
        return " ".join(action.cell_values)
    return None


def diff_runs(record_a: EpisodeRecord, record_b: EpisodeRecord) -> tuple[BehaviorTag, ...]:
    if record_a.task_id != record_b.task_id:
        raise MismatchedTask(
            f"records are for different tasks: {record_a.task_id!r} vs {record_b.task_id!r}"
        )
    tags = set()

    # adaptive navigation: same description grounded under >= 2 subgoals
    subgoals_by_desc: dict[str, set[str]] = {}
    for record in (record_a, record_b):
        for step, action in _parsed_steps(record):
            if step.route == "none":
                continue
            desc = _target_text(action)
            if desc:
                subgoals_by_desc.setdefault(desc, set()).add(step.subgoal)
    if any(len(subs) >= 2 for subs in subgoals_by_desc.values()):
        tags.add(BehaviorTag.ADAPTIVE_NAVIGATION)

    for record in (record_a, record_b):
        steps = [
            (step, action, normalize_tokens(_target_text(action) or ""))
            for step, action in _parsed_steps(record)
            if _target_text(action)
        ]
        # adaptive interaction: >= 2 distinct action kinds on one target
        for i, (_, act_i, toks_i) in enumerate(steps):
            for _, act_j, toks_j in steps[i + 1 :]:
                if toks_i & toks_j and call_name(act_i) != call_name(act_j):
                    tags.add(BehaviorTag.ADAPTIVE_INTERACTION)
        # backward correction: target last touched >= 2 subgoals earlier
        last_touched: dict[str, int] = {}
        for step, _, toks in steps:
            for tok in toks:
                prev = last_touched.get(tok)
                if prev is not None and step.subgoal_index - prev >= 2:
                    tags.add(BehaviorTag.BACKWARD_CORRECTION)
                last_touched[tok] = step.subgoal_index

    for record in (record_a, record_b):
        if record.reward == 1.0 and record.steps_used > COMPLEXITY_STEP_THRESHOLD:
            tags.add(BehaviorTag.TASK_COMPLEXITY)

    return tuple(sorted(tags, key=lambda t: t.value))
