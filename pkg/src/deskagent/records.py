"""Episode trajectories: per-step records, termination, reward, failure tag."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Mapping


class TerminationReason(str, Enum):
    COMPLETED = "completed"
    BUDGET_EXHAUSTED = "budget_exhausted"
    ABORTED = "aborted"


class FailureTag(str, Enum):
    PLANNING = "planning"
    GROUNDING = "grounding"
    INTERACTION = "interaction"
    NAVIGATION = "navigation"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class StepRecord:
    step_index: int  # 1-based worker call number within the episode
    subgoal: str
    subgoal_index: int
    action: str  # canonical call syntax; empty when the reply did not parse
    route: str
    target: Mapping[str, Any] | None = None  # point / span / cell writes
    error: str | None = None


@dataclass(frozen=True)
class EpisodeRecord:
    task_id: str
    category: str
    mode: str
    budget: int
    steps: tuple[StepRecord, ...]
    manager_invocations: int
    termination_reason: TerminationReason
    reward: float
    failure_tag: FailureTag | None = None

    @property
    def steps_used(self) -> int:
        return len(self.steps)

    def check_invariants(self) -> None:
        assert self.steps_used <= self.budget, "steps exceed budget"
        if self.reward == 1.0:
            assert self.failure_tag is None, "successful episodes carry no failure tag"

    def to_dict(self) -> dict[str, Any]:
        return {
            "task_id": self.task_id,
            "category": self.category,
            "mode": self.mode,
            "budget": self.budget,
            "manager_invocations": self.manager_invocations,
            "termination_reason": self.termination_reason.value,
            "reward": self.reward,
            "failure_tag": self.failure_tag.value if self.failure_tag else None,
            "steps_used": self.steps_used,
        }

    @staticmethod
    def from_dicts(episode: Mapping[str, Any], steps: list[Mapping[str, Any]]) -> "EpisodeRecord":
        recs = tuple(
            StepRecord(
                step_index=s["step_index"],
                subgoal=s["subgoal"],
                subgoal_index=s["subgoal_index"],
                action=s["action"],
                route=s["route"],
                target=s.get("target"),
                error=s.get("error"),
            )
            for s in steps
        )
        tag = episode.get("failure_tag")
        return EpisodeRecord(
            task_id=episode["task_id"],
            category=episode.get("category", "general"),
            mode=episode["mode"],
            budget=episode["budget"],
            steps=recs,
            manager_invocations=episode["manager_invocations"],
            termination_reason=TerminationReason(episode["termination_reason"]),
            reward=episode["reward"],
            failure_tag=FailureTag(tag) if tag else None,
        )


GROUNDING_ERROR_MARKERS = (
    "NoMatch",
    "PhraseNotFound",
    "OrderViolation",
    "BadAddress",
    "UnknownSheet",
)

NAVIGATION_ACTIONS = ("scroll(", "switch_applications(")


def infer_failure_tag(
    record: EpisodeRecord, feasible: bool, final_action_name: str | None
) -> FailureTag | None:
    """Documented rule table (see docs/failure_tags.md), first match wins."""
    if record.reward == 1.0:
        return None
    if not feasible and final_action_name != "fail":
        return FailureTag.INFEASIBLE
    if record.termination_reason is TerminationReason.ABORTED:
        return FailureTag.PLANNING
    last_subgoal = record.steps[-1].subgoal_index if record.steps else -1
    tail = [s for s in record.steps if s.subgoal_index == last_subgoal]
    for s in tail:
        if s.error and any(m in s.error for m in GROUNDING_ERROR_MARKERS):
            return FailureTag.GROUNDING
    if record.termination_reason is TerminationReason.BUDGET_EXHAUSTED:
        nav = sum(1 for s in tail if s.action.startswith(NAVIGATION_ACTIONS))
        if nav >= 2:
            return FailureTag.NAVIGATION
    return FailureTag.INTERACTION


def with_failure_tag(record: EpisodeRecord, tag: FailureTag | None) -> EpisodeRecord:
    return replace(record, failure_tag=tag)
