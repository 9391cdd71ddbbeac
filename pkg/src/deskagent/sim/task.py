"""Task definitions: instruction, initial state, evaluator, scripted events."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .state import DesktopState


@dataclass(frozen=True)
class Mutation:
    """A scripted mid-episode environment change, fired once the worker has
    taken ``after_steps`` actions.  Models the world moving under the agent."""

    after_steps: int
    ops: tuple[Mapping[str, Any], ...]


@dataclass(frozen=True)
class TaskSpec:
    id: str
    instruction: str
    initial_state: DesktopState
    evaluator: str
    evaluator_params: Mapping[str, Any] = field(default_factory=dict)
    category: str = "general"
    feasible: bool = True
    mutations: tuple[Mutation, ...] = ()
    # Scripted backend rules bundled with the task (used by scripted runs).
    script: tuple[Mapping[str, Any], ...] = ()
