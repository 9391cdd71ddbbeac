"""Run configuration for the suite runner."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from ..planning import PlanningMode


@dataclass
class RunConfig:
    suite: str
    mode: PlanningMode = PlanningMode.PROACTIVE
    budget: int | Sequence[int] = 15
    mog_enabled: bool = True
    backend_spec: str = "scripted"
    visual_spec: str = "mock"
    parallelism: int = 1
    seed: int = 0
    distractors: int = 0
    out_dir: Path | None = None
    failure_tag_overrides: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.mode = PlanningMode(self.mode)
        if isinstance(self.budget, int):
            self.budgets: tuple[int, ...] = (self.budget,)
        else:
            self.budgets = tuple(int(b) for b in self.budget)
        if not self.budgets or any(b < 1 for b in self.budgets):
            raise ValueError("budgets must all be >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if self.out_dir is not None:
            self.out_dir = Path(self.out_dir)

    def to_dict(self) -> dict:
        # Used as the run-log header; parallelism is deliberately absent so
        # pool size can never change the log bytes.
        return {
            "suite": str(self.suite),
            "mode": self.mode.value,
            "budgets": list(self.budgets),
            "mog_enabled": self.mog_enabled,
            "backend": self.backend_spec,
            "visual": self.visual_spec,
            "seed": self.seed,
            "distractors": self.distractors,
        }
