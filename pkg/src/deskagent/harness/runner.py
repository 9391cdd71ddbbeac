"""Suite runner: episodes under a config, aggregated into a report.

Episodes run in a thread pool of size ``parallelism`` but the set of
records (and hence the log bytes) is independent of pool size: results are
assembled in suite order, counters live in exact integers, and per-task
errors are recorded as aborted episodes instead of killing the run.
"""

from __future__ import annotations

import hashlib
import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from ..backends import ModelBackend, RemoteBackend, ScriptedBackend, ScriptedRule, ModelRole
from ..errors import DeskAgentError, SuiteError
from ..grounding import BackendVisualGrounder, TokenOverlapGrounder
from ..planning import run_episode
from ..records import EpisodeRecord, FailureTag, TerminationReason, with_failure_tag
from ..sim import BBox, DesktopEnv, ElementKind, ScreenElement, TaskSpec
from .config import RunConfig
from .logs import LOG_NAME, write_run_log
from .suite import load_suite, scripted_rules

DISTRACTOR_LABELS = (
    "Update available",
    "Subscribe to our newsletter",
    "Rate this app",
    "New tips for you",
    "Cloud sync paused",
)


@dataclass
class BudgetStats:
    successes: int = 0
    total: int = 0
    steps_total: int = 0
    by_category: dict[str, list[int]] = field(default_factory=dict)  # cat -> [succ, total]
    routes: dict[str, int] = field(default_factory=dict)

    def add(self, record: EpisodeRecord) -> None:
        won = record.reward == 1.0
        self.successes += int(won)
        self.total += 1
        self.steps_total += record.steps_used
        cat = self.by_category.setdefault(record.category, [0, 0])
        cat[0] += int(won)
        cat[1] += 1
        for step in record.steps:
            self.routes[step.route] = self.routes.get(step.route, 0) + 1


@dataclass
class SuiteReport:
    suite: str
    mode: str
    mog_enabled: bool
    budgets: tuple[int, ...]
    per_budget: dict[int, BudgetStats]
    records: list[EpisodeRecord] = field(default_factory=list)

    def success_rate(self, budget: int) -> float:
        stats = self.per_budget[budget]
        return 100.0 * stats.successes / stats.total if stats.total else 0.0

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "suite": self.suite,
            "mode": self.mode,
            "mog_enabled": self.mog_enabled,
            "budgets": list(self.budgets),
            "per_budget": {},
        }
        for budget, stats in self.per_budget.items():
            out["per_budget"][str(budget)] = {
                "successes": stats.successes,
                "total": stats.total,
                "success_rate_percent": round(self.success_rate(budget), 2),
                "mean_steps": round(stats.steps_total / stats.total, 2) if stats.total else 0,
                "by_category": {
                    cat: {"successes": s, "total": t}
                    for cat, (s, t) in sorted(stats.by_category.items())
                },
                "routes": dict(sorted(stats.routes.items())),
            }
        return out

    def to_text(self) -> str:
        lines = [
            f"suite: {self.suite}   mode: {self.mode}   "
            f"mixture-of-grounding: {'on' if self.mog_enabled else 'off'}"
        ]
        for budget in self.budgets:
            stats = self.per_budget[budget]
            lines.append(
                f"budget {budget}: {stats.successes}/{stats.total} succeeded "
                f"({self.success_rate(budget):.1f}%), "
                f"mean steps {stats.steps_total / stats.total:.1f}"
                if stats.total
                else f"budget {budget}: no episodes"
            )
            for cat, (s, t) in sorted(stats.by_category.items()):
                lines.append(f"  {cat:<16} {s}/{t} ({100.0 * s / t:.1f}%)")
            routes = ", ".join(f"{k}={v}" for k, v in sorted(stats.routes.items()))
            lines.append(f"  routes: {routes or '(none)'}")
        return "\n".join(lines)


def _stable_rng(seed: int, *parts: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{':'.join(parts)}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def inject_distractors(task: TaskSpec, count: int, seed: int) -> TaskSpec:
    """Add seeded popup distractors to the task's initial state.

    Distractors are pure noise: they must not swallow clicks meant for task
    elements, so placement retries until the popup overlaps no interactive
    element of any app (popups sit on top of everything).
    """
    if count <= 0:
        return task
    rng = _stable_rng(seed, "distractors", task.id)
    w, h = task.initial_state.screen_size
    occupied = [el.bbox for app in task.initial_state.apps for el in app.elements]
    occupied += [p.bbox for p in task.initial_state.popups]
    popups = list(task.initial_state.popups)
    pw, ph = 240, 70
    for i in range(count):
        for _attempt in range(50):
            x = rng.randrange(0, max(1, w - pw))
            y = rng.randrange(0, max(1, h - ph))
            box = BBox(x, y, pw, ph)
            if not any(_overlaps(box, other) for other in occupied):
                break
        else:
            continue  # screen too crowded; noise is optional
        occupied.append(box)
        popups.append(
            ScreenElement(
                id=f"distractor-{task.id}-{i}",
                label=rng.choice(DISTRACTOR_LABELS),
                kind=ElementKind.BUTTON,
                bbox=box,
                app_id="popup",
                effect="dismiss",
            )
        )
    state = replace(task.initial_state, popups=tuple(popups))
    return replace(task, initial_state=state)


def _overlaps(a: BBox, b: BBox) -> bool:
    return a.x < b.x + b.w and b.x < a.x + a.w and a.y < b.y + b.h and b.y < a.y + a.h


def _load_yaml(path: str) -> dict:
    return yaml.safe_load(Path(path).read_text("utf-8")) or {}


class BackendFactory:
    """Builds per-episode backends from a config spec string."""

    def __init__(self, spec: str):
        self.spec = spec
        self._shared: ModelBackend | None = None
        if spec.startswith("scripted:"):
            rules = [
                ScriptedRule(
                    role=ModelRole(r["role"]),
                    response=str(r["response"]),
                    contains=r.get("contains"),
                    ordinal=r.get("ordinal"),
                )
                for r in _load_yaml(spec.split(":", 1)[1]).get("rules", [])
            ]
            self._shared = ScriptedBackend(rules)
        elif spec.startswith("remote:"):
            cfg = _load_yaml(spec.split(":", 1)[1])
            self._shared = RemoteBackend(
                base_url=cfg["base_url"],
                model=cfg["model"],
                auth_env=cfg.get("auth_env"),
                timeout=float(cfg.get("timeout", 60.0)),
            )
        elif spec != "scripted":
            raise SuiteError(f"unknown backend spec {spec!r}")

    def for_task(self, task: TaskSpec) -> ModelBackend:
        if self._shared is not None:
            return self._shared
        return ScriptedBackend(scripted_rules(task))


class VisualFactory:
    def __init__(self, spec: str):
        self.spec = spec
        self._backend_factory: BackendFactory | None = None
        if spec.startswith("remote:"):
            self._backend_factory = BackendFactory(spec)
        elif spec != "mock":
            raise SuiteError(f"unknown visual grounder spec {spec!r}")

    def for_task(self, task: TaskSpec):
        if self._backend_factory is None:
            return TokenOverlapGrounder()
        return BackendVisualGrounder(self._backend_factory.for_task(task), context_id=task.id)


def run_suite(config: RunConfig) -> SuiteReport:
    suite_name, tasks = load_suite(config.suite)
    order = list(range(len(tasks)))
    _stable_rng(config.seed, "order", suite_name).shuffle(order)
    ordered = [tasks[i] for i in order]

    backend_factory = BackendFactory(config.backend_spec)
    visual_factory = VisualFactory(config.visual_spec)

    def job(task: TaskSpec, budget: int) -> EpisodeRecord:
        prepared = inject_distractors(task, config.distractors, config.seed)
        try:
            record = run_episode(
                prepared,
                config.mode,
                budget,
                backend_factory.for_task(prepared),
                DesktopEnv(prepared),
                visual_grounder=visual_factory.for_task(prepared),
                mog_enabled=config.mog_enabled,
            )
        except DeskAgentError:
            # A task-level breakdown is data, not a run failure.
            record = EpisodeRecord(
                task_id=task.id,
                category=task.category,
                mode=config.mode.value,
                budget=budget,
                steps=(),
                manager_invocations=0,
                termination_reason=TerminationReason.ABORTED,
                reward=0.0,
                failure_tag=FailureTag.PLANNING,
            )
        override = config.failure_tag_overrides.get(task.id)
        if override is not None and record.reward != 1.0:
            record = with_failure_tag(record, FailureTag(override))
        return record

    jobs = [(task, budget) for budget in config.budgets for task in ordered]
    if config.parallelism == 1:
        results = [job(t, b) for t, b in jobs]
    else:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            results = list(pool.map(lambda tb: job(*tb), jobs))

    report = SuiteReport(
        suite=suite_name,
        mode=config.mode.value,
        mog_enabled=config.mog_enabled,
        budgets=config.budgets,
        per_budget={b: BudgetStats() for b in config.budgets},
        records=results,
    )
    for record in results:
        report.per_budget[record.budget].add(record)

    if config.out_dir is not None:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_run_log(out / LOG_NAME, config.to_dict(), results)
        (out / "report.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", "utf-8"
        )
        (out / "report.txt").write_text(report.to_text() + "\n", "utf-8")
    return report


def report_from_records(
    suite: str, mode: str, mog_enabled: bool, records: list[EpisodeRecord]
) -> SuiteReport:
    budgets = tuple(sorted({r.budget for r in records}))
    report = SuiteReport(
        suite=suite,
        mode=mode,
        mog_enabled=mog_enabled,
        budgets=budgets,
        per_budget={b: BudgetStats() for b in budgets},
        records=records,
    )
    for record in records:
        report.per_budget[record.budget].add(record)
    return report
