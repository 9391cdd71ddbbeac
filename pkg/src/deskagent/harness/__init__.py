"""Batch runner, logs, reports, and trajectory diffing."""

from .config import RunConfig
from .diffs import BehaviorTag, diff_runs
from .logs import LOG_NAME, read_run_log, write_run_log
from .runner import SuiteReport, inject_distractors, report_from_records, run_suite
from .suite import build_state, build_task, load_suite, scripted_rules

__all__ = [
    "BehaviorTag",
    "LOG_NAME",
    "RunConfig",
    "SuiteReport",
    "build_state",
    "build_task",
    "diff_runs",
    "inject_distractors",
    "load_suite",
    "read_run_log",
    "report_from_records",
    "run_suite",
    "scripted_rules",
    "write_run_log",
]
