"""Command-line interface.

    deskagent run --suite <path> --mode <proactive|reactive|worker-only>
                  --budget <n> [--no-mog] [--parallel <k>] [--seed <n>]
                  --backend <spec> [--visual-backend <spec>] [--out <dir>]
    deskagent report <logdir>
    deskagent diff <logA> <logB> [--task <id>]
    deskagent validate-suite <path>

Exit code 0 means no internal errors; task failures are data, not errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import DeskAgentError, MismatchedTask
from .config import RunConfig
from .diffs import diff_runs
from .logs import LOG_NAME, read_run_log
from .runner import report_from_records, run_suite
from .suite import load_suite


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deskagent")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a task suite")
    run.add_argument("--suite", required=True, help="suite path or bundled:NAME")
    run.add_argument(
        "--mode",
        choices=["proactive", "reactive", "worker-only"],
        default="proactive",
    )
    run.add_argument(
        "--budget",
        type=int,
        action="append",
        help="worker-step budget; repeat the flag to compare budgets",
    )
    run.add_argument("--no-mog", action="store_true", help="disable the grounding mixture")
    run.add_argument("--parallel", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--distractors", type=int, default=0)
    run.add_argument(
        "--backend",
        default="scripted",
        help="scripted | scripted:<rules.yaml> | remote:<config.yaml>",
    )
    run.add_argument("--visual-backend", default="mock", help="mock | remote:<config.yaml>")
    run.add_argument("--out", type=Path, help="directory for log.jsonl and reports")

    report = sub.add_parser("report", help="aggregate a run log into a report")
    report.add_argument("logdir", type=Path)

    diff = sub.add_parser("diff", help="tag behavioral differences between two logs")
    diff.add_argument("log_a", type=Path)
    diff.add_argument("log_b", type=Path)
    diff.add_argument("--task", help="only diff this task id")

    validate = sub.add_parser("validate-suite", help="check a suite file")
    validate.add_argument("suite")
    return parser


def _cmd_run(args) -> int:
    config = RunConfig(
        suite=args.suite,
        mode=args.mode,
        budget=tuple(args.budget) if args.budget else 15,
        mog_enabled=not args.no_mog,
        backend_spec=args.backend,
        visual_spec=args.visual_backend,
        parallelism=args.parallel,
        seed=args.seed,
        distractors=args.distractors,
        out_dir=args.out,
    )
    report = run_suite(config)
    print(report.to_text())
    if args.out:
        print(f"log written to {Path(args.out) / LOG_NAME}")
    return 0


def _cmd_report(args) -> int:
    log_path = args.logdir / LOG_NAME if args.logdir.is_dir() else args.logdir
    header, records = read_run_log(log_path)
    report = report_from_records(
        suite=str(header.get("suite", log_path)),
        mode=str(header.get("mode", "?")),
        mog_enabled=bool(header.get("mog_enabled", True)),
        records=records,
    )
    print(report.to_text())
    return 0


def _resolve_log(path: Path) -> Path:
    return path / LOG_NAME if path.is_dir() else path


def _cmd_diff(args) -> int:
    _, records_a = read_run_log(_resolve_log(args.log_a))
    _, records_b = read_run_log(_resolve_log(args.log_b))
    by_task_b = {r.task_id: r for r in records_b}
    shown = 0
    for record_a in records_a:
        if args.task and record_a.task_id != args.task:
            continue
        record_b = by_task_b.get(record_a.task_id)
        if record_b is None:
            continue
        try:
            tags = diff_runs(record_a, record_b)
        except MismatchedTask:
            continue
        shown += 1
        label = ", ".join(t.value for t in tags) if tags else "(no tags)"
        print(f"{record_a.task_id}: {label}")
    if shown == 0:
        print("no overlapping tasks to diff")
    return 0


def _cmd_validate(args) -> int:
    try:
        name, tasks = load_suite(args.suite)
    except DeskAgentError as exc:
        print(f"INVALID: {exc}")
        return 1
    print(f"suite {name!r}: {len(tasks)} tasks OK")
    for task in tasks:
        print(f"  {task.id}: evaluator={task.evaluator} category={task.category}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "diff":
            return _cmd_diff(args)
        if args.command == "validate-suite":
            return _cmd_validate(args)
    except DeskAgentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
