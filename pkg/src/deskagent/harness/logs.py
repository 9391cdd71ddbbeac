"""Run logs: line-delimited JSON with a versioned schema.

One ``step`` line per worker call, one ``episode`` line per task, one
``run`` header per file.  Field lists are documented bit-exactly in
docs/log_schema.md.  Lines carry no timestamps and keys are sorted, so the
same run always produces the same bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Mapping

from ..records import EpisodeRecord

SCHEMA_VERSION = 1

LOG_NAME = "log.jsonl"


def _dump(obj: Mapping[str, Any]) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def run_header_line(config: Mapping[str, Any]) -> str:
    return _dump({"kind": "run", "schema": SCHEMA_VERSION, "config": dict(config)})


def episode_lines(record: EpisodeRecord) -> list[str]:
    lines = []
    for s in record.steps:
        lines.append(
            _dump(
                {
                    "kind": "step",
                    "schema": SCHEMA_VERSION,
                    "task_id": record.task_id,
                    "budget": record.budget,
                    "step_index": s.step_index,
                    "subgoal": s.subgoal,
                    "subgoal_index": s.subgoal_index,
                    "action": s.action,
                    "route": s.route,
                    "target": dict(s.target) if s.target is not None else None,
                    "error": s.error,
                }
            )
        )
    episode = record.to_dict()
    episode["kind"] = "episode"
    episode["schema"] = SCHEMA_VERSION
    lines.append(_dump(episode))
    return lines


def write_run_log(
    path: Path, config: Mapping[str, Any], records: Iterable[EpisodeRecord]
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [run_header_line(config)]
    for record in records:
        lines.extend(episode_lines(record))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_run_log(path: Path) -> tuple[dict[str, Any], list[EpisodeRecord]]:
    """Rebuild episode records (with steps) from a log file."""
    header: dict[str, Any] = {}
    episodes: list[EpisodeRecord] = []
    steps_by_key: dict[tuple[str, int], list[dict[str, Any]]] = {}
    entries = []
    for line in Path(path).read_text("utf-8").splitlines():
        if not line.strip():
            continue
        entries.append(json.loads(line))
    for entry in entries:
        if entry["kind"] == "run":
            header = entry["config"]
        elif entry["kind"] == "step":
            steps_by_key.setdefault((entry["task_id"], entry["budget"]), []).append(entry)
    for entry in entries:
        if entry["kind"] == "episode":
            steps = steps_by_key.get((entry["task_id"], entry["budget"]), [])
            episodes.append(EpisodeRecord.from_dicts(entry, steps))
    return header, episodes
