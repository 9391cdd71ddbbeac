"""Model backends: every learned model behind one text-in/text-out interface.

The scripted backend is the deterministic test double; the remote backend
talks to a chat-completions-style HTTP endpoint (request/response fields
documented in docs/remote_backend.md).  Both are safe to call from parallel
episodes.
"""

from __future__ import annotations

import os
import re
import threading
import time
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

import httpx

from .errors import EmptyPlan, NoRule, RateLimited, TransportError


class ModelRole(str, Enum):
    MANAGER = "manager"
    WORKER = "worker"
    VISUAL_GROUNDER = "visual_grounder"


@dataclass(frozen=True)
class ModelRequest:
    role: ModelRole
    prompt: str
    context_id: str = ""

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be non-empty")


class ModelBackend(Protocol):
    def complete(self, request: ModelRequest) -> str: ...


@dataclass(frozen=True)
class ScriptedRule:
    """First matching rule wins.  ``contains`` matches a prompt substring;
    ``ordinal`` matches the 1-based call number for that (context, role)."""

    role: ModelRole
    response: str
    contains: str | None = None
    ordinal: int | None = None

    def matches(self, request: ModelRequest, call_number: int) -> bool:
        if self.role is not request.role:
            return False
        if self.contains is not None and self.contains not in request.prompt:
            return False
        if self.ordinal is not None and self.ordinal != call_number:
            return False
        return True


class ScriptedBackend:
    """Deterministic replay backend keyed by (context, role) call counters."""

    def __init__(self, rules):
        self.rules = tuple(rules)
        self._counts: dict[tuple[str, ModelRole], int] = {}
        self._lock = threading.Lock()

    def complete(self, request: ModelRequest) -> str:
        key = (request.context_id, request.role)
        with self._lock:
            n = self._counts.get(key, 0) + 1
            self._counts[key] = n
        for rule in self.rules:
            if rule.matches(request, n):
                return rule.response
        raise NoRule(
            f"no scripted rule for role={request.role.value} call #{n} "
            f"(context {request.context_id!r})"
        )


class RemoteBackend:
    """Chat-completions client with bounded exponential retry.

    The auth token is read from the environment variable named by
    ``auth_env``; it is never written into config files.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        auth_env: str | None = None,
        timeout: float = 60.0,
        max_attempts: int = 3,
        retry_wait: float = 0.5,
        transport: httpx.BaseTransport | None = None,
    ):
        headers = {}
        if auth_env:
            token = os.environ.get(auth_env)
            if not token:
                raise ValueError(f"environment variable {auth_env!r} is not set")
            headers["Authorization"] = f"Bearer {token}"
        self.model = model
        self.max_attempts = max_attempts
        self.retry_wait = retry_wait
        self._client = httpx.Client(
            base_url=base_url, headers=headers, timeout=timeout, transport=transport
        )

    def complete(self, request: ModelRequest) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": request.prompt}],
        }
        last_error: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.retry_wait * 2 ** (attempt - 1))
            try:
                resp = self._client.post("/chat/completions", json=payload)
            except httpx.TransportError as exc:
                last_error = TransportError(f"transport failure: {exc}")
                continue
            if resp.status_code == 429:
                last_error = RateLimited("endpoint answered 429")
                continue
            if resp.status_code >= 500:
                last_error = TransportError(f"endpoint answered {resp.status_code}")
                continue
            if resp.status_code >= 400:
                raise TransportError(f"endpoint answered {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, ValueError) as exc:
                raise TransportError(f"malformed completion response: {exc}") from exc
        assert last_error is not None
        raise last_error

    def close(self) -> None:
        self._client.close()


_LIST_LINE = re.compile(r"^\s*(?:\d+[.)]\s+|[-*•]\s+)(.*\S)\s*$")


def parse_plan(text: str) -> list[str]:
    """Extract subgoal texts from a numbered or bulleted block.

    Surrounding prose is ignored; raises EmptyPlan when no list items are
    found.
    """
    items = []
    for line in text.splitlines():
        m = _LIST_LINE.match(line)
        if m:
            items.append(m.group(1).strip())
    if not items:
        raise EmptyPlan("no subgoal list found in planner output")
    return items
