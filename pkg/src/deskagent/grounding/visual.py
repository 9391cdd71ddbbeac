"""Visual grounding: a language description of a screen target -> one pixel.

The real expert is a remote model behind the backend interface; the in-repo
reference is a deterministic mock that scores element labels against the
description by normalized token overlap.  Scores depend only on labels, so
resizing elements never changes which one is picked.
"""

from __future__ import annotations

import re
from typing import TYPE_CHECKING, Protocol

from ..errors import NoMatch, OutOfBounds, ParseError
from .coords import PointCoordinate, ensure_in_bounds

if TYPE_CHECKING:
    from ..backends import ModelBackend
    from ..sim.render import Observation

_TOKEN_RE = re.compile(r"[0-9a-z]+")


def normalize_tokens(text: str) -> frozenset[str]:
    return frozenset(_TOKEN_RE.findall(text.lower()))


def token_overlap(a: str, b: str) -> float:
    """Overlap coefficient of the normalized token sets: |A∩B| / min(|A|,|B|)."""
    ta, tb = normalize_tokens(a), normalize_tokens(b)
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / min(len(ta), len(tb))


class VisualGrounder(Protocol):
    def locate(self, obs: "Observation", description: str) -> PointCoordinate: ...


class TokenOverlapGrounder:
    """Reference mock: argmax of token overlap over element labels.

    An exact label match always wins; otherwise the best-scoring element is
    picked (first in observation order on ties) and scores strictly below
    the threshold raise NoMatch.
    """

    def __init__(self, threshold: float = 0.5):
        self.threshold = threshold

    def locate(self, obs: "Observation", description: str) -> PointCoordinate:
        best = None
        best_score = -1.0
        for el in obs.elements:
            if el.label == description:
                return ensure_in_bounds(_center(el), obs.screen_size)
            score = token_overlap(description, el.label)
            if score > best_score:
                best, best_score = el, score
        if best is None or best_score < self.threshold:
            raise NoMatch(f"no element matching {description!r} (best score {max(best_score, 0.0):.2f})")
        return ensure_in_bounds(_center(best), obs.screen_size)


def _center(el) -> PointCoordinate:
    return PointCoordinate(el.bbox.x + el.bbox.w // 2, el.bbox.y + el.bbox.h // 2)


_POINT_RE = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def parse_point(text: str) -> PointCoordinate:
    """Parse the last ``(x, y)`` pair in a model reply."""
    last = None
    for m in _POINT_RE.finditer(text):
        last = m
    if last is None:
        raise ParseError("no (x, y) point found in grounder reply")
    return PointCoordinate(int(last.group(1)), int(last.group(2)))


class BackendVisualGrounder:
    """Adapter that asks a model backend for coordinates.

    The backend answers free text containing a final ``(x, y)`` pair; the
    point is validated against the observation's screen size.
    """

    def __init__(self, backend: "ModelBackend", context_id: str = ""):
        self._backend = backend
        self._context_id = context_id

    def locate(self, obs: "Observation", description: str) -> PointCoordinate:
        from ..backends import ModelRequest, ModelRole
        from ..planning import render_grounder_prompt

        prompt = render_grounder_prompt(obs, description)
        reply = self._backend.complete(
            ModelRequest(ModelRole.VISUAL_GROUNDER, prompt, self._context_id)
        )
        try:
            point = parse_point(reply)
        except ParseError as exc:
            raise NoMatch(f"grounder reply unusable for {description!r}: {exc}") from exc
        try:
            return ensure_in_bounds(point, obs.screen_size)
        except OutOfBounds as exc:
            raise NoMatch(f"grounder returned out-of-screen point for {description!r}: {exc}") from exc


def ground_visual(
    obs: "Observation", description: str, grounder: VisualGrounder | None = None
) -> PointCoordinate:
    """Resolve a description to a single pixel via the configured expert."""
    if not description:
        raise ValueError("description must be non-empty")
    return (grounder or TokenOverlapGrounder()).locate(obs, description)
