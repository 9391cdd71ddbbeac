"""Textual grounding: exact boundary phrases -> pixel span over visible text.

Works purely on the observation's character grid, the way an OCR pass
would: characters are read in reading order (top-to-bottom, then
left-to-right), grouped into words on whitespace, and the phrases are
matched case-sensitively as exact word sequences.  The first occurrence of
the start phrase wins; the end phrase is the first occurrence starting at
or after it.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from ..errors import OrderViolation, PhraseNotFound
from .coords import PointCoordinate, SpanCoordinates

if TYPE_CHECKING:
    from ..sim.render import Observation
    from ..sim.textdoc import CharBox


def reading_order(chars) -> list["CharBox"]:
    return sorted(chars, key=lambda c: (c.y, c.x))


def words_in_reading_order(chars) -> list[tuple[str, list["CharBox"]]]:
    """Group a char grid into (word, boxes) pairs, dropping whitespace."""
    words: list[tuple[str, list]] = []
    current: list = []
    for c in reading_order(chars):
        if c.ch.isspace():
            if current:
                words.append(("".join(b.ch for b in current), current))
                current = []
        else:
            current.append(c)
    if current:
        words.append(("".join(b.ch for b in current), current))
    return words


def _find_sequence(words: list[tuple[str, list]], phrase_words: list[str], start: int) -> int | None:
    n = len(phrase_words)
    for i in range(start, len(words) - n + 1):
        if all(words[i + k][0] == phrase_words[k] for k in range(n)):
            return i
    return None


def ground_textual(obs: "Observation", p1: str, p2: str) -> SpanCoordinates:
    """Locate the span bounded by exact word sequences ``p1`` and ``p2``.

    Returns the top-left pixel of p1's first character and the bottom-right
    pixel of p2's last character.
    """
    seq1 = p1.split()
    seq2 = p2.split()
    if not seq1 or not seq2:
        raise ValueError("boundary phrases must be non-empty")
    words = words_in_reading_order(obs.char_grid)
    i1 = _find_sequence(words, seq1, 0)
    if i1 is None:
        raise PhraseNotFound("start", p1)
    i2 = _find_sequence(words, seq2, i1)
    if i2 is None:
        if _find_sequence(words, seq2, 0) is not None:
            raise OrderViolation(f"{p2!r} occurs only before {p1!r}")
        raise PhraseNotFound("end", p2)
    first_box = words[i1][1][0]
    last_box = words[i2 + len(seq2) - 1][1][-1]
    return SpanCoordinates(
        start=PointCoordinate(first_box.x, first_box.y),
        end=PointCoordinate(last_box.x + last_box.w - 1, last_box.y + last_box.h - 1),
    )
