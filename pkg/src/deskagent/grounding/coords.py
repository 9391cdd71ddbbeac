"""Pixel coordinate types produced by the grounding experts."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import OutOfBounds


@dataclass(frozen=True)
class PointCoordinate:
    x: int
    y: int


@dataclass(frozen=True)
class SpanCoordinates:
    """A text span: ``start`` is the top-left pixel of the first character,
    ``end`` the bottom-right pixel (last pixel inside the box) of the last
    character.  ``start`` precedes ``end`` in reading order."""

    start: PointCoordinate
    end: PointCoordinate


def ensure_in_bounds(point: PointCoordinate, screen_size: tuple[int, int]) -> PointCoordinate:
    w, h = screen_size
    if not (0 <= point.x < w and 0 <= point.y < h):
        raise OutOfBounds(f"point ({point.x}, {point.y}) outside {w}x{h} screen")
    return point
