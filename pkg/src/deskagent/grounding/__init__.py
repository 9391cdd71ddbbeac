"""Grounding experts and their router."""

from .a1 import CellAddress, column_index, column_label, format_a1, parse_a1
from .coords import PointCoordinate, SpanCoordinates, ensure_in_bounds
from .router import Expert, GroundingRoute, ablation_route, route, routing_table
from .structural import ground_structural
from .textual import ground_textual, words_in_reading_order
from .visual import (
    BackendVisualGrounder,
    TokenOverlapGrounder,
    ground_visual,
    parse_point,
    token_overlap,
)

__all__ = [
    "BackendVisualGrounder",
    "CellAddress",
    "Expert",
    "GroundingRoute",
    "PointCoordinate",
    "SpanCoordinates",
    "TokenOverlapGrounder",
    "ablation_route",
    "column_index",
    "column_label",
    "ensure_in_bounds",
    "format_a1",
    "ground_structural",
    "ground_textual",
    "ground_visual",
    "parse_a1",
    "parse_point",
    "route",
    "routing_table",
    "token_overlap",
    "words_in_reading_order",
]
