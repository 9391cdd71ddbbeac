"""Visual grounding mock: token-overlap argmax over element labels."""

from __future__ import annotations

from dataclasses import replace

import pytest

from deskagent.errors import NoMatch, ParseError
from deskagent.grounding import (
    PointCoordinate,
    TokenOverlapGrounder,
    ground_visual,
    parse_point,
    token_overlap,
)
from deskagent.sim import BBox, render

from conftest import button, settings_state


def _obs(*elements):
    return render(settings_state(elements))


def test_exact_label_match_returns_center():
    obs = _obs(button("save", "Save As", x=100, y=200, w=120, h=40))
    point = ground_visual(obs, "Save As")
    assert point == PointCoordinate(160, 220)


def test_overlap_argmax_brute_force():
    elements = [
        button("save", "Save As", x=100, y=100),
        button("open", "Open", x=100, y=200),
    ]
    obs = _obs(*elements)
    description = "the save button"
    # independent brute-force argmax over all elements
    scores = [(token_overlap(description, el.label), i) for i, el in enumerate(elements)]
    best = max(scores, key=lambda s: (s[0], -s[1]))[1]
    assert best == 0
    point = ground_visual(obs, description)
    assert point == PointCoordinate(*elements[0].bbox.center())


def test_below_threshold_is_no_match():
    obs = _obs(button("dim", "Dim Screen"), button("wifi", "Wifi"))
    with pytest.raises(NoMatch):
        ground_visual(obs, "quantum flux capacitor")


def test_threshold_configurable():
    obs = _obs(button("dim", "Dim Screen Delay Thing"))
    grounder = TokenOverlapGrounder(threshold=0.2)
    assert ground_visual(obs, "dim widget maybe here", grounder) is not None


def test_empty_description_rejected():
    obs = _obs(button("a", "A"))
    with pytest.raises(ValueError):
        ground_visual(obs, "")


def test_scaling_bboxes_does_not_change_selection():
    elements = [
        button("save", "Save As", x=10, y=10, w=100, h=20),
        button("close", "Close Window", x=10, y=60, w=100, h=20),
    ]
    obs_small = _obs(*elements)
    scaled = [replace(el, bbox=BBox(el.bbox.x * 3, el.bbox.y * 3, el.bbox.w * 3, el.bbox.h * 3))
              for el in elements]
    obs_big = _obs(*scaled)
    for description in ("the save thing", "close it", "Save As", "window Close"):
        small = ground_visual(obs_small, description)
        big = ground_visual(obs_big, description)
        hit_small = [el.id for el in elements if el.bbox.contains(small.x, small.y)]
        hit_big = [el.id for el in scaled if el.bbox.contains(big.x, big.y)]
        assert hit_small == hit_big


def test_first_element_wins_ties():
    obs = _obs(button("a", "Copy File", y=100), button("b", "Copy File", y=200))
    point = ground_visual(obs, "copy")
    assert point.y == 120


def test_result_is_inside_screen():
    obs = _obs(button("edge", "Edge", x=1800, y=1000, w=120, h=80))
    point = ground_visual(obs, "Edge")
    w, h = obs.screen_size
    assert 0 <= point.x < w and 0 <= point.y < h


class TestParsePoint:
    def test_simple(self):
        assert parse_point("(640, 360)") == PointCoordinate(640, 360)

    def test_last_pair_wins(self):
        assert parse_point("maybe (1, 2)? final answer: (30,40)") == PointCoordinate(30, 40)

    def test_no_pair(self):
        with pytest.raises(ParseError):
            parse_point("somewhere in the middle")
