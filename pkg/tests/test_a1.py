"""A1 addressing: examples, negative corpus, round-trip properties."""

from __future__ import annotations

from importlib import resources
from itertools import product
from string import ascii_uppercase

import pytest
from hypothesis import given, strategies as st

from deskagent.errors import BadAddress
from deskagent.grounding import CellAddress, column_label, format_a1, parse_a1


def _enumerated_labels(n):
    """Independent oracle: enumerate A, B, ..., Z, AA, AB, ... in order."""
    labels = []
    width = 1
    while len(labels) < n:
        labels.extend("".join(p) for p in product(ascii_uppercase, repeat=width))
        width += 1
    return labels[:n]


LABELS = _enumerated_labels(800)


def test_b3_matches_enumeration():
    addr = parse_a1("B3")
    assert (addr.column, addr.row) == (LABELS.index("B"), 2)
    assert (addr.column, addr.row) == (1, 2)


def test_a1_is_first_cell():
    assert parse_a1("A1") == CellAddress(column=0, row=0)


def test_format_column_27_row_0():
    assert format_a1(CellAddress(column=27, row=0)) == "AB1"
    assert LABELS[27] == "AB"


def test_aa10_matches_enumeration():
    addr = parse_a1("AA10")
    assert addr.column == LABELS.index("AA") == 26
    assert addr.row == 9


def test_sheet_prefix_round_trip():
    addr = parse_a1("Summary!AC7")
    assert addr == CellAddress(column=28, row=6, sheet="Summary")
    assert format_a1(addr) == "Summary!AC7"


@pytest.mark.parametrize("label_index", range(len(LABELS)))
def test_column_labels_match_enumeration(label_index):
    assert column_label(label_index) == LABELS[label_index]


def _negative_corpus():
    text = (
        resources.files("deskagent").joinpath("data/a1_negative_corpus.txt")
        .read_text("utf-8")
    )
    cases = [line.rstrip("\n") for line in text.splitlines()]
    return [c for c in cases if c and not c.startswith("#")]


@pytest.mark.parametrize("bad", _negative_corpus() + ["", " A1", "A1 ", "\tA1", "A1\n"])
def test_negative_corpus_rejected(bad):
    with pytest.raises(BadAddress):
        parse_a1(bad)


@given(
    st.integers(min_value=0, max_value=9999),
    st.integers(min_value=0, max_value=9999),
    st.one_of(st.none(), st.sampled_from(["Sheet1", "Summary", "data 2024"])),
)
def test_round_trip_property(column, row, sheet):
    addr = CellAddress(column=column, row=row, sheet=sheet)
    assert parse_a1(format_a1(addr)) == addr


@given(st.integers(min_value=0, max_value=100_000))
def test_format_parse_canonicalizes(column):
    text = format_a1(CellAddress(column=column, row=0))
    assert format_a1(parse_a1(text)) == text
