"""A1 cell addressing: ``B3`` means column 1, row 2 (both 0-based here).

Column letters are bijective base-26 (A..Z, AA..), row digits are 1-based
with no leading zeros.  An optional ``Sheet!`` prefix names the sheet.
``parse_a1`` and ``format_a1`` are exact inverses on the valid domain and
are kept lean: batch grounding calls them once per cell.
"""

from __future__ import annotations

import re
from typing import NamedTuple

from ..errors import BadAddress

_A1_RE = re.compile(r"(?:([^!]+)!)?([A-Z]+)([1-9][0-9]*)")


class CellAddress(NamedTuple):
    column: int
    row: int
    sheet: str | None = None


# Distinct column labels are few even in huge sheets; memoize both maps.
_INDEX_OF: dict[str, int] = {}
_LABEL_OF: dict[int, str] = {}


def column_index(letters: str) -> int:
    """``"A"`` -> 0, ``"Z"`` -> 25, ``"AA"`` -> 26, ..."""
    n = _INDEX_OF.get(letters)
    if n is None:
        n = 0
        for ch in letters:
            n = n * 26 + (ord(ch) - 64)
        n -= 1
        _INDEX_OF[letters] = n
    return n


def column_label(index: int) -> str:
    label = _LABEL_OF.get(index)
    if label is None:
        if index < 0:
            raise BadAddress(f"negative column index {index}")
        n = index + 1
        label = ""
        while n:
            n, rem = divmod(n - 1, 26)
            label = chr(65 + rem) + label
        _LABEL_OF[index] = label
    return label


def parse_a1(text: str) -> CellAddress:
    m = _A1_RE.fullmatch(text)
    if m is None:
        raise BadAddress(f"not a valid A1 cell reference: {text!r}")
    sheet, letters, digits = m.groups()
    return CellAddress(column_index(letters), int(digits) - 1, sheet)


def format_a1(addr: CellAddress) -> str:
    if addr.row < 0:
        raise BadAddress(f"negative row index {addr.row}")
    body = f"{column_label(addr.column)}{addr.row + 1}"
    sheet = addr.sheet
    if sheet is None:
        return body
    if not sheet or "!" in sheet:
        raise BadAddress(f"invalid sheet name {sheet!r}")
    return f"{sheet}!{body}"
