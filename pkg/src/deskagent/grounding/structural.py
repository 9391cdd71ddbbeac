"""Structural grounding: A1-keyed cell writes, decoded without touching pixels.

The whole batch is parsed before anything is applied, so one bad key
aborts every write: callers apply the returned list atomically.
"""

from __future__ import annotations

from typing import Any, Mapping

from .a1 import CellAddress, parse_a1


def ground_structural(
    sheet_ref: tuple[str, str], cell_values: Mapping[str, Any]
) -> tuple[tuple[CellAddress, Any], ...]:
    """Decode ``{"A1": value, ...}`` into cell addresses for (app, sheet).

    Keys may carry their own ``Sheet!`` prefix, which overrides the sheet
    named in ``sheet_ref``.  Raises BadAddress on the first malformed key,
    leaving the caller's state untouched.
    """
    _, default_sheet = sheet_ref
    writes = []
    for key, value in cell_values.items():
        addr = parse_a1(key)
        if addr.sheet is None:
            addr = addr._replace(sheet=default_sheet)
        writes.append((addr, value))
    return tuple(writes)
