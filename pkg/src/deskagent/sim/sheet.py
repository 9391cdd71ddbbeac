"""Sparse spreadsheets with mutable row/column geometry.

Cell storage and geometry are independent maps: stretching a column moves
pixels around but can never alter a stored value.  Formula strings (values
beginning with ``=``) are stored verbatim and never evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Iterable

from ..errors import UnknownSheet
from ..grounding.a1 import CellAddress

DEFAULT_COL_W = 90
DEFAULT_ROW_H = 22

CellValue = Any  # str | int | float


@dataclass(frozen=True)
class Spreadsheet:
    # sheet name -> {(row, col): value}; absent cells read as empty
    sheets: dict[str, dict[tuple[int, int], CellValue]]
    active: str
    origin: tuple[int, int] = (0, 0)
    col_widths: dict[int, int] = field(default_factory=dict)
    row_heights: dict[int, int] = field(default_factory=dict)

    def get(self, sheet: str, row: int, col: int) -> CellValue | None:
        try:
            cells = self.sheets[sheet]
        except KeyError:
            raise UnknownSheet(f"no sheet named {sheet!r}") from None
        return cells.get((row, col))

    def with_writes(
        self, sheet: str, writes: Iterable[tuple[CellAddress, CellValue]]
    ) -> "Spreadsheet":
        """Apply a batch of cell writes atomically; empty values delete."""
        if sheet not in self.sheets:
            raise UnknownSheet(f"no sheet named {sheet!r}")
        new_sheets = {name: dict(cells) for name, cells in self.sheets.items()}
        for addr, value in writes:
            target = addr.sheet or sheet
            if target not in new_sheets:
                raise UnknownSheet(f"no sheet named {target!r}")
            key = (addr.row, addr.column)
            if value == "" or value is None:
                new_sheets[target].pop(key, None)
            else:
                new_sheets[target][key] = value
        return replace(self, sheets=new_sheets)

    def with_col_width(self, col: int, width: int) -> "Spreadsheet":
        widths = dict(self.col_widths)
        widths[col] = width
        return replace(self, col_widths=widths)

    def with_row_height(self, row: int, height: int) -> "Spreadsheet":
        heights = dict(self.row_heights)
        heights[row] = height
        return replace(self, row_heights=heights)

    def col_width(self, col: int) -> int:
        return self.col_widths.get(col, DEFAULT_COL_W)

    def row_height(self, row: int) -> int:
        return self.row_heights.get(row, DEFAULT_ROW_H)

    def col_x(self, col: int) -> int:
        return self.origin[0] + sum(self.col_width(c) for c in range(col))

    def row_y(self, row: int, first_visible_row: int = 0) -> int:
        return self.origin[1] + sum(
            self.row_height(r) for r in range(first_visible_row, row)
        )
