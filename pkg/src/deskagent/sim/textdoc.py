"""Text documents with character-level pixel layout.

Layout is monospace: every character, whitespace included, gets a box, so
concatenating tokens in reading order reproduces the document string
exactly and the rendered character grid round-trips back to it.  Newlines
get zero-width boxes at the end of their line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

CHAR_W = 9
LINE_H = 18

# Words, runs of intra-line whitespace, and single newlines.
_TOKEN_RE = re.compile(r"\S+|[^\S\n]+|\n")


@dataclass(frozen=True)
class CharBox:
    ch: str
    x: int
    y: int
    w: int
    h: int


@dataclass(frozen=True)
class TextToken:
    text: str
    chars: tuple[CharBox, ...]
    styles: frozenset[str] = frozenset()

    @property
    def is_word(self) -> bool:
        return not self.text[0].isspace()


@dataclass(frozen=True)
class TextDocument:
    tokens: tuple[TextToken, ...]
    origin: tuple[int, int] = (0, 0)

    @property
    def text(self) -> str:
        return "".join(t.text for t in self.tokens)

    def words(self) -> list[TextToken]:
        return [t for t in self.tokens if t.is_word]

    def restyle(self, styles_by_index: dict[int, frozenset[str]]) -> "TextDocument":
        """Return a copy with the given token indexes restyled."""
        tokens = tuple(
            replace(t, styles=styles_by_index.get(i, t.styles))
            for i, t in enumerate(self.tokens)
        )
        return replace(self, tokens=tokens)


def layout_document(text: str, origin: tuple[int, int] = (0, 0)) -> TextDocument:
    """Lay a source string out into boxed tokens at ``origin``."""
    x0, y0 = origin
    line = 0
    col = 0
    tokens = []
    for raw in _TOKEN_RE.findall(text):
        chars = []
        for ch in raw:
            if ch == "\n":
                chars.append(CharBox("\n", x0 + col * CHAR_W, y0 + line * LINE_H, 0, LINE_H))
                line += 1
                col = 0
            else:
                chars.append(CharBox(ch, x0 + col * CHAR_W, y0 + line * LINE_H, CHAR_W, LINE_H))
                col += 1
        tokens.append(TextToken(raw, tuple(chars)))
    return TextDocument(tuple(tokens), origin)
