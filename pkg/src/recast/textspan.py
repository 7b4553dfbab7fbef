"""Deterministic word/punctuation tokenization with UTF-8 byte spans.

Attention weights and replacement edits are keyed to byte offsets into the
user's original text, so every span records exactly which bytes it covers.
Words are maximal alphanumeric runs; an apostrophe or hyphen stays inside a
word when flanked by alphanumerics on both sides ("don't", "well-known").
Every other non-whitespace character is its own punctuation span.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

__all__ = ["TokenSpan", "tokenize", "words_only"]

_JOINERS = {"'", "’", "-"}


@dataclass(frozen=True)
class TokenSpan:
    """One token: its exact source slice and UTF-8 byte range."""

    text: str
    byte_start: int
    byte_end: int  # exclusive
    kind: Literal["word", "punctuation"]


def tokenize(text: str) -> list[TokenSpan]:
    """Split ``text`` into word and punctuation spans; whitespace emits nothing."""
    spans: list[TokenSpan] = []
    chars = list(text)
    n = len(chars)
    # Per-character byte offsets, so spans can report UTF-8 byte ranges.
    offsets = [0] * (n + 1)
    for i, ch in enumerate(chars):
        offsets[i + 1] = offsets[i] + len(ch.encode("utf-8"))

    word_start: int | None = None

    def close_word(end_idx: int) -> None:
        nonlocal word_start
        if word_start is not None:
            spans.append(
                TokenSpan(
                    text="".join(chars[word_start:end_idx]),
                    byte_start=offsets[word_start],
                    byte_end=offsets[end_idx],
                    kind="word",
                )
            )
            word_start = None

    for i, ch in enumerate(chars):
        if ch.isspace():
            close_word(i)
        elif ch.isalnum():
            if word_start is None:
                word_start = i
        elif ch in _JOINERS and word_start is not None and i + 1 < n and chars[i + 1].isalnum():
            pass  # joiner stays inside the current word run
        else:
            close_word(i)
            spans.append(
                TokenSpan(text=ch, byte_start=offsets[i], byte_end=offsets[i + 1], kind="punctuation")
            )
    close_word(n)
    return spans


def words_only(spans: list[TokenSpan]) -> list[TokenSpan]:
    """The word subsequence of ``spans``; positions here define word indices."""
    return [s for s in spans if s.kind == "word"]
