"""Swap-or-delete alternative wordings with counterfactual scores.

Candidates for a chosen word are its embedding-space nearest neighbors, each
applied to the text and re-scored by the classifier so the caller can preview
the effect of the edit. Candidates are never filtered by whether they lower
the score: surfacing model idiosyncrasies is the point.
"""

from __future__ import annotations

from dataclasses import dataclass

from .embeddings import EmbeddingStore
from .model import ModelParams, score
from .textspan import tokenize, words_only

__all__ = ["DELETE", "AlternativeCandidate", "apply_edit", "suggest"]


class _DeleteMarker:
    """Singleton marking the delete edit (no replacement string)."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "DELETE"


DELETE = _DeleteMarker()


@dataclass(frozen=True)
class AlternativeCandidate:
    replacement: str | _DeleteMarker
    similarity: float | None  # None iff delete
    resulting_text: str
    score: int
    probability: float

    @property
    def is_delete(self) -> bool:
        return self.replacement is DELETE


def apply_edit(text: str, word_index: int, replacement: str | _DeleteMarker) -> str:
    """Swap or delete the word at ``word_index``.

    Swaps replace exactly the word's bytes and transfer leading
    capitalization; deletes also remove one adjacent whitespace run (the
    following one when present, else the preceding) so no doubled spaces
    remain.
    """
    words = words_only(tokenize(text))
    if not 0 <= word_index < len(words):
        raise IndexError(f"word_index {word_index} out of range for {len(words)} words")
    target = words[word_index]
    raw = text.encode("utf-8")
    start_c = len(raw[: target.byte_start].decode("utf-8"))
    end_c = start_c + len(target.text)

    if replacement is DELETE:
        i, j = start_c, end_c
        if j < len(text) and text[j].isspace():
            while j < len(text) and text[j].isspace():
                j += 1
        else:
            while i > 0 and text[i - 1].isspace():
                i -= 1
        return text[:i] + text[j:]

    if not isinstance(replacement, str) or not replacement:
        raise ValueError("replacement must be a non-empty string")
    if target.text[0].isupper():
        replacement = replacement[0].upper() + replacement[1:]
    return text[:start_c] + replacement + text[end_c:]


def suggest(
    params: ModelParams,
    store: EmbeddingStore,
    text: str,
    word_index: int,
    k: int,
) -> list[AlternativeCandidate]:
    """Up to ``k`` neighbor swaps for the chosen word, plus the delete edit.

    The target word is looked up exactly, then lowercased; an out-of-vocabulary
    target yields only the delete candidate. Swap candidates are ordered by
    descending similarity (ties by word), deduplicated case-insensitively, and
    never equal to the target ignoring case. The delete candidate comes last
    and is omitted for single-word texts, whose deletion would leave nothing
    to score.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    score(params, store, text)  # validates the text the same way the caller saw it scored
    words = words_only(tokenize(text))
    if not 0 <= word_index < len(words):
        raise IndexError(f"word_index {word_index} out of range for {len(words)} words")
    target = words[word_index].text

    query = None
    if target in store:
        query = target
    elif target.lower() in store:
        query = target.lower()

    candidates: list[AlternativeCandidate] = []
    if query is not None:
        seen = {target.lower()}
        for neighbor in store.nearest(query, store.vocab_size):
            low = neighbor.word.lower()
            if low in seen:
                continue
            seen.add(low)
            resulting = apply_edit(text, word_index, neighbor.word)
            result = score(params, store, resulting)
            candidates.append(
                AlternativeCandidate(
                    replacement=neighbor.word,
                    similarity=neighbor.similarity,
                    resulting_text=resulting,
                    score=result.score,
                    probability=result.probability,
                )
            )
            if len(candidates) == k:
                break
    if len(words) > 1:
        resulting = apply_edit(text, word_index, DELETE)
        result = score(params, store, resulting)
        candidates.append(
            AlternativeCandidate(
                replacement=DELETE,
                similarity=None,
                resulting_text=resulting,
                score=result.score,
                probability=result.probability,
            )
        )
    return candidates
