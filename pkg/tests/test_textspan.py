import pytest
from hypothesis import given, strategies as st

from recast.textspan import TokenSpan, tokenize, words_only


def test_basic_sentence():
    spans = tokenize("You are idiotic.")
    assert spans == [
        TokenSpan("You", 0, 3, "word"),
        TokenSpan("are", 4, 7, "word"),
        TokenSpan("idiotic", 8, 15, "word"),
        TokenSpan(".", 15, 16, "punctuation"),
    ]


def test_whitespace_only():
    assert tokenize("  ") == []
    assert tokenize("") == []


def test_multibyte_and_apostrophe():
    spans = tokenize("naïve don't")
    assert spans == [
        TokenSpan("naïve", 0, 6, "word"),
        TokenSpan("don't", 7, 12, "word"),
    ]


def test_hyphenated_word_stays_single():
    spans = tokenize("well-known fact")
    assert [s.text for s in spans] == ["well-known", "fact"]


def test_trailing_joiner_is_punctuation():
    spans = tokenize("hey- there's")
    assert [(s.text, s.kind) for s in spans] == [
        ("hey", "word"),
        ("-", "punctuation"),
        ("there's", "word"),
    ]


def test_leading_apostrophe_is_punctuation():
    spans = tokenize("'tis fine")
    assert [(s.text, s.kind) for s in spans] == [
        ("'", "punctuation"),
        ("tis", "word"),
        ("fine", "word"),
    ]


def test_punctuation_run_splits_per_character():
    spans = tokenize("!!!")
    assert [s.kind for s in spans] == ["punctuation"] * 3
    assert [(s.byte_start, s.byte_end) for s in spans] == [(0, 1), (1, 2), (2, 3)]


def test_words_only():
    assert [s.text for s in words_only(tokenize("You are idiotic."))] == ["You", "are", "idiotic"]
    assert words_only(tokenize("!!!")) == []
    assert [s.text for s in words_only(tokenize("a b"))] == ["a", "b"]


text_strategy = st.text(
    alphabet=st.characters(codec="utf-8", exclude_categories=["Cs"]),
    max_size=60,
)


@given(text_strategy)
def test_spans_slice_back_to_their_text(text):
    raw = text.encode("utf-8")
    for span in tokenize(text):
        assert raw[span.byte_start : span.byte_end].decode("utf-8") == span.text


@given(text_strategy)
def test_coverage_partition(text):
    """Non-whitespace bytes lie in exactly one span; whitespace in none."""
    raw = text.encode("utf-8")
    covered = bytearray(len(raw))
    for span in tokenize(text):
        for i in range(span.byte_start, span.byte_end):
            covered[i] += 1
    pos = 0
    for ch in text:
        width = len(ch.encode("utf-8"))
        expected = 0 if ch.isspace() else 1
        for i in range(pos, pos + width):
            assert covered[i] == expected, (text, ch, i)
        pos += width


@given(text_strategy)
def test_spans_sorted_and_non_overlapping(text):
    spans = tokenize(text)
    prev_end = 0
    for span in spans:
        assert span.byte_start >= prev_end
        assert span.byte_start < span.byte_end
        prev_end = span.byte_end
    if spans:
        assert prev_end <= len(text.encode("utf-8"))


@given(text_strategy)
def test_deterministic(text):
    assert tokenize(text) == tokenize(text)
