"""Word-embedding store: word2vec-format parsing and cosine k-NN queries.

The store keeps the raw 32-bit vectors exactly as parsed plus a row-normalized
copy used for similarity. All similarity arithmetic runs in 64-bit floats so
that neighbor rankings are reproducible across platforms; only storage is
32-bit. The store is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EmbeddingStore",
    "EmbeddingFormatError",
    "Neighbor",
    "cosine",
    "parse_word2vec_text",
    "parse_word2vec_binary",
    "write_word2vec_text",
    "write_word2vec_binary",
]


class EmbeddingFormatError(ValueError):
    """Malformed embedding file. Messages carry the 1-based line or entry."""


@dataclass(frozen=True)
class Neighbor:
    """One ranked nearest-neighbor result."""

    word: str
    similarity: float


@dataclass
class EmbeddingStore:
    """Vocabulary plus row-major embedding matrix with an L2-normalized copy.

    ``vectors`` holds the raw 32-bit values; ``unit_vectors`` is float64 with
    every row normalized to unit length (zero-norm rows are rejected at parse
    time, so normalization is total).
    """

    words: list[str]
    vectors: np.ndarray  # (vocab_size, dim) float32, raw
    unit_vectors: np.ndarray = field(init=False, repr=False)
    word_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be a 2-D matrix")
        if len(self.words) != self.vectors.shape[0]:
            raise ValueError("word count does not match vector rows")
        if self.vocab_size < 1 or self.dim < 1:
            raise ValueError("store needs at least one word and one dimension")
        self.word_index = {}
        for i, w in enumerate(self.words):
            if w in self.word_index:
                raise ValueError(f"duplicate word {w!r}")
            self.word_index[w] = i
        raw64 = self.vectors.astype(np.float64)
        norms = np.linalg.norm(raw64, axis=1)
        if np.any(norms == 0.0):
            bad = int(np.argmax(norms == 0.0))
            raise ValueError(f"zero-norm vector for word {self.words[bad]!r}")
        if not np.all(np.isfinite(raw64)):
            raise ValueError("non-finite vector component")
        self.unit_vectors = raw64 / norms[:, None]

    @property
    def vocab_size(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __contains__(self, word: str) -> bool:
        return word in self.word_index

    def lookup(self, word: str) -> np.ndarray | None:
        """Raw (unnormalized) vector for ``word``, or None. Case-sensitive."""
        i = self.word_index.get(word)
        return None if i is None else self.vectors[i]

    def nearest(self, query_word: str, k: int, exclude: set[str] | frozenset[str] = frozenset()) -> list[Neighbor]:
        """Up to ``k`` nearest words by cosine, descending.

        Exact full scan over the normalized matrix. Ties break by ascending
        word order; the query word and every excluded word are omitted.
        """
        qi = self.word_index.get(query_word)
        if qi is None:
            raise KeyError(f"word {query_word!r} not in vocabulary")
        if k <= 0:
            return []
        sims = self.unit_vectors @ self.unit_vectors[qi]
        np.clip(sims, -1.0, 1.0, out=sims)
        skip = {query_word} | set(exclude)
        candidates = [i for i, w in enumerate(self.words) if w not in skip]
        candidates.sort(key=lambda i: (-sims[i], self.words[i]))
        return [Neighbor(self.words[i], float(sims[i])) for i in candidates[:k]]


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in 64-bit arithmetic, clamped to [-1, 1]."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape[0]} vs {v.shape[0]}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for zero vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def _parse_header(line: bytes, what: str) -> tuple[int, int]:
    parts = line.decode("utf-8", errors="replace").split()
    if len(parts) != 2:
        raise EmbeddingFormatError(f"line 1: malformed {what} header {line!r}")
    try:
        vocab_size, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise EmbeddingFormatError(f"line 1: non-numeric {what} header {line!r}") from None
    if vocab_size < 1:
        raise EmbeddingFormatError(f"line 1: vocab_size must be >= 1, got {vocab_size}")
    if dim < 1:
        raise EmbeddingFormatError(f"line 1: dim must be >= 1, got {dim}")
    return vocab_size, dim


def _check_row(word: str, row: np.ndarray, where: str, seen: dict[str, int]) -> None:
    if word in seen:
        raise EmbeddingFormatError(f"{where}: duplicate word {word!r}")
    seen[word] = len(seen)
    if not np.all(np.isfinite(row)):
        raise EmbeddingFormatError(f"{where}: non-finite value for word {word!r}")
    if float(np.linalg.norm(row.astype(np.float64))) == 0.0:
        raise EmbeddingFormatError(f"{where}: zero-norm vector for word {word!r}")


def parse_word2vec_text(stream: io.IOBase | bytes) -> EmbeddingStore:
    """Parse the textual word2vec format: header line, then one word per line.

    Values become the nearest representable 32-bit floats. Errors name the
    offending 1-based line.
    """
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    header = stream.readline()
    vocab_size, dim = _parse_header(header.rstrip(b"\n"), "text")
    words: list[str] = []
    matrix = np.empty((vocab_size, dim), dtype=np.float32)
    seen: dict[str, int] = {}
    for row in range(vocab_size):
        lineno = row + 2
        line = stream.readline()
        if line == b"":
            raise EmbeddingFormatError(f"line {lineno}: expected {vocab_size} vector lines, stream ended")
        parts = line.decode("utf-8").split()
        if len(parts) != dim + 1:
            raise EmbeddingFormatError(
                f"line {lineno}: expected word + {dim} components, got {len(parts)} fields"
            )
        word = parts[0]
        try:
            vec = np.array([np.float32(p) for p in parts[1:]], dtype=np.float32)
        except ValueError:
            raise EmbeddingFormatError(f"line {lineno}: unparseable component") from None
        _check_row(word, vec, f"line {lineno}", seen)
        words.append(word)
        matrix[row] = vec
    trailing = stream.read()
    if trailing.strip():
        raise EmbeddingFormatError(f"line {vocab_size + 2}: trailing content after {vocab_size} vectors")
    return EmbeddingStore(words, matrix)


def parse_word2vec_binary(stream: io.IOBase | bytes) -> EmbeddingStore:
    """Parse the binary word2vec format.

    Header is an ASCII "<vocab_size> <dim>\\n" line; each entry is the word's
    bytes terminated by a single space, then dim little-endian float32 values,
    optionally followed by one newline. Errors name the 1-based entry.
    """
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    header = stream.readline()
    vocab_size, dim = _parse_header(header.rstrip(b"\n"), "binary")
    words: list[str] = []
    matrix = np.empty((vocab_size, dim), dtype=np.float32)
    seen: dict[str, int] = {}
    vec_bytes = 4 * dim
    for entry in range(1, vocab_size + 1):
        word_buf = bytearray()
        first = True
        while True:
            b = stream.read(1)
            if b == b"":
                raise EmbeddingFormatError(f"entry {entry}: stream ended while reading word")
            if first and b == b"\n":  # tolerate a newline left over from the previous entry
                first = False
                continue
            first = False
            if b == b" ":
                break
            word_buf += b
        if not word_buf:
            raise EmbeddingFormatError(f"entry {entry}: empty word")
        try:
            word = word_buf.decode("utf-8")
        except UnicodeDecodeError:
            raise EmbeddingFormatError(f"entry {entry}: word is not valid UTF-8") from None
        payload = stream.read(vec_bytes)
        if len(payload) != vec_bytes:
            raise EmbeddingFormatError(f"entry {entry}: stream ended mid-vector")
        vec = np.frombuffer(payload, dtype="<f4").astype(np.float32)
        _check_row(word, vec, f"entry {entry}", seen)
        words.append(word)
        matrix[entry - 1] = vec
    return EmbeddingStore(words, matrix)


def write_word2vec_text(store: EmbeddingStore) -> bytes:
    """Serialize to the text format with shortest round-tripping decimals."""
    out = io.BytesIO()
    out.write(f"{store.vocab_size} {store.dim}\n".encode("utf-8"))
    for word, row in zip(store.words, store.vectors):
        comps = " ".join(np.format_float_positional(np.float32(x), unique=True, trim="0") for x in row)
        out.write(f"{word} {comps}\n".encode("utf-8"))
    return out.getvalue()


def write_word2vec_binary(store: EmbeddingStore) -> bytes:
    """Serialize to the binary format (bit-exact 32-bit payload)."""
    out = io.BytesIO()
    out.write(f"{store.vocab_size} {store.dim}\n".encode("utf-8"))
    for word, row in zip(store.words, store.vectors):
        out.write(word.encode("utf-8"))
        out.write(b" ")
        out.write(struct.pack(f"<{store.dim}f", *row))
        out.write(b"\n")
    return out.getvalue()
