"""Bundled demo assets: a small synthetic embedding space and a pinned model.

The embedding space is generated deterministically. Each pejorative/partner
pair shares a random base direction; the pejorative leans toward a common
"toxic" direction and its partner leans away, so the pair stays mutually
nearest while remaining linearly separable for the classifier. Every word
used by the corpus templates, lexicons, and dialect sentences is in-vocabulary.

The generated file ships inside the package (data/demo_embeddings.txt); a test
keeps the bundle and the generator in sync.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .corpus import (
    DIALECT_SENTENCES,
    HOLDOUT_TEMPLATES,
    NEUTRAL_LEXICON,
    PEJORATIVE_PARTNERS,
    TRAIN_TEMPLATES,
    gen_corpus,
)
from .embeddings import EmbeddingStore, parse_word2vec_text, write_word2vec_text
from .model import ModelConfig, ModelParams
from .textspan import tokenize, words_only
from .training import EpochStats, TrainHyper, train

__all__ = [
    "DEMO_EMBEDDING_SEED",
    "DEMO_EMBEDDING_DIM",
    "DEMO_CORPUS_SEED",
    "DEMO_CORPUS_SIZE",
    "DEMO_MODEL_SEED",
    "build_demo_embeddings",
    "load_demo_store",
    "demo_config",
    "train_demo_model",
]

DEMO_EMBEDDING_SEED = 20240901
DEMO_EMBEDDING_DIM = 32
DEMO_CORPUS_SEED = 7
DEMO_CORPUS_SIZE = 2000
DEMO_MODEL_SEED = 42

_TOXIC_LEAN = 0.35
_PAIR_NOISE = 0.03

_EXTRA_WORDS = (
    "song", "movie", "plan", "review", "argument", "story", "design",
    "message", "reply", "channel", "forum", "essay", "joke", "photo",
    "bright", "quiet", "modern", "classic", "formal", "casual", "gentle",
    "bold", "sharp", "soft", "warm", "cold", "quick", "slow", "early",
    "late", "open", "friendly", "honest", "patient", "polite", "serious",
    "funny", "clever", "simple", "long", "short", "new", "old",
)


def _template_words() -> list[str]:
    words: list[str] = []
    for sentence in (
        [t.replace("{w}", " ") for t in TRAIN_TEMPLATES + HOLDOUT_TEMPLATES]
        + list(DIALECT_SENTENCES)
    ):
        words.extend(s.text for s in words_only(tokenize(sentence)))
    return words


def demo_vocabulary() -> list[str]:
    """All demo words in a fixed order, deduplicated."""
    ordered: list[str] = []
    seen: set[str] = set()
    for word in (
        list(PEJORATIVE_PARTNERS)
        + list(NEUTRAL_LEXICON)
        + _template_words()
        + list(_EXTRA_WORDS)
    ):
        if word not in seen:
            seen.add(word)
            ordered.append(word)
    return ordered


def build_demo_embeddings(seed: int = DEMO_EMBEDDING_SEED) -> EmbeddingStore:
    """Deterministically generate the demo embedding store."""
    rng = np.random.Generator(np.random.PCG64(seed))
    words = demo_vocabulary()
    dim = DEMO_EMBEDDING_DIM

    def unit(v: np.ndarray) -> np.ndarray:
        return v / np.linalg.norm(v)

    toxic_dir = unit(rng.standard_normal(dim))
    vectors = np.empty((len(words), dim), dtype=np.float32)
    index = {w: i for i, w in enumerate(words)}

    def without_toxic(v: np.ndarray) -> np.ndarray:
        return v - (v @ toxic_dir) * toxic_dir

    paired: set[str] = set()
    for pejorative, partner in PEJORATIVE_PARTNERS.items():
        base = without_toxic(unit(rng.standard_normal(dim)))
        noise_a = rng.standard_normal(dim)
        noise_b = rng.standard_normal(dim)
        vectors[index[pejorative]] = (base + _TOXIC_LEAN * toxic_dir + _PAIR_NOISE * noise_a).astype(
            np.float32
        )
        vectors[index[partner]] = (base - _TOXIC_LEAN * toxic_dir + _PAIR_NOISE * noise_b).astype(
            np.float32
        )
        paired.update((pejorative, partner))
    for word in words:
        if word not in paired:
            # Context and filler words carry no toxicity signal of their own.
            vectors[index[word]] = unit(without_toxic(rng.standard_normal(dim))).astype(np.float32)
    return EmbeddingStore(words, vectors)


def load_demo_store() -> EmbeddingStore:
    """Parse the embedding file bundled with the package."""
    data = resources.files("recast").joinpath("data/demo_embeddings.txt").read_bytes()
    return parse_word2vec_text(data)


def write_demo_embedding_file(path: str) -> None:
    with open(path, "wb") as f:
        f.write(write_word2vec_text(build_demo_embeddings()))


def demo_config(store: EmbeddingStore, seed: int = DEMO_MODEL_SEED) -> ModelConfig:
    return ModelConfig(embedding_dim=store.dim, seed=seed)


def train_demo_model(
    store: EmbeddingStore | None = None,
) -> tuple[ModelParams, list[EpochStats]]:
    """Train the pinned demo model: fixed seeds, default hyperparameters."""
    if store is None:
        store = load_demo_store()
    corpus = gen_corpus(DEMO_CORPUS_SEED, DEMO_CORPUS_SIZE)
    return train(demo_config(store), store, corpus, TrainHyper())
