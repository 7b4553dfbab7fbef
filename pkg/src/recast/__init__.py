"""Toxicity-audit engine: attention-scored classification, per-word
explanations, counterfactual rewording, and error flagging."""

from .alternatives import DELETE, AlternativeCandidate, apply_edit, suggest
from .corpus import TrainExample, gen_corpus
from .embeddings import (
    EmbeddingFormatError,
    EmbeddingStore,
    Neighbor,
    cosine,
    parse_word2vec_binary,
    parse_word2vec_text,
)
from .model import (
    EmptyTextError,
    ModelConfig,
    ModelFormatError,
    ModelParams,
    NoWordsError,
    ScoreResult,
    forward,
    init,
    load_model,
    model_version,
    save_model,
    score,
)
from .textspan import TokenSpan, tokenize, words_only
from .training import (
    CorpusFormatError,
    EpochStats,
    GradCheckReport,
    TrainHyper,
    TrainingError,
    grad_check,
    read_corpus,
    train,
    write_corpus,
)

__version__ = "0.1.0"
