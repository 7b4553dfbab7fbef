"""Synthetic desk-scale training corpus.

Sentences come from shared templates whose single slot is filled from either
a pejorative lexicon (label 1) or a neutral one (label 0), so the slot word is
the only class signal. A small casual-dialect subset (all non-toxic) is mixed
into the negative half for bias-audit demos. A disjoint set of holdout
templates exists for evaluation; ``gen_corpus`` never draws from it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

__all__ = [
    "TrainExample",
    "PEJORATIVE_LEXICON",
    "NEUTRAL_LEXICON",
    "PEJORATIVE_PARTNERS",
    "TRAIN_TEMPLATES",
    "HOLDOUT_TEMPLATES",
    "DIALECT_SENTENCES",
    "gen_corpus",
    "holdout_toxic",
]


@dataclass(frozen=True)
class TrainExample:
    text: str
    label: int  # 0 non-toxic, 1 toxic


# Each pejorative is paired with a milder near-synonym; the demo embedding
# space places each pair close together so the partner is the top suggestion.
PEJORATIVE_PARTNERS: dict[str, str] = {
    "idiotic": "nonsensical",
    "stupid": "silly",
    "moronic": "confusing",
    "pathetic": "underwhelming",
    "dumb": "simplistic",
    "worthless": "unhelpful",
    "disgusting": "unpleasant",
    "vile": "harsh",
    "trash": "mediocre",
    "garbage": "cluttered",
    "clueless": "uninformed",
    "brainless": "careless",
    "obnoxious": "grating",
    "despicable": "questionable",
}

PEJORATIVE_LEXICON: tuple[str, ...] = tuple(PEJORATIVE_PARTNERS)

NEUTRAL_LEXICON: tuple[str, ...] = tuple(PEJORATIVE_PARTNERS.values()) + (
    "thoughtful",
    "sensible",
    "reasonable",
    "interesting",
    "creative",
    "detailed",
    "helpful",
    "balanced",
    "ordinary",
    "subtle",
    "surprising",
    "curious",
    "plain",
    "concise",
)

TRAIN_TEMPLATES: tuple[str, ...] = (
    "you are {w}",
    "this is a {w} video",
    "what a {w} idea",
    "that was a {w} move",
    "your comment is {w}",
    "i think this is {w}",
    "honestly such a {w} take",
    "the post seems {w} to me",
)

# Reserved for evaluation; gen_corpus never uses these.
HOLDOUT_TEMPLATES: tuple[str, ...] = (
    "my feed is full of {w} replies",
    "reading this {w} thread again",
    "nobody asked for this {w} remark",
    "we got another {w} opinion here",
)

# Casual-dialect sentences, all non-toxic, for auditing dialect bias.
DIALECT_SENTENCES: tuple[str, ...] = (
    "this song go hard fr",
    "we finna watch the game tonight",
    "that fit is dope no cap",
    "he stay winning every time",
    "my folks be cooking all weekend",
    "this show lowkey fire",
)


def gen_corpus(seed: int, n: int) -> list[TrainExample]:
    """``n`` deterministic examples, toxic/non-toxic balanced within one.

    The non-toxic half includes a small dialect-flavored subset (roughly 5%,
    at least one sentence).
    """
    if n < 2:
        raise ValueError(f"corpus size must be >= 2, got {n}")
    rng = random.Random(seed)
    n_toxic = n // 2
    n_clean = n - n_toxic
    n_dialect = min(n_clean, max(1, n_clean // 20))

    examples: list[TrainExample] = []
    for _ in range(n_toxic):
        template = rng.choice(TRAIN_TEMPLATES)
        examples.append(TrainExample(template.format(w=rng.choice(PEJORATIVE_LEXICON)), 1))
    for _ in range(n_clean - n_dialect):
        template = rng.choice(TRAIN_TEMPLATES)
        examples.append(TrainExample(template.format(w=rng.choice(NEUTRAL_LEXICON)), 0))
    for _ in range(n_dialect):
        examples.append(TrainExample(rng.choice(DIALECT_SENTENCES), 0))
    rng.shuffle(examples)
    return examples


def holdout_toxic(seed: int, count: int) -> list[str]:
    """Distinct toxic sentences built only from the holdout templates."""
    combos = [t.format(w=w) for t in HOLDOUT_TEMPLATES for w in PEJORATIVE_LEXICON]
    if count > len(combos):
        raise ValueError(f"only {len(combos)} distinct holdout sentences exist")
    random.Random(seed).shuffle(combos)
    return combos[:count]
