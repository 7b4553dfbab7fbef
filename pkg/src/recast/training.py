"""Mini-batch gradient-descent training and gradient verification.

Gradients are accumulated by reverse-mode differentiation through the exact
forward arithmetic in float64. Training uses plain gradient descent with a
fixed learning rate and no optimizer state, so a (seed, config, corpus,
hyperparameter) tuple fully determines the trained parameters bit for bit.
Embedding store rows are frozen; only the unknown-word vector, the input
projection, and the encoder/head tensors learn.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingStore
from .corpus import TrainExample
from .model import (
    ModelConfig,
    ModelParams,
    _forward_cache,
    embed_words,
    init,
)
from .textspan import tokenize, words_only

__all__ = [
    "TrainHyper",
    "EpochStats",
    "TrainingError",
    "CorpusFormatError",
    "GradCheckReport",
    "train",
    "grad_check",
    "compare_gradients",
    "example_loss",
    "backward",
    "read_corpus",
    "write_corpus",
]


class TrainingError(RuntimeError):
    """Training diverged or received unusable data."""


class CorpusFormatError(ValueError):
    """Malformed JSON Lines corpus. Messages carry the 1-based line."""


@dataclass(frozen=True)
class TrainHyper:
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 0.5


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    accuracy: float


def _bce_from_logit(z: float, y: int) -> float:
    # log(1 + e^z) - y*z, computed stably
    return max(z, 0.0) + math.log1p(math.exp(-abs(z))) - y * z


def backward(params: ModelParams, cache: dict, label: int, unk_mask: np.ndarray):
    """Loss and gradients for one example given its forward cache."""
    cfg = params.config
    x0, x2 = cache["x0"], cache["x2"]
    n_rows = x0.shape[0]

    loss = _bce_from_logit(cache["z"], label)
    dz = cache["p"] - label

    g = {name: np.zeros_like(t) for name, t in params.tensors()}
    g["w_out"] = dz * x2[0]
    g["b_out"] = np.array([dz])
    d_x2 = np.zeros_like(x2)
    d_x2[0] = dz * params.w_out

    def ln_backward(d_out, x_hat, inv_std, gain):
        d_hat = d_out * gain
        return inv_std * (
            d_hat
            - d_hat.mean(axis=1, keepdims=True)
            - x_hat * (d_hat * x_hat).mean(axis=1, keepdims=True)
        )

    g["ln2_gain"] = (d_x2 * cache["x2_hat"]).sum(axis=0)
    g["ln2_bias"] = d_x2.sum(axis=0)
    d_r2 = ln_backward(d_x2, cache["x2_hat"], cache["inv2"], params.ln2_gain)

    d_x1 = d_r2.copy()
    d_f = d_r2
    g["ffn_w2"] = cache["relu"].T @ d_f
    g["ffn_b2"] = d_f.sum(axis=0)
    d_u = (d_f @ params.ffn_w2.T) * (cache["u"] > 0.0)
    g["ffn_w1"] = cache["x1"].T @ d_u
    g["ffn_b1"] = d_u.sum(axis=0)
    d_x1 += d_u @ params.ffn_w1.T

    g["ln1_gain"] = (d_x1 * cache["x1_hat"]).sum(axis=0)
    g["ln1_bias"] = d_x1.sum(axis=0)
    d_r1 = ln_backward(d_x1, cache["x1_hat"], cache["inv1"], params.ln1_gain)

    d_x0 = d_r1.copy()
    d_m = d_r1
    g["w_o"] = cache["concat"].T @ d_m
    d_concat = d_m @ params.w_o.T

    scale = 1.0 / math.sqrt(cfg.head_dim)
    dk = cfg.head_dim
    for h in range(cfg.num_heads):
        q, k, v, a = cache["qs"][h], cache["ks"][h], cache["vs"][h], cache["atts"][h]
        d_head = d_concat[:, h * dk : (h + 1) * dk]
        d_a = d_head @ v.T
        d_v = a.T @ d_head
        d_s = a * (d_a - (d_a * a).sum(axis=1, keepdims=True))
        d_q = (d_s @ k) * scale
        d_k = (d_s.T @ q) * scale
        g["w_q"][h] = x0.T @ d_q
        g["w_k"][h] = x0.T @ d_k
        g["w_v"][h] = x0.T @ d_v
        d_x0 += d_q @ params.w_q[h].T + d_k @ params.w_k[h].T + d_v @ params.w_v[h].T

    g["positional"][:n_rows] = d_x0
    g["cls_vector"] = d_x0[0]
    d_proj = d_x0[1:]
    g["input_projection"] = cache["emb"].T @ d_proj
    if unk_mask.any():
        d_emb = d_proj @ params.input_projection.T
        g["unk_vector"] = d_emb[unk_mask].sum(axis=0)
    return loss, g


def _word_texts(text: str, max_len: int) -> list[str]:
    return [s.text for s in words_only(tokenize(text))][:max_len]


def example_loss(params: ModelParams, store: EmbeddingStore, texts: list[str], label: int) -> float:
    """BCE loss of one pre-tokenized example under the current parameters."""
    emb, _ = embed_words(params, store, texts)
    return _bce_from_logit(_forward_cache(params, emb)["z"], label)


def train(
    config: ModelConfig,
    store: EmbeddingStore,
    corpus: list[TrainExample],
    hyper: TrainHyper = TrainHyper(),
) -> tuple[ModelParams, list[EpochStats]]:
    """Minimize mean binary cross-entropy over the corpus.

    Per-epoch shuffling is a pure function of (config.seed, epoch index).
    Returned history carries the running training loss/accuracy of each epoch.
    """
    if not corpus:
        raise ValueError("corpus is empty")
    prepared = []
    for i, ex in enumerate(corpus):
        if ex.label not in (0, 1):
            raise ValueError(f"example {i}: label must be 0 or 1, got {ex.label!r}")
        texts = _word_texts(ex.text, config.max_len)
        if not texts:
            raise ValueError(f"example {i}: no word tokens in {ex.text!r}")
        prepared.append((texts, ex.label))

    params = init(config, store)
    # Resolve in-vocab embeddings once; unknown rows are refreshed every pass
    # because the unknown vector itself learns.
    resolved = []
    for texts, label in prepared:
        emb, unk_mask = embed_words(params, store, texts)
        emb[unk_mask] = 0.0
        resolved.append((emb, unk_mask, label))

    history: list[EpochStats] = []
    n = len(resolved)
    seed_u64 = config.seed & (2**64 - 1)
    for epoch in range(hyper.epochs):
        order = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([seed_u64, epoch]))
        ).permutation(n)
        loss_sum = 0.0
        correct = 0
        for batch_index, start in enumerate(range(0, n, hyper.batch_size)):
            batch = order[start : start + hyper.batch_size]
            acc = {name: np.zeros_like(t) for name, t in params.tensors()}
            batch_loss = 0.0
            for idx in batch:
                base, unk_mask, label = resolved[idx]
                emb = base.copy()
                emb[unk_mask] = params.unk_vector
                cache = _forward_cache(params, emb)
                loss, grads = backward(params, cache, label, unk_mask)
                batch_loss += loss
                correct += (cache["p"] >= 0.5) == bool(label)
                for name in acc:
                    acc[name] += grads[name]
            if not math.isfinite(batch_loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}, batch {batch_index}")
            loss_sum += batch_loss
            if hyper.learning_rate != 0.0:
                step = hyper.learning_rate / len(batch)
                for name, tensor in params.tensors():
                    tensor -= step * acc[name]
        history.append(EpochStats(epoch, loss_sum / n, correct / n))
    return params, history


@dataclass(frozen=True)
class GradCheckReport:
    """Per-tensor agreement between analytic and finite-difference gradients."""

    relative_errors: dict[str, float]
    max_relative_error: float
    worst_tensor: str
    tolerance: float
    passed: bool


def compare_gradients(
    params: ModelParams,
    store: EmbeddingStore,
    example: TrainExample,
    grads: dict[str, np.ndarray],
    tolerance: float,
    step: float = 1e-5,
) -> GradCheckReport:
    """Check ``grads`` against central finite differences of the loss.

    The per-tensor relative error is ||a - n|| / max(||a|| + ||n||, 1e-12);
    the report's max is taken over all parameter tensors.
    """
    texts = _word_texts(example.text, params.config.max_len)
    errors: dict[str, float] = {}
    for name, tensor in params.tensors():
        numeric = np.zeros_like(tensor)
        flat_t = tensor.reshape(-1)
        flat_n = numeric.reshape(-1)
        for i in range(flat_t.size):
            orig = flat_t[i]
            flat_t[i] = orig + step
            plus = example_loss(params, store, texts, example.label)
            flat_t[i] = orig - step
            minus = example_loss(params, store, texts, example.label)
            flat_t[i] = orig
            flat_n[i] = (plus - minus) / (2.0 * step)
        diff = float(np.linalg.norm(grads[name] - numeric))
        denom = max(float(np.linalg.norm(grads[name])) + float(np.linalg.norm(numeric)), 1e-12)
        errors[name] = diff / denom
    worst = max(errors, key=errors.__getitem__)
    max_err = errors[worst]
    return GradCheckReport(
        relative_errors=errors,
        max_relative_error=max_err,
        worst_tensor=worst,
        tolerance=tolerance,
        passed=max_err <= tolerance,
    )


def grad_check(
    config: ModelConfig,
    store: EmbeddingStore,
    example: TrainExample,
    tolerance: float,
    step: float = 1e-5,
) -> GradCheckReport:
    """Verify the analytic gradients of a fresh model on one example."""
    params = init(config, store)
    texts = _word_texts(example.text, config.max_len)
    if not texts:
        raise ValueError("example has no word tokens")
    emb, unk_mask = embed_words(params, store, texts)
    _, grads = backward(params, _forward_cache(params, emb), example.label, unk_mask)
    return compare_gradients(params, store, example, grads, tolerance, step)


def read_corpus(data: bytes | str) -> list[TrainExample]:
    """Parse a JSON Lines corpus: one {"text": ..., "label": 0|1} per line."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    examples: list[TrainExample] = []
    for lineno, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict) or not isinstance(obj.get("text"), str):
            raise CorpusFormatError(f'line {lineno}: expected {{"text": str, "label": 0|1}}')
        if obj.get("label") not in (0, 1):
            raise CorpusFormatError(f"line {lineno}: label must be 0 or 1")
        examples.append(TrainExample(obj["text"], obj["label"]))
    return examples


def write_corpus(examples: list[TrainExample]) -> bytes:
    lines = [json.dumps({"text": ex.text, "label": ex.label}) for ex in examples]
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""
