"""One-layer self-attention binary classifier with word-level explanations.

Architecture: frozen word embeddings -> learned input projection -> CLS token
prepended -> learned positional rows -> one post-norm encoder layer (multi-head
attention, residual, layer norm, ReLU FFN, residual, layer norm) -> logistic
head on the CLS position. The mean over heads of the CLS-query attention row,
renormalized over word positions, is the per-word explanation.

All arithmetic runs in float64; model files store tensors as little-endian
float32. File layout (after the magic "RCST" and u32 format version) is the
config block (model_dim, num_heads, ffn_dim, max_len, embedding_dim as u32,
seed as i64) followed by the tensors in the order listed by
``ModelParams.tensor_names``.
"""

from __future__ import annotations

import hashlib
import io
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingStore
from .textspan import TokenSpan, tokenize, words_only

__all__ = [
    "ModelConfig",
    "ModelParams",
    "ScoreResult",
    "EmptyTextError",
    "NoWordsError",
    "ModelFormatError",
    "init",
    "forward",
    "score",
    "save_model",
    "load_model",
    "model_version",
    "MAGIC",
    "FORMAT_VERSION",
]

MAGIC = b"RCST"
FORMAT_VERSION = 1
_LN_EPS = 1e-5


class EmptyTextError(ValueError):
    """Input is empty or whitespace-only."""


class NoWordsError(ValueError):
    """Input tokenizes to punctuation only, with no word spans."""


class ModelFormatError(ValueError):
    """Malformed or incompatible model file."""


@dataclass(frozen=True)
class ModelConfig:
    embedding_dim: int
    seed: int
    model_dim: int = 32
    num_heads: int = 2
    ffn_dim: int = 64
    max_len: int = 64

    def __post_init__(self) -> None:
        for name in ("embedding_dim", "model_dim", "num_heads", "ffn_dim", "max_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.model_dim % self.num_heads != 0:
            raise ValueError(
                f"model_dim {self.model_dim} not divisible by num_heads {self.num_heads}"
            )

    @property
    def head_dim(self) -> int:
        return self.model_dim // self.num_heads


@dataclass
class ModelParams:
    """All learnable tensors, kept as float64 arrays."""

    config: ModelConfig
    input_projection: np.ndarray  # (embedding_dim, model_dim)
    cls_vector: np.ndarray  # (model_dim,)
    positional: np.ndarray  # (max_len + 1, model_dim)
    w_q: np.ndarray  # (num_heads, model_dim, head_dim)
    w_k: np.ndarray
    w_v: np.ndarray
    w_o: np.ndarray  # (model_dim, model_dim)
    ln1_gain: np.ndarray
    ln1_bias: np.ndarray
    ffn_w1: np.ndarray  # (model_dim, ffn_dim)
    ffn_b1: np.ndarray
    ffn_w2: np.ndarray  # (ffn_dim, model_dim)
    ffn_b2: np.ndarray
    ln2_gain: np.ndarray
    ln2_bias: np.ndarray
    w_out: np.ndarray  # (model_dim,)
    b_out: np.ndarray  # (1,)
    unk_vector: np.ndarray  # (embedding_dim,)
    version: int = FORMAT_VERSION

    # Serialization and gradient bookkeeping both follow this order.
    tensor_names = (
        "input_projection",
        "cls_vector",
        "positional",
        "w_q",
        "w_k",
        "w_v",
        "w_o",
        "ln1_gain",
        "ln1_bias",
        "ffn_w1",
        "ffn_b1",
        "ffn_w2",
        "ffn_b2",
        "ln2_gain",
        "ln2_bias",
        "w_out",
        "b_out",
        "unk_vector",
    )

    def tensors(self) -> list[tuple[str, np.ndarray]]:
        return [(name, getattr(self, name)) for name in self.tensor_names]


def _xavier(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    if len(shape) == 1:
        fan_in, fan_out = 1, shape[0]
    else:
        fan_in, fan_out = shape[-2], shape[-1]
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init(config: ModelConfig, store: EmbeddingStore) -> ModelParams:
    """Fresh parameters, fully determined by (config, store dimensions)."""
    if config.embedding_dim != store.dim:
        raise ValueError(
            f"config embedding_dim {config.embedding_dim} does not match store dim {store.dim}"
        )
    rng = np.random.Generator(np.random.PCG64(config.seed & (2**64 - 1)))
    e, d, h, dk, f = (
        config.embedding_dim,
        config.model_dim,
        config.num_heads,
        config.head_dim,
        config.ffn_dim,
    )
    return ModelParams(
        config=config,
        input_projection=_xavier(rng, (e, d)),
        cls_vector=_xavier(rng, (d,)),
        positional=_xavier(rng, (config.max_len + 1, d)),
        w_q=_xavier(rng, (h, d, dk)),
        w_k=_xavier(rng, (h, d, dk)),
        w_v=_xavier(rng, (h, d, dk)),
        w_o=_xavier(rng, (d, d)),
        ln1_gain=np.ones(d),
        ln1_bias=np.zeros(d),
        ffn_w1=_xavier(rng, (d, f)),
        ffn_b1=np.zeros(f),
        ffn_w2=_xavier(rng, (f, d)),
        ffn_b2=np.zeros(d),
        ln2_gain=np.ones(d),
        ln2_bias=np.zeros(d),
        w_out=_xavier(rng, (d,)),
        b_out=np.zeros(1),
        unk_vector=_xavier(rng, (e,)),
    )


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def _softmax_rows(s: np.ndarray) -> np.ndarray:
    shifted = s - s.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _layer_norm(x: np.ndarray, gain: np.ndarray, bias: np.ndarray):
    mean = x.mean(axis=1, keepdims=True)
    var = x.var(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + _LN_EPS)
    x_hat = (x - mean) * inv_std
    return x_hat * gain + bias, x_hat, inv_std


def embed_words(params: ModelParams, store: EmbeddingStore, texts: list[str]):
    """Embedding matrix for the given word texts plus the OOV mask.

    Lookup is exact string first, then lowercase, else the learned unknown
    vector. Store rows are frozen; only the unknown vector is learnable.
    """
    mat = np.empty((len(texts), store.dim))
    unk_mask = np.zeros(len(texts), dtype=bool)
    for i, text in enumerate(texts):
        vec = store.lookup(text)
        if vec is None:
            vec = store.lookup(text.lower())
        if vec is None:
            mat[i] = params.unk_vector
            unk_mask[i] = True
        else:
            mat[i] = vec.astype(np.float64)
    return mat, unk_mask


def _forward_cache(params: ModelParams, emb: np.ndarray) -> dict:
    """Full forward pass from an (n, embedding_dim) embedding matrix.

    Returns every intermediate needed for backpropagation.
    """
    cfg = params.config
    n = emb.shape[0]
    proj = emb @ params.input_projection  # (n, d)
    x0 = np.vstack([params.cls_vector[None, :], proj]) + params.positional[: n + 1]

    scale = 1.0 / math.sqrt(cfg.head_dim)
    qs, ks, vs, atts, heads = [], [], [], [], []
    for h in range(cfg.num_heads):
        q = x0 @ params.w_q[h]
        k = x0 @ params.w_k[h]
        v = x0 @ params.w_v[h]
        a = _softmax_rows((q @ k.T) * scale)
        qs.append(q)
        ks.append(k)
        vs.append(v)
        atts.append(a)
        heads.append(a @ v)
    concat = np.hstack(heads)  # (n+1, d)
    m = concat @ params.w_o
    r1 = x0 + m
    x1, x1_hat, inv1 = _layer_norm(r1, params.ln1_gain, params.ln1_bias)
    u = x1 @ params.ffn_w1 + params.ffn_b1
    relu = np.maximum(u, 0.0)
    f = relu @ params.ffn_w2 + params.ffn_b2
    r2 = x1 + f
    x2, x2_hat, inv2 = _layer_norm(r2, params.ln2_gain, params.ln2_bias)
    z = float(params.w_out @ x2[0] + params.b_out[0])
    p = _sigmoid(z)
    return {
        "emb": emb,
        "proj": proj,
        "x0": x0,
        "qs": qs,
        "ks": ks,
        "vs": vs,
        "atts": atts,
        "concat": concat,
        "x1": x1,
        "x1_hat": x1_hat,
        "inv1": inv1,
        "u": u,
        "relu": relu,
        "x2": x2,
        "x2_hat": x2_hat,
        "inv2": inv2,
        "z": z,
        "p": p,
    }


def forward(
    params: ModelParams, store: EmbeddingStore, spans: list[TokenSpan]
) -> tuple[float, list[np.ndarray]]:
    """Toxicity probability and the per-head (n+1, n+1) attention matrices.

    Inputs longer than max_len words are truncated to their first max_len
    words; punctuation spans carry no sequence position.
    """
    texts = [s.text for s in words_only(spans)][: params.config.max_len]
    if not texts:
        raise NoWordsError("input contains no word tokens")
    emb, _ = embed_words(params, store, texts)
    cache = _forward_cache(params, emb)
    return cache["p"], cache["atts"]


@dataclass(frozen=True)
class ScoreResult:
    score: int  # round(100 * probability), half-up
    probability: float
    word_attention: list[tuple[int, float]]  # one entry per word span
    spans: list[TokenSpan]


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def score(params: ModelParams, store: EmbeddingStore, text: str) -> ScoreResult:
    """Score ``text`` and attach the per-word attention profile.

    The profile is the mean over heads of the CLS-query attention row with the
    CLS column dropped, renormalized to sum to 1 over the scored words. Words
    truncated away by max_len receive weight 0.
    """
    if not text.strip():
        raise EmptyTextError("text is empty or whitespace-only")
    spans = tokenize(text)
    word_spans = words_only(spans)
    if not word_spans:
        raise NoWordsError("text contains no word tokens")
    probability, atts = forward(params, store, spans)
    cls_row = np.mean([a[0] for a in atts], axis=0)[1:]  # drop the CLS column
    weights = cls_row / cls_row.sum()
    word_attention = [
        (i, float(weights[i]) if i < len(weights) else 0.0) for i in range(len(word_spans))
    ]
    return ScoreResult(
        score=round_half_up(100.0 * probability),
        probability=probability,
        word_attention=word_attention,
        spans=spans,
    )


def _config_to_bytes(config: ModelConfig) -> bytes:
    return struct.pack(
        "<5Iq",
        config.model_dim,
        config.num_heads,
        config.ffn_dim,
        config.max_len,
        config.embedding_dim,
        config.seed,
    )


def save_model(params: ModelParams) -> bytes:
    """Serialize to the RCST format: magic, version, config, float32 tensors."""
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<I", params.version))
    out.write(_config_to_bytes(params.config))
    for _, tensor in params.tensors():
        out.write(np.ascontiguousarray(tensor, dtype="<f4").tobytes())
    return out.getvalue()


def load_model(data: bytes, store: EmbeddingStore) -> tuple[ModelParams, ModelConfig]:
    """Parse a model file, validating magic, version, and store compatibility."""
    buf = io.BytesIO(data)
    magic = buf.read(4)
    if magic != MAGIC:
        raise ModelFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    raw = buf.read(4)
    if len(raw) < 4:
        raise ModelFormatError("truncated header")
    (version,) = struct.unpack("<I", raw)
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {version}")
    raw = buf.read(28)
    if len(raw) < 28:
        raise ModelFormatError("truncated config block")
    model_dim, num_heads, ffn_dim, max_len, embedding_dim, seed = struct.unpack("<5Iq", raw)
    try:
        config = ModelConfig(
            embedding_dim=embedding_dim,
            seed=seed,
            model_dim=model_dim,
            num_heads=num_heads,
            ffn_dim=ffn_dim,
            max_len=max_len,
        )
    except ValueError as exc:
        raise ModelFormatError(f"invalid config: {exc}") from None
    if embedding_dim != store.dim:
        raise ModelFormatError(
            f"model embedding_dim {embedding_dim} does not match store dim {store.dim}"
        )
    d, h, dk, f, e = model_dim, num_heads, model_dim // num_heads, ffn_dim, embedding_dim
    shapes: dict[str, tuple[int, ...]] = {
        "input_projection": (e, d),
        "cls_vector": (d,),
        "positional": (max_len + 1, d),
        "w_q": (h, d, dk),
        "w_k": (h, d, dk),
        "w_v": (h, d, dk),
        "w_o": (d, d),
        "ln1_gain": (d,),
        "ln1_bias": (d,),
        "ffn_w1": (d, f),
        "ffn_b1": (f,),
        "ffn_w2": (f, d),
        "ffn_b2": (d,),
        "ln2_gain": (d,),
        "ln2_bias": (d,),
        "w_out": (d,),
        "b_out": (1,),
        "unk_vector": (e,),
    }
    loaded: dict[str, np.ndarray] = {}
    for name in ModelParams.tensor_names:
        shape = shapes[name]
        count = int(np.prod(shape))
        raw = buf.read(4 * count)
        if len(raw) < 4 * count:
            raise ModelFormatError(f"truncated tensor {name}")
        loaded[name] = np.frombuffer(raw, dtype="<f4").astype(np.float64).reshape(shape)
    if buf.read(1):
        raise ModelFormatError("trailing bytes after final tensor")
    params = ModelParams(config=config, version=version, **loaded)
    return params, config


def model_version(params: ModelParams) -> str:
    """Stable identity string: format tag plus a content hash of the tensors."""
    digest = hashlib.sha256(save_model(params)).hexdigest()[:12]
    return f"rcst{params.version}-{digest}"
