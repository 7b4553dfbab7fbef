"""Operator command line: corpus generation, training, scoring, batch audits,
neighbor queries, and serving.

Every number the CLI prints comes straight from a library call; there is no
CLI-side arithmetic. Exit codes: 0 success, 1 usage error, 2 data/parse
error, 3 runtime failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .alternatives import suggest
from .embeddings import (
    EmbeddingFormatError,
    EmbeddingStore,
    parse_word2vec_binary,
    parse_word2vec_text,
)
from .corpus import gen_corpus
from .model import (
    EmptyTextError,
    ModelConfig,
    ModelFormatError,
    ModelParams,
    NoWordsError,
    load_model,
    model_version,
    save_model,
    score,
)
from .service import ServiceConfig, ServiceState, create_app
from .textspan import words_only
from .training import (
    CorpusFormatError,
    TrainHyper,
    TrainingError,
    read_corpus,
    train,
    write_corpus,
)

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


def load_embeddings(path: str) -> EmbeddingStore:
    """Parse an embedding file; '.bin' selects the binary format."""
    data = Path(path).read_bytes()
    if path.endswith(".bin"):
        return parse_word2vec_binary(data)
    return parse_word2vec_text(data)


def _load_model_file(path: str, store: EmbeddingStore) -> ModelParams:
    params, _ = load_model(Path(path).read_bytes(), store)
    return params


def _score_json(params: ModelParams, store: EmbeddingStore, text: str) -> dict:
    result = score(params, store, text)
    weights = dict(result.word_attention)
    return {
        "score": result.score,
        "probability": result.probability,
        "model_version": model_version(params),
        "words": [
            {"text": s.text, "start": s.byte_start, "end": s.byte_end, "attention": weights[i]}
            for i, s in enumerate(words_only(result.spans))
        ],
    }


@click.group()
def cli() -> None:
    """Toxicity-audit toolkit."""


@cli.command("gen-corpus")
@click.option("--seed", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def gen_corpus_cmd(seed: int, n: int, out: str) -> None:
    """Write a synthetic labeled corpus as JSON Lines."""
    examples = gen_corpus(seed, n)
    Path(out).write_bytes(write_corpus(examples))
    toxic = sum(ex.label for ex in examples)
    click.echo(f"wrote {len(examples)} examples ({toxic} toxic, {len(examples) - toxic} non-toxic) to {out}")


@cli.command("train")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--seed", type=int, required=True)
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--batch", type=int, default=32, show_default=True)
@click.option("--lr", type=float, default=0.5, show_default=True)
def train_cmd(corpus_path: str, embeddings_path: str, out: str, seed: int, epochs: int, batch: int, lr: float) -> None:
    """Train a model on a JSON Lines corpus and write the model file."""
    store = load_embeddings(embeddings_path)
    corpus = read_corpus(Path(corpus_path).read_bytes())
    config = ModelConfig(embedding_dim=store.dim, seed=seed)
    params, history = train(config, store, corpus, TrainHyper(epochs=epochs, batch_size=batch, learning_rate=lr))
    for stats in history:
        click.echo(f"epoch {stats.epoch}: loss={stats.loss:.6f} accuracy={stats.accuracy:.4f}")
    Path(out).write_bytes(save_model(params))
    click.echo(f"wrote model {model_version(params)} to {out}")


@cli.command("score")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--text", required=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the /api/score JSON payload.")
def score_cmd(model_path: str, embeddings_path: str, text: str, as_json: bool) -> None:
    """Score one text and show the per-word attention profile."""
    store = load_embeddings(embeddings_path)
    params = _load_model_file(model_path, store)
    payload = _score_json(params, store, text)
    if as_json:
        click.echo(json.dumps(payload))
        return
    click.echo(f"score: {payload['score']}  (probability {payload['probability']:.4f})")
    width = max(len(w["text"]) for w in payload["words"])
    for w in payload["words"]:
        bar = "#" * max(1, round(40 * w["attention"]))
        click.echo(f"  {w['text']:<{width}}  {bar} {w['attention']:.3f}")


@cli.command("audit")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def audit_cmd(model_path: str, embeddings_path: str, corpus_path: str, out: str) -> None:
    """Batch-score a corpus; report top attention words and the best swap.

    Rows that fail to parse or score are recorded in place and the run
    continues.
    """
    store = load_embeddings(embeddings_path)
    params = _load_model_file(model_path, store)
    lines = Path(corpus_path).read_text(encoding="utf-8").splitlines()
    rows = []
    for line in lines:
        if not line.strip():
            continue
        rows.append(_audit_row(params, store, line))
    Path(out).write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    click.echo(f"wrote {len(rows)} rows to {out}")


def _audit_row(params: ModelParams, store: EmbeddingStore, line: str) -> dict:
    try:
        obj = json.loads(line)
        if not isinstance(obj, dict) or not isinstance(obj.get("text"), str):
            raise ValueError("row must be an object with a 'text' string")
        text = obj["text"]
        label = obj.get("label")
        if label not in (0, 1, None):
            raise ValueError(f"bad label {label!r}")
    except ValueError as exc:
        return {"text": None, "error": f"unparseable row: {exc}"}
    try:
        result = score(params, store, text)
    except (EmptyTextError, NoWordsError) as exc:
        return {"text": text, "label": label, "error": str(exc)}
    words = words_only(result.spans)
    ranked = sorted(result.word_attention, key=lambda t: -t[1])[:3]
    top_words = [{"word": words[i].text, "attention": w} for i, w in ranked]
    best_swap = None
    max_index = max(result.word_attention, key=lambda t: t[1])[0]
    swaps = [c for c in suggest(params, store, text, max_index, 1) if not c.is_delete]
    if swaps:
        best_swap = {
            "word_index": max_index,
            "replacement": swaps[0].replacement,
            "new_score": swaps[0].score,
        }
    return {
        "text": text,
        "label": label,
        "score": result.score,
        "top_words": top_words,
        "best_single_swap": best_swap,
    }


@cli.command("neighbors")
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--word", required=True)
@click.option("--k", type=int, required=True)
def neighbors_cmd(embeddings_path: str, word: str, k: int) -> None:
    """Print the k nearest words by cosine similarity."""
    store = load_embeddings(embeddings_path)
    try:
        results = store.nearest(word, k)
    except KeyError:
        raise CliDataError(f"word {word!r} not in vocabulary") from None
    for neighbor in results:
        click.echo(f"{neighbor.word}\t{neighbor.similarity:.6f}")


@cli.command("serve")
@click.option("--addr", envvar="RECAST_ADDR", default="127.0.0.1:8000", show_default=True, help="host:port")
@click.option("--model", "model_path", envvar="RECAST_MODEL", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--embeddings", "embeddings_path", envvar="RECAST_EMBEDDINGS", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--flag-log", envvar="RECAST_FLAG_LOG", default="flags.jsonl", show_default=True)
@click.option("--static-dir", default=None, help="Directory with the built web UI.")
@click.option("--k", "default_k", type=int, default=5, show_default=True)
@click.option("--max-text-bytes", type=int, default=8192, show_default=True)
def serve_cmd(addr: str, model_path: str, embeddings_path: str, flag_log: str, static_dir: str | None, default_k: int, max_text_bytes: int) -> None:
    """Serve the HTTP API (and the web UI when --static-dir is given)."""
    import uvicorn

    host, _, port_str = addr.rpartition(":")
    if not host or not port_str.isdigit():
        raise click.UsageError(f"--addr must look like host:port, got {addr!r}")
    config = ServiceConfig(
        host=host,
        port=int(port_str),
        model_path=model_path,
        embeddings_path=embeddings_path,
        flag_log_path=flag_log,
        static_dir=static_dir,
        default_k=default_k,
        max_text_bytes=max_text_bytes,
    )
    store = load_embeddings(embeddings_path)
    params = _load_model_file(model_path, store)
    state = ServiceState(config)
    state.load(store, params)
    app = create_app(state)
    click.echo(f"serving {state.version} on http://{host}:{port_str} (vocab {store.vocab_size})")
    uvicorn.run(app, host=host, port=int(port_str), log_level="warning")


class CliDataError(click.ClickException):
    exit_code = EXIT_DATA


def main(argv: list[str] | None = None) -> int:
    """Run the CLI, mapping failure classes onto stable exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:  # --help and friends
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except CliDataError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_DATA
    except (EmbeddingFormatError, CorpusFormatError, ModelFormatError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DATA
    except (EmptyTextError, NoWordsError, ValueError) as exc:
        click.echo(f"usage error: {exc}", err=True)
        return EXIT_USAGE
    except TrainingError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_RUNTIME
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_RUNTIME


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
