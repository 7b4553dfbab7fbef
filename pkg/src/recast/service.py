"""HTTP JSON API: scoring, alternative wordings, error flags, health.

The service is a thin encoder over the library calls; responses contain
nothing the library did not compute. Model and store are shared immutably
across request handlers. The flag log is JSON Lines, append-only, fsync'd
line by line behind a lock, so concurrent flags land as intact records.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .alternatives import suggest
from .embeddings import EmbeddingStore
from .model import (
    EmptyTextError,
    ModelParams,
    NoWordsError,
    model_version,
    score,
)
from .textspan import words_only

__all__ = ["ServiceConfig", "ServiceState", "FlagRecord", "create_app", "read_flag_log"]

VERDICTS = ("false_positive", "false_negative")


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    model_path: str = "model.rcst"
    embeddings_path: str = "embeddings.txt"
    flag_log_path: str = "flags.jsonl"
    static_dir: str | None = None
    default_k: int = 5
    max_text_bytes: int = 8192

    def __post_init__(self) -> None:
        if self.default_k < 1:
            raise ValueError("default_k must be >= 1")
        if self.max_text_bytes < 1:
            raise ValueError("max_text_bytes must be >= 1")


@dataclass(frozen=True)
class FlagRecord:
    id: str
    timestamp: str  # ISO-8601 UTC
    text: str
    model_score: int
    verdict: str
    comment: str | None
    model_version: str


@dataclass
class ServiceState:
    """Loaded model/store plus the flag log writer. Set ``ready`` last."""

    config: ServiceConfig
    store: EmbeddingStore | None = None
    params: ModelParams | None = None
    version: str = ""
    ready: bool = False
    _flag_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def load(self, store: EmbeddingStore, params: ModelParams) -> None:
        self.store = store
        self.params = params
        self.version = model_version(params)
        self.ready = True

    def append_flag(self, record: FlagRecord) -> None:
        line = json.dumps(
            {
                "id": record.id,
                "timestamp": record.timestamp,
                "text": record.text,
                "model_score": record.model_score,
                "verdict": record.verdict,
                "comment": record.comment,
                "model_version": record.model_version,
            }
        )
        data = (line + "\n").encode("utf-8")
        with self._flag_lock:
            with open(self.config.flag_log_path, "ab") as f:
                f.write(data)
                f.flush()
                os.fsync(f.fileno())


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


async def _json_body(request: Request) -> dict | JSONResponse:
    try:
        body = await request.body()
        obj = json.loads(body)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return _error(400, "bad_json", "request body is not valid JSON")
    if not isinstance(obj, dict):
        return _error(400, "bad_json", "request body must be a JSON object")
    return obj


def _score_payload(state: ServiceState, text: str) -> dict:
    result = score(state.params, state.store, text)
    word_spans = words_only(result.spans)
    weights = dict(result.word_attention)
    return {
        "score": result.score,
        "probability": result.probability,
        "model_version": state.version,
        "words": [
            {
                "text": span.text,
                "start": span.byte_start,
                "end": span.byte_end,
                "attention": weights[i],
            }
            for i, span in enumerate(word_spans)
        ],
    }


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="recast", docs_url=None, redoc_url=None)

    def check_text(text) -> tuple[str, None] | tuple[None, JSONResponse]:
        if not isinstance(text, str):
            return None, _error(400, "bad_json", "field 'text' must be a string")
        if len(text.encode("utf-8")) > state.config.max_text_bytes:
            return None, _error(
                400, "too_long", f"text exceeds {state.config.max_text_bytes} bytes"
            )
        return text, None

    @app.get("/api/health")
    def health():
        if not state.ready:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {
            "status": "ok",
            "model_version": state.version,
            "vocab_size": state.store.vocab_size,
        }

    @app.post("/api/score")
    async def api_score(request: Request):
        if not state.ready:
            return JSONResponse(status_code=503, content={"status": "loading"})
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        text, err = check_text(body.get("text"))
        if err:
            return err
        try:
            return _score_payload(state, text)
        except EmptyTextError:
            return _error(400, "empty_text", "text is empty or whitespace-only")
        except NoWordsError:
            return _error(400, "no_words", "text contains no word tokens")

    @app.post("/api/alternatives")
    async def api_alternatives(request: Request):
        if not state.ready:
            return JSONResponse(status_code=503, content={"status": "loading"})
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        text, err = check_text(body.get("text"))
        if err:
            return err
        word_index = body.get("word_index")
        if not isinstance(word_index, int) or isinstance(word_index, bool) or word_index < 0:
            return _error(400, "bad_word_index", "field 'word_index' must be a non-negative integer")
        k = body.get("k", state.config.default_k)
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            return _error(400, "bad_json", "field 'k' must be a positive integer")
        try:
            candidates = suggest(state.params, state.store, text, word_index, k)
        except EmptyTextError:
            return _error(400, "empty_text", "text is empty or whitespace-only")
        except NoWordsError:
            return _error(400, "no_words", "text contains no word tokens")
        except IndexError as exc:
            return _error(400, "bad_word_index", str(exc))
        return {
            "candidates": [
                {
                    "replacement": None if c.is_delete else c.replacement,
                    "similarity": c.similarity,
                    "text": c.resulting_text,
                    "score": c.score,
                    "probability": c.probability,
                }
                for c in candidates
            ]
        }

    @app.post("/api/flag")
    async def api_flag(request: Request):
        if not state.ready:
            return JSONResponse(status_code=503, content={"status": "loading"})
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        text = body.get("text")
        if not isinstance(text, str) or not text:
            return _error(400, "empty_text", "field 'text' must be a non-empty string")
        verdict = body.get("verdict")
        if verdict not in VERDICTS:
            return _error(400, "bad_verdict", f"verdict must be one of {list(VERDICTS)}")
        model_score = body.get("model_score")
        if not isinstance(model_score, int) or isinstance(model_score, bool) or not 0 <= model_score <= 100:
            return _error(400, "bad_json", "field 'model_score' must be an integer in [0, 100]")
        comment = body.get("comment")
        if comment is not None and not isinstance(comment, str):
            return _error(400, "bad_json", "field 'comment' must be a string")
        record = FlagRecord(
            id=uuid.uuid4().hex,
            timestamp=datetime.now(timezone.utc).isoformat(),
            text=text,
            model_score=model_score,
            verdict=verdict,
            comment=comment,
            model_version=state.version,
        )
        try:
            state.append_flag(record)
        except OSError as exc:
            return _error(500, "storage_failure", f"could not persist flag: {exc}")
        return {"ok": True, "id": record.id}

    static_dir = state.config.static_dir
    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app


def read_flag_log(path: str) -> list[FlagRecord]:
    """Parse the flag log; raises if any line is malformed."""
    records: list[FlagRecord] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj["verdict"] not in VERDICTS:
                raise ValueError(f"line {lineno}: bad verdict {obj['verdict']!r}")
            datetime.fromisoformat(obj["timestamp"])
            records.append(
                FlagRecord(
                    id=obj["id"],
                    timestamp=obj["timestamp"],
                    text=obj["text"],
                    model_score=obj["model_score"],
                    verdict=obj["verdict"],
                    comment=obj.get("comment"),
                    model_version=obj["model_version"],
                )
            )
    return records
