import socket
import threading
import time

import numpy as np
import pytest

from recast.demo import load_demo_store, train_demo_model
from recast.embeddings import EmbeddingStore
from recast.service import ServiceConfig, ServiceState, create_app


@pytest.fixture(scope="session")
def demo_store():
    return load_demo_store()


@pytest.fixture(scope="session")
def demo_model(demo_store):
    """The pinned demo model; trained once per test session."""
    params, history = train_demo_model(demo_store)
    return params, history


@pytest.fixture
def toy_store():
    """The three-word store used by the nearest-neighbor examples."""
    return EmbeddingStore(
        ["a", "b", "c"],
        np.array([[1.0, 0.0], [0.9, 0.1], [0.0, 1.0]], dtype=np.float32),
    )


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture(scope="session")
def live_api(demo_store, demo_model, tmp_path_factory):
    """A real uvicorn server running the demo model; yields (base_url, state)."""
    import httpx
    import uvicorn

    params, _ = demo_model
    flag_log = tmp_path_factory.mktemp("flags") / "flags.jsonl"
    state = ServiceState(ServiceConfig(flag_log_path=str(flag_log)))
    state.load(demo_store, params)
    app = create_app(state)
    port = _free_port()
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{port}"
    deadline = time.time() + 10
    while time.time() < deadline:
        try:
            if httpx.get(base + "/api/health", timeout=1).status_code == 200:
                break
        except httpx.TransportError:
            time.sleep(0.05)
    else:
        raise RuntimeError("server did not become ready")
    yield base, state
    server.should_exit = True
    thread.join(timeout=5)
