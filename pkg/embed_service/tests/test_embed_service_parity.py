"""The primary filter keeps the same pairs via this service as via its
built-in embedder.

A real uvicorn server is started on a loopback port and the filtering CLI is
pointed at it with ``--provider remote``; every filter artifact must come out
byte-identical to the built-in run, cosines included.
"""
from __future__ import annotations

import shutil
import threading
import time
from pathlib import Path

import pytest
import requests
import uvicorn

from axisaug.cli import main
from embed_service import create_app

BUNDLE = Path(__file__).resolve().parents[2] / "tests" / "fixtures" / "bundle"

FILTER_ARTIFACTS = ["filtered.jsonl", "verdicts.jsonl", "filter_report.txt"]


@pytest.fixture(scope="module")
def service_url():
    config = uvicorn.Config(
        create_app("hash-v1"), host="127.0.0.1", port=0, log_level="warning"
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10.0
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("embedding service did not start within 10s")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_health_over_real_http(service_url):
    response = requests.get(f"{service_url}/health", timeout=5)
    assert response.status_code == 200
    assert response.json()["model"] == "hash-v1"


def test_filter_kept_set_matches_builtin_byte_for_byte(service_url, tmp_path):
    builtin_out = tmp_path / "builtin"
    remote_out = tmp_path / "remote"
    conf = str(BUNDLE / "run.conf")

    assert main(["run", "--config", conf, "--out", str(builtin_out)]) == 0

    remote_out.mkdir()
    shutil.copy(builtin_out / "augmented.jsonl", remote_out / "augmented.jsonl")
    assert (
        main(
            [
                "filter",
                "--config",
                conf,
                "--out",
                str(remote_out),
                "--provider",
                "remote",
                "--provider-url",
                service_url,
            ]
        )
        == 0
    )

    for artifact in FILTER_ARTIFACTS:
        local = (builtin_out / artifact).read_bytes()
        remote = (remote_out / artifact).read_bytes()
        assert local == remote, f"{artifact} differs between builtin and remote runs"


def test_remote_provider_learns_model_id_and_dim(service_url, tmp_path):
    from axisaug.filtering import RemoteEmbeddingProvider

    provider = RemoteEmbeddingProvider(service_url)
    vectors = provider.embed(["骨折", "脑膜炎"])
    assert provider.dim == 256
    assert provider.model_id == "hash-v1"
    assert len(vectors) == 2 and all(len(v) == 256 for v in vectors)
