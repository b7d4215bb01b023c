"""Run the embedding service under uvicorn, configured from the environment."""
from __future__ import annotations

import os

import uvicorn

from embed_service.app import DEFAULT_PORT, create_app


def main() -> None:
    port = int(os.environ.get("EMBED_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(), host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
