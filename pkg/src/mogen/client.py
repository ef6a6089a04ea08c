"""Thin client for the HTTP API.

By default the client mounts the FastAPI app in-process over an ASGI
transport, so CLI commands work without a running server; pass a base URL
to talk to a remote instance instead.
"""

from __future__ import annotations

import asyncio
from typing import Any

import httpx


class ServiceError(Exception):
    """Non-2xx response from the service, with its one-line detail."""


class _InProcessTransport(httpx.BaseTransport):
    """Drives an ASGI app from the synchronous client, one request at a time."""

    def __init__(self, app):
        self._transport = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        async def call() -> httpx.Response:
            response = await self._transport.handle_async_request(request)
            body = await response.aread()
            await response.aclose()
            return httpx.Response(
                response.status_code, headers=response.headers, content=body
            )

        return asyncio.run(call())

    def close(self) -> None:
        asyncio.run(self._transport.aclose())


class ServiceClient:
    def __init__(self, server: str | None = None):
        if server is None:
            from .service.app import create_app

            self._client = httpx.Client(
                transport=_InProcessTransport(create_app()),
                base_url="http://service.local",
                timeout=None,
            )
        else:
            self._client = httpx.Client(base_url=server, timeout=None)

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ServiceError(f"{path}: {detail}")
        return response.json()

    @staticmethod
    def corpus_payload(ngram: str, separator: str, weighted: bool) -> dict:
        return {"ngram": ngram, "separator": separator, "weighted": weighted}

    def health(self) -> dict:
        return self._client.get("/health").json()

    def stats(self, corpus: dict) -> dict:
        return self._post("/stats", {"corpus": corpus})

    def fit(self, corpus: dict, order: int, workers: int = 1, store: bool = False) -> dict:
        return self._post(
            "/fit",
            {"corpus": corpus, "order": order, "workers": workers, "store": store},
        )

    def select(
        self,
        corpus: dict,
        max_order: int | None = None,
        workers: int = 1,
        binary_walks: bool = False,
    ) -> dict:
        return self._post(
            "/select",
            {
                "corpus": corpus,
                "max_order": max_order,
                "workers": workers,
                "binary_walks": binary_walks,
            },
        )

    def evaluate(self, corpus: dict, **options: Any) -> dict:
        return self._post("/evaluate", {"corpus": corpus, **options})

    def generate(
        self,
        document: dict,
        n_samples: int,
        seed: int = 0,
        max_length: int = 10_000,
        separator: str = ",",
    ) -> dict:
        return self._post(
            "/generate",
            {
                "document": document,
                "n_samples": n_samples,
                "seed": seed,
                "max_length": max_length,
                "separator": separator,
            },
        )

    def roc(self, corpus: dict, **options: Any) -> dict:
        return self._post("/roc", {"corpus": corpus, **options})

    def predict(self, model_id: str, prefix: list[str], fallback: bool = True) -> dict:
        return self._post(
            f"/models/{model_id}/predict", {"prefix": prefix, "fallback": fallback}
        )

    def predict_document(
        self, document: dict, prefix: list[str], fallback: bool = True
    ) -> dict:
        return self._post(
            "/predict", {"document": document, "prefix": prefix, "fallback": fallback}
        )
