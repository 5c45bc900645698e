"""Client for the out-of-process embedding/sentiment provider.

Wire format: one JSON object per line over a TCP socket. Requests carry an
integer id, an op ("hello", "embed", "sentiment") and, for the batch ops, a
"batch" list of at most 256 strings. Responses echo the id; batch results
arrive in request order with per-item error isolation:

  {"id": 1, "op": "hello"}
  {"id": 1, "ok": true, "dim": 384, "embed_model": "...", "sentiment_model": "..."}
  {"id": 2, "op": "embed", "batch": ["a", "b"]}
  {"id": 2, "ok": true, "results": [{"ok": true, "vector": [...]}, ...]}
  {"id": 3, "op": "sentiment", "batch": ["a"]}
  {"id": 3, "ok": true, "results": [{"ok": true, "scores": [neg, neu, pos]}]}

The full field-by-field description lives in the provider package's
PROTOCOL.md.
"""

from __future__ import annotations

import json
import socket

from .errors import ProviderError, ProviderUnavailable

MAX_BATCH = 256


class ProviderClient:
    def __init__(self, host: str = "127.0.0.1", port: int = 7878, timeout: float = 30.0):
        self.host = host
        self.port = port
        self.timeout = timeout
        self._sock = None
        self._file = None
        self._next_id = 0

    def connect(self) -> "ProviderClient":
        try:
            self._sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
        except OSError as exc:
            raise ProviderUnavailable(f"cannot reach provider at {self.host}:{self.port}: {exc}") from exc
        self._file = self._sock.makefile("rwb")
        return self

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def __enter__(self):
        return self.connect()

    def __exit__(self, *exc):
        self.close()

    def _request(self, payload: dict) -> dict:
        if self._file is None:
            self.connect()
        self._next_id += 1
        payload = {"id": self._next_id, **payload}
        try:
            self._file.write(json.dumps(payload).encode("utf-8") + b"\n")
            self._file.flush()
            line = self._file.readline()
        except OSError as exc:
            raise ProviderUnavailable(f"provider connection failed: {exc}") from exc
        if not line:
            raise ProviderUnavailable("provider closed the connection")
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProviderError(f"unparseable provider response: {line[:120]!r}") from exc
        if response.get("id") != payload["id"]:
            raise ProviderError(
                f"response id {response.get('id')} does not match request id {payload['id']}"
            )
        if not response.get("ok"):
            raise ProviderError(str(response.get("error", "unknown provider error")))
        return response

    def hello(self) -> dict:
        response = self._request({"op": "hello"})
        if "dim" not in response:
            raise ProviderError("hello response missing 'dim'")
        return response

    def _batched(self, op: str, texts: list[str], value_key: str) -> list:
        out = []
        for lo in range(0, len(texts), MAX_BATCH):
            chunk = texts[lo:lo + MAX_BATCH]
            response = self._request({"op": op, "batch": chunk})
            results = response.get("results")
            if not isinstance(results, list) or len(results) != len(chunk):
                raise ProviderError(
                    f"{op}: expected {len(chunk)} results, got {len(results) if isinstance(results, list) else 'none'}"
                )
            bad = [
                (lo + i, item.get("error", "unknown"))
                for i, item in enumerate(results)
                if not item.get("ok")
            ]
            if bad:
                raise ProviderError(f"{op}: provider failed items {bad}")
            out.extend(item[value_key] for item in results)
        return out

    def embed(self, texts: list[str]) -> list:
        return self._batched("embed", texts, "vector")

    def sentiment(self, texts: list[str]) -> list:
        return self._batched("sentiment", texts, "scores")
