"""Minimal in-process provider speaking the line protocol, for client tests."""

from __future__ import annotations

import json
import socket
import threading


class StubProvider:
    """Serves deterministic fake embeddings/sentiments on a local port."""

    def __init__(self, dim=8, mode="normal"):
        self.dim = dim
        self.mode = mode  # "normal" | "wrong_dim" | "bad_scores" | "item_errors"
        self._server = socket.create_server(("127.0.0.1", 0))
        self.port = self._server.getsockname()[1]
        self._thread = threading.Thread(target=self._serve, daemon=True)

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.close()

    def _vector(self, text):
        dim = self.dim - 1 if self.mode == "wrong_dim" else self.dim
        vec = [0.0] * dim
        for i, ch in enumerate(text.encode("utf-8")):
            vec[(i + ch) % dim] += 1.0 if ch % 2 else -1.0
        return vec

    def _scores(self, text):
        if self.mode == "bad_scores":
            return [-0.1, 0.6, 0.5]
        n = len(text)
        raw = [1.0 + (n % 3), 1.0 + ((n + 1) % 3), 1.0 + ((n + 2) % 3)]
        total = sum(raw)
        return [v / total for v in raw]

    def _handle(self, payload):
        op = payload.get("op")
        rid = payload.get("id")
        if op == "hello":
            return {
                "id": rid,
                "ok": True,
                "op": "hello",
                "dim": self.dim,
                "embed_model": "stub-embed",
                "sentiment_model": "stub-sentiment",
            }
        if op in ("embed", "sentiment"):
            batch = payload.get("batch")
            if not isinstance(batch, list) or not batch:
                return {"id": rid, "ok": False, "error": "batch must be a non-empty list"}
            results = []
            for i, item in enumerate(batch):
                if self.mode == "item_errors" and i == 1:
                    results.append({"ok": False, "error": "boom"})
                elif op == "embed":
                    results.append({"ok": True, "vector": self._vector(item)})
                else:
                    results.append({"ok": True, "scores": self._scores(item)})
            return {"id": rid, "ok": True, "op": op, "results": results}
        return {"id": rid, "ok": False, "error": f"unknown op {op!r}"}

    def _serve(self):
        while True:
            try:
                conn, _ = self._server.accept()
            except OSError:
                return
            with conn, conn.makefile("rwb") as stream:
                for line in stream:
                    try:
                        payload = json.loads(line)
                    except json.JSONDecodeError:
                        response = {"id": None, "ok": False, "error": "bad json"}
                    else:
                        response = self._handle(payload)
                    stream.write(json.dumps(response).encode() + b"\n")
                    stream.flush()
