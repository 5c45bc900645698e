"""Document embeddings: deterministic hashed tf-idf, or an external provider.

The default embedding signs and hashes unigram+bigram tokens into a fixed
number of buckets, weights them by tf*idf over the input corpus and
L2-normalizes. It is fully deterministic (keyed hash, no process salt), so
the pipeline runs reproducibly without any model dependency.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

from .errors import DegenerateCovariance, DimensionMismatch, EmptyCorpus

_WORD_RE = re.compile(r"[a-z0-9_]+")
_HASH_KEY = b"geopulse-embed-v1"


def _tokens(text: str) -> list[str]:
    words = _WORD_RE.findall(text.lower())
    return words + [f"{a} {b}" for a, b in zip(words, words[1:])]


def _bucket_sign(term: str, dim: int) -> tuple[int, float]:
    digest = hashlib.blake2b(term.encode("utf-8"), digest_size=8, key=_HASH_KEY).digest()
    h = int.from_bytes(digest, "big")
    sign = 1.0 if h & 1 else -1.0
    return (h >> 1) % dim, sign


def embed_default(texts: list[str], dim: int = 256) -> np.ndarray:
    """Hashed tf-idf embeddings, one L2-normalized row per text."""
    if not texts:
        raise EmptyCorpus("no texts to embed")
    if dim <= 0:
        raise ValueError("dim must be positive")
    token_lists = [_tokens(t) for t in texts]
    df: dict[str, int] = {}
    for tokens in token_lists:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    n_docs = len(texts)
    idf = {term: np.log(1.0 + n_docs / count) for term, count in df.items()}
    placement = {term: _bucket_sign(term, dim) for term in df}

    out = np.zeros((n_docs, dim))
    for row, tokens in enumerate(token_lists):
        counts: dict[str, int] = {}
        for term in tokens:
            counts[term] = counts.get(term, 0) + 1
        for term, tf in counts.items():
            bucket, sign = placement[term]
            out[row, bucket] += sign * tf * idf[term]
    return l2_normalize(out)


def l2_normalize(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return vectors / safe


def embed_external(texts: list[str], client) -> np.ndarray:
    """Fetch embeddings from a provider client; dimension-check, renormalize."""
    if not texts:
        raise EmptyCorpus("no texts to embed")
    info = client.hello()
    dim = int(info["dim"])
    rows = client.embed(texts)
    out = np.zeros((len(texts), dim))
    for i, row in enumerate(rows):
        if len(row) != dim:
            raise DimensionMismatch(f"item {i}: expected {dim} values, got {len(row)}")
        out[i] = row
    if not np.all(np.isfinite(out)):
        raise DimensionMismatch("provider returned non-finite values")
    return l2_normalize(out)


def reduce(vectors: np.ndarray, target_dim: int) -> np.ndarray:
    """Project onto the top principal components of the covariance.

    Deterministic sign convention: for each component the largest-magnitude
    loading is made positive.
    """
    X = np.asarray(vectors, dtype=float)
    n, d = X.shape
    if not 0 < target_dim < d:
        raise ValueError("target_dim must be positive and smaller than the input dimension")
    mean = X.mean(axis=0)
    centered = X - mean
    if float(np.max(np.abs(centered))) < 1e-12:
        raise DegenerateCovariance("all points identical")
    denom = max(n - 1, 1)
    cov = (centered.T @ centered) / denom
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:target_dim]
    components = eigvecs[:, order]
    for j in range(components.shape[1]):
        col = components[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            components[:, j] = -col
    return centered @ components
