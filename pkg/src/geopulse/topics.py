"""Topic keyword extraction, similarity and monthly evolution.

Keyword weights use class-based tf-idf: for term t in class c,
``weight = tf(t, c) * log(1 + A / f(t))`` where tf counts t in the
concatenated documents of c, f(t) is the total count of t across all
classes and A is the average token count per class.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from datetime import date, timedelta
from importlib import resources

import numpy as np

from .errors import NoTopics, TooFewTopics
from .textnorm import EMOJI_TOKEN, URL_TOKEN

_WORD_RE = re.compile(r"[a-z0-9_]+")

NOISE_TOPIC = -1


def default_stopwords() -> frozenset:
    raw = resources.files("geopulse.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in raw.splitlines() if w.strip())


def tokenize_for_keywords(text: str, stopwords=frozenset()) -> list[str]:
    """Lowercase word tokens with URL/emoji markers and stop-words removed."""
    text = text.replace(URL_TOKEN, " ").replace(EMOJI_TOKEN, " ")
    return [w for w in _WORD_RE.findall(text.lower()) if w not in stopwords]


@dataclass
class TopicSummary:
    topic: int
    size: int
    keywords: list  # (term, weight), weight non-increasing
    centroid: np.ndarray | None = None


def ctfidf(
    assignment,
    tokenized_docs,
    vectors: np.ndarray | None = None,
    top_k: int = 10,
) -> list[TopicSummary]:
    """Per-topic ranked keywords; noise documents are ignored.

    assignment aligns with tokenized_docs (and vectors when given); topic
    ids below 0 mark noise.
    """
    labels = np.asarray(assignment)
    topic_ids = sorted(int(t) for t in set(labels.tolist()) if t >= 0)
    if not topic_ids:
        raise NoTopics("no non-noise topics in assignment")

    class_tf: dict[int, Counter] = {t: Counter() for t in topic_ids}
    sizes = {t: 0 for t in topic_ids}
    for label, tokens in zip(labels, tokenized_docs):
        t = int(label)
        if t < 0:
            continue
        class_tf[t].update(tokens)
        sizes[t] += 1

    global_tf = Counter()
    for counts in class_tf.values():
        global_tf.update(counts)
    total_tokens = sum(global_tf.values())
    avg_per_class = total_tokens / len(topic_ids)

    summaries = []
    for t in topic_ids:
        scored = [
            (term, tf * np.log(1.0 + avg_per_class / global_tf[term]))
            for term, tf in class_tf[t].items()
        ]
        scored.sort(key=lambda kv: (-kv[1], kv[0]))
        centroid = None
        if vectors is not None:
            members = np.asarray(vectors)[labels == t]
            centroid = members.mean(axis=0)
            norm = float(np.linalg.norm(centroid))
            if norm > 0:
                centroid = centroid / norm
        summaries.append(
            TopicSummary(topic=t, size=sizes[t], keywords=scored[:top_k], centroid=centroid)
        )
    return summaries


def similarity_matrix(summaries: list[TopicSummary]):
    """Cosine similarity of topic centroids plus a leaf order that puts
    correlated topics next to each other (average-linkage)."""
    if len(summaries) < 2:
        raise TooFewTopics("similarity needs at least 2 topics")
    C = np.stack([s.centroid for s in summaries])
    norms = np.linalg.norm(C, axis=1, keepdims=True)
    norms = np.where(norms == 0.0, 1.0, norms)
    U = C / norms
    S = U @ U.T
    np.clip(S, -1.0, 1.0, out=S)
    np.fill_diagonal(S, 1.0)
    S = (S + S.T) / 2.0
    order = _average_linkage_order(1.0 - S)
    return S, order


def _average_linkage_order(D: np.ndarray) -> list[int]:
    """Leaf order of an average-linkage merge tree; deterministic ties."""
    n = D.shape[0]
    active = {i: [i] for i in range(n)}        # cluster id -> leaf order
    sizes = {i: 1 for i in range(n)}
    dist = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = float(D[i, j])
    next_id = n
    while len(active) > 1:
        (a, b), _ = min(dist.items(), key=lambda kv: (kv[1], kv[0]))
        merged = active[a] + active[b]
        sa, sb = sizes[a], sizes[b]
        del active[a], active[b]
        new_dist = {}
        for c in active:
            da = dist[(min(a, c), max(a, c))]
            db = dist[(min(b, c), max(b, c))]
            new_dist[(c, next_id)] = (sa * da + sb * db) / (sa + sb)
        dist = {k: v for k, v in dist.items() if a not in k and b not in k}
        dist.update(new_dist)
        active[next_id] = merged
        sizes[next_id] = sa + sb
        next_id += 1
    return active[next_id - 1]


def month_key(d) -> str:
    return f"{d.year:04d}-{d.month:02d}"


def complete_months(window_start, window_end) -> list[str]:
    """Calendar months intersecting the window, trailing partial one dropped."""
    if window_start > window_end:
        return []
    months = []
    year, month = window_start.year, window_start.month
    while (year, month) <= (window_end.year, window_end.month):
        months.append(f"{year:04d}-{month:02d}")
        month += 1
        if month == 13:
            month = 1
            year += 1
    next_month = date(
        window_end.year + (window_end.month == 12),
        window_end.month % 12 + 1,
        1,
    )
    month_end_day = (next_month - timedelta(days=1)).day
    if window_end.day < month_end_day:
        months.pop()
    return months


def dynamic_topics(
    assignment,
    tokenized_docs,
    dates,
    window_start,
    window_end,
    top_k: int = 10,
) -> list[tuple[int, str, list]]:
    """Per (topic, month) keyword lists; statistics recomputed per month.

    Returns rows (topic, "YYYY-MM", keywords) sorted by topic then month;
    empty cells are omitted.
    """
    months = complete_months(window_start, window_end)
    month_set = set(months)
    labels = np.asarray(assignment)

    by_month: dict[str, list[int]] = {}
    for idx, d in enumerate(dates):
        key = month_key(d)
        if key in month_set and int(labels[idx]) >= 0:
            by_month.setdefault(key, []).append(idx)

    rows = []
    for key in months:
        idxs = by_month.get(key)
        if not idxs:
            continue
        sub_assignment = [int(labels[i]) for i in idxs]
        sub_docs = [tokenized_docs[i] for i in idxs]
        for summary in ctfidf(sub_assignment, sub_docs, vectors=None, top_k=top_k):
            rows.append((summary.topic, key, summary.keywords))
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows
