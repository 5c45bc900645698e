"""Three-class sentiment plus the daily/interest series built on it.

The lexicon classifier averages token polarities (sign flipped after a
negator), then maps the mean score s onto the 3-simplex with a clamped
piecewise-linear rule around the +-threshold band:

  s >  thr : positive = 0.5 + 0.5*(s-thr)/(1-thr), remainder split 3:1
             neutral:negative
  s < -thr : mirrored for negative
  else     : neutral = 0.5 + 0.5*(thr-|s|)/thr, remainder leaning toward
             the sign of s

The label always equals the score argmax; exact ties resolve
neutral > negative > positive.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources

from .errors import AllZero, InvalidScores

LABELS = ("negative", "neutral", "positive")
NEGATORS = {"not", "no", "never"}
DEFAULT_THRESHOLD = 0.1

_TOKEN_RE = re.compile(r"[a-z0-9_']+")


@dataclass
class SentimentLabel:
    label: str
    scores: tuple  # (negative, neutral, positive), sums to 1

    @property
    def index(self) -> int:
        return LABELS.index(self.label)


def _label_from_scores(scores) -> str:
    neg, neu, pos = scores
    best = max(scores)
    # tie order: neutral, then negative, then positive
    if neu == best:
        return "neutral"
    if neg == best:
        return "negative"
    return "positive"


def _scores_from_mean(s: float, thr: float) -> tuple:
    s = min(1.0, max(-1.0, s))
    if s > thr:
        pos = 0.5 + 0.5 * (s - thr) / (1.0 - thr)
        rem = 1.0 - pos
        neu = 0.75 * rem
        neg = rem - neu
    elif s < -thr:
        neg = 0.5 + 0.5 * (-s - thr) / (1.0 - thr)
        rem = 1.0 - neg
        neu = 0.75 * rem
        pos = rem - neu
    else:
        neu = 0.5 + 0.5 * (thr - abs(s)) / thr
        rem = 1.0 - neu
        lean = 0.5 + 0.5 * abs(s) / thr
        major = rem * lean
        minor = rem - major
        pos, neg = (major, minor) if s >= 0 else (minor, major)
    return (neg, neu, pos)


def load_lexicon(path) -> dict[str, float]:
    lexicon = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                term, raw = line.split("\t")
                polarity = float(raw)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: expected 'term<TAB>polarity'") from exc
            if not -1.0 <= polarity <= 1.0:
                raise ValueError(f"{path}:{lineno}: polarity outside [-1, 1]")
            lexicon[term.strip().lower()] = polarity
    return lexicon


def default_lexicon() -> dict[str, float]:
    with resources.as_file(
        resources.files("geopulse.data").joinpath("sentiment_lexicon.tsv")
    ) as path:
        return load_lexicon(path)


def classify_lexicon(text: str, lexicon: dict[str, float], threshold: float = DEFAULT_THRESHOLD) -> SentimentLabel:
    tokens = _TOKEN_RE.findall(text.lower())
    raw = 0.0
    for i, token in enumerate(tokens):
        polarity = lexicon.get(token)
        if polarity is None:
            continue
        if i > 0 and tokens[i - 1] in NEGATORS:
            polarity = -polarity
        raw += polarity
    s = raw / max(1, len(tokens))
    scores = _scores_from_mean(s, threshold)
    return SentimentLabel(label=_label_from_scores(scores), scores=scores)


def classify_external(texts: list[str], client) -> list[SentimentLabel]:
    """Classify through a provider; validates and renormalizes the scores."""
    out = []
    for i, scores in enumerate(client.sentiment(texts)):
        if len(scores) != 3:
            raise InvalidScores(f"item {i}: expected 3 scores, got {len(scores)}")
        if any(v < 0 for v in scores):
            raise InvalidScores(f"item {i}: negative score in {scores}")
        total = sum(scores)
        if abs(total - 1.0) > 1e-3:
            raise InvalidScores(f"item {i}: scores sum to {total}")
        normalized = tuple(v / total for v in scores)
        out.append(SentimentLabel(label=_label_from_scores(normalized), scores=normalized))
    return out


def region_brackets(region_labels) -> dict[str, tuple]:
    """Per-region (neutral%, negative%, positive%); empty regions omitted.

    region_labels: iterable of (region, label) pairs.
    """
    counts: dict[str, Counter] = {}
    for region, label in region_labels:
        counts.setdefault(region, Counter())[label] += 1
    out = {}
    for region, c in counts.items():
        total = sum(c.values())
        out[region] = (
            100.0 * c["neutral"] / total,
            100.0 * c["negative"] / total,
            100.0 * c["positive"] / total,
        )
    return out


def daily_series(group_date_labels, window_start, window_end) -> dict[tuple, list]:
    """Zero-filled daily counts per (group, label).

    group_date_labels: iterable of (group, date, label). Every (group, label)
    combination observed gets a series covering the whole window.
    """
    n_days = (window_end - window_start).days + 1
    if n_days <= 0:
        raise ValueError("empty window")
    series: dict[tuple, list] = {}
    groups = set()
    for group, d, label in group_date_labels:
        groups.add(group)
        key = (group, label)
        if key not in series:
            series[key] = [0] * n_days
        offset = (d - window_start).days
        if 0 <= offset < n_days:
            series[key][offset] += 1
    # make label sets uniform per group
    for group in groups:
        for label in LABELS:
            series.setdefault((group, label), [0] * n_days)
    return series


def interest(series_group: dict) -> dict:
    """Jointly rescale a group of series so the single global max is 100."""
    peak = 0.0
    for values in series_group.values():
        for v in values:
            if v > peak:
                peak = float(v)
    if peak <= 0.0:
        raise AllZero("no positive count in the normalization group")
    return {
        key: [100.0 * v / peak for v in values] for key, values in series_group.items()
    }
