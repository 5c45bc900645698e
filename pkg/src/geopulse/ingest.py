"""Parsing, eligibility filtering and canonicalization of post dumps.

A dump is line-delimited UTF-8, one JSON object per line. Field locations
are configurable through a schema mapping so both flat and nested archival
layouts load; values reached through a ``[]`` path segment are collected
across list items.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from importlib import resources

from .errors import MalformedRecord, MissingField
from .textnorm import preprocess

DEFAULT_SCHEMA = {
    "id": "id",
    "created_at": "created_at",
    "text": "text",
    "geo_full_name": "geo.full_name",
    "geo_country": "geo.country",
    "source": "source",
    "author_id": "author_id",
    "hashtags": "entities.hashtags[].tag",
    "mentions": "entities.mentions[].username",
}

HASHTAG_RE = re.compile(r"#(\w+)")
MENTION_RE = re.compile(r"@(\w+)")
_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


@dataclass
class TweetRecord:
    id: int
    created_at: datetime  # tz-aware UTC, second resolution
    text: str
    geo_full_name: str = ""
    geo_country: str = ""
    source: str = ""
    author_id: int = 0
    hashtags: list[str] = field(default_factory=list)
    mentions: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        obj = {
            "id": self.id,
            "created_at": self.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "text": self.text,
            "geo_full_name": self.geo_full_name,
            "geo_country": self.geo_country,
            "source": self.source,
            "author_id": self.author_id,
            "hashtags": self.hashtags,
            "mentions": self.mentions,
        }
        return json.dumps(obj, ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "TweetRecord":
        return parse_record(line, CANONICAL_SCHEMA)


# The canonical file written by the ingest stage uses flat field names.
CANONICAL_SCHEMA = {
    "id": "id",
    "created_at": "created_at",
    "text": "text",
    "geo_full_name": "geo_full_name",
    "geo_country": "geo_country",
    "source": "source",
    "author_id": "author_id",
    "hashtags": "hashtags",
    "mentions": "mentions",
}


def _resolve(obj, path: str):
    """Walk a dotted path; a trailing ``[]`` on a segment maps over a list."""
    current = [obj]
    for seg in path.split("."):
        fan_out = seg.endswith("[]")
        if fan_out:
            seg = seg[:-2]
        nxt = []
        for item in current:
            if not isinstance(item, dict) or seg not in item:
                continue
            value = item[seg]
            if fan_out:
                if isinstance(value, list):
                    nxt.extend(value)
            else:
                nxt.append(value)
        current = nxt
    return current


def _single(obj, path: str):
    values = _resolve(obj, path)
    return values[0] if values else None


def _parse_timestamp(raw) -> datetime:
    if not isinstance(raw, str) or not raw:
        raise MalformedRecord(f"bad timestamp: {raw!r}")
    text = raw.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError as exc:
        raise MalformedRecord(f"bad timestamp: {raw!r}") from exc
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def _parse_uint(raw, name: str) -> int:
    try:
        value = int(raw)
    except (TypeError, ValueError) as exc:
        raise MalformedRecord(f"bad {name}: {raw!r}") from exc
    if value < 0:
        raise MalformedRecord(f"negative {name}: {raw!r}")
    return value


def _clean_tokens(values, sigil: str) -> list[str]:
    out = []
    for value in values:
        if not isinstance(value, str):
            continue
        token = value.strip().lstrip(sigil).lower()
        if token and _TOKEN_RE.fullmatch(token):
            out.append(token)
    return out


def _entity_tokens(obj, path: str, sigil: str):
    values = _resolve(obj, path)
    if len(values) == 1 and isinstance(values[0], str) and (" " in values[0] or "," in values[0]):
        # flat schemas may pack tokens into one delimited string
        values = re.split(r"[\s,]+", values[0])
    return _clean_tokens(values, sigil)


def parse_record(line: str, schema: dict[str, str] | None = None) -> TweetRecord:
    """Parse one dump line into a TweetRecord.

    Raises MalformedRecord for unparseable lines and MissingField when a
    required field (id, created_at, text) is absent.
    """
    schema = schema or DEFAULT_SCHEMA
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedRecord(f"not valid JSON: {line[:80]!r}") from exc
    if not isinstance(obj, dict):
        raise MalformedRecord(f"record is not an object: {line[:80]!r}")

    for required in ("id", "created_at", "text"):
        if _single(obj, schema[required]) is None:
            raise MissingField(required)

    text = _single(obj, schema["text"])
    if not isinstance(text, str):
        raise MalformedRecord(f"text is not a string: {text!r}")

    hashtags = _entity_tokens(obj, schema["hashtags"], "#")
    mentions = _entity_tokens(obj, schema["mentions"], "@")
    if not hashtags:
        hashtags = [t.lower() for t in HASHTAG_RE.findall(text)]
    if not mentions:
        mentions = [t.lower() for t in MENTION_RE.findall(text)]

    author_raw = _single(obj, schema["author_id"])

    return TweetRecord(
        id=_parse_uint(_single(obj, schema["id"]), "id"),
        created_at=_parse_timestamp(_single(obj, schema["created_at"])),
        text=text,
        geo_full_name=str(_single(obj, schema["geo_full_name"]) or ""),
        geo_country=str(_single(obj, schema["geo_country"]) or ""),
        source=str(_single(obj, schema["source"]) or ""),
        author_id=_parse_uint(author_raw, "author_id") if author_raw is not None else 0,
        hashtags=hashtags,
        mentions=mentions,
    )


def default_terms() -> list[str]:
    raw = resources.files("geopulse.data").joinpath("tracking_terms.txt").read_text("utf-8")
    return [line.strip().lower() for line in raw.splitlines() if line.strip()]


def load_terms(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        terms = [line.strip().lower() for line in fh if line.strip()]
    return terms


@dataclass
class TrackingFilter:
    """Eligibility filter mirroring the collection query.

    Terms starting with '#' match the hashtag set exactly (sigil stripped);
    plain terms match the lowercased text, or any single hashtag, as
    substrings bounded by non-word characters.
    """

    terms: list[str]
    require_country: str | None = None
    date_start: date | None = None
    date_end: date | None = None
    tz_offset_minutes: int = 0

    def __post_init__(self):
        if not self.terms:
            raise ValueError("tracking filter needs at least one term")
        self.terms = [t.lower() for t in self.terms]
        if self.date_start and self.date_end and self.date_start > self.date_end:
            raise ValueError("date_start after date_end")
        self._hashtag_terms = {t[1:] for t in self.terms if t.startswith("#") and len(t) > 1}
        keywords = [t for t in self.terms if not t.startswith("#")]
        self._keyword_res = [
            re.compile(r"(?<!\w)" + re.escape(kw) + r"(?!\w)") for kw in keywords
        ]
        self._country = self.require_country.lower() if self.require_country else None

    def local_date(self, ts: datetime) -> date:
        return bucket_date(ts, self.tz_offset_minutes)


def matches_filter(rec: TweetRecord, f: TrackingFilter) -> bool:
    if f._country is not None and rec.geo_country.lower() != f._country:
        return False
    if f.date_start or f.date_end:
        d = f.local_date(rec.created_at)
        if f.date_start and d < f.date_start:
            return False
        if f.date_end and d > f.date_end:
            return False
    tagset = set(rec.hashtags)
    if tagset & f._hashtag_terms:
        return True
    low = rec.text.lower()
    for kw_re in f._keyword_res:
        if kw_re.search(low):
            return True
        if any(kw_re.fullmatch(tag) for tag in tagset):
            return True
    return False


@dataclass
class IngestSummary:
    read: int = 0
    malformed: int = 0
    duplicate: int = 0
    matched: int = 0

    def to_dict(self) -> dict:
        return {
            "read": self.read,
            "malformed": self.malformed,
            "duplicate": self.duplicate,
            "matched": self.matched,
        }


def _parse_or_none(line: str, schema):
    try:
        return parse_record(line, schema)
    except MalformedRecord:
        return None


def parallel_map(fn, items, workers: int):
    """Order-preserving map; output is identical for any worker count."""
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=64))


def ingest_dump(
    lines,
    f: TrackingFilter,
    schema: dict[str, str] | None = None,
    workers: int = 1,
    normalize_text: bool = True,
) -> tuple[list[TweetRecord], IngestSummary]:
    """Parse, deduplicate (first id occurrence wins) and filter a dump.

    Matched records get their text normalized so the canonical output file
    carries preprocessed text.
    """
    summary = IngestSummary()
    candidates = [line for line in lines if line.strip()]
    summary.read = len(candidates)
    parsed = parallel_map(lambda ln: _parse_or_none(ln, schema), candidates, workers)

    seen: set[int] = set()
    unique: list[TweetRecord] = []
    for rec in parsed:
        if rec is None:
            summary.malformed += 1
        elif rec.id in seen:
            summary.duplicate += 1
        else:
            seen.add(rec.id)
            unique.append(rec)

    matched = [rec for rec in unique if matches_filter(rec, f)]
    summary.matched = len(matched)
    if normalize_text:
        texts = parallel_map(preprocess, [r.text for r in matched], workers)
        for rec, text in zip(matched, texts):
            rec.text = text
    return matched, summary


def bucket_date(ts: datetime, tz_offset_minutes: int = 0) -> date:
    """Day bucket of a UTC timestamp, optionally shifted for local-time studies."""
    return (ts + timedelta(minutes=tz_offset_minutes)).date()


def day_range(start: date, end: date) -> list[date]:
    """Inclusive contiguous day sequence."""
    if start > end:
        raise ValueError("start after end")
    n = (end - start).days + 1
    return [start + timedelta(days=i) for i in range(n)]
