"""Offline place-name normalization to state/territory codes."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

# Fixed ordering used everywhere a deterministic region order is needed.
REGIONS = ("VIC", "NSW", "QLD", "WA", "SA", "ACT", "TAS", "NT")
UNKNOWN = "UNKNOWN"

STATE_NAMES = {
    "victoria": "VIC",
    "new south wales": "NSW",
    "queensland": "QLD",
    "western australia": "WA",
    "south australia": "SA",
    "australian capital territory": "ACT",
    "tasmania": "TAS",
    "northern territory": "NT",
    "vic": "VIC",
    "nsw": "NSW",
    "qld": "QLD",
    "wa": "WA",
    "sa": "SA",
    "act": "ACT",
    "tas": "TAS",
    "nt": "NT",
}

_WS_RE = re.compile(r"\s+")


def _norm_key(name: str) -> str:
    """Lowercase and normalize comma/space layout."""
    name = _WS_RE.sub(" ", name.strip().lower())
    parts = [seg.strip() for seg in name.split(",")]
    return ", ".join(seg for seg in parts if seg)


@dataclass
class Gazetteer:
    """Exact place lookups plus state-name suffix fallback.

    Lookup is total: anything unresolved maps to UNKNOWN.
    """

    exact: dict[str, str] = field(default_factory=dict)
    suffix: dict[str, str] = field(default_factory=lambda: dict(STATE_NAMES))

    @classmethod
    def from_file(cls, path) -> "Gazetteer":
        exact: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                try:
                    pattern, code = line.split("\t")
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: expected two tab-separated columns") from exc
                code = code.strip().upper()
                if code not in REGIONS:
                    raise ValueError(f"{path}:{lineno}: unknown region code {code!r}")
                exact[_norm_key(pattern)] = code
        return cls(exact=exact)

    @classmethod
    def default(cls) -> "Gazetteer":
        with resources.as_file(
            resources.files("geopulse.data").joinpath("gazetteer.tsv")
        ) as path:
            return cls.from_file(path)


def normalize_place(geo_full_name: str, g: Gazetteer) -> str:
    """Resolve a free-text place name to a region code or UNKNOWN.

    Order: exact match, then the segment after the last comma against state
    names/abbreviations, then the segment before the first comma.
    """
    key = _norm_key(geo_full_name or "")
    if not key:
        return UNKNOWN
    hit = g.exact.get(key)
    if hit:
        return hit
    segments = key.split(", ")
    hit = g.suffix.get(segments[-1])
    if hit:
        return hit
    hit = g.suffix.get(segments[0])
    if hit:
        return hit
    return UNKNOWN
