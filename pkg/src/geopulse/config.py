"""Pipeline configuration: INI file with sections, every key overridable
by a command-line flag of the same name."""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass, fields
from datetime import date, datetime
from pathlib import Path

from .errors import ConfigError

EMBEDDING_MODES = ("default", "external")
SENTIMENT_MODES = ("lexicon", "external")
GEXF_MODES = ("hashtag", "mention")


@dataclass
class PipelineConfig:
    dump: str = ""
    schema_file: str = ""
    terms_file: str = ""
    country: str = ""
    date_start: date | None = None
    date_end: date | None = None
    tz_offset_minutes: int = 0
    gazetteer_file: str = ""
    gexf_mode: str = "hashtag"
    embedding: str = "default"
    dim: int = 256
    reduce_dim: int = 16
    min_cluster_size: int = 10
    top_k: int = 10
    sentiment_mode: str = "lexicon"
    lexicon_file: str = ""
    sentiment_threshold: float = 0.1
    provider_host: str = "127.0.0.1"
    provider_port: int = 7878
    cases_file: str = ""
    deaths_file: str = ""
    max_lag: int = 90
    alpha: float = 0.05
    difference: int = 0
    output_dir: str = "out"
    workers: int = 1
    seed: int = 0

    # execution parameters; they never change analysis output bytes
    _NON_SEMANTIC = ("output_dir", "workers")

    def canonical(self) -> str:
        payload = {}
        for f in fields(self):
            if f.name in self._NON_SEMANTIC:
                continue
            value = getattr(self, f.name)
            payload[f.name] = value.isoformat() if isinstance(value, date) else value
        return json.dumps(payload, sort_keys=True)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()

    @property
    def window_days(self) -> int:
        return (self.date_end - self.date_start).days + 1


_SECTION_KEYS = {
    "input": ("dump", "schema_file"),
    "filter": ("terms_file", "country", "date_start", "date_end", "tz_offset_minutes"),
    "gazetteer": ("gazetteer_file", "gexf_mode"),
    "topics": ("embedding", "dim", "reduce_dim", "min_cluster_size", "top_k"),
    "sentiment": ("sentiment_mode", "lexicon_file", "sentiment_threshold"),
    "provider": ("provider_host", "provider_port"),
    "causality": ("cases_file", "deaths_file", "max_lag", "alpha", "difference"),
    "output": ("output_dir",),
    "run": ("workers", "seed"),
}

_INT_KEYS = {
    "tz_offset_minutes", "dim", "reduce_dim", "min_cluster_size", "top_k",
    "provider_port", "max_lag", "difference", "workers", "seed",
}
_FLOAT_KEYS = {"sentiment_threshold", "alpha"}
_DATE_KEYS = {"date_start", "date_end"}
_PATH_KEYS = {
    "dump", "schema_file", "terms_file", "gazetteer_file", "lexicon_file",
    "cases_file", "deaths_file", "output_dir",
}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _DATE_KEYS:
            return datetime.strptime(raw, "%Y-%m-%d").date()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def load_config(path, overrides: dict | None = None) -> PipelineConfig:
    """Read the INI file, resolve relative paths against its directory, then
    apply overrides (already-typed values win verbatim)."""
    cfg = PipelineConfig()
    if path:
        parser = configparser.ConfigParser()
        read = parser.read(path, encoding="utf-8")
        if not read:
            raise ConfigError(f"config file not found: {path}")
        base = Path(path).resolve().parent
        for section in parser.sections():
            if section not in _SECTION_KEYS:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in _SECTION_KEYS[section]:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                value = _coerce(key, raw)
                if key in _PATH_KEYS and value:
                    value = str((base / value).resolve()) if not Path(value).is_absolute() else value
                setattr(cfg, key, value)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if not hasattr(cfg, key):
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(value, str):
            value = _coerce(key, value)
        setattr(cfg, key, value)
    return cfg


def validate(cfg: PipelineConfig, stage: str) -> None:
    """Fail fast with ConfigError before any stage work starts."""
    if not 0.0 < cfg.alpha < 1.0:
        raise ConfigError(f"alpha must be inside (0, 1), got {cfg.alpha}")
    if cfg.max_lag < 1:
        raise ConfigError("max_lag must be >= 1")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    if cfg.dim < 1 or cfg.top_k < 1 or cfg.min_cluster_size < 2:
        raise ConfigError("dim and top_k must be >= 1, min_cluster_size >= 2")
    if cfg.difference < 0:
        raise ConfigError("difference must be >= 0")
    if cfg.embedding not in EMBEDDING_MODES:
        raise ConfigError(f"embedding must be one of {EMBEDDING_MODES}")
    if cfg.sentiment_mode not in SENTIMENT_MODES:
        raise ConfigError(f"sentiment mode must be one of {SENTIMENT_MODES}")
    if cfg.gexf_mode not in GEXF_MODES:
        raise ConfigError(f"gexf_mode must be one of {GEXF_MODES}")
    if not 0.0 < cfg.sentiment_threshold < 1.0:
        raise ConfigError("sentiment_threshold must be inside (0, 1)")
    if cfg.date_start is None or cfg.date_end is None:
        raise ConfigError("date_start and date_end are required")
    if cfg.date_start > cfg.date_end:
        raise ConfigError("date_start after date_end")
    if not cfg.output_dir:
        raise ConfigError("output_dir is required")

    needs_dump = stage in ("ingest", "all")
    if needs_dump and not cfg.dump:
        raise ConfigError("input dump path is required")
    for key in ("dump",) if needs_dump else ():
        if not Path(getattr(cfg, key)).is_file():
            raise ConfigError(f"{key} file does not exist: {getattr(cfg, key)}")
    for key in ("schema_file", "terms_file", "gazetteer_file", "lexicon_file"):
        value = getattr(cfg, key)
        if value and not Path(value).is_file():
            raise ConfigError(f"{key} file does not exist: {value}")

    if stage in ("causality", "all"):
        if not cfg.cases_file and not cfg.deaths_file:
            raise ConfigError("causality requires cases_file and/or deaths_file")
        for key in ("cases_file", "deaths_file"):
            value = getattr(cfg, key)
            if value and not Path(value).is_file():
                raise ConfigError(f"{key} file does not exist: {value}")
        usable = cfg.window_days - cfg.difference
        if usable - cfg.max_lag < 2 * cfg.max_lag + 2:
            raise ConfigError(
                f"window of {usable} usable days is too short for max_lag "
                f"{cfg.max_lag}; need at least {3 * cfg.max_lag + 2}"
            )
