"""Pipeline orchestration: stage commands, atomic artifacts, manifest.

Each stage persists canonical outputs in the output directory and records
artifact digests and row counts in manifest.json. Re-running a stage with
unchanged inputs and config produces byte-identical files; stage wall times
go to stderr only, so the manifest stays deterministic.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import PipelineConfig, load_config, validate
from .causality import build_series, difference, load_target, run_suite
from .embedding import embed_default, embed_external, reduce
from .errors import ConfigError, PipelineError, StageInputMissing
from .geonorm import REGIONS, UNKNOWN, Gazetteer, normalize_place
from .ingest import (
    DEFAULT_SCHEMA,
    TrackingFilter,
    TweetRecord,
    bucket_date,
    day_range,
    default_terms,
    ingest_dump,
    load_terms,
    parallel_map,
)
from .netgraph import (
    aggregate,
    build_relations,
    degree_table,
    export_graph,
    prominent_region,
    region_specific_tokens,
)
from .clustering import cluster
from .provider_client import ProviderClient
from .sentiment import (
    classify_external,
    classify_lexicon,
    daily_series,
    default_lexicon,
    interest,
    load_lexicon,
    region_brackets,
)
from .topics import (
    ctfidf,
    default_stopwords,
    dynamic_topics,
    similarity_matrix,
    tokenize_for_keywords,
)

STAGES = ("ingest", "graph", "topics", "sentiment", "causality")


# ----------------------------------------------------------------- file utils

def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + f".tmp-{os.getpid()}")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _write_text(path: Path, text: str) -> None:
    _atomic_write(path, text.encode("utf-8"))


def _csv_bytes(header, rows, preamble: str = "") -> bytes:
    buf = io.StringIO()
    if preamble:
        buf.write(preamble.rstrip("\n") + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class StageWriter:
    """Collects artifacts for one stage and the manifest fragment."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.artifacts: dict[str, dict] = {}

    def write(self, name: str, data: bytes, rows: int) -> None:
        _atomic_write(self.out_dir / name, data)
        self.artifacts[name] = {"sha256": _sha256(data), "rows": rows}


def _input_digests(cfg: PipelineConfig) -> dict:
    digests = {}
    for key in ("dump", "schema_file", "terms_file", "gazetteer_file",
                "lexicon_file", "cases_file", "deaths_file"):
        value = getattr(cfg, key)
        if value and Path(value).is_file():
            digests[key] = _file_sha256(value)
    return digests


def _update_manifest(cfg: PipelineConfig, stage: str, fragment: dict) -> None:
    path = Path(cfg.output_dir) / "manifest.json"
    manifest = {}
    if path.is_file():
        manifest = json.loads(path.read_text("utf-8"))
    manifest["config_hash"] = cfg.config_hash()
    manifest["inputs"] = _input_digests(cfg)
    manifest.setdefault("stages", {})[stage] = fragment
    _write_text(path, json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _require(out_dir: Path, name: str, needed_by: str) -> Path:
    path = out_dir / name
    if not path.is_file():
        raise StageInputMissing(f"stage '{needed_by}' needs {name}; run the producing stage first")
    return path


# -------------------------------------------------------------- shared loads

def _load_schema(cfg: PipelineConfig) -> dict:
    if not cfg.schema_file:
        return DEFAULT_SCHEMA
    schema = json.loads(Path(cfg.schema_file).read_text("utf-8"))
    missing = set(DEFAULT_SCHEMA) - set(schema)
    if missing:
        raise ConfigError(f"schema file missing fields: {sorted(missing)}")
    return schema


def _load_filter(cfg: PipelineConfig) -> TrackingFilter:
    terms = load_terms(cfg.terms_file) if cfg.terms_file else default_terms()
    try:
        return TrackingFilter(
            terms=terms,
            require_country=cfg.country or None,
            date_start=cfg.date_start,
            date_end=cfg.date_end,
            tz_offset_minutes=cfg.tz_offset_minutes,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _load_gazetteer(cfg: PipelineConfig) -> Gazetteer:
    if cfg.gazetteer_file:
        return Gazetteer.from_file(cfg.gazetteer_file)
    return Gazetteer.default()


def _read_records(out_dir: Path, needed_by: str) -> list[TweetRecord]:
    path = _require(out_dir, "records.jsonl", needed_by)
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(TweetRecord.from_json(line))
    return records


def _read_assignments(out_dir: Path, needed_by: str) -> dict[int, int]:
    path = _require(out_dir, "assignments.csv", needed_by)
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            out[int(row[0])] = int(row[1])
    return out


def _read_labels(out_dir: Path, needed_by: str) -> dict[int, str]:
    path = _require(out_dir, "sentiment_labels.csv", needed_by)
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            out[int(row[0])] = row[1]
    return out


def _record_dates(records, cfg: PipelineConfig):
    return {rec.id: bucket_date(rec.created_at, cfg.tz_offset_minutes) for rec in records}


# -------------------------------------------------------------------- stages

def stage_ingest(cfg: PipelineConfig) -> dict:
    out_dir = Path(cfg.output_dir)
    schema = _load_schema(cfg)
    tracking = _load_filter(cfg)
    with open(cfg.dump, encoding="utf-8") as fh:
        lines = fh.readlines()
    records, summary = ingest_dump(lines, tracking, schema=schema, workers=cfg.workers)
    writer = StageWriter(out_dir)
    body = "".join(rec.to_json() + "\n" for rec in records)
    writer.write("records.jsonl", body.encode("utf-8"), rows=len(records))
    summary_json = json.dumps(summary.to_dict(), sort_keys=True, indent=2) + "\n"
    writer.write("ingest_summary.json", summary_json.encode("utf-8"), rows=1)
    return {"artifacts": writer.artifacts, "counts": summary.to_dict()}


def stage_graph(cfg: PipelineConfig) -> dict:
    out_dir = Path(cfg.output_dir)
    records = _read_records(out_dir, "graph")
    gaz = _load_gazetteer(cfg)
    writer = StageWriter(out_dir)

    unknown = sum(1 for r in records if normalize_place(r.geo_full_name, gaz) == UNKNOWN)
    if unknown:
        print(f"graph: {unknown} records resolve to no region and are excluded", file=sys.stderr)

    degree_rows = []
    prominent_rows = []
    specific_rows = []
    gexf_doc = None
    relation_counts = {}
    for mode in ("hashtag", "mention"):
        graph = aggregate(build_relations(records, mode, gaz))
        relation_counts[mode] = {
            "relations": graph.total_weight,
            "nodes": graph.node_count,
            "edges": graph.edge_count,
        }
        table = degree_table(graph)
        for region, out_deg, weighted in table.region_rows:
            degree_rows.append([mode, "region", region, out_deg, weighted])
        for token, in_deg, weighted in table.token_rows:
            degree_rows.append([mode, "token", token, in_deg, weighted])
        for token, in_deg, weighted in table.token_rows:
            prominent_rows.append([mode, token, prominent_region(token, graph), in_deg, weighted])
        for region, (tokens, count, weighted) in region_specific_tokens(graph).items():
            specific_rows.append([mode, region, count, weighted, ";".join(tokens[:5])])
        if mode == cfg.gexf_mode:
            gexf_doc = export_graph(graph, "gexf")
    specific_rows.sort(key=lambda r: (r[0], REGIONS.index(r[1])))

    writer.write(
        "degree_table.csv",
        _csv_bytes(["mode", "kind", "name", "degree", "weighted_degree"], degree_rows),
        rows=len(degree_rows),
    )
    writer.write(
        "prominent.csv",
        _csv_bytes(["mode", "token", "region", "in_degree", "weighted_in_degree"], prominent_rows),
        rows=len(prominent_rows),
    )
    writer.write(
        "region_specific.csv",
        _csv_bytes(["mode", "region", "count", "weighted_sum", "top_tokens"], specific_rows),
        rows=len(specific_rows),
    )
    writer.write("graph.gexf", gexf_doc.encode("utf-8"), rows=gexf_doc.count("<edge "))
    return {
        "artifacts": writer.artifacts,
        "counts": {"records": len(records), "unknown_region": unknown, **relation_counts},
    }


def _embed(cfg: PipelineConfig, texts: list[str]) -> np.ndarray:
    if cfg.embedding == "external":
        with ProviderClient(cfg.provider_host, cfg.provider_port) as client:
            return embed_external(texts, client)
    return embed_default(texts, dim=cfg.dim)


def stage_topics(cfg: PipelineConfig) -> dict:
    out_dir = Path(cfg.output_dir)
    records = _read_records(out_dir, "topics")
    if not records:
        raise PipelineError("no records to model; ingest produced an empty corpus")
    writer = StageWriter(out_dir)
    stopwords = default_stopwords()

    texts = [rec.text for rec in records]
    vectors = _embed(cfg, texts)
    if 0 < cfg.reduce_dim < vectors.shape[1] and len(records) > cfg.reduce_dim:
        reduced = reduce(vectors, cfg.reduce_dim)
    else:
        reduced = vectors
    labels = cluster(reduced, cfg.min_cluster_size)
    tokenized = [tokenize_for_keywords(t, stopwords) for t in texts]
    summaries = ctfidf(labels, tokenized, vectors=vectors, top_k=cfg.top_k)

    assignment_rows = [[rec.id, int(label)] for rec, label in zip(records, labels)]
    writer.write(
        "assignments.csv",
        _csv_bytes(["record_id", "topic"], assignment_rows),
        rows=len(assignment_rows),
    )
    topic_rows = [
        [s.topic, s.size, ";".join(f"{term}:{weight:.6f}" for term, weight in s.keywords)]
        for s in summaries
    ]
    writer.write("topics.csv", _csv_bytes(["topic", "size", "keywords"], topic_rows), rows=len(topic_rows))

    if len(summaries) >= 2:
        S, order = similarity_matrix(summaries)
        ids = [summaries[i].topic for i in order]
        sim_rows = [
            [ids[r]] + [f"{S[order[r], order[c]]:.6f}" for c in range(len(order))]
            for r in range(len(order))
        ]
        sim_bytes = _csv_bytes(["topic"] + [str(i) for i in ids], sim_rows)
    else:
        sim_bytes = _csv_bytes(["topic"], [])
    writer.write("similarity.csv", sim_bytes, rows=max(len(summaries), 0))

    dates = _record_dates(records, cfg)
    doc_dates = [dates[rec.id] for rec in records]
    dyn = dynamic_topics(labels, tokenized, doc_dates, cfg.date_start, cfg.date_end, top_k=cfg.top_k)
    dyn_rows = [
        [topic, month, ";".join(f"{term}:{weight:.6f}" for term, weight in keywords)]
        for topic, month, keywords in dyn
    ]
    writer.write(
        "dynamic_topics.csv", _csv_bytes(["topic", "month", "keywords"], dyn_rows), rows=len(dyn_rows)
    )
    noise = int(np.sum(np.asarray(labels) < 0))
    return {
        "artifacts": writer.artifacts,
        "counts": {"documents": len(records), "topics": len(summaries), "noise_documents": noise},
    }


def stage_sentiment(cfg: PipelineConfig) -> dict:
    out_dir = Path(cfg.output_dir)
    records = _read_records(out_dir, "sentiment")
    assignments = _read_assignments(out_dir, "sentiment")
    writer = StageWriter(out_dir)
    gaz = _load_gazetteer(cfg)

    if cfg.sentiment_mode == "external":
        with ProviderClient(cfg.provider_host, cfg.provider_port) as client:
            labels = classify_external([r.text for r in records], client)
    else:
        lexicon = load_lexicon(cfg.lexicon_file) if cfg.lexicon_file else default_lexicon()
        labels = parallel_map(
            lambda text: classify_lexicon(text, lexicon, cfg.sentiment_threshold),
            [r.text for r in records],
            cfg.workers,
        )

    label_rows = [
        [rec.id, lab.label] + [f"{s:.6f}" for s in lab.scores]
        for rec, lab in zip(records, labels)
    ]
    writer.write(
        "sentiment_labels.csv",
        _csv_bytes(["record_id", "label", "negative", "neutral", "positive"], label_rows),
        rows=len(label_rows),
    )

    regions = {rec.id: normalize_place(rec.geo_full_name, gaz) for rec in records}
    dates = _record_dates(records, cfg)

    region_pairs = [
        (regions[rec.id], lab.label)
        for rec, lab in zip(records, labels)
        if regions[rec.id] != UNKNOWN
    ]
    brackets = region_brackets(region_pairs)
    bracket_rows = [
        [region] + [f"{v:.4f}" for v in brackets[region]]
        + [sum(1 for r, _ in region_pairs if r == region)]
        for region in REGIONS
        if region in brackets
    ]
    writer.write(
        "brackets.csv",
        _csv_bytes(["region", "neutral_pct", "negative_pct", "positive_pct", "total"], bracket_rows),
        rows=len(bracket_rows),
    )

    rows = [
        (regions[rec.id], dates[rec.id], lab.label)
        for rec, lab in zip(records, labels)
        if regions[rec.id] != UNKNOWN
    ]
    series = daily_series(rows, cfg.date_start, cfg.date_end)
    day_list = day_range(cfg.date_start, cfg.date_end)
    daily_rows = []
    for region in REGIONS:
        if (region, "negative") not in series:
            continue
        for i, day in enumerate(day_list):
            daily_rows.append(
                [
                    region,
                    day.isoformat(),
                    series[(region, "negative")][i],
                    series[(region, "neutral")][i],
                    series[(region, "positive")][i],
                ]
            )
    writer.write(
        "daily_sentiment.csv",
        _csv_bytes(["region", "date", "negative", "neutral", "positive"], daily_rows),
        rows=len(daily_rows),
    )

    topic_rows = [
        (assignments.get(rec.id, -1), dates[rec.id], lab.label)
        for rec, lab in zip(records, labels)
        if assignments.get(rec.id, -1) >= 0
    ]
    topic_series = daily_series(topic_rows, cfg.date_start, cfg.date_end)
    interest_rows = []
    skipped = 0
    topics_present = sorted({group for group, _ in topic_series})
    for topic in topics_present:
        group = {
            "negative": topic_series[(topic, "negative")],
            "positive": topic_series[(topic, "positive")],
        }
        if not any(v for vals in group.values() for v in vals):
            skipped += 1
            continue
        curves = interest(group)
        for i, day in enumerate(day_list):
            interest_rows.append(
                [
                    topic,
                    day.isoformat(),
                    f"{curves['negative'][i]:.6f}",
                    f"{curves['positive'][i]:.6f}",
                ]
            )
    writer.write(
        "interest.csv",
        _csv_bytes(["topic", "date", "negative", "positive"], interest_rows),
        rows=len(interest_rows),
    )
    return {
        "artifacts": writer.artifacts,
        "counts": {
            "records": len(records),
            "unknown_region": sum(1 for r in records if regions[r.id] == UNKNOWN),
            "interest_topics_skipped": skipped,
        },
    }


def stage_causality(cfg: PipelineConfig) -> dict:
    out_dir = Path(cfg.output_dir)
    records = _read_records(out_dir, "causality")
    assignments = _read_assignments(out_dir, "causality")
    labels = _read_labels(out_dir, "causality")
    writer = StageWriter(out_dir)

    dates = _record_dates(records, cfg)
    triples = [
        (assignments.get(rec.id, -1), labels.get(rec.id, "neutral"), dates[rec.id])
        for rec in records
        if assignments.get(rec.id, -1) >= 0 and rec.id in labels
    ]
    candidates = build_series(triples, cfg.date_start, cfg.date_end)
    candidates = [difference(s, cfg.difference) for s in candidates]

    topic_names = _topic_names(out_dir)
    name_map = {}
    for series in candidates:
        topic = int(series.name[2:].split(":")[0])
        name_map[series.name] = topic_names.get(topic, "-")

    targets = {}
    clamp_counts = {}
    for key, path in (("cases", cfg.cases_file), ("deaths", cfg.deaths_file)):
        if path:
            series, clamped = load_target(path, key, cfg.date_start, cfg.date_end)
            targets[key] = difference(series, cfg.difference)
            clamp_counts[key] = clamped

    bonferroni = cfg.alpha / max(1, len(candidates) * cfg.max_lag)
    counts = {"candidates": len(candidates), "clamped": clamp_counts}
    for key in ("cases", "deaths"):
        if key not in targets:
            continue
        extra = []
        if key == "deaths" and "cases" in targets:
            extra = [targets["cases"]]
        rows, _ = run_suite(
            candidates,
            targets[key],
            max_lag=cfg.max_lag,
            alpha=cfg.alpha,
            extra_candidates=extra,
            topic_names=name_map,
        )
        preamble = (
            f"# alpha={cfg.alpha}; max_lag={cfg.max_lag}; "
            f"candidates={len(candidates) + len(extra)}; "
            f"bonferroni_alpha={bonferroni:.3e}"
        )
        csv_rows = [
            [
                r.candidate,
                r.topic_name,
                r.significant_count,
                r.significant_lags,
                f"{r.min_p:.6e}" if r.min_p is not None else "",
                r.argmin_lag if r.argmin_lag is not None else "",
            ]
            for r in rows
        ]
        writer.write(
            f"granger_{key}.csv",
            _csv_bytes(
                ["candidate", "topic_name", "signif_count", "signif_lags", "min_p", "argmin_lag"],
                csv_rows,
                preamble=preamble,
            ),
            rows=len(csv_rows),
        )
        counts[f"{key}_significant"] = len(csv_rows)
    return {"artifacts": writer.artifacts, "counts": counts}


def _topic_names(out_dir: Path) -> dict[int, str]:
    path = out_dir / "topics.csv"
    names = {}
    if not path.is_file():
        return names
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            keywords = [kv.split(":")[0] for kv in row[2].split(";") if kv]
            names[int(row[0])] = " ".join(keywords[:3])
    return names


# ----------------------------------------------------------------------- cli

_STAGE_FUNCS = {
    "ingest": stage_ingest,
    "graph": stage_graph,
    "topics": stage_topics,
    "sentiment": stage_sentiment,
    "causality": stage_causality,
}


class StageFailure(PipelineError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage


def run(stage: str, cfg: PipelineConfig) -> int:
    validate(cfg, stage)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stages = list(STAGES) if stage == "all" else [stage]
    for name in stages:
        started = time.monotonic()
        try:
            fragment = _STAGE_FUNCS[name](cfg)
        except (ConfigError, StageInputMissing):
            raise
        except PipelineError as exc:
            raise StageFailure(name, exc) from exc
        _update_manifest(cfg, name, fragment)
        elapsed = time.monotonic() - started
        print(f"{name}: done in {elapsed:.2f}s", file=sys.stderr)
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geopulse",
        description="Batch analytics for geotagged crisis-related microblog dumps",
    )
    parser.add_argument("--version", action="version", version=f"geopulse {__version__}")
    parser.add_argument(
        "--manifest",
        metavar="DIR",
        help="print the manifest of an output directory and exit",
    )
    sub = parser.add_subparsers(dest="stage")
    for name in STAGES + ("all",):
        stage_parser = sub.add_parser(name, help=f"run the {name} stage")
        stage_parser.add_argument("--config", help="INI config file")
        for key, flag in _FLAG_KEYS:
            stage_parser.add_argument(flag, dest=key)
    return parser


_FLAG_KEYS = [
    ("dump", "--dump"),
    ("schema_file", "--schema-file"),
    ("terms_file", "--terms-file"),
    ("country", "--country"),
    ("date_start", "--date-start"),
    ("date_end", "--date-end"),
    ("tz_offset_minutes", "--tz-offset-minutes"),
    ("gazetteer_file", "--gazetteer-file"),
    ("gexf_mode", "--gexf-mode"),
    ("embedding", "--embedding"),
    ("dim", "--dim"),
    ("reduce_dim", "--reduce-dim"),
    ("min_cluster_size", "--min-cluster-size"),
    ("top_k", "--top-k"),
    ("sentiment_mode", "--sentiment-mode"),
    ("lexicon_file", "--lexicon-file"),
    ("sentiment_threshold", "--sentiment-threshold"),
    ("provider_host", "--provider-host"),
    ("provider_port", "--provider-port"),
    ("cases_file", "--cases-file"),
    ("deaths_file", "--deaths-file"),
    ("max_lag", "--max-lag"),
    ("alpha", "--alpha"),
    ("difference", "--difference"),
    ("output_dir", "--output-dir"),
    ("workers", "--workers"),
    ("seed", "--seed"),
]


def main(argv=None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    if args.manifest:
        path = Path(args.manifest) / "manifest.json"
        if not path.is_file():
            print(f"no manifest at {path}", file=sys.stderr)
            return 3
        print(path.read_text("utf-8"), end="")
        return 0
    if not args.stage:
        parser.print_help()
        return 2
    overrides = {key: getattr(args, key) for key, _ in _FLAG_KEYS}
    try:
        cfg = load_config(args.config, overrides)
        return run(args.stage, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StageInputMissing as exc:
        print(f"missing stage input: {exc}", file=sys.stderr)
        return 3
    except PipelineError as exc:
        print(f"stage failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
