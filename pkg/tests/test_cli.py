import json
from pathlib import Path

import pytest

from geopulse.cli import main
from geopulse.config import load_config, validate
from geopulse.errors import ConfigError

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


@pytest.fixture()
def out_dir(tmp_path):
    return tmp_path / "out"


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("--version")
    assert exc.value.code == 0
    assert "geopulse" in capsys.readouterr().out


def test_no_stage_prints_help():
    assert run_cli() == 2


def test_invalid_alpha_is_config_error_before_work(out_dir):
    code = run_cli("all", "--config", FIXTURES / "config.ini", "--output-dir", out_dir, "--alpha", "1.5")
    assert code == 2
    assert not out_dir.exists() or not any(out_dir.iterdir())


def test_bad_date_order_rejected(out_dir):
    code = run_cli(
        "ingest", "--config", FIXTURES / "config.ini", "--output-dir", out_dir,
        "--date-start", "2021-05-01", "--date-end", "2021-01-01",
    )
    assert code == 2


def test_missing_dump_rejected(out_dir):
    code = run_cli(
        "ingest", "--config", FIXTURES / "config.ini", "--output-dir", out_dir,
        "--dump", "/nonexistent/dump.jsonl",
    )
    assert code == 2


def test_causality_without_topics_is_stage_input_missing(out_dir):
    code = run_cli("ingest", "--config", FIXTURES / "config.ini", "--output-dir", out_dir)
    assert code == 0
    code = run_cli("causality", "--config", FIXTURES / "config.ini", "--output-dir", out_dir)
    assert code == 3


def test_graph_without_ingest_is_stage_input_missing(out_dir):
    out_dir.mkdir(parents=True)
    code = run_cli("graph", "--config", FIXTURES / "config.ini", "--output-dir", out_dir)
    assert code == 3


def test_window_too_short_for_max_lag(out_dir):
    code = run_cli(
        "causality", "--config", FIXTURES / "config.ini", "--output-dir", out_dir,
        "--max-lag", "60",
    )
    assert code == 2


def test_full_run_writes_all_artifacts(out_dir):
    code = run_cli("all", "--config", FIXTURES / "config.ini", "--output-dir", out_dir)
    assert code == 0
    expected = {
        "records.jsonl", "ingest_summary.json",
        "degree_table.csv", "prominent.csv", "region_specific.csv", "graph.gexf",
        "topics.csv", "assignments.csv", "similarity.csv", "dynamic_topics.csv",
        "sentiment_labels.csv", "brackets.csv", "daily_sentiment.csv", "interest.csv",
        "granger_cases.csv", "granger_deaths.csv", "manifest.json",
    }
    assert {p.name for p in out_dir.iterdir()} == expected
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert set(manifest["stages"]) == {"ingest", "graph", "topics", "sentiment", "causality"}
    summary = json.loads((out_dir / "ingest_summary.json").read_text())
    assert summary == {"read": 500, "malformed": 8, "duplicate": 6, "matched": 470}
    for stage in manifest["stages"].values():
        for artifact in stage["artifacts"].values():
            assert len(artifact["sha256"]) == 64


def test_manifest_flag_prints(out_dir, capsys):
    run_cli("ingest", "--config", FIXTURES / "config.ini", "--output-dir", out_dir)
    capsys.readouterr()
    assert run_cli("--manifest", out_dir) == 0
    printed = capsys.readouterr().out
    assert json.loads(printed)["stages"]["ingest"]
    assert run_cli("--manifest", out_dir / "missing") == 3


def test_rerunning_single_stage_is_byte_identical(out_dir):
    run_cli("ingest", "--config", FIXTURES / "config.ini", "--output-dir", out_dir)
    first = (out_dir / "records.jsonl").read_bytes()
    first_manifest = (out_dir / "manifest.json").read_bytes()
    run_cli("ingest", "--config", FIXTURES / "config.ini", "--output-dir", out_dir)
    assert (out_dir / "records.jsonl").read_bytes() == first
    assert (out_dir / "manifest.json").read_bytes() == first_manifest


def test_all_line_endings_are_lf(out_dir):
    run_cli("all", "--config", FIXTURES / "config.ini", "--output-dir", out_dir)
    for path in out_dir.iterdir():
        assert b"\r" not in path.read_bytes(), path.name


def test_gexf_mode_flag(out_dir):
    run_cli("ingest", "--config", FIXTURES / "config.ini", "--output-dir", out_dir)
    run_cli("graph", "--config", FIXTURES / "config.ini", "--output-dir", out_dir,
            "--gexf-mode", "mention")
    doc = (out_dir / "graph.gexf").read_text()
    assert 'label="mention"' in doc


def test_custom_schema_file(tmp_path, out_dir):
    schema = dict(
        id="tweet_id", created_at="ts", text="body", geo_full_name="loc",
        geo_country="nation", source="app", author_id="user",
        hashtags="tags", mentions="users",
    )
    schema_path = tmp_path / "schema.json"
    schema_path.write_text(json.dumps(schema))
    dump = tmp_path / "dump.jsonl"
    dump.write_text(
        json.dumps({
            "tweet_id": 5, "ts": "2021-02-01T00:00:00Z", "body": "the pandemic continues",
            "loc": "Melbourne, Victoria", "nation": "Australia", "app": "x", "user": 1,
            "tags": "", "users": "",
        }) + "\n"
    )
    code = run_cli(
        "ingest", "--config", FIXTURES / "config.ini", "--output-dir", out_dir,
        "--dump", dump, "--schema-file", schema_path,
    )
    assert code == 0
    summary = json.loads((out_dir / "ingest_summary.json").read_text())
    assert summary["matched"] == 1


def test_config_loading_and_validation(tmp_path):
    cfg = load_config(FIXTURES / "config.ini")
    assert cfg.dump.endswith("dump.jsonl")
    assert Path(cfg.dump).is_absolute()
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")
    bad = tmp_path / "bad.ini"
    bad.write_text("[nonsense]\nkey = 1\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    bad.write_text("[filter]\nwhatever = 1\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    cfg = load_config(FIXTURES / "config.ini", {"max_lag": "5"})
    assert cfg.max_lag == 5
    with pytest.raises(ConfigError):
        validate(load_config(FIXTURES / "config.ini", {"min_cluster_size": "1"}), "topics")


def test_difference_flag_runs(out_dir):
    code = run_cli("all", "--config", FIXTURES / "config.ini", "--output-dir", out_dir,
                   "--difference", "1", "--max-lag", "8")
    assert code == 0
    head = (out_dir / "granger_cases.csv").read_text().splitlines()[0]
    assert "max_lag=8" in head
