import csv
import json
import logging

import pytest

from conftest import DATA
from reviewsum import cli
from reviewsum.config import ConfigError, PipelineConfig, build_config, read_config_file

FIXTURE = str(DATA / "fixture_products.jsonl")
PLANTED = str(DATA / "planted_aspects.jsonl")
FAST = ["--k-min", "2", "--k-max", "4", "--k-step", "1", "--iterations", "200"]


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def pipeline_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("pipe")
    assert run("pipeline", "--dataset", FIXTURE, "-o", out, *FAST) == 0
    return out


# -- exit codes ---------------------------------------------------------------

def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        cli.main([])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        cli.main(["stats", "--bogus"])
    assert e.value.code == 1
    assert run("stats") == 1
    assert run("stats", "--dataset", tmp_path / "missing.jsonl") == 1
    assert run("pipeline", "--dataset", FIXTURE, "--k-min", "9", "--k-max", "3") == 1
    assert "stage=stats, code=1" in capsys.readouterr().err


def test_data_errors(tmp_path, capsys):
    dup = tmp_path / "dup.jsonl"
    dup.write_text('{"product_id": "a", "reviews": ["x."]}\n' * 2)
    assert run("pipeline", "--dataset", dup, "-o", tmp_path / "o1") == 2
    assert "stage=load, code=2" in capsys.readouterr().err

    nouns = tmp_path / "nonouns.jsonl"
    nouns.write_text('{"product_id": "a", "reviews": ["Very quickly."], "summary": "Fine."}\n')
    assert run("pipeline", "--dataset", nouns, "-o", tmp_path / "o2") == 2
    err = capsys.readouterr().err
    assert "stage=train-topics, code=2" in err and "empty corpus" in err
    # earlier artifacts are kept for inspection
    assert (tmp_path / "o2" / "sentences.jsonl").exists()

    assert run("summarize", "-o", tmp_path / "empty") == 2
    assert "preprocess" in capsys.readouterr().err


def test_stage_failure_code(tmp_path, monkeypatch, capsys):
    def boom(cfg, *args):
        raise RuntimeError("kaput")

    monkeypatch.setattr(cli.pipeline, "run_train_style", boom)
    assert run("pipeline", "--dataset", FIXTURE, "-o", tmp_path, *FAST) == 3
    assert "stage=train-style, code=3" in capsys.readouterr().err


# -- outputs ------------------------------------------------------------------

def test_stats_output(tmp_path, capsys):
    assert run("stats", "--dataset", FIXTURE, "-o", tmp_path) == 0
    out = capsys.readouterr().out
    assert "products" in out and "27" in out
    stats = json.loads((tmp_path / "stats.json").read_text())
    assert stats["n_summaries"] == 3 and "config_hash" in stats and stats["seed"] == 0


def test_pipeline_artifacts(pipeline_out):
    out = pipeline_out
    for rel in ["sentences.jsonl", "style_model.json", "summaries.jsonl", "scored_sentences.tsv",
                "topics/lda_review.json", "topics/lda_summary.json", "topics/k_sweep_review.tsv",
                "topics/k_sweep_review.png", "topics/top_words_review.tsv", "topic_sizes.png",
                "evaluation/rouge_report.json", "evaluation/rouge_per_product.tsv",
                "evaluation/rouge_f1.png", "summaries/phone-a.txt", "manifest.json"]:
        assert (out / rel).is_file(), rel
    manifest = json.loads((out / "manifest.json").read_text())
    h = manifest["config_hash"]
    for rel in ["style_model.json", "topics/lda_review.json", "evaluation/rouge_report.json",
                "topics/k_sweep_review.json", "stats.json"]:
        obj = json.loads((out / rel).read_text())
        assert obj["config_hash"] == h and obj["seed"] == 0
    for line in (out / "summaries.jsonl").read_text().splitlines():
        assert json.loads(line)["config_hash"] == h
    assert "summaries/phone-a.txt" in manifest["files"]
    sweep = list(csv.reader(open(out / "topics" / "k_sweep_review.tsv"), delimiter="\t"))
    assert sweep[0] == ["K", "log_likelihood", "heldout_perplexity"] and len(sweep) == 4


def test_partial_reference(pipeline_out):
    report = json.loads((pipeline_out / "evaluation" / "rouge_report.json").read_text())
    assert report["n_evaluated"] == 3
    assert report["skipped"] == ["phone-d"]
    assert set(report["macro_average"]["rouge1"]) == {"precision", "recall", "f1"}
    assert set(report["baselines"]) == {"lead_k", "random_k"}


def test_subcommands_compose_to_pipeline(pipeline_out, tmp_path, capsys):
    for stage in ["stats", "preprocess", "train-topics", "train-style", "summarize", "evaluate"]:
        args = [stage, "-o", tmp_path, *FAST]
        if stage in ("stats", "preprocess", "evaluate"):
            args += ["--dataset", FIXTURE]
        assert run(*args) == 0, stage
    for rel in ["summaries.jsonl", "evaluation/rouge_report.json", "scored_sentences.tsv",
                "topics/lda_review.json", "style_model.json"]:
        assert (tmp_path / rel).read_bytes() == (pipeline_out / rel).read_bytes(), rel


def test_pipeline_stdout_and_jobs(pipeline_out, tmp_path, capsys):
    assert run("pipeline", "--dataset", FIXTURE, "-o", tmp_path, *FAST, "--jobs", "3", "--no-figures") == 0
    captured = capsys.readouterr()
    lines = [json.loads(line) for line in captured.out.splitlines()]
    assert [s["product_id"] for s in lines] == ["phone-a", "phone-b", "phone-c", "phone-d"]
    assert all(s["k_used"] <= 5 for s in lines)
    assert "rouge1" in captured.err
    assert (tmp_path / "summaries.jsonl").read_bytes() == (pipeline_out / "summaries.jsonl").read_bytes()
    assert not (tmp_path / "topic_sizes.png").exists()


def test_sweep_cache_reused(tmp_path, caplog):
    args = ["train-topics", "-o", tmp_path, *FAST]
    assert run("preprocess", "--dataset", FIXTURE, "-o", tmp_path, *FAST) == 0
    assert run(*args) == 0
    caplog.clear()
    caplog.set_level(logging.INFO, logger="reviewsum")
    assert run(*args) == 0
    assert "reusing cached K sweep" in caplog.text
    assert "reusing trained model" in caplog.text


def test_seed_changes_hash(tmp_path):
    a = build_config(None, {"dataset_path": FIXTURE, "seed": 1})
    b = build_config(None, {"dataset_path": FIXTURE, "seed": 2})
    c = build_config(None, {"dataset_path": FIXTURE, "seed": 1, "jobs": 8, "output_dir": "x"})
    assert a.config_hash() != b.config_hash()
    assert a.config_hash() == c.config_hash()


# -- planted-aspect fixture -----------------------------------------------------

def test_planted_aspect_selection(tmp_path):
    assert run("pipeline", "--dataset", PLANTED, "-o", tmp_path, "--k-min", "2", "--k-max", "2",
               "--iterations", "300", "--no-figures") == 0
    summaries = [json.loads(line) for line in (tmp_path / "summaries.jsonl").read_text().splitlines()]
    planted = next(s for s in summaries if s["product_id"] == "planted")
    assert sorted(e["sentence_id"] for e in planted["entries"]) == [
        "planted|review|2|2", "planted|review|4|2",
    ]
    assert {e["sentence"] for e in planted["entries"]} == {
        "Excellent battery, superb endurance.", "Outstanding screen, impressive and vivid.",
    }
    # the emitted score is (P + OP) * SL recomputed from the scored table
    rows = list(csv.DictReader(open(tmp_path / "scored_sentences.tsv"), delimiter="\t"))
    by_id = {r["sentence_id"]: r for r in rows}
    for e in planted["entries"]:
        r = by_id[e["sentence_id"]]
        op = float(r["ps"]) if e["polarity"] == "positive" else float(r["ns"])
        assert e["score"] == pytest.approx((float(r["p"]) + op) * float(r["sl"]), abs=1e-5)
        assert r["selected"] == "1"


# -- config ---------------------------------------------------------------------

def test_config_precedence(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# comment\nseed = 5\nk-summary = 2\nalpha = none\nrouge_stem = false\n")
    cfg = build_config(path, {"seed": 7, "k_min": None})
    assert cfg.seed == 7 and cfg.k_summary == 2 and cfg.alpha is None and cfg.rouge_stem is False
    assert cfg.k_min == PipelineConfig().k_min


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("nonsense\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)
    bad.write_text("flavour = 3\n")
    with pytest.raises(ConfigError, match="unknown key"):
        read_config_file(bad)
    bad.write_text("seed = many\n")
    with pytest.raises(ConfigError, match="bad value"):
        read_config_file(bad)


def test_config_validation():
    with pytest.raises(ConfigError):
        PipelineConfig(k_summary=0).validate(need_dataset=False)
    with pytest.raises(ConfigError):
        PipelineConfig(rouge_variants="rouge3").validate(need_dataset=False)
    with pytest.raises(ConfigError):
        PipelineConfig(holdout_fraction=1.0).validate(need_dataset=False)
    assert PipelineConfig().k_range == [5, 10, 15, 20, 25, 30, 35, 40]


def test_cli_config_file(tmp_path):
    conf = tmp_path / "c.conf"
    conf.write_text(f"dataset_path = {FIXTURE}\noutput_dir = {tmp_path / 'o'}\nk_summary = 1\n"
                    "k_min = 2\nk_max = 3\niterations = 50\nfigures = no\n")
    assert run("pipeline", "--config", conf) == 0
    for line in (tmp_path / "o" / "summaries.jsonl").read_text().splitlines():
        assert json.loads(line)["k_used"] <= 1
