"""End-to-end stages. Each stage reads its inputs from and writes its artifacts to
``config.output_dir`` so the stages can be run one at a time or all together."""

import csv
import hashlib
import json
import logging
import re
from pathlib import Path

from . import corpus, evalrouge, plotting, topics
from .preprocess import REVIEW, SUMMARY, Preprocessor, SentenceRecord, build_combined_docs
from .sentiment import SentimentLexicon, score_sentence
from .style import StyleModel, summary_likelihood, train_style_model
from .summarize import ProductSummary, generate_summary, summary_topic_alignment, topic_counts

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_STAGE = 3

SENTENCES = "sentences.jsonl"
STATS = "stats.json"
TOPIC_DIR = "topics"
STYLE_MODEL = "style_model.json"
SUMMARIES = "summaries.jsonl"
SUMMARY_TEXT_DIR = "summaries"
SCORED = "scored_sentences.tsv"
EVAL_DIR = "evaluation"
CACHE_DIR = "cache"
MANIFEST = "manifest.json"

MODEL_TAGS = {REVIEW: "LDAreview", SUMMARY: "LDAsummary"}


class StageError(Exception):
    def __init__(self, stage, code, message):
        super().__init__(message)
        self.stage = stage
        self.code = code


class DataError(Exception):
    """Input data unusable for the requested stage."""


def _recorded_digest(cfg):
    path = Path(cfg.output_dir, SENTENCES)
    if not path.exists():
        return None
    with open(path, encoding="utf-8") as fh:
        first = json.loads(fh.readline() or "{}")
    return first.get("_meta", {}).get("dataset_sha256")


def config_hash(cfg):
    """The run's config hash; artifact-only stages take the dataset digest from sentences.jsonl."""
    if cfg.dataset_digest() is not None:
        return cfg.config_hash()
    return cfg.config_hash(_recorded_digest(cfg))


def _meta(cfg):
    return {"config_hash": config_hash(cfg), "seed": cfg.seed}


def _out(cfg, *parts):
    path = Path(cfg.output_dir, *parts)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _require(path, stage_hint):
    if not path.exists():
        raise DataError(f"missing artifact {path}; run `{stage_hint}` first")
    return path


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1, ensure_ascii=False)
        fh.write("\n")


def _write_tsv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_manifest(cfg):
    """Record config hash, seed and a checksum of every file under the output directory.

    Covers the plain-text, TSV and PNG artifacts that cannot embed the hash themselves.
    """
    root = Path(cfg.output_dir)
    files = {}
    for p in sorted(root.rglob("*")):
        if p.is_file() and p.name != MANIFEST:
            files[p.relative_to(root).as_posix()] = hashlib.sha256(p.read_bytes()).hexdigest()
    _write_json(root / MANIFEST, {**_meta(cfg), "files": files})


def _safe_name(product_id):
    return re.sub(r"[^A-Za-z0-9._-]", "_", product_id) or "_"


def load_dataset(cfg):
    try:
        return corpus.load_dataset(cfg.dataset_path, min_reviews=cfg.min_reviews)
    except corpus.DatasetError as exc:
        raise DataError(str(exc)) from exc


# -- stages -----------------------------------------------------------------

def run_stats(cfg, dataset=None):
    dataset = dataset or load_dataset(cfg)
    stats = corpus.dataset_stats(dataset)
    _write_json(_out(cfg, STATS), {**_meta(cfg), **stats.as_dict()})
    return stats


def run_preprocess(cfg, dataset=None):
    dataset = dataset or load_dataset(cfg)
    pre = Preprocessor(cfg.asset_dir)
    sentences = pre.dataset(dataset)
    with open(_out(cfg, SENTENCES), "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"_meta": {**_meta(cfg), "dataset_sha256": cfg.dataset_digest()}}) + "\n")
        for s in sentences:
            fh.write(json.dumps(s.to_json(), ensure_ascii=False) + "\n")
    log.info("preprocess: %d sentences from %d products", len(sentences), len(dataset))
    return sentences


def load_sentences(cfg):
    path = _require(Path(cfg.output_dir, SENTENCES), "preprocess")
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            if "_meta" in obj:
                if obj["_meta"].get("config_hash") != config_hash(cfg):
                    log.warning("%s was produced under a different configuration", path)
                continue
            out.append(SentenceRecord.from_json(obj))
    return out


def _sweep_and_train(cfg, docs, source):
    tag = MODEL_TAGS[source]
    key = config_hash(cfg)
    cache = Path(cfg.output_dir, CACHE_DIR, f"ksweep-{tag}-{key}.json")
    if cache.exists():
        cached = json.loads(cache.read_text(encoding="utf-8"))
        report = topics.KSelectionReport(
            [(c["K"], c["log_likelihood"], c["perplexity"]) for c in cached["candidates"]],
            cached["chosen_K"],
        )
        log.info("%s: reusing cached K sweep (K=%d)", tag, report.chosen_K)
    else:
        report = topics.select_k(
            docs, cfg.k_range, cfg.holdout_fraction, cfg.seed, cfg.alpha, cfg.beta,
            cfg.iterations, cfg.jobs, tag,
        )
        _write_json(_out(cfg, CACHE_DIR, cache.name), {**_meta(cfg), **report.to_json()})

    model_path = _out(cfg, TOPIC_DIR, f"lda_{source}.json")
    if model_path.exists():
        stored = json.loads(model_path.read_text(encoding="utf-8"))
        if stored.get("config_hash") == key:
            log.info("%s: reusing trained model", tag)
            return report, topics.LdaModel.from_json(stored)
    model = topics.train_lda(docs, report.chosen_K, cfg.alpha, cfg.beta, cfg.iterations, cfg.seed, tag)
    model.save(model_path, _meta(cfg))

    base = _out(cfg, TOPIC_DIR, f"k_sweep_{source}")
    _write_json(base.with_suffix(".json"), {**_meta(cfg), **report.to_json()})
    _write_tsv(base.with_suffix(".tsv"), ["K", "log_likelihood", "heldout_perplexity"], report.candidates)
    _write_tsv(
        _out(cfg, TOPIC_DIR, f"top_words_{source}.tsv"),
        ["topic", "top_words"],
        [(t, " ".join(model.top_words(t, 10))) for t in range(model.K)],
    )
    if cfg.figures:
        plotting.plot_k_sweep(report, base.with_suffix(".png"), title=tag)
    return report, model


def run_train_topics(cfg, sentences=None):
    sentences = sentences if sentences is not None else load_sentences(cfg)
    results = {}
    for source in (REVIEW, SUMMARY):
        docs = build_combined_docs([s for s in sentences if s.source == source])
        try:
            results[source] = _sweep_and_train(cfg, docs, source)
        except topics.EmptyCorpusError:
            if source == REVIEW:
                raise DataError("empty corpus: no review sentence survived vocabulary pruning") from None
            log.warning("no usable summary documents; LDAsummary not trained")
            stale = Path(cfg.output_dir, TOPIC_DIR, "lda_summary.json")
            if stale.exists():
                stale.unlink()
    return results


def run_train_style(cfg, sentences=None):
    sentences = sentences if sentences is not None else load_sentences(cfg)
    summ = [s for s in sentences if s.source == SUMMARY]
    revs = [s for s in sentences if s.source == REVIEW]
    try:
        model = train_style_model(summ, revs, cfg.seed)
    except ValueError as exc:
        raise DataError(f"style classifier: {exc}") from exc
    model.save(_out(cfg, STYLE_MODEL), _meta(cfg))
    log.info("style model: %d base classifiers", model.n_splits)
    return model


def run_summarize(cfg, sentences=None):
    sentences = sentences if sentences is not None else load_sentences(cfg)
    review_model = topics.LdaModel.load(_require(Path(cfg.output_dir, TOPIC_DIR, "lda_review.json"), "train-topics"))
    style = StyleModel.load(_require(Path(cfg.output_dir, STYLE_MODEL), "train-style"))
    lexicon = SentimentLexicon.load(cfg.asset_dir)

    weights = None
    summary_model_path = Path(cfg.output_dir, TOPIC_DIR, "lda_summary.json")
    if cfg.summary_reweight:
        if summary_model_path.exists():
            weights = summary_topic_alignment(review_model, topics.LdaModel.load(summary_model_path))
        else:
            log.warning("summary re-weighting requested but no LDAsummary model exists")

    by_product = {}
    for s in sentences:
        if s.source == REVIEW:
            by_product.setdefault(s.product_id, []).append(s)

    meta = _meta(cfg)
    summaries, rows, overall = [], [], {}
    for pid, sents in by_product.items():
        assignments = topics.infer_all(review_model, sents, cfg.infer_iterations, cfg.jobs)
        sentiments = {s.sentence_id: score_sentence(s.tokens, lexicon) for s in sents}
        sls = {s.sentence_id: summary_likelihood(style, s) for s in sents}
        summary = generate_summary(pid, sents, assignments, sentiments, sls, cfg.k_summary, weights)
        summaries.append(summary)
        chosen = {e.sentence_id for e in summary.entries}
        for s, a in zip(sents, assignments):
            sc = sentiments[s.sentence_id]
            rows.append((
                pid, s.key, a.top_topic, f"{a.top_prob:.6f}", int(a.discarded), f"{sc.ps:.6f}",
                f"{sc.ns:.6f}", sc.polarity, f"{sls[s.sentence_id]:.6f}", int(s.sentence_id in chosen),
            ))
        for t, n in topic_counts(assignments).items():
            overall[t] = overall.get(t, 0) + n

    with open(_out(cfg, SUMMARIES), "w", encoding="utf-8") as fh:
        for summary in summaries:
            fh.write(json.dumps({**summary.to_json(), **meta}, ensure_ascii=False) + "\n")
    for summary in summaries:
        _out(cfg, SUMMARY_TEXT_DIR, _safe_name(summary.product_id) + ".txt").write_text(
            summary.text() + "\n", encoding="utf-8"
        )
    _write_tsv(
        _out(cfg, SCORED),
        ["product_id", "sentence_id", "topic", "p", "discarded", "ps", "ns", "polarity", "sl", "selected"],
        rows,
    )
    if cfg.figures and overall:
        plotting.plot_topic_sizes(overall, _out(cfg, "topic_sizes.png"), title="Review sentences per topic")
    return summaries


def load_summaries(cfg):
    path = _require(Path(cfg.output_dir, SUMMARIES), "summarize")
    with open(path, encoding="utf-8") as fh:
        return [ProductSummary.from_json(json.loads(line)) for line in fh if line.strip()]


def run_evaluate(cfg, summaries=None, dataset=None, sentences=None):
    summaries = summaries if summaries is not None else load_summaries(cfg)
    dataset = dataset or load_dataset(cfg)
    try:
        report = evalrouge.evaluate_corpus(
            summaries, dataset, cfg.variants, cfg.rouge_stem, cfg.rouge_drop_stopwords
        )
    except ValueError as exc:
        raise DataError(str(exc)) from exc

    out = report.to_json()
    if sentences is None and Path(cfg.output_dir, SENTENCES).exists():
        sentences = load_sentences(cfg)
    if sentences:
        pids = [s.product_id for s in summaries]
        baselines = {
            "lead_k": {p: evalrouge.lead_k(sentences, p, cfg.k_summary) for p in pids},
            "random_k": {p: evalrouge.random_k(sentences, p, cfg.k_summary, cfg.seed) for p in pids},
        }
        out["baselines"] = {}
        for name, cands in baselines.items():
            try:
                b = evalrouge.evaluate_corpus(cands, dataset, cfg.variants, cfg.rouge_stem, cfg.rouge_drop_stopwords)
            except ValueError:
                continue
            out["baselines"][name] = {v: s.to_json() for v, s in b.macro_average.items()}

    _write_json(_out(cfg, EVAL_DIR, "rouge_report.json"), {**_meta(cfg), **out})
    _out(cfg, EVAL_DIR, "rouge_report.txt").write_text(report.table() + "\n", encoding="utf-8")
    rows = []
    for pid, scores in report.per_product.items():
        row = [pid]
        for v in report.macro_average:
            row += [f"{scores[v].precision:.6f}", f"{scores[v].recall:.6f}", f"{scores[v].f1:.6f}"]
        rows.append(row)
    header = ["product_id"] + [f"{v}_{m}" for v in report.macro_average for m in ("p", "r", "f1")]
    _write_tsv(_out(cfg, EVAL_DIR, "rouge_per_product.tsv"), header, rows)
    if cfg.figures:
        plotting.plot_rouge(report, _out(cfg, EVAL_DIR, "rouge_f1.png"))
    return report


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except DataError as exc:
        raise StageError(name, EXIT_DATA, str(exc)) from exc
    except Exception as exc:
        raise StageError(name, EXIT_STAGE, f"{type(exc).__name__}: {exc}") from exc


def run_pipeline(cfg):
    """All stages in order; evaluation runs only when some product has a reference.

    A failure is re-raised as :class:`StageError` naming the stage; artifacts
    written by earlier stages are left in place.
    """
    dataset = _stage("load", load_dataset, cfg)
    _stage("stats", run_stats, cfg, dataset)
    sentences = _stage("preprocess", run_preprocess, cfg, dataset)
    _stage("train-topics", run_train_topics, cfg, sentences)
    _stage("train-style", run_train_style, cfg, sentences)
    summaries = _stage("summarize", run_summarize, cfg, sentences)
    report = None
    if any(p.reference_summary for p in dataset.products):
        report = _stage("evaluate", run_evaluate, cfg, summaries, dataset, sentences)
    else:
        log.info("no reference summaries; evaluation skipped")
    return summaries, report
