"""Command-line entry point: ``reviewsum <subcommand> [options]``."""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, build_config
from .pipeline import EXIT_DATA, EXIT_OK, EXIT_STAGE, EXIT_USAGE, DataError, StageError

log = logging.getLogger("reviewsum")

STAGES = {
    "stats": pipeline.run_stats,
    "preprocess": pipeline.run_preprocess,
    "train-topics": pipeline.run_train_topics,
    "train-style": pipeline.run_train_style,
    "summarize": pipeline.run_summarize,
    "evaluate": pipeline.run_evaluate,
    "pipeline": pipeline.run_pipeline,
}
# stages that only read artifacts from the output directory
_NO_DATASET = {"train-topics", "train-style", "summarize"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p):
    g = p.add_argument_group("configuration (flag > config file > default)")
    g.add_argument("--config", help="flat key = value configuration file")
    g.add_argument("--dataset", dest="dataset_path", help="JSON Lines dataset")
    g.add_argument("--assets", dest="asset_dir", help="directory overriding bundled asset files")
    g.add_argument("-o", "--output-dir", dest="output_dir")
    g.add_argument("--seed", type=int)
    g.add_argument("--jobs", type=int, help="worker cap; results do not depend on it")
    g.add_argument("--k-min", type=int)
    g.add_argument("--k-max", type=int)
    g.add_argument("--k-step", type=int)
    g.add_argument("--k-summary", type=int, help="sentences (topics) per summary")
    g.add_argument("--alpha", type=float, help="document-topic prior (default 50/K)")
    g.add_argument("--beta", type=float)
    g.add_argument("--iterations", type=int, help="Gibbs sweeps for training")
    g.add_argument("--infer-iterations", type=int)
    g.add_argument("--holdout", dest="holdout_fraction", type=float)
    g.add_argument("--min-reviews", type=int, help="drop products with fewer reviews")
    g.add_argument("--reweight", dest="summary_reweight", action="store_const", const=True,
                   help="weight topic probabilities by review/summary topic alignment")
    g.add_argument("--variants", dest="rouge_variants", help="e.g. rouge1,rouge2,rougeL")
    g.add_argument("--stem", dest="rouge_stem", action="store_const", const=True)
    g.add_argument("--no-stem", dest="rouge_stem", action="store_const", const=False)
    g.add_argument("--drop-stopwords", dest="rouge_drop_stopwords", action="store_const", const=True)
    g.add_argument("--no-figures", dest="figures", action="store_const", const=False)
    g.add_argument("-v", "--verbose", action="store_true")


def make_parser():
    parser = _Parser(prog="reviewsum", description="Extractive review summarization")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in STAGES:
        _add_common(sub.add_parser(name))
    return parser


def _print_stats(stats, out):
    rows = [
        ("products", stats.n_products, ""),
        ("summaries", stats.n_summaries, stats.n_summary_sentences),
        ("reviews", stats.n_reviews, stats.n_review_sentences),
    ]
    out.write(f"{'':<10} {'count':>10} {'sentences':>10}\n")
    for name, n, s in rows:
        out.write(f"{name:<10} {n:>10} {s!s:>10}\n")


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    stage = args.command
    try:
        cfg = build_config(args.config, overrides)
        cfg.validate(need_dataset=stage not in _NO_DATASET)
    except ConfigError as exc:
        print(f"reviewsum: error [stage={stage}, code={EXIT_USAGE}]: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        result = STAGES[stage](cfg)
    except StageError as exc:
        print(f"reviewsum: error [stage={exc.stage}, code={exc.code}]: {exc}", file=sys.stderr)
        return exc.code
    except DataError as exc:
        print(f"reviewsum: error [stage={stage}, code={EXIT_DATA}]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # any other failure is an internal stage error
        log.debug("stage failure", exc_info=True)
        print(f"reviewsum: error [stage={stage}, code={EXIT_STAGE}]: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_STAGE

    if Path(cfg.output_dir).is_dir():
        pipeline.write_manifest(cfg)
    if stage == "stats":
        _print_stats(result, sys.stdout)
    elif stage == "evaluate":
        print(result.table())
    elif stage == "pipeline":
        summaries, report = result
        for s in summaries:
            print(json.dumps(s.to_json(), ensure_ascii=False))
        if report is not None:
            print(report.table(), file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
