"""ROUGE-N / ROUGE-L scoring and corpus-level evaluation reports."""

import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from . import assets
from .porter import porter_stem
from .preprocess import REVIEW, TextNormalizer

log = logging.getLogger(__name__)

VARIANTS = ("rouge1", "rouge2", "rougeL")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float
    variant: str

    @classmethod
    def from_pr(cls, precision, recall, variant):
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
        return cls(precision, recall, f1, variant)

    def to_json(self):
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass
class EvalReport:
    per_product: dict
    macro_average: dict
    n_evaluated: int
    skipped: list = field(default_factory=list)
    options: dict = field(default_factory=dict)

    @property
    def n_skipped(self):
        return len(self.skipped)

    def to_json(self):
        return {
            "n_evaluated": self.n_evaluated,
            "n_skipped": self.n_skipped,
            "skipped": list(self.skipped),
            "options": self.options,
            "macro_average": {v: s.to_json() for v, s in self.macro_average.items()},
            "per_product": {
                pid: {v: s.to_json() for v, s in scores.items()}
                for pid, scores in self.per_product.items()
            },
        }

    def table(self):
        """Aligned plain-text table of the macro averages."""
        lines = [f"{'variant':<8} {'precision':>10} {'recall':>10} {'f1':>10}"]
        for v, s in self.macro_average.items():
            lines.append(f"{v:<8} {s.precision:>10.4f} {s.recall:>10.4f} {s.f1:>10.4f}")
        lines.append(f"products evaluated: {self.n_evaluated}, without reference: {self.n_skipped}")
        return "\n".join(lines)


@lru_cache(maxsize=4)
def _tokenizer(asset_dir=None):
    return TextNormalizer(assets.load_contractions(asset_dir), assets.load_stopwords(asset_dir))


def rouge_tokens(text, stem=True, drop_stopwords=False, normalizer=None):
    norm = normalizer or _tokenizer()
    tokens = norm.tokenize(text)
    if drop_stopwords:
        tokens = [t for t in tokens if t not in norm.stoplist]
    if stem:
        tokens = [porter_stem(t) if t.isalpha() else t for t in tokens]
    return tokens


def ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n_tokens(cand, ref, n):
    ref_grams = ngrams(ref, n)
    if not ref_grams:
        raise ValueError("empty reference")
    cand_grams = ngrams(cand, n)
    overlap = sum((cand_grams & ref_grams).values())
    recall = overlap / sum(ref_grams.values())
    precision = overlap / sum(cand_grams.values()) if cand_grams else 0.0
    return RougeScore.from_pr(precision, recall, f"rouge{n}")


def rouge_n(candidate, reference, n=1, stem=True, drop_stopwords=False):
    """Clipped n-gram overlap between two texts.

    Raises ``ValueError("empty reference")`` if the reference has no n-grams.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return rouge_n_tokens(
        rouge_tokens(candidate, stem, drop_stopwords),
        rouge_tokens(reference, stem, drop_stopwords),
        n,
    )


def lcs_length(a, b):
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate, reference, stem=True, drop_stopwords=False):
    cand = rouge_tokens(candidate, stem, drop_stopwords)
    ref = rouge_tokens(reference, stem, drop_stopwords)
    if not ref:
        raise ValueError("empty reference")
    lcs = lcs_length(cand, ref)
    precision = lcs / len(cand) if cand else 0.0
    return RougeScore.from_pr(precision, lcs / len(ref), "rougeL")


def score_variant(variant, candidate, reference, stem=True, drop_stopwords=False):
    if variant == "rougeL":
        return rouge_l(candidate, reference, stem, drop_stopwords)
    if variant in ("rouge1", "rouge2"):
        return rouge_n(candidate, reference, int(variant[-1]), stem, drop_stopwords)
    raise ValueError(f"unknown ROUGE variant {variant!r}")


def _candidate_texts(summaries):
    if isinstance(summaries, dict):
        return dict(summaries)
    return {s.product_id: s.text() for s in summaries}


def evaluate_corpus(summaries, dataset, variants=VARIANTS, stem=True, drop_stopwords=False):
    """Score every product that has both a summary and a reference.

    ``summaries`` is an iterable of ProductSummary or a mapping from
    product_id to candidate text. Products without a usable reference are
    listed in ``skipped``.
    """
    candidates = _candidate_texts(summaries)
    per_product, skipped = {}, []
    for product in dataset.products:
        pid = product.product_id
        ref = product.reference_summary
        if pid not in candidates:
            continue
        if not ref or not ref.strip():
            skipped.append(pid)
            continue
        try:
            per_product[pid] = {
                v: score_variant(v, candidates[pid], ref, stem, drop_stopwords) for v in variants
            }
        except ValueError as exc:
            log.warning("product %s skipped: %s", pid, exc)
            skipped.append(pid)
    if not per_product:
        raise ValueError("nothing to evaluate")
    n = len(per_product)
    macro = {}
    for v in variants:
        scores = [s[v] for s in per_product.values()]
        macro[v] = RougeScore(
            sum(s.precision for s in scores) / n,
            sum(s.recall for s in scores) / n,
            sum(s.f1 for s in scores) / n,
            v,
        )
    options = {"stem": stem, "drop_stopwords": drop_stopwords, "variants": list(variants)}
    return EvalReport(per_product, macro, n, skipped, options)


def lead_k(sentences, product_id, k):
    """First k review sentences of a product, in document order."""
    picked = [s for s in sentences if s.product_id == product_id and s.source == REVIEW][:k]
    return "\n".join(s.raw_text for s in picked)


def random_k(sentences, product_id, k, seed=0):
    pool = [s for s in sentences if s.product_id == product_id and s.source == REVIEW]
    rng = random.Random(f"{seed}|{product_id}")
    picked = rng.sample(pool, min(k, len(pool)))
    return "\n".join(s.raw_text for s in picked)
