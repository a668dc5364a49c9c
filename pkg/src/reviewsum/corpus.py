"""Product/review data model, JSON Lines ingestion and corpus statistics."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)


class DatasetError(Exception):
    """Fatal problem with a dataset file (unreadable, duplicate ids)."""


@dataclass(frozen=True)
class ProductRecord:
    product_id: str
    reviews: tuple = ()
    reference_summary: str | None = None

    def to_json(self):
        return {
            "product_id": self.product_id,
            "reviews": list(self.reviews),
            "summary": self.reference_summary,
        }


@dataclass(frozen=True)
class Dataset:
    products: tuple = ()
    source_tag: str = ""
    # (line number, message) for lines skipped during loading
    errors: tuple = field(default=(), compare=False)

    def __len__(self):
        return len(self.products)

    def __iter__(self):
        return iter(self.products)

    def get(self, product_id):
        for p in self.products:
            if p.product_id == product_id:
                return p
        return None


@dataclass(frozen=True)
class CorpusStats:
    n_products: int = 0
    n_summaries: int = 0
    n_summary_sentences: int = 0
    n_reviews: int = 0
    n_review_sentences: int = 0

    def as_dict(self):
        return dict(self.__dict__)


def _parse_record(obj):
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    pid = obj.get("product_id")
    if not isinstance(pid, str) or not pid.strip():
        raise ValueError("missing or empty product_id")
    reviews = obj.get("reviews", [])
    if not isinstance(reviews, list) or not all(isinstance(r, str) for r in reviews):
        raise ValueError("reviews must be an array of strings")
    summary = obj.get("summary")
    if summary is not None and not isinstance(summary, str):
        raise ValueError("summary must be a string or null")
    return ProductRecord(pid, tuple(reviews), summary)


def load_dataset(path, format="jsonl", min_reviews=None):
    """Load a JSON Lines dataset, one product per line.

    Malformed lines are logged and collected in ``Dataset.errors``; loading
    continues past them. An unreadable file or a duplicated ``product_id``
    raises :class:`DatasetError`.

    ``min_reviews`` optionally drops products with fewer reviews than the
    given count (not applied by default).
    """
    if format != "jsonl":
        raise DatasetError(f"unsupported dataset format: {format}")
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc

    products, errors, seen = [], [], set()
    for lineno, line_bytes in enumerate(raw.splitlines(), start=1):
        try:
            line = line_bytes.decode("utf-8")
        except UnicodeDecodeError:
            line = line_bytes.decode("utf-8", errors="replace")
            log.warning("%s:%d: invalid UTF-8 replaced", path, lineno)
        if not line.strip():
            continue
        try:
            rec = _parse_record(json.loads(line))
        except ValueError as exc:  # JSONDecodeError is a ValueError
            log.warning("%s:%d: %s", path, lineno, exc)
            errors.append((lineno, str(exc)))
            continue
        if rec.product_id in seen:
            raise DatasetError(f"duplicate product_id {rec.product_id!r} at line {lineno}")
        seen.add(rec.product_id)
        if min_reviews is not None and len(rec.reviews) < min_reviews:
            continue
        if not rec.reviews:
            log.warning("product %s has no reviews; it will be skipped downstream", rec.product_id)
        products.append(rec)
    return Dataset(tuple(products), source_tag=path.name, errors=tuple(errors))


def write_dataset(dataset, path):
    with open(path, "w", encoding="utf-8") as fh:
        for p in dataset.products:
            fh.write(json.dumps(p.to_json(), ensure_ascii=False) + "\n")


def dataset_stats(dataset, segmenter=None):
    """Product, summary and review counts, with sentence counts taken after segmentation."""
    if segmenter is None:
        from .preprocess import split_sentences as segmenter
    n_sum = n_sum_sent = n_rev = n_rev_sent = 0
    for p in dataset.products:
        if p.reference_summary is not None and p.reference_summary.strip():
            n_sum += 1
            n_sum_sent += len(segmenter(p.reference_summary))
        n_rev += len(p.reviews)
        n_rev_sent += sum(len(segmenter(r)) for r in p.reviews)
    return CorpusStats(len(dataset.products), n_sum, n_sum_sent, n_rev, n_rev_sent)
