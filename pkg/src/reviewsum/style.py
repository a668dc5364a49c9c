"""Summary-vs-review writing-style classifier.

The larger class is shuffled and cut into ceil(|majority| / |minority|)
pieces; each piece is paired with the whole minority class to train one
multinomial naive Bayes model (add-one smoothing). The summary likelihood of
a sentence is the mean of the base models' posteriors for "summary".
"""

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .porter import porter_stem

SUMMARY = "summary"
REVIEW = "review"

MODEL_FORMAT = "reviewsum-style"
MODEL_VERSION = 1


def style_features(sentence):
    """Stemmed tokens with stopwords kept. Accepts a SentenceRecord or a token list."""
    tokens = getattr(sentence, "tokens", sentence)
    return [porter_stem(t) if t.isalpha() else t for t in tokens]


@dataclass
class BaseClassifier:
    """Two-class multinomial naive Bayes stored as summary-vs-review log-odds."""

    summary_counts: np.ndarray
    review_counts: np.ndarray
    n_summary: int
    n_review: int
    log_odds: np.ndarray = field(init=False, repr=False)
    prior_log_odds: float = field(init=False)

    def __post_init__(self):
        V = self.summary_counts.size
        log_s = np.log((self.summary_counts + 1.0) / (self.summary_counts.sum() + V))
        log_r = np.log((self.review_counts + 1.0) / (self.review_counts.sum() + V))
        self.log_odds = log_s - log_r
        self.prior_log_odds = math.log(self.n_summary) - math.log(self.n_review)

    @property
    def summary_prior(self):
        return self.n_summary / (self.n_summary + self.n_review)

    def posterior(self, idx):
        return float(expit(self.prior_log_odds + self.log_odds[idx].sum()))


@dataclass
class StyleModel:
    vocab: tuple
    base_models: list
    seed: int = 0
    # class that was kept whole in every base model
    minority: str = SUMMARY

    def __post_init__(self):
        self.vocab = tuple(self.vocab)
        self.word_index = {w: i for i, w in enumerate(self.vocab)}

    @property
    def n_splits(self):
        return len(self.base_models)

    def encode(self, features):
        idx = self.word_index
        return np.array([idx[f] for f in features if f in idx], dtype=np.int64)

    def _stacked(self):
        if getattr(self, "_weights", None) is None:
            self._weights = np.stack([b.log_odds for b in self.base_models])
            self._bias = np.array([b.prior_log_odds for b in self.base_models])
        return self._weights, self._bias

    def posteriors(self, sentence):
        """Summary-class posterior of every base model."""
        idx = self.encode(style_features(sentence))
        weights, bias = self._stacked()
        return expit(bias + weights[:, idx].sum(axis=1))

    def to_json(self):
        def sparse(a):
            nz = np.flatnonzero(a)
            return [[int(i), int(a[i])] for i in nz]

        # The minority counts are shared by every base model; store them once.
        first = self.base_models[0]
        minority = self.minority
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "seed": self.seed,
            "n_splits": self.n_splits,
            "vocab": list(self.vocab),
            "minority": minority,
            "minority_size": first.n_summary if minority == SUMMARY else first.n_review,
            "minority_counts": sparse(first.summary_counts if minority == SUMMARY else first.review_counts),
            "majority": [
                {
                    "size": b.n_review if minority == SUMMARY else b.n_summary,
                    "counts": sparse(b.review_counts if minority == SUMMARY else b.summary_counts),
                }
                for b in self.base_models
            ],
        }

    @classmethod
    def from_json(cls, obj):
        if obj.get("format") != MODEL_FORMAT or obj.get("version") != MODEL_VERSION:
            raise ValueError("not a reviewsum style model file (or unsupported version)")
        V = len(obj["vocab"])

        def dense(pairs):
            a = np.zeros(V, dtype=np.int64)
            for i, c in pairs:
                a[i] = c
            return a

        mino = dense(obj["minority_counts"])
        bases = []
        for part in obj["majority"]:
            majo = dense(part["counts"])
            if obj["minority"] == SUMMARY:
                bases.append(BaseClassifier(mino, majo, obj["minority_size"], part["size"]))
            else:
                bases.append(BaseClassifier(majo, mino, part["size"], obj["minority_size"]))
        return cls(tuple(obj["vocab"]), bases, int(obj["seed"]), obj["minority"])

    def save(self, path, extra=None):
        obj = self.to_json()
        if extra:
            obj.update(extra)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def split_majority(n_majority, n_minority, seed):
    """Shuffled index subsets of the majority class, each at most minority-sized."""
    n_splits = math.ceil(n_majority / n_minority)
    order = np.random.default_rng(seed).permutation(n_majority)
    return np.array_split(order, n_splits)


def _counts(feature_lists, index, V):
    c = np.zeros(V, dtype=np.int64)
    for feats in feature_lists:
        for f in feats:
            c[index[f]] += 1
    return c


def train_style_model(summary_sentences, review_sentences, seed=0):
    """Train the undersampled naive Bayes ensemble."""
    if not summary_sentences or not review_sentences:
        raise ValueError("need both classes")
    s_feats = [style_features(s) for s in summary_sentences]
    r_feats = [style_features(s) for s in review_sentences]
    counter = Counter()
    for feats in s_feats + r_feats:
        counter.update(feats)
    vocab = tuple(sorted(counter))
    index = {w: i for i, w in enumerate(vocab)}
    V = len(vocab)

    if len(r_feats) >= len(s_feats):
        minority, majority, minority_is_summary = s_feats, r_feats, True
    else:
        minority, majority, minority_is_summary = r_feats, s_feats, False
    mino_counts = _counts(minority, index, V)

    bases = []
    for part in split_majority(len(majority), len(minority), seed):
        majo_counts = _counts([majority[i] for i in part], index, V)
        if minority_is_summary:
            bases.append(BaseClassifier(mino_counts, majo_counts, len(minority), len(part)))
        else:
            bases.append(BaseClassifier(majo_counts, mino_counts, len(part), len(minority)))
    return StyleModel(vocab, bases, seed, SUMMARY if minority_is_summary else REVIEW)


def summary_likelihood(model, sentence):
    """Mean posterior probability of the summary class, in [0, 1]."""
    return float(np.mean(model.posteriors(sentence)))
