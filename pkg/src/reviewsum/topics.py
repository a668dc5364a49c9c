"""LDA topic models over noun-keyed documents, trained by collapsed Gibbs sampling.

Also covers held-out perplexity, the K sweep and per-sentence topic inference.
"""

import hashlib
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _gibbs

log = logging.getLogger(__name__)

MODEL_FORMAT = "reviewsum-lda"
MODEL_VERSION = 1

DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 500
DEFAULT_INFER_ITERATIONS = 50
DEFAULT_HOLDOUT = 0.1
MIN_DOC_FREQ = 2


class EmptyCorpusError(ValueError):
    pass


def default_alpha(K):
    return 50.0 / K


def derive_seed(*parts):
    """Stable 63-bit seed from arbitrary printable parts."""
    h = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "little") >> 1


@dataclass(eq=False)
class LdaModel:
    K: int
    vocab: tuple
    phi: np.ndarray
    alpha: float
    beta: float
    seed: int = 0
    iterations: int = 0
    tag: str = "LDAreview"
    # topic proportions of the training documents; not persisted
    doc_topic: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.phi = np.ascontiguousarray(self.phi, dtype=np.float64)
        self.vocab = tuple(self.vocab)
        self.word_index = {w: i for i, w in enumerate(self.vocab)}
        if self.phi.shape != (self.K, len(self.vocab)):
            raise ValueError(f"phi has shape {self.phi.shape}, expected ({self.K}, {len(self.vocab)})")

    @property
    def V(self):
        return len(self.vocab)

    def encode(self, tokens):
        """Vocabulary indices of the in-vocabulary tokens, in input order."""
        idx = self.word_index
        return np.array([idx[t] for t in tokens if t in idx], dtype=np.int64)

    def encode_bag(self, bag):
        """Expand a token-count mapping into sorted vocabulary indices."""
        idx = self.word_index
        pairs = sorted((idx[t], c) for t, c in bag.items() if t in idx and c > 0)
        if not pairs:
            return np.zeros(0, dtype=np.int64)
        return np.repeat([p[0] for p in pairs], [p[1] for p in pairs]).astype(np.int64)

    def top_words(self, topic, n=10):
        order = np.argsort(-self.phi[topic], kind="stable")[:n]
        return [self.vocab[i] for i in order]

    def to_json(self):
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "tag": self.tag,
            "K": self.K,
            "alpha": self.alpha,
            "beta": self.beta,
            "seed": self.seed,
            "iterations": self.iterations,
            "vocab": list(self.vocab),
            "phi": self.phi.tolist(),
        }

    @classmethod
    def from_json(cls, obj):
        if obj.get("format") != MODEL_FORMAT or obj.get("version") != MODEL_VERSION:
            raise ValueError("not a reviewsum LDA model file (or unsupported version)")
        return cls(
            K=int(obj["K"]), vocab=tuple(obj["vocab"]), phi=np.array(obj["phi"], dtype=np.float64),
            alpha=float(obj["alpha"]), beta=float(obj["beta"]), seed=int(obj["seed"]),
            iterations=int(obj["iterations"]), tag=obj["tag"],
        )

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


@dataclass(frozen=True)
class TopicAssignment:
    sentence_id: tuple
    probs: tuple
    top_topic: int
    top_prob: float
    discarded: bool


@dataclass
class KSelectionReport:
    # (K, training log-likelihood, held-out perplexity) per candidate
    candidates: list
    chosen_K: int | None = None

    def to_json(self):
        return {
            "chosen_K": self.chosen_K,
            "candidates": [
                {"K": k, "log_likelihood": ll, "perplexity": pp} for k, ll, pp in self.candidates
            ],
        }


class KSweepError(RuntimeError):
    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


def build_vocab(docs, min_df=MIN_DOC_FREQ):
    df = {}
    for d in docs:
        for t, c in d.bag.items():
            if c > 0:
                df[t] = df.get(t, 0) + 1
    return tuple(sorted(t for t, n in df.items() if n >= min_df))


def train_lda(docs, K, alpha=None, beta=DEFAULT_BETA, iterations=DEFAULT_ITERATIONS, seed=0,
              tag="LDAreview", min_df=MIN_DOC_FREQ, vocab=None):
    """Fit an LDA model to combined documents with collapsed Gibbs sampling.

    Tokens occurring in fewer than ``min_df`` documents are pruned first
    (unless an explicit ``vocab`` is given). ``alpha`` defaults to 50/K.
    The returned model is a pure function of the arguments.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    alpha = default_alpha(K) if alpha is None else float(alpha)
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    vocab = build_vocab(docs, min_df) if vocab is None else tuple(vocab)
    shell = LdaModel(K, vocab, np.zeros((K, len(vocab))), alpha, beta, seed, iterations, tag)

    encoded = [shell.encode_bag(d.bag) for d in docs]
    encoded = [e for e in encoded if e.size]
    if not encoded:
        raise EmptyCorpusError("empty corpus")
    if K > len(encoded):
        log.warning("K=%d exceeds the number of documents (%d)", K, len(encoded))

    words = np.concatenate(encoded)
    doc_of = np.repeat(np.arange(len(encoded)), [e.size for e in encoded]).astype(np.int64)
    V = len(vocab)
    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, size=words.size).astype(np.int64)
    ndk = np.zeros((len(encoded), K), dtype=np.int64)
    nkw = np.zeros((K, V), dtype=np.int64)
    np.add.at(ndk, (doc_of, z), 1)
    np.add.at(nkw, (z, words), 1)
    nk = nkw.sum(axis=1)

    for _ in range(iterations):
        u = rng.random(words.size)
        _gibbs.train_sweep(words, doc_of, z, ndk, nkw, nk, alpha, beta, V * beta, u)

    phi = (nkw + beta) / (nk[:, None] + V * beta)
    phi /= phi.sum(axis=1, keepdims=True)
    theta = (ndk + alpha) / (ndk.sum(axis=1, keepdims=True) + K * alpha)
    shell.phi = phi
    shell.doc_topic = theta
    return shell


def _fit_theta(model, words, seed, iterations, alpha=None):
    """Per-document topic proportions with phi frozen, averaged after burn-in."""
    K = model.K
    alpha = model.alpha if alpha is None else alpha
    if words.size == 0:
        return np.full(K, 1.0 / K)
    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, size=words.size).astype(np.int64)
    nk = np.bincount(z, minlength=K).astype(np.int64)
    burn = iterations // 2
    acc = np.zeros(K)
    kept = 0
    for it in range(iterations):
        _gibbs.fixed_phi_sweep(words, z, nk, model.phi, alpha, rng.random(words.size))
        if it >= burn:
            acc += nk
            kept += 1
    counts = acc / max(kept, 1)
    return (counts + alpha) / (words.size + K * alpha)


def _word_loglik(model, theta, words):
    return float(np.log(theta @ model.phi[:, words]).sum())


def log_likelihood(model, docs, iterations=DEFAULT_INFER_ITERATIONS, seed=None):
    """Total predictive log-likelihood and scored-word count for ``docs``.

    Each document is split into alternating halves: topic proportions are
    fitted on one half and the other half is scored (single-token documents
    are scored under the prior mean).
    """
    seed = model.seed if seed is None else seed
    total, n = 0.0, 0
    for i, d in enumerate(docs):
        words = model.encode_bag(d.bag) if hasattr(d, "bag") else model.encode(d)
        if words.size == 0:
            continue
        if words.size == 1:
            fit, held = words[:0], words
        else:
            fit, held = words[0::2], words[1::2]
        theta = _fit_theta(model, fit, derive_seed(seed, "heldout", i), iterations)
        total += _word_loglik(model, theta, held)
        n += held.size
    return total, n


def perplexity(model, docs, iterations=DEFAULT_INFER_ITERATIONS, seed=None):
    """exp(-log-likelihood / word count) on held-out documents.

    Out-of-vocabulary tokens are ignored. Raises ``ValueError`` when nothing
    is left to score.
    """
    total, n = log_likelihood(model, docs, iterations, seed)
    if n == 0:
        raise ValueError("no scorable tokens")
    return math.exp(-total / n)


def training_log_likelihood(model, docs):
    """Log-likelihood of the training documents under their fitted proportions."""
    if model.doc_topic is None:
        raise ValueError("model carries no training topic proportions")
    encoded = [e for e in (model.encode_bag(d.bag) for d in docs) if e.size]
    return sum(_word_loglik(model, model.doc_topic[j], w) for j, w in enumerate(encoded))


def choose_k(candidates):
    """Candidate with the lowest held-out perplexity; ties go to the smaller K."""
    if not candidates:
        raise ValueError("no candidates")
    return min(candidates, key=lambda c: (c[2], c[0]))[0]


def split_holdout(docs, fraction, seed):
    n = len(docs)
    if n < 2 or fraction <= 0:
        return list(docs), []
    n_hold = min(n - 1, max(1, int(round(fraction * n))))
    order = np.random.default_rng(seed).permutation(n)
    hold = set(order[:n_hold].tolist())
    return [d for i, d in enumerate(docs) if i not in hold], [d for i, d in enumerate(docs) if i in hold]


def k_candidates(k_min=5, k_max=40, step=5):
    if k_min < 1 or k_max < k_min or step < 1:
        raise ValueError(f"bad K range {k_min}..{k_max} step {step}")
    return list(range(k_min, k_max + 1, step))


def select_k(docs, k_range=None, holdout_fraction=DEFAULT_HOLDOUT, seed=0, alpha=None,
             beta=DEFAULT_BETA, iterations=DEFAULT_ITERATIONS, jobs=1, tag="LDAreview"):
    """Train one model per candidate K and keep the one with the best held-out perplexity.

    ``k_range`` is any iterable of topic counts (default 5, 10, ..., 40).
    Returns the report; per-candidate log-likelihoods are on the training split.
    """
    ks = list(k_range) if k_range is not None else k_candidates()
    train, held = split_holdout(list(docs), holdout_fraction, seed)
    if not held:
        log.warning("too few documents for a held-out split; scoring on training documents")
        held = train

    def run(K):
        model = train_lda(train, K, alpha, beta, iterations, seed, tag)
        return K, training_log_likelihood(model, train), perplexity(model, held)

    report = KSelectionReport([])
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [pool.submit(run, K) for K in ks]
        for K, fut in zip(ks, futures):
            try:
                report.candidates.append(fut.result())
            except EmptyCorpusError:
                # a data problem, not a training failure: no partial report to keep
                for f in futures:
                    f.cancel()
                raise
            except Exception as exc:
                for f in futures:
                    f.cancel()
                raise KSweepError(f"training failed at K={K}: {exc}", report) from exc
            log.info("K=%d log-likelihood=%.2f perplexity=%.3f", *report.candidates[-1])
    report.chosen_K = choose_k(report.candidates)
    return report


def infer_sentence_topics(model, sentence, iterations=DEFAULT_INFER_ITERATIONS):
    """Topic distribution for one sentence's stems.

    Sentences without any in-vocabulary stem are flagged ``discarded`` with
    all-zero probabilities. Otherwise probabilities are the sampled topic
    shares of the sentence's tokens, averaged over the post-burn-in sweeps;
    the sampler seed mixes the model seed with the sentence id.
    """
    words = model.encode(sentence.stems)
    if words.size == 0:
        return TopicAssignment(sentence.sentence_id, (0.0,) * model.K, -1, 0.0, True)
    rng = np.random.default_rng(derive_seed(model.seed, model.tag, sentence.key))
    K = model.K
    z = rng.integers(0, K, size=words.size).astype(np.int64)
    nk = np.bincount(z, minlength=K).astype(np.int64)
    burn = iterations // 2
    acc = np.zeros(K)
    for it in range(iterations):
        _gibbs.fixed_phi_sweep(words, z, nk, model.phi, model.alpha, rng.random(words.size))
        if it >= burn:
            acc += nk
    probs = acc / acc.sum()
    top = int(np.argmax(probs))
    return TopicAssignment(sentence.sentence_id, tuple(probs.tolist()), top, float(probs[top]), False)


def infer_all(model, sentences, iterations=DEFAULT_INFER_ITERATIONS, jobs=1):
    if jobs <= 1:
        return [infer_sentence_topics(model, s, iterations) for s in sentences]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda s: infer_sentence_topics(model, s, iterations), sentences))
