"""Salient-topic selection, topic polarity and per-topic sentence choice."""

import logging
import math
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from .sentiment import NEGATIVE, POSITIVE

log = logging.getLogger(__name__)

DEFAULT_K = 5
_EPS = 1e-12


@dataclass(frozen=True)
class Member:
    sentence_id: tuple
    p: float
    sentiment: object  # SentimentScores
    sl: float
    op: float | None = None


@dataclass(frozen=True)
class TopicGroup:
    topic_id: int
    members: tuple
    n_pos: int = 0
    n_neg: int = 0
    polarity: str = POSITIVE


@dataclass(frozen=True)
class SummaryEntry:
    topic_id: int
    sentence_id: tuple
    raw_text: str
    score: float
    polarity: str

    def to_json(self):
        return {
            "topic": self.topic_id,
            "sentence_id": "|".join(str(x) for x in self.sentence_id),
            "sentence": self.raw_text,
            "score": self.score,
            "polarity": self.polarity,
        }


@dataclass(frozen=True)
class ProductSummary:
    product_id: str
    entries: tuple = ()

    @property
    def k_used(self):
        return len(self.entries)

    def text(self):
        return "\n".join(e.raw_text for e in self.entries)

    def to_json(self):
        return {
            "product_id": self.product_id,
            "entries": [e.to_json() for e in self.entries],
            "k_used": self.k_used,
        }

    @classmethod
    def from_json(cls, obj):
        entries = tuple(
            SummaryEntry(
                int(e["topic"]), _parse_sid(e.get("sentence_id", "")), e["sentence"],
                float(e["score"]), e["polarity"],
            )
            for e in obj["entries"]
        )
        return cls(obj["product_id"], entries)


def _parse_sid(text):
    if not text:
        return ()
    pid, source, doc, sent = text.rsplit("|", 3)
    return (pid, source, int(doc), int(sent))


def topic_counts(assignments):
    return Counter(a.top_topic for a in assignments if not a.discarded)


def select_salient_topics(assignments, k=DEFAULT_K):
    """The k topics holding the most (non-discarded) sentences; ties favour the lower id."""
    counts = topic_counts(assignments)
    ranked = sorted(counts, key=lambda t: (-counts[t], t))
    return ranked[:k]


def topic_polarity_and_op(group):
    """Majority polarity of the group; each member's opinion score follows it."""
    n_pos = sum(1 for m in group.members if m.sentiment.polarity == POSITIVE)
    n_neg = len(group.members) - n_pos
    polarity = POSITIVE if n_pos >= n_neg else NEGATIVE
    members = tuple(
        replace(m, op=m.sentiment.ps if polarity == POSITIVE else m.sentiment.ns)
        for m in group.members
    )
    return TopicGroup(group.topic_id, members, n_pos, n_neg, polarity)


def _check_unit(name, x):
    if not (-_EPS <= x <= 1 + _EPS) or math.isnan(x):
        raise ValueError(f"{name}={x!r} outside [0, 1]")


def sentence_score(p, op, sl):
    """Importance of a sentence: (topic probability + opinion score) * summary likelihood."""
    _check_unit("p", p)
    _check_unit("op", op)
    _check_unit("sl", sl)
    return (p + op) * sl


def _rank_key(member, score):
    return (-score, -member.p, member.sentence_id)


def best_member(group):
    scored = [(m, sentence_score(m.p, m.op, m.sl)) for m in group.members]
    return min(scored, key=lambda ms: _rank_key(*ms))


def build_groups(assignments, sentiments, sls, topic_ids, topic_weights=None):
    """Group non-discarded sentences by their top topic, restricted to ``topic_ids``.

    ``sentiments`` and ``sls`` map sentence_id to SentimentScores and summary
    likelihood. ``topic_weights`` optionally rescales each topic's P.
    """
    wanted = set(topic_ids)
    members = {t: [] for t in topic_ids}
    for a in assignments:
        if a.discarded or a.top_topic not in wanted:
            continue
        p = a.top_prob
        if topic_weights is not None:
            p *= float(topic_weights[a.top_topic])
        members[a.top_topic].append(Member(a.sentence_id, p, sentiments[a.sentence_id], sls[a.sentence_id]))
    return [TopicGroup(t, tuple(members[t])) for t in topic_ids if members[t]]


def generate_summary(product_id, sentences, assignments, sentiments, sls, k=DEFAULT_K,
                     topic_weights=None):
    """Pick the top-scoring sentence of each of the k most salient topics.

    ``sentences`` supplies raw text by sentence_id. Ties on score go to the
    higher topic probability, then the smaller sentence id.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    text = {s.sentence_id: s.raw_text for s in sentences}
    topic_ids = select_salient_topics(assignments, k)
    if not topic_ids:
        log.warning("product %s: no usable sentences, summary is empty", product_id)
        return ProductSummary(product_id, ())
    entries = []
    for group in build_groups(assignments, sentiments, sls, topic_ids, topic_weights):
        group = topic_polarity_and_op(group)
        member, score = best_member(group)
        entries.append(SummaryEntry(group.topic_id, member.sentence_id, text[member.sentence_id],
                                    score, group.polarity))
    return ProductSummary(product_id, tuple(entries))


def _cosine(a, b):
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(a @ b / (na * nb))


def summary_topic_alignment(review_model, summary_model):
    """Per review topic, the best cosine similarity to any summary topic.

    Both topic-word matrices are projected onto the union vocabulary. Used
    as optional weights on P.
    """
    vocab = sorted(set(review_model.vocab) | set(summary_model.vocab))
    pos = {w: i for i, w in enumerate(vocab)}

    def project(model):
        out = np.zeros((model.K, len(vocab)))
        cols = [pos[w] for w in model.vocab]
        out[:, cols] = model.phi
        return out

    R, S = project(review_model), project(summary_model)
    return [max(_cosine(r, s) for s in S) for r in R]
