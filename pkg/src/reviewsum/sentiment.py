"""Lexicon-and-rule sentence sentiment (reduced VADER rule set).

Rules, in order, for each token carrying a valence:
  * a booster immediately before it adds its increment, away from zero;
  * every negator among the three preceding tokens multiplies it by -0.74.

Positive and negative scores are the shares of the adjusted valence mass
(each hit contributes |v| + 1, non-hits count 1 as neutral), so both lie in
[0, 1] and sum to at most 1.
"""

from dataclasses import dataclass
from functools import lru_cache

from . import assets

RULESET_VERSION = "1"

NEGATION_SCALAR = -0.74
NEGATION_WINDOW = 3
BOOST = 0.293

POSITIVE = "positive"
NEGATIVE = "negative"


@dataclass(frozen=True)
class SentimentLexicon:
    valence: dict
    negators: frozenset = frozenset()
    boosters: dict = None

    def __post_init__(self):
        if self.boosters is None:
            object.__setattr__(self, "boosters", {})
        for tok, v in self.valence.items():
            if not -4.0 <= v <= 4.0:
                raise ValueError(f"valence of {tok!r} outside [-4, 4]: {v}")

    def inverted(self):
        """Same lexicon with every valence sign flipped."""
        return SentimentLexicon({t: -v for t, v in self.valence.items()}, self.negators, self.boosters)

    @classmethod
    def load(cls, asset_dir=None):
        return cls(
            assets.load_pairs(assets.LEXICON, asset_dir, float),
            assets.load_wordset(assets.NEGATORS, asset_dir),
            assets.load_pairs(assets.BOOSTERS, asset_dir, float),
        )


@lru_cache(maxsize=1)
def default_lexicon():
    return SentimentLexicon.load()


@dataclass(frozen=True)
class SentimentScores:
    ps: float
    ns: float
    polarity: str
    neutral: bool = False

    def to_json(self):
        return {"ps": self.ps, "ns": self.ns, "polarity": self.polarity, "neutral": self.neutral}


def polarity_label(scores):
    """``positive`` when ps >= ns (ties included), else ``negative``."""
    return POSITIVE if scores.ps >= scores.ns else NEGATIVE


def adjusted_valences(tokens, lexicon):
    out = []
    for i, tok in enumerate(tokens):
        v = lexicon.valence.get(tok)
        if v is None or tok in lexicon.boosters:
            out.append(0.0)
            continue
        if i > 0 and tokens[i - 1] in lexicon.boosters:
            inc = lexicon.boosters[tokens[i - 1]]
            v = v + inc if v > 0 else v - inc
        for j in range(max(0, i - NEGATION_WINDOW), i):
            if tokens[j] in lexicon.negators:
                v *= NEGATION_SCALAR
        out.append(v)
    return out


def score_sentence(tokens, lexicon=None):
    """Positive/negative scores of a lowercased, unfiltered token sequence."""
    lexicon = lexicon or default_lexicon()
    vals = adjusted_valences(list(tokens), lexicon)
    pos = sum(v + 1.0 for v in vals if v > 0)
    neg = sum(1.0 - v for v in vals if v < 0)
    neu = sum(1 for v in vals if v == 0)
    if pos == 0 and neg == 0:
        return SentimentScores(0.0, 0.0, POSITIVE, neutral=True)
    total = pos + neg + neu
    ps, ns = pos / total, neg / total
    return SentimentScores(ps, ns, POSITIVE if ps >= ns else NEGATIVE)
