"""Sentence segmentation, normalization, noun tagging and noun-keyed documents."""

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from . import assets
from .porter import porter_stem

REVIEW = "review"
SUMMARY = "summary"

# Lowercased tokens (without their final period) that do not end a sentence.
ABBREVIATIONS = frozenset({
    "vs", "e.g", "i.e", "eg", "ie", "mr", "mrs", "ms", "dr", "prof",
    "st", "jr", "sr", "inc", "ltd", "co", "approx", "appx", "fig", "ca",
    "u.s", "a.m", "p.m", "min", "max", "no", "oz", "lb", "lbs", "ft", "in",
})
# "no." and "in." are only abbreviations when followed by a digit or lowercase word.
_AMBIGUOUS = frozenset({"no", "in", "co", "min", "max"})

_BOUNDARY = re.compile(r"[.!?]+[\"')\]]*(?=\s|$)")
_PREV_WORD = re.compile(r"(\S+)$")


@dataclass(frozen=True)
class SentenceRecord:
    product_id: str
    source: str
    doc_index: int
    sent_index: int
    raw_text: str
    tokens: tuple = ()
    stems: tuple = ()
    nouns: frozenset = field(default_factory=frozenset)
    word_count: int = 0

    @property
    def sentence_id(self):
        return (self.product_id, self.source, self.doc_index, self.sent_index)

    @property
    def key(self):
        """Flat string form of ``sentence_id`` used in files and seeds."""
        return f"{self.product_id}|{self.source}|{self.doc_index}|{self.sent_index}"

    def to_json(self):
        return {
            "product_id": self.product_id,
            "source": self.source,
            "doc_index": self.doc_index,
            "sent_index": self.sent_index,
            "raw_text": self.raw_text,
            "tokens": list(self.tokens),
            "stems": list(self.stems),
            "nouns": sorted(self.nouns),
            "word_count": self.word_count,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            obj["product_id"], obj["source"], int(obj["doc_index"]), int(obj["sent_index"]),
            obj["raw_text"], tuple(obj["tokens"]), tuple(obj["stems"]),
            frozenset(obj["nouns"]), int(obj["word_count"]),
        )


@dataclass(frozen=True)
class CombinedDoc:
    noun_key: str
    member_ids: tuple
    bag: dict

    @property
    def length(self):
        return sum(self.bag.values())


def _is_abbreviation(text, end, next_text):
    m = _PREV_WORD.search(text[:end])
    if m is None:
        return False
    word = m.group(1).lower().lstrip("([\"'")
    if word not in ABBREVIATIONS:
        return False
    if word in _AMBIGUOUS:
        nxt = next_text.lstrip()
        return bool(nxt) and (nxt[0].isdigit() or nxt[0].islower())
    return True


def split_sentences(text):
    """Split text at ``.``, ``!``, ``?`` and newlines.

    A period after a guarded abbreviation ("vs.", "e.g.") is not a boundary.
    Nothing but whitespace is ever dropped.
    """
    out = []
    for line in text.splitlines():
        start = 0
        for m in _BOUNDARY.finditer(line):
            if m.group(0) == "." and _is_abbreviation(line, m.start(), line[m.end():]):
                continue
            piece = line[start:m.end()].strip()
            if piece:
                out.append(piece)
            start = m.end()
        tail = line[start:].strip()
        if tail:
            out.append(tail)
    return out


class TextNormalizer:
    """Lowercase, expand contractions/terms, tokenize, drop stopwords and stem."""

    def __init__(self, contraction_map, stoplist):
        self.contraction_map = {k.lower(): v.lower() for k, v in contraction_map.items()}
        self.stoplist = frozenset(stoplist)
        if self.contraction_map:
            alts = "|".join(re.escape(k) for k in sorted(self.contraction_map, key=len, reverse=True))
            self._pattern = re.compile(rf"(?<![a-z0-9'])(?:{alts})(?![a-z0-9'])")
        else:
            self._pattern = None

    def tokenize(self, raw):
        text = raw.lower().replace("’", "'").replace("‘", "'")
        if self._pattern is not None:
            text = self._pattern.sub(lambda m: self.contraction_map[m.group(0)], text)
        text = text.replace("'", "")
        return re.findall(r"[a-z0-9]+", text)

    def content_tokens(self, tokens):
        return [t for t in tokens if t not in self.stoplist and not t.isdigit()]

    def __call__(self, raw):
        tokens = self.tokenize(raw)
        stems = [porter_stem(t) if t.isalpha() else t for t in self.content_tokens(tokens)]
        return tokens, stems


def normalize_and_filter(raw, contraction_map, stoplist):
    """Return ``(tokens, stems)`` for one raw sentence.

    ``tokens`` keeps every normalized word (needed by the sentiment rules);
    ``stems`` covers only the non-stopword tokens.
    """
    return TextNormalizer(contraction_map, stoplist)(raw)


class LexiconNounTagger:
    """Noun detection from a lemma list plus derivational-suffix heuristics."""

    SUFFIXES = ("tion", "ment", "ness", "ity")

    def __init__(self, lexicon, suffixes=SUFFIXES):
        self.lexicon = frozenset(lexicon)
        self.suffixes = tuple(suffixes)

    def is_noun(self, token):
        if not token.isalpha():
            return False
        if token in self.lexicon:
            return True
        for plural, singular in (("ies", "y"), ("es", ""), ("s", "")):
            if token.endswith(plural) and token[: -len(plural)] + singular in self.lexicon:
                return True
        return any(token.endswith(s) and len(token) > len(s) + 2 for s in self.suffixes)

    def __call__(self, tokens):
        return {porter_stem(t) for t in tokens if self.is_noun(t)}


@lru_cache(maxsize=1)
def default_noun_tagger():
    return LexiconNounTagger(assets.load_noun_lexicon())


def tag_nouns(tokens, tagger=None):
    """Stems of the tokens the tagger classifies as nouns."""
    tagger = tagger or default_noun_tagger()
    return set(tagger(tokens))


class Preprocessor:
    """Turns review and summary texts into :class:`SentenceRecord` objects."""

    def __init__(self, asset_dir=None, tagger=None, segmenter=split_sentences):
        self.normalizer = TextNormalizer(
            assets.load_contractions(asset_dir), assets.load_stopwords(asset_dir)
        )
        self.tagger = tagger or LexiconNounTagger(assets.load_noun_lexicon(asset_dir))
        self.segmenter = segmenter

    def sentence(self, product_id, source, doc_index, sent_index, raw):
        tokens, stems = self.normalizer(raw)
        content = self.normalizer.content_tokens(tokens)
        nouns = frozenset(n for n in self.tagger(content) if n in stems)
        return SentenceRecord(
            product_id, source, doc_index, sent_index, raw,
            tuple(tokens), tuple(stems), nouns, len(raw.split()),
        )

    def document(self, product_id, source, doc_index, text):
        return [
            self.sentence(product_id, source, doc_index, j, s)
            for j, s in enumerate(self.segmenter(text))
        ]

    def product(self, record):
        out = []
        for i, review in enumerate(record.reviews):
            out.extend(self.document(record.product_id, REVIEW, i, review))
        if record.reference_summary:
            out.extend(self.document(record.product_id, SUMMARY, 0, record.reference_summary))
        return out

    def dataset(self, dataset):
        out = []
        for record in dataset.products:
            out.extend(self.product(record))
        return out


def build_combined_docs(sentences):
    """One document per distinct noun stem, holding every sentence that has it.

    A sentence with m nouns joins m documents; noun-less sentences join none.
    Documents come back sorted by noun.
    """
    members = {}
    bags = {}
    for s in sentences:
        for noun in sorted(s.nouns):
            members.setdefault(noun, []).append(s.sentence_id)
            bags.setdefault(noun, Counter()).update(s.stems)
    return [CombinedDoc(n, tuple(members[n]), dict(bags[n])) for n in sorted(members)]
