"""Plain-text asset files shipped with the package (or supplied by the user)."""

import logging
from importlib import resources
from pathlib import Path

log = logging.getLogger(__name__)

STOPWORDS = "stopwords.txt"
CONTRACTIONS = "contractions.txt"
NOUNS = "nouns.txt"
LEXICON = "sentiment_lexicon.tsv"
NEGATORS = "negators.txt"
BOOSTERS = "boosters.txt"


def _read_lines(name, asset_dir=None):
    if asset_dir is not None and (Path(asset_dir) / name).exists():
        text = (Path(asset_dir) / name).read_text(encoding="utf-8")
    else:
        text = resources.files("reviewsum").joinpath("data", name).read_text(encoding="utf-8")
    out = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        out.append(line.rstrip("\r"))
    return out


def load_wordset(name, asset_dir=None):
    return frozenset(w.strip().lower() for w in _read_lines(name, asset_dir))


def load_pairs(name, asset_dir=None, convert=str):
    """Read ``key<TAB>value`` lines. Malformed lines are skipped with a warning."""
    pairs = {}
    for line in _read_lines(name, asset_dir):
        parts = line.split("\t")
        if len(parts) < 2:
            log.warning("%s: skipping malformed line %r", name, line)
            continue
        pairs[parts[0].strip().lower()] = convert(parts[1].strip())
    return pairs


def load_stopwords(asset_dir=None):
    return load_wordset(STOPWORDS, asset_dir)


def load_contractions(asset_dir=None):
    return load_pairs(CONTRACTIONS, asset_dir)


def load_noun_lexicon(asset_dir=None):
    return load_wordset(NOUNS, asset_dir)
