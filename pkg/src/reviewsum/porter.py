"""Porter suffix-stripping stemmer (the 1980 algorithm, no later extensions)."""

from functools import lru_cache

_VOWELS = frozenset("aeiou")


def _is_consonant(word, i):
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def measure(stem):
    """Number of VC sequences in ``stem`` (the m in [C](VC)^m[V])."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        cons = _is_consonant(stem, i)
        if cons and prev_vowel:
            m += 1
        prev_vowel = not cons
    return m


def _has_vowel(stem):
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word):
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word):
    if len(word) < 3:
        return False
    n = len(word)
    return (
        _is_consonant(word, n - 3)
        and not _is_consonant(word, n - 2)
        and _is_consonant(word, n - 1)
        and word[-1] not in "wxy"
    )


def _m_gt(k):
    return lambda stem: measure(stem) > k


# Steps 2-4 use only the longest matching suffix; a failed condition ends the step.
_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
]
_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]
_STEP4 = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment",
    "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def _longest(word, suffixes):
    best = None
    for suf in suffixes:
        if word.endswith(suf) and (best is None or len(suf) > len(best)):
            best = suf
    return best


def _step1a(w):
    if w.endswith("sses"):
        return w[:-2]
    if w.endswith("ies"):
        return w[:-2]
    if w.endswith("ss"):
        return w
    if w.endswith("s"):
        return w[:-1]
    return w


def _step1b(w):
    if w.endswith("eed"):
        return w[:-1] if measure(w[:-3]) > 0 else w
    for suf in ("ed", "ing"):
        if w.endswith(suf):
            stem = w[: -len(suf)]
            if not _has_vowel(stem):
                return w
            return _step1b_fixup(stem)
    return w


def _step1b_fixup(w):
    if w.endswith(("at", "bl", "iz")):
        return w + "e"
    if _ends_double_consonant(w) and w[-1] not in "lsz":
        return w[:-1]
    if measure(w) == 1 and _ends_cvc(w):
        return w + "e"
    return w


def _step1c(w):
    if w.endswith("y") and _has_vowel(w[:-1]):
        return w[:-1] + "i"
    return w


def _replace_table(w, table, cond):
    suf = _longest(w, [s for s, _ in table])
    if suf is None:
        return w
    stem = w[: -len(suf)]
    if not cond(stem):
        return w
    return stem + dict(table)[suf]


def _step4(w):
    suf = _longest(w, _STEP4)
    if suf is None:
        return w
    stem = w[: -len(suf)]
    if measure(stem) <= 1:
        return w
    if suf == "ion" and not stem.endswith(("s", "t")):
        return w
    return stem


def _step5a(w):
    if not w.endswith("e"):
        return w
    stem = w[:-1]
    m = measure(stem)
    if m > 1 or (m == 1 and not _ends_cvc(stem)):
        return stem
    return w


def _step5b(w):
    if measure(w) > 1 and _ends_double_consonant(w) and w.endswith("l"):
        return w[:-1]
    return w


@lru_cache(maxsize=65536)
def porter_stem(token):
    """Stem a lowercase alphabetic token.

    >>> porter_stem("caresses"), porter_stem("ponies"), porter_stem("sky")
    ('caress', 'poni', 'sky')
    """
    w = token
    if not w:
        return w
    w = _step1a(w)
    w = _step1b(w)
    w = _step1c(w)
    w = _replace_table(w, _STEP2, _m_gt(0))
    w = _replace_table(w, _STEP3, _m_gt(0))
    w = _step4(w)
    w = _step5a(w)
    w = _step5b(w)
    return w
