"""Description text processing: tokenize, language check, stopwords, lemmas, stemming.

The preprocessing pipeline turns a raw store description into the token list
consumed by topic modelling.  Every stage is deterministic and pure so that
model training is reproducible byte for byte.

Stemming is the original Porter algorithm (suffix stripping driven by the
consonant/vowel measure m), applied after dictionary lemmatization.  Because
stemming can expose a new dictionary form or a stopword ("outing" stems to
"out"), each token is normalized to a fixed point: stopword check, lemma
lookup and stem are repeated until the token stops changing.
"""

from __future__ import annotations

import re
import unicodedata
from functools import lru_cache
from importlib import resources

__all__ = [
    "tokenize",
    "detect_english",
    "remove_stopwords",
    "lemmatize",
    "stem",
    "preprocess",
    "load_stopwords",
    "load_lemmas",
    "default_stopwords",
    "default_lemmas",
    "DEFAULT_ENGLISH_THRESHOLD",
]

# Minimum fraction of tokens that must be stopwords for a text to count
# as English.
DEFAULT_ENGLISH_THRESHOLD = 0.05

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Rounds of stopword/lemma/stem before a token is assumed stable.  Three
# suffice for the shipped resources; the bound only guards pathological
# user dictionaries.
_MAX_NORMALIZE_ROUNDS = 8


def tokenize(text: str) -> list[str]:
    """Lowercase, fold accents to ASCII and split on alphanumeric runs."""
    folded = unicodedata.normalize("NFKD", text.lower())
    folded = folded.encode("ascii", "ignore").decode("ascii")
    return _TOKEN_RE.findall(folded)


def detect_english(
    text: str,
    stopwords: frozenset[str] | None = None,
    threshold: float = DEFAULT_ENGLISH_THRESHOLD,
) -> bool:
    """Heuristic language check: stopword hit ratio over tokens.

    Returns True when at least ``threshold`` of the tokens are English
    stopwords.  Texts with no tokens at all are not English.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    tokens = tokenize(text)
    if not tokens:
        return False
    hits = sum(1 for t in tokens if t in stopwords)
    return hits / len(tokens) >= threshold


def remove_stopwords(tokens: list[str], stopwords: frozenset[str] | None = None) -> list[str]:
    if stopwords is None:
        stopwords = default_stopwords()
    return [t for t in tokens if t not in stopwords]


def lemmatize(token: str, lemmas: dict[str, str]) -> str:
    """Dictionary lookup; unknown tokens pass through unchanged."""
    return lemmas.get(token, token)


def preprocess(
    description: str,
    lemmas: dict[str, str] | None = None,
    stopwords: frozenset[str] | None = None,
) -> list[str]:
    """Full pipeline: tokenize, drop stopwords, lemmatize, stem.

    Each surviving token is reduced to a fixed point of
    ``stem(lemmatize(.))`` with stopwords re-checked between rounds, so the
    output is idempotent under the pipeline itself: every emitted token is
    its own stem, a non-stopword, and non-empty.
    """
    if lemmas is None:
        lemmas = default_lemmas()
    if stopwords is None:
        stopwords = default_stopwords()
    out: list[str] = []
    for token in tokenize(description):
        t = token
        for _ in range(_MAX_NORMALIZE_ROUNDS):
            if t in stopwords:
                t = ""
                break
            reduced = stem(lemmatize(t, lemmas))
            if reduced == t:
                break
            t = reduced
        if t:
            out.append(t)
    return out


# ---------------------------------------------------------------------------
# Packaged resources


def load_stopwords(path) -> frozenset[str]:
    """Load a stopword file (one entry per line, '#' comments).

    Entries are passed through :func:`tokenize` so that contraction forms
    like "aren't" also cover their token fragments ("aren", "t").
    """
    words: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                words.update(tokenize(line))
    return frozenset(words)


def load_lemmas(path) -> dict[str, str]:
    """Load a lemma dictionary file of ``<variant> <base>`` pairs.

    Raises ValueError if a variant is repeated with a different base or if
    a base form is itself mapped elsewhere (bases must be fixed points).
    """
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected '<variant> <base>'")
            variant, base = parts
            if not base:
                raise ValueError(f"{path}:{lineno}: empty base form")
            if variant in mapping and mapping[variant] != base:
                raise ValueError(f"{path}:{lineno}: conflicting entry for {variant!r}")
            mapping[variant] = base
    for base in set(mapping.values()):
        if base in mapping:
            raise ValueError(f"base form {base!r} is also mapped; bases must be fixed points")
    return mapping


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    ref = resources.files("anflo.data").joinpath("stopwords.txt")
    with resources.as_file(ref) as path:
        return load_stopwords(path)


@lru_cache(maxsize=1)
def default_lemmas() -> dict[str, str]:
    ref = resources.files("anflo.data").joinpath("lemmas.txt")
    with resources.as_file(ref) as path:
        return load_lemmas(path)


# ---------------------------------------------------------------------------
# Porter stemmer (original 1980 algorithm)
#
# A word is [C](VC)^m[V]; the measure m drives most rule conditions.  Within
# a step only the longest matching suffix rule is considered; if its
# condition fails the step leaves the word unchanged.

_VOWELS = frozenset("aeiou")


def _is_consonant(word: str, i: int) -> bool:
    c = word[i]
    if c in _VOWELS:
        return False
    if c == "y":
        # y is a vowel only when preceded by a consonant
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem_: str) -> int:
    """Count of vowel-to-consonant transitions, i.e. m in [C](VC)^m[V]."""
    m = 0
    prev_cons = None
    for i in range(len(stem_)):
        cons = _is_consonant(stem_, i)
        if cons and prev_cons is False:
            m += 1
        prev_cons = cons
    return m


def _has_vowel(stem_: str) -> bool:
    return any(not _is_consonant(stem_, i) for i in range(len(stem_)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    # consonant-vowel-consonant where the final consonant is not w, x or y
    if len(word) < 3:
        return False
    return (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


def _step1a(word: str) -> str:
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("ies"):
        return word[:-2]
    if word.endswith("ss"):
        return word
    if word.endswith("s"):
        return word[:-1]
    return word


def _step1b(word: str) -> str:
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            return word[:-1]
        return word
    if word.endswith("ed"):
        stem_ = word[:-2]
        if _has_vowel(stem_):
            return _step1b_post(stem_)
        return word
    if word.endswith("ing"):
        stem_ = word[:-3]
        if _has_vowel(stem_):
            return _step1b_post(stem_)
        return word
    return word


def _step1b_post(stem_: str) -> str:
    """Cleanup after removing -ed/-ing."""
    if stem_.endswith(("at", "bl", "iz")):
        return stem_ + "e"
    if _ends_double_consonant(stem_) and stem_[-1] not in "lsz":
        return stem_[:-1]
    if _measure(stem_) == 1 and _ends_cvc(stem_):
        return stem_ + "e"
    return stem_


def _step1c(word: str) -> str:
    if word.endswith("y") and _has_vowel(word[:-1]):
        return word[:-1] + "i"
    return word


# Steps 2..4 pick the longest matching suffix first; tables are ordered so
# that any suffix-of-a-suffix appears after the longer form.

# (suffix, replacement); condition is m(stem) > 0 for every rule
_STEP2_SUFFIXES = [
    ("ational", "ate"),
    ("ization", "ize"),
    ("iveness", "ive"),
    ("fulness", "ful"),
    ("ousness", "ous"),
    ("biliti", "ble"),
    ("tional", "tion"),
    ("entli", "ent"),
    ("ousli", "ous"),
    ("ation", "ate"),
    ("alism", "al"),
    ("aliti", "al"),
    ("iviti", "ive"),
    ("enci", "ence"),
    ("anci", "ance"),
    ("izer", "ize"),
    ("abli", "able"),
    ("alli", "al"),
    ("ator", "ate"),
    ("eli", "e"),
]

# (suffix, replacement); condition is m(stem) > 0
_STEP3_SUFFIXES = [
    ("icate", "ic"),
    ("ative", ""),
    ("alize", "al"),
    ("iciti", "ic"),
    ("ical", "ic"),
    ("ful", ""),
    ("ness", ""),
]

# suffixes removed when m(stem) > 1; "ion" additionally needs stem ending s/t
_STEP4_SUFFIXES = [
    "ement",
    "ance",
    "ence",
    "able",
    "ible",
    "ment",
    "ant",
    "ent",
    "ion",
    "ism",
    "ate",
    "iti",
    "ous",
    "ive",
    "ize",
    "al",
    "er",
    "ic",
    "ou",
]


def _step2(word: str) -> str:
    for suffix, replacement in _STEP2_SUFFIXES:
        if word.endswith(suffix):
            stem_ = word[: len(word) - len(suffix)]
            if _measure(stem_) > 0:
                return stem_ + replacement
            return word
    return word


def _step3(word: str) -> str:
    for suffix, replacement in _STEP3_SUFFIXES:
        if word.endswith(suffix):
            stem_ = word[: len(word) - len(suffix)]
            if _measure(stem_) > 0:
                return stem_ + replacement
            return word
    return word


def _step4(word: str) -> str:
    for suffix in _STEP4_SUFFIXES:
        if word.endswith(suffix):
            stem_ = word[: len(word) - len(suffix)]
            if _measure(stem_) > 1:
                if suffix == "ion" and not stem_.endswith(("s", "t")):
                    return word
                return stem_
            return word
    return word


def _step5a(word: str) -> str:
    if word.endswith("e"):
        stem_ = word[:-1]
        m = _measure(stem_)
        if m > 1:
            return stem_
        if m == 1 and not _ends_cvc(stem_):
            return stem_
    return word


def _step5b(word: str) -> str:
    if word.endswith("ll") and _measure(word) > 1:
        return word[:-1]
    return word


def stem(word: str) -> str:
    """Porter stem of a lowercase word.  Words of length <= 2 are returned
    unchanged, as are words containing characters outside a-z."""
    if len(word) <= 2 or not word.isascii() or not word.isalpha():
        return word
    word = _step1a(word)
    word = _step1b(word)
    word = _step1c(word)
    word = _step2(word)
    word = _step3(word)
    word = _step4(word)
    word = _step5a(word)
    word = _step5b(word)
    return word
