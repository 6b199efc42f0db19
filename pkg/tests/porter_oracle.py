"""Independent reference Porter stemmer used only by the tests.

Deliberately structured differently from anflo.textproc.stem: the word is
first classified into a consonant/vowel pattern string and every step is a
data table of (suffix, replacement, condition) rows interpreted by a single
generic engine.  Agreement between the two implementations is checked by
fuzzing in test_textproc.py; frozen expected values in the test suite were
produced with this module.
"""

from __future__ import annotations


def _cv_pattern(word: str) -> str:
    out: list[str] = []
    for i, ch in enumerate(word):
        if ch in "aeiou":
            out.append("v")
        elif ch == "y":
            out.append("v" if (i > 0 and out[i - 1] == "c") else "c")
        else:
            out.append("c")
    return "".join(out)


def _m(word: str) -> int:
    return _cv_pattern(word).count("vc")


def _contains_vowel(word: str) -> bool:
    return "v" in _cv_pattern(word)


def _double_consonant(word: str) -> bool:
    return len(word) >= 2 and word[-1] == word[-2] and _cv_pattern(word)[-1] == "c"


def _cvc(word: str) -> bool:
    return (
        len(word) >= 3
        and _cv_pattern(word)[-3:] == "cvc"
        and word[-1] not in "wxy"
    )


def _apply(word: str, table) -> str:
    """Longest-suffix-match rule application; one rule per step."""
    best = None
    for suffix, replacement, cond in table:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, replacement, cond)
    if best is None:
        return word
    suffix, replacement, cond = best
    stem = word[: len(word) - len(suffix)]
    if cond is None or cond(stem):
        return stem + replacement
    return word


_STEP1A = [
    ("sses", "ss", None),
    ("ies", "i", None),
    ("ss", "ss", None),
    ("s", "", None),
]

_STEP2 = [
    ("ational", "ate", lambda s: _m(s) > 0),
    ("tional", "tion", lambda s: _m(s) > 0),
    ("enci", "ence", lambda s: _m(s) > 0),
    ("anci", "ance", lambda s: _m(s) > 0),
    ("izer", "ize", lambda s: _m(s) > 0),
    ("abli", "able", lambda s: _m(s) > 0),
    ("alli", "al", lambda s: _m(s) > 0),
    ("entli", "ent", lambda s: _m(s) > 0),
    ("eli", "e", lambda s: _m(s) > 0),
    ("ousli", "ous", lambda s: _m(s) > 0),
    ("ization", "ize", lambda s: _m(s) > 0),
    ("ation", "ate", lambda s: _m(s) > 0),
    ("ator", "ate", lambda s: _m(s) > 0),
    ("alism", "al", lambda s: _m(s) > 0),
    ("iveness", "ive", lambda s: _m(s) > 0),
    ("fulness", "ful", lambda s: _m(s) > 0),
    ("ousness", "ous", lambda s: _m(s) > 0),
    ("aliti", "al", lambda s: _m(s) > 0),
    ("iviti", "ive", lambda s: _m(s) > 0),
    ("biliti", "ble", lambda s: _m(s) > 0),
]

_STEP3 = [
    ("icate", "ic", lambda s: _m(s) > 0),
    ("ative", "", lambda s: _m(s) > 0),
    ("alize", "al", lambda s: _m(s) > 0),
    ("iciti", "ic", lambda s: _m(s) > 0),
    ("ical", "ic", lambda s: _m(s) > 0),
    ("ful", "", lambda s: _m(s) > 0),
    ("ness", "", lambda s: _m(s) > 0),
]

_STEP4 = [
    ("al", "", lambda s: _m(s) > 1),
    ("ance", "", lambda s: _m(s) > 1),
    ("ence", "", lambda s: _m(s) > 1),
    ("er", "", lambda s: _m(s) > 1),
    ("ic", "", lambda s: _m(s) > 1),
    ("able", "", lambda s: _m(s) > 1),
    ("ible", "", lambda s: _m(s) > 1),
    ("ant", "", lambda s: _m(s) > 1),
    ("ement", "", lambda s: _m(s) > 1),
    ("ment", "", lambda s: _m(s) > 1),
    ("ent", "", lambda s: _m(s) > 1),
    ("ion", "", lambda s: _m(s) > 1 and s.endswith(("s", "t"))),
    ("ou", "", lambda s: _m(s) > 1),
    ("ism", "", lambda s: _m(s) > 1),
    ("ate", "", lambda s: _m(s) > 1),
    ("iti", "", lambda s: _m(s) > 1),
    ("ous", "", lambda s: _m(s) > 1),
    ("ive", "", lambda s: _m(s) > 1),
    ("ize", "", lambda s: _m(s) > 1),
]


def _step1b(word: str) -> str:
    if word.endswith("eed"):
        return word[:-1] if _m(word[:-3]) > 0 else word
    for suffix in ("ed", "ing"):
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if not _contains_vowel(stem):
                return word
            if stem.endswith(("at", "bl", "iz")):
                return stem + "e"
            if _double_consonant(stem) and stem[-1] not in ("l", "s", "z"):
                return stem[:-1]
            if _m(stem) == 1 and _cvc(stem):
                return stem + "e"
            return stem
    return word


def _step1c(word: str) -> str:
    if word.endswith("y") and _contains_vowel(word[:-1]):
        return word[:-1] + "i"
    return word


def _step5(word: str) -> str:
    if word.endswith("e"):
        stem = word[:-1]
        if _m(stem) > 1 or (_m(stem) == 1 and not _cvc(stem)):
            word = stem
    if _double_consonant(word) and word.endswith("l") and _m(word[:-1]) > 1:
        word = word[:-1]
    return word


def porter_oracle(word: str) -> str:
    """Full Porter stem; length <= 2 and non a-z words pass through."""
    if len(word) <= 2 or not word.isascii() or not word.isalpha():
        return word
    word = _apply(word, _STEP1A)
    word = _step1b(word)
    word = _step1c(word)
    word = _apply(word, _STEP2)
    word = _apply(word, _STEP3)
    word = _apply(word, _STEP4)
    word = _step5(word)
    return word
