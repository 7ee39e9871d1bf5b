"""Text analysis: tokenization, stopword removal, Porter stemming.

The analyzer pipeline is: split on non-alphanumeric boundaries, lowercase,
drop stopwords (after lowercasing), then optionally stem. The default
stopword list (33 common English words) ships in ``data/stopwords.txt``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def _load_default_stopwords() -> frozenset[str]:
    text = resources.files("seqrank").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w for w in text.split() if w)


DEFAULT_STOPWORDS = _load_default_stopwords()

STEM_NONE = "none"
STEM_PORTER = "porter"


@dataclass(frozen=True)
class AnalyzerConfig:
    lowercase: bool = True
    stopwords: frozenset[str] = field(default_factory=lambda: DEFAULT_STOPWORDS)
    stem: str = STEM_PORTER

    def __post_init__(self):
        if self.stem not in (STEM_NONE, STEM_PORTER):
            raise ValueError(f"unknown stemmer: {self.stem!r}")


#: Analyzer that only splits and lowercases; handy for synthetic corpora.
PLAIN_CONFIG = AnalyzerConfig(stopwords=frozenset(), stem=STEM_NONE)


def analyze(text: str, cfg: AnalyzerConfig | None = None) -> list[str]:
    """Tokenize ``text`` into index/query terms under ``cfg`` (default config if None)."""
    if cfg is None:
        cfg = AnalyzerConfig()
    tokens = _TOKEN_RE.findall(text)
    if cfg.lowercase:
        tokens = [t.lower() for t in tokens]
    if cfg.stopwords:
        tokens = [t for t in tokens if t not in cfg.stopwords]
    if cfg.stem == STEM_PORTER:
        tokens = [porter_stem(t) for t in tokens]
    return tokens


# ---------------------------------------------------------------------------
# Porter stemmer
#
# Port of the classic algorithm (with the author's later bli/logi/ion
# revisions), operating on lowercase words. Words of length <= 2 are
# returned unchanged.
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return True if i == 0 else not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    # number of vowel-run -> consonant-run transitions
    m = 0
    prev_cons = None
    for i in range(len(stem)):
        cons = _is_consonant(stem, i)
        if prev_cons is False and cons:
            m += 1
        prev_cons = cons
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    # consonant-vowel-consonant ending where the final consonant is not w/x/y;
    # used to decide whether to restore a trailing 'e' (hop -> hope).
    if len(word) < 3:
        return False
    return (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


def _step1ab(w: str) -> str:
    if w.endswith("s"):
        if w.endswith("sses"):
            w = w[:-2]
        elif w.endswith("ies"):
            w = w[:-3] + "i"
        elif not w.endswith("ss"):
            w = w[:-1]
    cleaved = False
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    elif w.endswith("ed") and _has_vowel(w[:-2]):
        w = w[:-2]
        cleaved = True
    elif w.endswith("ing") and _has_vowel(w[:-3]):
        w = w[:-3]
        cleaved = True
    if cleaved:
        if w.endswith(("at", "bl", "iz")):
            w += "e"
        elif _ends_double_consonant(w):
            if w[-1] not in "lsz":
                w = w[:-1]
        elif _measure(w) == 1 and _ends_cvc(w):
            w += "e"
    return w


def _step1c(w: str) -> str:
    if w.endswith("y") and _has_vowel(w[:-1]):
        w = w[:-1] + "i"
    return w


# (suffix, replacement) rule groups keyed by a dispatch character. Within a
# group the first *matching* suffix settles the step, whether or not the
# measure condition then allows the rewrite.
_STEP2_RULES = {
    "a": [("ational", "ate"), ("tional", "tion")],
    "c": [("enci", "ence"), ("anci", "ance")],
    "e": [("izer", "ize")],
    "l": [("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous")],
    "o": [("ization", "ize"), ("ation", "ate"), ("ator", "ate")],
    "s": [("alism", "al"), ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous")],
    "t": [("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")],
    "g": [("logi", "log")],
}

_STEP3_RULES = {
    "e": [("icate", "ic"), ("ative", ""), ("alize", "al")],
    "i": [("iciti", "ic")],
    "l": [("ical", "ic"), ("ful", "")],
    "s": [("ness", "")],
}

_STEP4_SUFFIXES = {
    "a": ["al"],
    "c": ["ance", "ence"],
    "e": ["er"],
    "i": ["ic"],
    "l": ["able", "ible"],
    "n": ["ant", "ement", "ment", "ent"],
    "o": ["ion", "ou"],
    "s": ["ism"],
    "t": ["ate", "iti"],
    "u": ["ous"],
    "v": ["ive"],
    "z": ["ize"],
}


def _apply_rules(w: str, rules: dict[str, list[tuple[str, str]]]) -> str:
    if len(w) < 2:
        return w
    for suffix, replacement in rules.get(w[-2], ()):
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 0:
                return stem + replacement
            return w
    return w


def _step3(w: str) -> str:
    if not w:
        return w
    for suffix, replacement in _STEP3_RULES.get(w[-1], ()):
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 0:
                return stem + replacement
            return w
    return w


def _step4(w: str) -> str:
    if len(w) < 2:
        return w
    for suffix in _STEP4_SUFFIXES.get(w[-2], ()):
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if suffix == "ion" and not (stem and stem[-1] in "st"):
                return w
            if _measure(stem) > 1:
                return stem
            return w
    return w


def _step5(w: str) -> str:
    if w.endswith("e"):
        a = _measure(w)
        if a > 1 or (a == 1 and not _ends_cvc(w[:-1])):
            w = w[:-1]
    if w.endswith("l") and _ends_double_consonant(w) and _measure(w) > 1:
        w = w[:-1]
    return w


def porter_stem(word: str) -> str:
    """Stem a single lowercase word with the Porter algorithm."""
    if len(word) <= 2:
        return word
    w = _step1ab(word)
    w = _step1c(w)
    w = _apply_rules(w, _STEP2_RULES)
    w = _step3(w)
    w = _step4(w)
    w = _step5(w)
    return w
