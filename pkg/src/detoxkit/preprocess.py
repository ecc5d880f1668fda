"""Text normalization, tokenization, stopword removal and stemming.

Only the statistical-model path uses this pipeline. Every function is pure,
so token streams can be computed once per corpus and shared across folds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .stemmer import stem_word

NUMBER_TAG = "<number>"

TICKER_RE = re.compile(r"\$[A-Za-z]+")
RETWEET_RE = re.compile(r"^(?:[Rr][Tt]\s+)+")
URL_RE = re.compile(r"https?://\S+|www\.\S+")
HASHTAG_WORD_RE = re.compile(r"#\w*")
NUMBER_RE = re.compile(r"\d+(?:[.,]\d+)*")
_SPACE_RE = re.compile(r"\s+")
_WORD = r"[^\W\d_]+"

MIN_STEM_LENGTH = 3


def read_stopwords(path: str | Path) -> frozenset[str]:
    """One surface form per line; blank lines and ``#`` comments ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                words.add(line.lower())
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    ref = resources.files("detoxkit") / "data" / "spanish_stopwords.txt"
    with resources.as_file(ref) as path:
        return read_stopwords(path)


@dataclass(frozen=True)
class PreprocessConfig:
    remove_tickers: bool = True
    remove_retweet_markers: bool = True
    remove_hashmark: bool = True
    drop_hashtag_words: bool = False
    remove_urls: bool = True
    number_tag: str = NUMBER_TAG
    lowercase: bool = True
    stopwords: frozenset[str] = field(default_factory=default_stopwords, repr=False)
    stem: bool = True

    def __post_init__(self):
        if not self.number_tag or any(ch.isspace() for ch in self.number_tag):
            raise ValueError("number_tag must be nonempty and contain no whitespace")
        if any(ch.isdigit() for ch in self.number_tag):
            raise ValueError("number_tag must not contain digits")
        object.__setattr__(self, "stopwords", frozenset(w.lower() for w in self.stopwords))

    def with_stopwords(self, words: Iterable[str]) -> "PreprocessConfig":
        return replace(self, stopwords=frozenset(words))

    def to_dict(self) -> dict:
        return {
            "remove_tickers": self.remove_tickers,
            "remove_retweet_markers": self.remove_retweet_markers,
            "remove_hashmark": self.remove_hashmark,
            "drop_hashtag_words": self.drop_hashtag_words,
            "remove_urls": self.remove_urls,
            "number_tag": self.number_tag,
            "lowercase": self.lowercase,
            "stopwords": sorted(self.stopwords),
            "stem": self.stem,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PreprocessConfig":
        d = dict(d)
        if "stopwords" in d:
            d["stopwords"] = frozenset(d["stopwords"])
        return cls(**d)


def _normalize_once(text: str, config: PreprocessConfig) -> str:
    if config.remove_tickers:
        text = TICKER_RE.sub(" ", text)
    if config.remove_retweet_markers:
        text = RETWEET_RE.sub("", text.lstrip())
    if config.remove_urls:
        text = URL_RE.sub(" ", text)
    if config.drop_hashtag_words:
        text = HASHTAG_WORD_RE.sub(" ", text)
    elif config.remove_hashmark:
        text = text.replace("#", "")
    text = NUMBER_RE.sub(f" {config.number_tag} ", text)
    if config.lowercase:
        text = text.lower()
    return _SPACE_RE.sub(" ", text).strip()


def normalize_text(raw: str, config: PreprocessConfig | None = None) -> str:
    """Apply the regex clean-up rules and collapse whitespace.

    Rules run in a fixed order (tickers, retweet marker, URLs, hash marks,
    numbers, lowercasing) and are re-applied until the text stops changing,
    which makes the function idempotent even when one rule exposes a match
    for an earlier one.
    """
    config = config or PreprocessConfig()
    prev, text = None, raw
    while text != prev:
        prev, text = text, _normalize_once(text, config)
    return text


@lru_cache(maxsize=8)
def _token_re(number_tag: str) -> re.Pattern:
    return re.compile(f"{re.escape(number_tag)}|{_WORD}")


def tokenize(text: str, number_tag: str = NUMBER_TAG) -> list[str]:
    """Split into letter runs; the number tag survives as a single token."""
    return _token_re(number_tag).findall(text)


def remove_stopwords(tokens: list[str], stopwords: Iterable[str]) -> list[str]:
    stopwords = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [t for t in tokens if t.lower() not in stopwords]


def stem(tokens: list[str], number_tag: str = NUMBER_TAG) -> list[str]:
    return [t if t == number_tag or len(t) < MIN_STEM_LENGTH else stem_word(t)
            for t in tokens]


def preprocess(raw: str, config: PreprocessConfig | None = None) -> list[str]:
    """Full pipeline: normalize, tokenize, drop stopwords, stem."""
    config = config or PreprocessConfig()
    tokens = tokenize(normalize_text(raw, config), config.number_tag)
    tokens = remove_stopwords(tokens, config.stopwords)
    if config.stem:
        tokens = stem(tokens, config.number_tag)
    return tokens


def preprocess_corpus(texts: Iterable[str], config: PreprocessConfig | None = None) -> list[list[str]]:
    config = config or PreprocessConfig()
    return [preprocess(t, config) for t in texts]
