"""N-gram vocabularies and sparse BOW / TF-IDF encoding."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError

NGRAM_PRESETS = ((1, 1), (1, 2), (1, 3))
TFIDF_VARIANT = "smooth_idf+l2:v1"  # idf = ln((1+n)/(1+df)) + 1, rows L2-normalized


@dataclass(frozen=True, order=True)
class NGramRange:
    lo: int = 1
    hi: int = 1

    def __post_init__(self):
        if self.lo < 1:
            raise ValueError(f"ngram range lo must be >= 1, got {self.lo}")
        if self.hi < self.lo:
            raise ValueError(f"ngram range hi ({self.hi}) must be >= lo ({self.lo})")

    @classmethod
    def parse(cls, value) -> "NGramRange":
        if isinstance(value, NGramRange):
            return value
        if isinstance(value, str):
            value = value.strip("()[] ").replace("-", ",").split(",")
        lo, hi = (int(v) for v in value)
        return cls(lo, hi)

    def __str__(self):
        return f"({self.lo},{self.hi})"


def extract_ngrams(tokens: Sequence[str], ngram_range: NGramRange | tuple = (1, 1)) -> list[str]:
    """All contiguous n-grams for n in [lo, hi], ordered by (position, n)."""
    r = NGramRange.parse(ngram_range)
    out = []
    n_tok = len(tokens)
    for i in range(n_tok):
        for n in range(r.lo, r.hi + 1):
            if i + n > n_tok:
                break
            out.append(" ".join(tokens[i:i + n]))
    return out


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_freq: np.ndarray = field(repr=False)
    n_docs: int
    ngram_range: NGramRange
    term_to_col: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        df = np.asarray(self.doc_freq, dtype=np.int64)
        df.setflags(write=False)
        object.__setattr__(self, "doc_freq", df)
        object.__setattr__(self, "term_to_col", {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (self.terms == other.terms and self.n_docs == other.n_docs
                and self.ngram_range == other.ngram_range
                and np.array_equal(self.doc_freq, other.doc_freq))

    __hash__ = None


def build_vocabulary(docs: Sequence[Sequence[str]], ngram_range: NGramRange | tuple = (1, 1),
                     min_df: int = 1) -> Vocabulary:
    """Vocabulary of n-grams with document frequency >= ``min_df``.

    Columns follow lexicographic term order, so the map depends only on the
    set of training documents.
    """
    if not docs:
        raise ValueError("cannot build a vocabulary from zero documents")
    r = NGramRange.parse(ngram_range)
    df = Counter()
    for doc in docs:
        df.update(set(extract_ngrams(doc, r)))
    terms = sorted(t for t, c in df.items() if c >= min_df)
    if not terms:
        raise ConfigurationError(
            f"empty vocabulary (ngram_range={r}, min_df={min_df}, {len(docs)} docs)")
    return Vocabulary(tuple(terms), np.array([df[t] for t in terms], dtype=np.int64),
                      len(docs), r)


def encode_bow(docs: Sequence[Sequence[str]], vocab: Vocabulary) -> sp.csr_matrix:
    """Count matrix, one row per document; out-of-vocabulary n-grams dropped."""
    indptr = [0]
    indices: list[int] = []
    data: list[int] = []
    lookup = vocab.term_to_col
    for doc in docs:
        counts = Counter(
            col for col in (lookup.get(g) for g in extract_ngrams(doc, vocab.ngram_range))
            if col is not None)
        for col in sorted(counts):
            indices.append(col)
            data.append(counts[col])
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(docs), len(vocab)))


def fit_idf(vocab: Vocabulary) -> np.ndarray:
    """Smoothed inverse document frequency from the vocabulary's training counts."""
    return np.log((1.0 + vocab.n_docs) / (1.0 + vocab.doc_freq)) + 1.0


def l2_normalize_rows(X: sp.csr_matrix) -> sp.csr_matrix:
    X = X.tocsr(copy=True)
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    norms[norms == 0] = 1.0
    X.data /= np.repeat(norms, np.diff(X.indptr))
    return X


def encode_tfidf(docs: Sequence[Sequence[str]], vocab: Vocabulary,
                 idf: np.ndarray | None = None) -> sp.csr_matrix:
    if idf is None:
        idf = fit_idf(vocab)
    X = encode_bow(docs, vocab)
    X.data *= idf[X.indices]
    return l2_normalize_rows(X)


def encode(docs, vocab: Vocabulary, encoder: str, idf: np.ndarray | None = None) -> sp.csr_matrix:
    encoder = encoder.lower().replace("-", "")
    if encoder == "bow":
        return encode_bow(docs, vocab)
    if encoder == "tfidf":
        return encode_tfidf(docs, vocab, idf)
    raise ValueError(f"unknown encoder {encoder!r}")


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """``term<TAB>column<TAB>doc_freq`` per line, preceded by one ``#`` metadata line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# ngram_range={vocab.ngram_range.lo},{vocab.ngram_range.hi} "
                 f"n_docs={vocab.n_docs}\n")
        for col, (term, df) in enumerate(zip(vocab.terms, vocab.doc_freq)):
            fh.write(f"{term}\t{col}\t{df}\n")


def load_vocabulary(path: str | Path) -> Vocabulary:
    terms, dfs = [], []
    meta = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                for kv in line[1:].split():
                    key, _, val = kv.partition("=")
                    meta[key] = val
                continue
            term, col, df = line.split("\t")
            if int(col) != len(terms):
                raise ValueError(f"{path}: column {col} out of sequence")
            terms.append(term)
            dfs.append(int(df))
    lo, hi = (int(v) for v in meta["ngram_range"].split(","))
    return Vocabulary(tuple(terms), np.array(dfs, dtype=np.int64), int(meta["n_docs"]),
                      NGramRange(lo, hi))
