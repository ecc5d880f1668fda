import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sklearn.feature_extraction.text import CountVectorizer, TfidfVectorizer

from detoxkit.errors import ConfigurationError
from detoxkit.features import (NGramRange, Vocabulary, build_vocabulary, encode, encode_bow,
                               encode_tfidf, extract_ngrams, fit_idf, load_vocabulary,
                               save_vocabulary)


def test_ngram_range_validation():
    assert NGramRange.parse("(1,3)") == NGramRange(1, 3)
    assert NGramRange.parse([1, 2]) == NGramRange(1, 2)
    assert str(NGramRange(1, 2)) == "(1,2)"
    with pytest.raises(ValueError):
        NGramRange(3, 1)
    with pytest.raises(ValueError):
        NGramRange(0, 1)


def test_extract_ngrams_examples():
    assert sorted(extract_ngrams(["a", "b", "c"], (1, 2))) == sorted(["a", "b", "c", "a b", "b c"])
    assert extract_ngrams(["a"], (1, 3)) == ["a"]
    assert len(extract_ngrams(["a", "b", "c"], (1, 3))) == 6
    assert extract_ngrams(["a", "b", "c"], (2, 2)) == ["a b", "b c"]


def test_extract_ngrams_position_order():
    assert extract_ngrams(["a", "b", "c"], (1, 2)) == ["a", "a b", "b", "b c", "c"]


def test_vocabulary_examples():
    docs = [["a", "b"], ["b", "c"]]
    v = build_vocabulary(docs, (1, 1))
    assert v.terms == ("a", "b", "c")
    assert v.doc_freq.tolist() == [1, 2, 1]
    assert build_vocabulary(docs, (1, 1), min_df=2).terms == ("b",)
    assert set(build_vocabulary(docs, (1, 2)).terms) == {"a", "b", "c", "a b", "b c"}
    with pytest.raises(ConfigurationError):
        build_vocabulary(docs, (1, 1), min_df=3)
    with pytest.raises(ConfigurationError):
        build_vocabulary([[], []], (1, 1))


def test_bow_examples():
    v = Vocabulary(("hola", "mundo"), [1, 1], 1, NGramRange(1, 1))
    X = encode_bow([["hola", "hola"], ["nada", "fuera"]], v)
    assert X[0].indices.tolist() == [0] and X[0].data.tolist() == [2.0]
    assert X[1].nnz == 0
    v2 = build_vocabulary([["a", "b", "a", "b"]], (1, 2))
    row = encode_bow([["a", "b", "a", "b"]], v2)
    assert row[0, v2.term_to_col["a b"]] == 2


def test_idf_examples():
    v = build_vocabulary([["x", "y"], ["x"]], (1, 1))
    idf = fit_idf(v)
    assert idf[v.term_to_col["x"]] == pytest.approx(1.0, abs=1e-15)
    assert idf[v.term_to_col["y"]] == pytest.approx(math.log(1.5) + 1, abs=1e-12)
    assert idf[v.term_to_col["y"]] == pytest.approx(1.405465, abs=1e-6)
    assert fit_idf(build_vocabulary([["z"]], (1, 1))).tolist() == [1.0]


def test_tfidf_examples():
    v = Vocabulary(("a", "b"), [1, 1], 1, NGramRange(1, 1))
    idf = np.ones(2)
    X = encode_tfidf([["a"], ["a", "b"], ["q"]], v, idf)
    assert X[0].data.tolist() == [1.0]
    assert X[1].data == pytest.approx([1 / math.sqrt(2)] * 2, abs=1e-12)
    assert X[1].data[0] == pytest.approx(0.707107, abs=1e-6)
    assert X[2].nnz == 0


doc_st = st.lists(st.lists(st.sampled_from(list("abcdefg")), max_size=8), min_size=1, max_size=12)


@given(doc_st, st.sampled_from([(1, 1), (1, 2), (1, 3), (2, 3)]))
def test_against_sklearn(docs, rng_):
    if not any(len(d) >= rng_[0] for d in docs):
        return
    v = build_vocabulary(docs, rng_)
    analyzer = lambda d: extract_ngrams(d, rng_)  # noqa: E731
    cv = CountVectorizer(analyzer=analyzer)
    ref_counts = cv.fit_transform(docs)
    assert tuple(cv.get_feature_names_out()) == v.terms
    assert np.array_equal(encode_bow(docs, v).toarray(), ref_counts.toarray())
    tv = TfidfVectorizer(analyzer=analyzer, smooth_idf=True, sublinear_tf=False, norm="l2")
    ref = tv.fit_transform(docs).toarray()
    assert np.allclose(encode_tfidf(docs, v).toarray(), ref, atol=1e-12)
    assert np.allclose(fit_idf(v), tv.idf_, atol=1e-12)


@given(doc_st)
def test_tfidf_rows_unit_or_zero(docs):
    if not any(docs):
        return
    v = build_vocabulary(docs[: max(1, len(docs) // 2)] + [["a"]], (1, 2))
    X = encode(docs, v, "tfidf", fit_idf(v))
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    for n in norms:
        assert n == 0 or abs(n - 1) <= 1e-9
    assert np.all(X.data > 0)
    assert all(np.all(np.diff(X[i].indices) > 0) for i in range(X.shape[0]))


@given(st.lists(st.sampled_from(list("abcdef")), max_size=10),
       st.lists(st.sampled_from(list("abcdefgh")), max_size=10))
def test_bow_unigram_additivity(d1, d2):
    v = build_vocabulary([list("abcdef")], (1, 1))
    lhs = encode_bow([d1 + d2], v).toarray()
    rhs = encode_bow([d1], v).toarray() + encode_bow([d2], v).toarray()
    assert np.array_equal(lhs, rhs)


@given(doc_st, st.integers(0, 11))
def test_no_leakage(docs, held):
    """Vocabulary of the training docs ignores held-out docs entirely."""
    held = held % len(docs)
    train = [d for i, d in enumerate(docs) if i != held]
    if not any(train):
        return
    alt = list(docs)
    alt[held] = ["zzz", "yyy"]  # replacing the held-out text changes nothing
    v1 = build_vocabulary(train, (1, 2))
    v2 = build_vocabulary([d for i, d in enumerate(alt) if i != held], (1, 2))
    assert v1 == v2
    before = (v1.terms, v1.doc_freq.copy())
    encode(docs, v1, "tfidf")
    assert (v1.terms, v1.doc_freq.tolist()) == (before[0], before[1].tolist())


def test_vocabulary_roundtrip(tmp_path):
    v = build_vocabulary([["el", "perro"], ["perro", "año"]], (1, 2), min_df=1)
    save_vocabulary(v, tmp_path / "v.tsv")
    assert load_vocabulary(tmp_path / "v.tsv") == v
    lines = (tmp_path / "v.tsv").read_text(encoding="utf-8").splitlines()
    assert lines[1].split("\t") == [v.terms[0], "0", str(v.doc_freq[0])]


def test_determinism():
    docs = [["b", "a", "c"], ["c", "a"]]
    a, b = build_vocabulary(docs, (1, 3)), build_vocabulary(docs, (1, 3))
    assert a == b and list(a.terms) == sorted(a.terms)
    assert (encode(docs, a, "tfidf") != encode(docs, b, "tfidf")).nnz == 0
