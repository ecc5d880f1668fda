# %% [markdown]
# # From raw comments to sparse vectors
#
# A walk through the preprocessing chain and the two encoders on a handful
# of made-up comments. Run with `python3 demos/01_text_to_vectors.py`.

# %%
from detoxkit.features import NGramRange, build_vocabulary, encode, extract_ngrams, fit_idf
from detoxkit.preprocess import PreprocessConfig, normalize_text, preprocess, tokenize

comments = [
    "RT @vecino: Llegan 300 inmigrantes a Madrid http://t.co/abc #frontera",
    "Que verguenza, siempre los mismos payasos en el gobierno",
    "Bienvenidos, la convivencia es posible con respeto",
    "Llegan mas y el gobierno sin hacer nada, que verguenza",
]

# %% [markdown]
# Normalization drops URLs, retweet markers and tickers, lowercases, and maps
# every number to a single tag. Running it twice changes nothing.

# %%
cfg = PreprocessConfig()
for text in comments:
    once = normalize_text(text, cfg)
    assert normalize_text(once, cfg) == once
    print(repr(once))

# %% [markdown]
# Tokens come out of the same config: stopwords removed, Spanish Snowball
# stems applied, the number tag kept as is.

# %%
docs = [preprocess(t, cfg) for t in comments]
for d in docs:
    print(d)
raw = "Hay 3 casos"
print(tokenize(normalize_text(raw, cfg)), "->", preprocess(raw, cfg))

# %% [markdown]
# N-grams of a range (lo, hi) are every contiguous run of lo..hi tokens.

# %%
print(extract_ngrams(["los", "mismos", "payasos"], NGramRange(1, 2)))

# %%
vocab = build_vocabulary(docs, NGramRange(1, 2))
print(len(vocab), "terms; first few:", vocab.terms[:6])

bow = encode(docs, vocab, "bow")
tfidf = encode(docs, vocab, "tfidf", fit_idf(vocab))
print("bow nnz per row:", bow.getnnz(axis=1))
print("tfidf row norms:", (tfidf.multiply(tfidf).sum(axis=1).A.ravel() ** 0.5).round(12))

# %% [markdown]
# Terms that appear in fewer documents get a larger idf weight.

# %%
idf = fit_idf(vocab)
order = idf.argsort()
print("most common:", [vocab.terms[i] for i in order[:3]], idf[order[:3]].round(3))
print("rarest:     ", [vocab.terms[i] for i in order[-3:]], idf[order[-3:]].round(3))
