"""Generator for separable, Spanish-like toxicity corpora used in tests and demos."""

from __future__ import annotations

import numpy as np

from .corpus import TOXICITY, TOXICITY_LEVEL, Dataset, Instance

# class counts of the real training corpus, by toxicity level
LEVEL_COUNTS = (2317, 808, 269, 69)

FILLER = (
    "gobierno pais gente noticia ciudad semana trabajo dinero ayuda casa familia "
    "calle barrio gobierno partido politica ley frontera europa espana madrid "
    "tiempo dia ano mundo vida cosa problema parte verdad medio persona grupo "
    "el la los las un una de del que en y a por para con no se lo como mas pero "
    "muy ya todo esta este eso hay tiene hacer dice van vienen llegan estan"
).split()

KEYWORDS = (
    # not toxic
    ("solidaridad", "acogida", "integracion", "derechos", "humanitario", "refugio",
     "convivencia", "respeto", "voluntario", "dialogo", "esperanza", "apoyo"),
    # mildly toxic
    ("ridiculo", "absurdo", "verguenza", "cansado", "harto", "tonteria",
     "payaso", "chiste", "patetico", "pesado", "ironia", "bobada"),
    # toxic
    ("delincuentes", "invasores", "parasitos", "ladrones", "mafia", "chusma",
     "gentuza", "vagos", "aprovechados", "plaga", "saqueo", "okupas"),
    # very toxic
    ("exterminar", "aniquilar", "escoria", "basura", "ratas", "alimanas",
     "matarlos", "fusilar", "quemarlos", "ahorcar", "eliminarlos", "cucarachas"),
)

_NOISE = ("http://t.co/{}", "#{}", "RT", "{} euros", "${}")


def scaled_counts(n: int, counts=LEVEL_COUNTS) -> list[int]:
    """Split ``n`` across classes in the proportions of ``counts`` (largest remainder)."""
    counts = np.asarray(counts, dtype=float)
    raw = n * counts / counts.sum()
    out = np.floor(raw).astype(int)
    for i in np.argsort(-(raw - out), kind="stable")[: n - out.sum()]:
        out[i] += 1
    return out.tolist()


def _comment(rng, level, n_keywords, length):
    words = list(rng.choice(FILLER, size=length))
    for kw in rng.choice(KEYWORDS[level], size=n_keywords):
        words.insert(int(rng.integers(0, len(words) + 1)), str(kw))
    if rng.random() < 0.3:
        pattern = _NOISE[int(rng.integers(len(_NOISE)))]
        token = pattern.format(str(rng.choice(FILLER)) if "#" in pattern or "$" in pattern
                               else int(rng.integers(1, 5000)))
        if token == "RT":
            words.insert(0, token)
        else:
            words.append(token)
    text = " ".join(words)
    return text[0].upper() + text[1:]


def synthetic_corpus(n: int = 2000, seed: int = 0, counts=LEVEL_COUNTS,
                     keywords_per_doc: tuple[int, int] = (2, 4),
                     length: tuple[int, int] = (8, 20), prefix: str = "syn") -> Dataset:
    """A labeled corpus whose toxicity levels follow ``counts`` proportionally.

    Every comment mixes shared filler words with a few keywords drawn from
    its level's own list, so the classes are linearly separable in
    bag-of-words space. Some comments carry URLs, hashtags, tickers, numbers
    or a retweet marker to exercise preprocessing.
    """
    rng = np.random.default_rng(seed)
    levels = np.repeat(np.arange(len(counts)), scaled_counts(n, counts))
    rng.shuffle(levels)
    instances = []
    for i, level in enumerate(levels):
        kws = int(rng.integers(keywords_per_doc[0], keywords_per_doc[1] + 1))
        ln = int(rng.integers(length[0], length[1] + 1))
        instances.append(Instance(f"{prefix}{i:05d}", _comment(rng, int(level), kws, ln),
                                  int(level > 0), int(level)))
    return Dataset(instances, TOXICITY, TOXICITY_LEVEL)


def train_test_split(dataset: Dataset, test_fraction: float = 0.2, seed: int = 0):
    """Random split preserving nothing but the seed; returns (train, test)."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(dataset))
    cut = int(round(len(dataset) * (1 - test_fraction)))
    return dataset.subset(np.sort(order[:cut])), dataset.subset(np.sort(order[cut:]))
