"""Spanish Snowball stemmer.

A direct transcription of the Snowball ``spanish`` algorithm: region
marking (RV, R1, R2), attached-pronoun removal, standard suffixes, verb
suffixes (the ``y``-initial group first), residual suffixes and accent
removal.
"""

from __future__ import annotations

from functools import lru_cache

VOWELS = frozenset("aeiouáéíóúü")

_ACCENTS = str.maketrans("áéíóú", "aeiou")

_PRONOUNS = ("selas", "selos", "sela", "selo", "las", "les", "los", "nos",
             "me", "se", "la", "le", "lo")

# ending before the pronoun -> replacement (None: keep as is)
_PRONOUN_HOSTS = {
    "iéndo": "iendo", "ándo": "ando", "ár": "ar", "ér": "er", "ír": "ir",
    "ando": None, "iendo": None, "ar": None, "er": None, "ir": None,
    "yendo": None,  # only after 'u'
}

_STEP1 = {
    **dict.fromkeys(("anza", "anzas", "ico", "ica", "icos", "icas", "ismo", "ismos",
                     "able", "ables", "ible", "ibles", "ista", "istas", "oso", "osa",
                     "osos", "osas", "amiento", "amientos", "imiento", "imientos"), "plain"),
    **dict.fromkeys(("adora", "ador", "ación", "adoras", "adores", "aciones", "ante",
                     "antes", "ancia", "ancias"), "ic"),
    **dict.fromkeys(("logía", "logías"), "log"),
    **dict.fromkeys(("ución", "uciones"), "u"),
    **dict.fromkeys(("encia", "encias"), "ente"),
    "amente": "amente",
    "mente": "mente",
    **dict.fromkeys(("idad", "idades"), "idad"),
    **dict.fromkeys(("iva", "ivo", "ivas", "ivos"), "iv"),
}

_Y_VERB = ("ya", "ye", "yan", "yen", "yeron", "yendo", "yo", "yó", "yas", "yes",
           "yais", "yamos")

_VERB_GU = ("en", "es", "éis", "emos")
_VERB_DELETE = (
    "arían", "arías", "arán", "arás", "aríais", "aría", "aréis", "aríamos", "aremos",
    "ará", "aré", "erían", "erías", "erán", "erás", "eríais", "ería", "eréis",
    "eríamos", "eremos", "erá", "eré", "irían", "irías", "irán", "irás", "iríais",
    "iría", "iréis", "iríamos", "iremos", "irá", "iré", "aba", "ada", "ida", "ía",
    "ara", "iera", "ad", "ed", "id", "ase", "iese", "aste", "iste", "an", "aban",
    "ían", "aran", "ieran", "asen", "iesen", "aron", "ieron", "ado", "ido", "ando",
    "iendo", "ió", "ar", "er", "ir", "as", "abas", "adas", "idas", "ías", "aras",
    "ieras", "ases", "ieses", "ís", "áis", "abais", "íais", "arais", "ierais",
    "aseis", "ieseis", "asteis", "isteis", "ados", "idos", "amos", "ábamos", "íamos",
    "imos", "áramos", "iéramos", "iésemos", "ásemos",
)
_VERB = {**dict.fromkeys(_VERB_GU, "gu"), **dict.fromkeys(_VERB_DELETE, "delete")}

_RESIDUAL = {**dict.fromkeys(("os", "a", "o", "á", "í", "ó"), "plain"),
             **dict.fromkeys(("e", "é"), "gu")}


def _longest_suffix(word: str, suffixes, start: int = 0) -> str | None:
    """Longest suffix of ``word[start:]`` found in ``suffixes``."""
    best = None
    tail = word[start:]
    for suf in suffixes:
        if tail.endswith(suf) and (best is None or len(suf) > len(best)):
            best = suf
    return best


def _regions(word: str) -> tuple[int, int, int]:
    n = len(word)

    def is_v(i):
        return word[i] in VOWELS

    def gopast(pred, i):
        while i < n:
            if pred(i):
                return i + 1
            i += 1
        return None

    pv = n
    if n >= 2:
        if is_v(0):
            if not is_v(1):
                pos = gopast(is_v, 2)
            else:
                pos = gopast(lambda i: not is_v(i), 2)
        else:
            if not is_v(1):
                pos = gopast(is_v, 2)
            else:
                pos = 3 if n >= 3 else None
        if pos is not None:
            pv = pos

    def r_after(i):
        # region after the first non-vowel following a vowel, searching from i
        pos = gopast(is_v, i)
        if pos is None:
            return n
        pos = gopast(lambda j: not is_v(j), pos)
        return n if pos is None else pos

    p1 = r_after(0)
    p2 = r_after(p1) if p1 < n else n
    return pv, p1, p2


def _attached_pronoun(word: str, pv: int) -> str:
    pron = _longest_suffix(word, _PRONOUNS)
    if pron is None:
        return word
    base = word[: len(word) - len(pron)]
    host = _longest_suffix(base, _PRONOUN_HOSTS)
    if host is None or len(base) - len(host) < pv:
        return word
    if host == "yendo":
        if base[: -len(host)].endswith("u"):
            return base
        return word
    replacement = _PRONOUN_HOSTS[host]
    if replacement is not None:
        return base[: -len(host)] + replacement
    return base


def _in(word: str, suffix: str, region: int) -> bool:
    return len(word) - len(suffix) >= region


def _standard_suffix(word: str, p1: int, p2: int) -> str | None:
    """Returns the modified word, or None when step 1 does not apply."""
    suf = _longest_suffix(word, _STEP1)
    if suf is None:
        return None
    kind = _STEP1[suf]
    if kind == "amente":
        if not _in(word, suf, p1):
            return None
        word = word[: -len(suf)]
        sub = _longest_suffix(word, ("iv", "os", "ic", "ad"))
        if sub is not None and _in(word, sub, p2):
            word = word[: -len(sub)]
            if sub == "iv" and word.endswith("at") and _in(word, "at", p2):
                word = word[:-2]
        return word
    if not _in(word, suf, p2):
        return None
    stem = word[: -len(suf)]
    if kind == "plain":
        return stem
    if kind == "ic":
        if stem.endswith("ic") and _in(stem, "ic", p2):
            stem = stem[:-2]
        return stem
    if kind in ("log", "u", "ente"):
        return stem + kind
    if kind == "mente":
        sub = _longest_suffix(stem, ("ante", "able", "ible"))
        if sub is not None and _in(stem, sub, p2):
            stem = stem[: -len(sub)]
        return stem
    if kind == "idad":
        sub = _longest_suffix(stem, ("abil", "ic", "iv"))
        if sub is not None and _in(stem, sub, p2):
            stem = stem[: -len(sub)]
        return stem
    if kind == "iv":
        if stem.endswith("at") and _in(stem, "at", p2):
            stem = stem[:-2]
        return stem
    raise AssertionError(kind)


def _y_verb_suffix(word: str, pv: int) -> str | None:
    suf = _longest_suffix(word, _Y_VERB, start=pv)
    if suf is None:
        return None
    stem = word[: -len(suf)]
    if stem.endswith("u"):
        return stem
    return None


def _verb_suffix(word: str, pv: int) -> str | None:
    suf = _longest_suffix(word, _VERB, start=pv)
    if suf is None:
        return None
    stem = word[: -len(suf)]
    if _VERB[suf] == "gu" and stem.endswith("gu"):
        stem = stem[:-1]
    return stem


def _residual_suffix(word: str, pv: int) -> str:
    suf = _longest_suffix(word, _RESIDUAL)
    if suf is None or not _in(word, suf, pv):
        return word
    word = word[: -len(suf)]
    if _RESIDUAL[suf] == "gu" and word.endswith("gu") and _in(word, "u", pv):
        word = word[:-1]
    return word


@lru_cache(maxsize=65536)
def stem_word(word: str) -> str:
    """Stem one lowercase Spanish word."""
    pv, p1, p2 = _regions(word)
    word = _attached_pronoun(word, pv)
    # regions are positions from the word start, unaffected by suffix removal
    out = _standard_suffix(word, p1, p2)
    if out is None:
        out = _y_verb_suffix(word, pv)
    if out is None:
        out = _verb_suffix(word, pv)
    if out is not None:
        word = out
    word = _residual_suffix(word, pv)
    return word.translate(_ACCENTS)
