"""The Spanish stemmer against the reference Snowball implementation."""

import snowballstemmer
from hypothesis import given, strategies as st

from detoxkit.stemmer import stem_word

REFERENCE = snowballstemmer.stemmer("spanish")

WORDS = """pensiones inmigrantes inmigración vienen pagarnos quedarse dándole
lógicamente generosidad autorización extranjeros delincuentes fronteras
ayudas políticos gobernantes españoles diciéndoselo comiéndose construyeron
haciendo cantábamos llegaron huyendo oyeron destruyó amigablemente
acción acciones capacidad capacidades felicidad apasionadamente torpeza
niñas niños corazón árboles cantaríamos cantásemos arguyendo averigüéis
""".split()


def test_reference_words():
    for w in WORDS:
        assert stem_word(w) == REFERENCE.stemWord(w), w


def test_known_stems():
    assert stem_word("pensiones") == "pension"
    assert stem_word("inmigrantes") == REFERENCE.stemWord("inmigrantes")


letters = st.text(alphabet="abcdefghijlmnopqrstuvyzáéíóúüñ", min_size=1, max_size=14)
suffixy = st.tuples(letters, st.sampled_from([
    "amente", "aciones", "logía", "uciones", "encia", "idades", "ivamente", "ándole",
    "iéndoselo", "yeron", "aríamos", "ieseis", "os", "es", "é", "ía", "mente", "osas"]))


@given(letters)
def test_matches_reference_random(word):
    assert stem_word(word) == REFERENCE.stemWord(word)


@given(suffixy)
def test_matches_reference_suffixed(parts):
    word = parts[0] + parts[1]
    assert stem_word(word) == REFERENCE.stemWord(word)
