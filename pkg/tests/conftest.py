import numpy as np
import pytest

from ctckit import Alphabet, PosteriorTable

# Hand-built 5-entry bigram model. Backoff cases worked out by hand:
#   p(cat)            = -1.0            (direct unigram)
#   p(dog | the)      = -0.2            (direct bigram)
#   p(cat | the)      = -0.3 + -1.0     (backoff via "the", bigram absent)
#   p(dog | cat)      =  0.0 + -0.9     ("cat" has no backoff field -> 0.0)
#   p(fish | <empty>) = -10.0           (OOV, no <unk>)
TOY_BIGRAM_ARPA = """\
\\data\\
ngram 1=3
ngram 2=2

\\1-grams:
-0.5\tthe\t-0.3
-1.0\tcat
-0.9\tdog

\\2-grams:
-0.2\tthe dog
-0.4\tcat cat

\\end\\
"""


@pytest.fixture
def toy_bigram_arpa() -> str:
    return TOY_BIGRAM_ARPA


def make_alphabet(chars: str) -> Alphabet:
    """Alphabet over '-' (blank), ' ' (space) and the given characters."""
    return Alphabet(("-", " ") + tuple(chars), blank_index=0, space_index=1)


def make_table(frames, chars: str, utterance_id: str = "u") -> PosteriorTable:
    return PosteriorTable(utterance_id, np.asarray(frames, dtype=np.float64), make_alphabet(chars))


def table_for_text(text: str, chars: str, utterance_id: str = "u", confusions=None) -> PosteriorTable:
    """One high-certainty frame per character, blanks between duplicates.

    ``confusions`` maps a character position in ``text`` to (other_char, p_other),
    splitting that frame's mass between the true character and the confusable.
    """
    alphabet = make_alphabet(chars)
    confusions = confusions or {}
    rows = []
    prev = None
    for i, ch in enumerate(text):
        if ch == prev:
            blank_row = np.zeros(len(alphabet))
            blank_row[alphabet.blank_index] = 1.0
            rows.append(blank_row)
        row = np.zeros(len(alphabet))
        if i in confusions:
            other, p_other = confusions[i]
            row[alphabet.index_of(other)] = p_other
            row[alphabet.index_of(ch)] = 1.0 - p_other
        else:
            row[alphabet.index_of(ch)] = 1.0
        rows.append(row)
        prev = ch
    return PosteriorTable(utterance_id, np.vstack(rows), alphabet)


def random_table(rng: np.random.Generator, max_frames: int = 6, max_symbols: int = 4,
                 utterance_id: str = "u") -> PosteriorTable:
    """A random row-stochastic table over a small alphabet; blank is index 0."""
    t = int(rng.integers(1, max_frames + 1))
    v = int(rng.integers(2, max_symbols + 1))
    frames = rng.random((t, v)) + 1e-3
    frames /= frames.sum(axis=1, keepdims=True)
    chars = "ab"[: v - 2]
    return PosteriorTable(utterance_id, frames, make_alphabet(chars))
