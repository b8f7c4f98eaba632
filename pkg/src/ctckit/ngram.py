"""Backoff n-gram language models in the textual ARPA format.

The model stores log10 probabilities and backoff weights exactly as read
from the file; conversion to natural log happens at the decoder boundary.
Scoring follows the standard backoff recursion: use the longest matching
n-gram, otherwise add the history's backoff weight and retry with a
shortened history.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

from .errors import ArpaParseError

SENTINELS = ("<s>", "</s>", "<unk>")
DEFAULT_OOV_LOG10 = -10.0

_NGRAM_COUNT_RE = re.compile(r"^ngram (\d+)=(\d+)$")
_SECTION_RE = re.compile(r"^\\(\d+)-grams:$")


@dataclass
class NgramModel:
    """A parsed ARPA model: per-order tables of (log10 prob, log10 backoff).

    ``tables[k-1]`` maps k-word tuples to their entry; backoff weights are 0.0
    when the file omits them and are never stored for the highest order.
    """

    order: int
    tables: list[dict[tuple[str, ...], tuple[float, float]]]
    unk_token: str | None = field(init=False)

    def __post_init__(self):
        self.unk_token = "<unk>" if ("<unk>",) in self.tables[0] else None

    def vocabulary(self) -> list[str]:
        """Unigram words excluding the <s>/</s>/<unk> sentinels, sorted."""
        return sorted(w for (w,) in self.tables[0] if w not in SENTINELS)

    def has_word(self, word: str) -> bool:
        return (word,) in self.tables[0]

    def score_word(
        self,
        history: Sequence[str],
        word: str,
        oov_log10_penalty: float = DEFAULT_OOV_LOG10,
    ) -> float:
        """log10 p(word | history) under the backoff recursion.

        The history is truncated to the most recent ``order - 1`` words. An
        out-of-vocabulary word bottoms out at the <unk> unigram when the model
        has one, else at ``oov_log10_penalty``.
        """
        history = tuple(history)[max(0, len(history) - (self.order - 1)):] if self.order > 1 else ()
        score = 0.0
        while True:
            gram = history + (word,)
            entry = self.tables[len(gram) - 1].get(gram) if len(gram) <= self.order else None
            if entry is not None:
                return score + entry[0]
            if not history:
                break
            back = self.tables[len(history) - 1].get(history)
            if back is not None:
                score += back[1]
            history = history[1:]
        # Unigram miss: the word is out of vocabulary.
        if self.unk_token is not None:
            return score + self.tables[0][(self.unk_token,)][0]
        return score + oov_log10_penalty

    def score_sentence(
        self,
        words: Sequence[str],
        oov_log10_penalty: float = DEFAULT_OOV_LOG10,
    ) -> float:
        """log10 probability of a word sequence by the chain rule.

        <s> seeds the history and </s> is scored as a final position, each
        only when the model's vocabulary contains it, so sentinel-free toy
        models remain scoreable.
        """
        history: tuple[str, ...] = ("<s>",) if self.has_word("<s>") else ()
        positions = list(words) + (["</s>"] if self.has_word("</s>") else [])
        total = 0.0
        for w in positions:
            total += self.score_word(history, w, oov_log10_penalty)
            history = history + (w,)
        return total


class VocabularyTrie:
    """Character prefix trie over a word list, for partial-word checks."""

    __slots__ = ("_root", "_size")

    def __init__(self, words: Iterable[str] = ()):
        self._root: dict = {}
        self._size = 0
        for w in words:
            self.add(w)

    @classmethod
    def from_model(cls, model: NgramModel) -> "VocabularyTrie":
        """Trie over the model's unigram vocabulary (sentinels excluded)."""
        return cls(model.vocabulary())

    def add(self, word: str) -> None:
        node = self._root
        for ch in word:
            node = node.setdefault(ch, {})
        if None not in node:
            node[None] = True
            self._size += 1

    def is_prefix(self, fragment: str) -> bool:
        """True iff ``fragment`` is a prefix of at least one vocabulary word.

        The empty string is a prefix of everything.
        """
        node = self._root
        for ch in fragment:
            node = node.get(ch)
            if node is None:
                return False
        return True

    def has_word(self, word: str) -> bool:
        node = self._root
        for ch in word:
            node = node.get(ch)
            if node is None:
                return False
        return None in node

    def __len__(self) -> int:
        return self._size


def is_prefix(trie: VocabularyTrie, fragment: str) -> bool:
    """Functional alias for ``VocabularyTrie.is_prefix``."""
    return trie.is_prefix(fragment)


def parse_arpa(source: str | TextIO) -> NgramModel:
    """Parse ARPA text into an ``NgramModel``.

    Enforces the format's structural guarantees: header counts match section
    contents, every k-gram's (k-1)-word prefix exists at the lower order,
    probabilities are log10 values <= 0, and the top order carries no backoff
    field. Raises ``ArpaParseError`` with a line number otherwise.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = source.read().splitlines()

    pos = 0

    def next_content_line() -> tuple[int, str] | None:
        nonlocal pos
        while pos < len(lines):
            line = lines[pos]
            pos += 1
            if line.strip():
                return pos, line.strip()
        return None

    first = next_content_line()
    if first is None or first[1] != "\\data\\":
        raise ArpaParseError("expected \\data\\ header", first[0] if first else 0)

    counts: dict[int, int] = {}
    while True:
        item = next_content_line()
        if item is None:
            raise ArpaParseError("unexpected end of input in \\data\\ section")
        lineno, line = item
        if line.startswith("\\"):
            break
        m = _NGRAM_COUNT_RE.match(line)
        if not m:
            raise ArpaParseError(f"malformed count line {line!r}", lineno)
        counts[int(m.group(1))] = int(m.group(2))
    if not counts or sorted(counts) != list(range(1, max(counts) + 1)):
        raise ArpaParseError("\\data\\ must declare contiguous orders 1..n", lineno)
    order = max(counts)

    tables: list[dict[tuple[str, ...], tuple[float, float]]] = [dict() for _ in range(order)]
    # `line` currently holds the first section marker.
    for k in range(1, order + 1):
        m = _SECTION_RE.match(line)
        if not m or int(m.group(1)) != k:
            raise ArpaParseError(f"expected \\{k}-grams: section, found {line!r}", lineno)
        while True:
            item = next_content_line()
            if item is None:
                raise ArpaParseError(f"unexpected end of input in \\{k}-grams: section")
            lineno, line = item
            if line.startswith("\\") and (_SECTION_RE.match(line) or line == "\\end\\"):
                break
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise ArpaParseError(f"expected 2 or 3 tab-separated fields, got {len(fields)}", lineno)
            try:
                log10_prob = float(fields[0])
            except ValueError:
                raise ArpaParseError(f"bad probability field {fields[0]!r}", lineno) from None
            if log10_prob > 0.0:
                raise ArpaParseError(f"log10 probability {log10_prob} is positive", lineno)
            words = tuple(fields[1].split(" "))
            if len(words) != k or any(not w for w in words):
                raise ArpaParseError(f"expected {k} space-separated words in {fields[1]!r}", lineno)
            if len(fields) == 3:
                if k == order:
                    raise ArpaParseError("top-order entries must not carry a backoff weight", lineno)
                try:
                    backoff = float(fields[2])
                except ValueError:
                    raise ArpaParseError(f"bad backoff field {fields[2]!r}", lineno) from None
            else:
                backoff = 0.0
            if words in tables[k - 1]:
                raise ArpaParseError(f"duplicate {k}-gram {' '.join(words)!r}", lineno)
            if k > 1 and words[:-1] not in tables[k - 2]:
                raise ArpaParseError(
                    f"{k}-gram {' '.join(words)!r} lacks its ({k - 1})-gram prefix", lineno
                )
            tables[k - 1][words] = (log10_prob, backoff)
        if len(tables[k - 1]) != counts[k]:
            raise ArpaParseError(
                f"\\{k}-grams: section has {len(tables[k - 1])} entries, header declared {counts[k]}",
                lineno,
            )
    if line != "\\end\\":
        raise ArpaParseError(f"expected \\end\\, found {line!r}", lineno)
    return NgramModel(order=order, tables=tables)


def serialize_arpa(model: NgramModel) -> str:
    """Render a model back to ARPA text; parse(serialize(parse(x))) is entry-exact.

    Floats are written with ``repr`` so values survive the round trip bit for
    bit; zero backoffs are omitted, matching how they were read.
    """
    out = ["\\data\\"]
    for k in range(1, model.order + 1):
        out.append(f"ngram {k}={len(model.tables[k - 1])}")
    for k in range(1, model.order + 1):
        out.append("")
        out.append(f"\\{k}-grams:")
        for words in sorted(model.tables[k - 1]):
            log10_prob, backoff = model.tables[k - 1][words]
            line = f"{log10_prob!r}\t{' '.join(words)}"
            if backoff != 0.0 and k < model.order:
                line += f"\t{backoff!r}"
            out.append(line)
    out.append("")
    out.append("\\end\\")
    return "\n".join(out) + "\n"
