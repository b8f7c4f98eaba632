"""WER and Levenshtein edit-operation accounting.

Edit operations are counted from the gold string to the predicted one:
insertions add material that only the hypothesis has, deletions drop
material only the gold has. Among the minimal alignments the traceback
prefers substitution over deletion over insertion, which pins down the
per-category counts so operation-delta analyses reproduce run to run.
Text is scored exactly as given; normalize case and punctuation upstream.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class EditOps:
    """Minimal gold-to-hypothesis edit counts at one granularity."""

    insertions: int = 0
    deletions: int = 0
    substitutions: int = 0

    @property
    def total(self) -> int:
        return self.insertions + self.deletions + self.substitutions

    def __add__(self, other: "EditOps") -> "EditOps":
        return EditOps(
            self.insertions + other.insertions,
            self.deletions + other.deletions,
            self.substitutions + other.substitutions,
        )


def _tokens(text: str | list[str], granularity: str) -> list[str]:
    if granularity == "character":
        return list(text) if isinstance(text, str) else list(" ".join(text))
    if granularity == "word":
        return text.split() if isinstance(text, str) else list(text)
    raise InvalidInputError(f"granularity must be 'character' or 'word', got {granularity!r}")


def edit_ops(gold: str | list[str], hypothesis: str | list[str], granularity: str = "character") -> EditOps:
    """Count minimal insert/delete/substitute operations, gold to hypothesis."""
    g = _tokens(gold, granularity)
    h = _tokens(hypothesis, granularity)
    m, n = len(g), len(h)

    # Full DP matrix, rows vectorized. The insertion term (left neighbour in
    # the same row) is folded in with a running-minimum transform:
    # min_{i<=j} tmp[i] + (j - i)  ==  min-accumulate(tmp - j)[j] + j.
    dist = np.empty((m + 1, n + 1), dtype=np.int64)
    cols = np.arange(n + 1)
    dist[0] = cols
    h_arr = np.array(h, dtype=object) if n else np.empty(0, dtype=object)
    for i in range(1, m + 1):
        tmp = np.empty(n + 1, dtype=np.int64)
        tmp[0] = i
        sub_cost = (h_arr != g[i - 1]).astype(np.int64) if n else tmp[1:]
        if n:
            tmp[1:] = np.minimum(dist[i - 1, 1:] + 1, dist[i - 1, :-1] + sub_cost)
        dist[i] = np.minimum.accumulate(tmp - cols) + cols

    ins = dels = subs = 0
    i, j = m, n
    while i > 0 or j > 0:
        here = dist[i, j]
        if i > 0 and j > 0 and g[i - 1] == h[j - 1] and dist[i - 1, j - 1] == here:
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and dist[i - 1, j - 1] + 1 == here:
            subs += 1
            i, j = i - 1, j - 1
        elif i > 0 and dist[i - 1, j] + 1 == here:
            dels += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return EditOps(insertions=ins, deletions=dels, substitutions=subs)


def wer(gold: str | list[str], hypothesis: str | list[str]) -> float:
    """Word error rate: word-level (ins + del + sub) / gold word count.

    May exceed 1. An empty gold against a non-empty hypothesis has no
    meaningful rate and returns +inf with a warning; empty against empty is 0.
    """
    g = _tokens(gold, "word")
    h = _tokens(hypothesis, "word")
    if not g:
        if not h:
            return 0.0
        warnings.warn("WER against an empty gold transcript is undefined; returning inf")
        return math.inf
    return edit_ops(g, h, "word").total / len(g)


def delta_wer(baseline_wer: float, new_wer: float) -> tuple[float, float]:
    """Absolute and percent-relative WER change against a baseline.

    Returns (new - baseline, 100 * (new - baseline) / baseline); negative
    values are improvements. Units pass through, so percent-scaled WERs give
    percent-point absolutes.
    """
    if baseline_wer == 0:
        raise InvalidInputError("relative WER change is undefined for a zero baseline")
    absolute = new_wer - baseline_wer
    return absolute, 100.0 * absolute / baseline_wer


@dataclass
class UtteranceScore:
    utterance_id: str
    gold: str
    hypothesis: str
    word_ops: EditOps
    char_ops: EditOps
    wer: float

    def to_dict(self) -> dict:
        return {
            "utterance_id": self.utterance_id,
            "gold": self.gold,
            "hypothesis": self.hypothesis,
            "word_ops": vars(self.word_ops).copy(),
            "char_ops": vars(self.char_ops).copy(),
            "wer": self.wer if math.isfinite(self.wer) else None,
        }


@dataclass
class WerReport:
    """Per-utterance scores plus corpus aggregates.

    The aggregate WER pools edits over the corpus: total word-level edits
    divided by total gold words (not the mean of per-utterance rates).
    ``single_edit_utterances`` lists ids whose hypothesis differs from gold by
    exactly one character edit, for manual error categorization.
    """

    utterances: list[UtteranceScore]
    wer: float = field(init=False)
    word_ops: EditOps = field(init=False)
    char_ops: EditOps = field(init=False)
    gold_word_count: int = field(init=False)
    single_edit_utterances: list[str] = field(init=False)

    def __post_init__(self):
        word_ops = EditOps()
        char_ops = EditOps()
        gold_words = 0
        for u in self.utterances:
            word_ops = word_ops + u.word_ops
            char_ops = char_ops + u.char_ops
            gold_words += len(u.gold.split())
        self.word_ops = word_ops
        self.char_ops = char_ops
        self.gold_word_count = gold_words
        if gold_words:
            self.wer = word_ops.total / gold_words
        elif word_ops.total:
            warnings.warn("aggregate WER against an empty gold corpus is undefined; returning inf")
            self.wer = math.inf
        else:
            self.wer = 0.0
        self.single_edit_utterances = [u.utterance_id for u in self.utterances if u.char_ops.total == 1]

    def to_dict(self) -> dict:
        return {
            "wer": self.wer if math.isfinite(self.wer) else None,
            "wer_percent": round(100.0 * self.wer, 2) if math.isfinite(self.wer) else None,
            "gold_word_count": self.gold_word_count,
            "word_ops": vars(self.word_ops).copy(),
            "char_ops": vars(self.char_ops).copy(),
            "single_edit_utterances": list(self.single_edit_utterances),
            "utterances": [u.to_dict() for u in self.utterances],
        }


def wer_report(pairs: list[tuple[str, str, str]]) -> WerReport:
    """Score (utterance_id, gold, hypothesis) triples into a ``WerReport``."""
    scored = []
    for utterance_id, gold, hypothesis in pairs:
        scored.append(
            UtteranceScore(
                utterance_id=utterance_id,
                gold=gold,
                hypothesis=hypothesis,
                word_ops=edit_ops(gold, hypothesis, "word"),
                char_ops=edit_ops(gold, hypothesis, "character"),
                wer=wer(gold, hypothesis),
            )
        )
    return WerReport(utterances=scored)


def ops_delta_report(baseline: WerReport, treatment: WerReport) -> dict:
    """Aggregate character-level edit-operation changes versus a baseline.

    Both reports must cover the same utterance ids. Percent change is None
    when the baseline count is zero and the treatment count is not.
    """
    base_ids = {u.utterance_id for u in baseline.utterances}
    treat_ids = {u.utterance_id for u in treatment.utterances}
    if base_ids != treat_ids:
        missing = sorted(base_ids ^ treat_ids)
        raise InvalidInputError(f"reports cover different utterance ids: {missing}")
    out = {}
    for op in ("insertions", "deletions", "substitutions"):
        b = getattr(baseline.char_ops, op)
        t = getattr(treatment.char_ops, op)
        if b:
            percent = 100.0 * (t - b) / b
        else:
            percent = 0.0 if t == 0 else None
        out[op] = {"baseline": b, "treatment": t, "absolute": t - b, "percent": percent}
    return out
