"""Exhaustive reference decoding for small posterior tables.

Everything here trades scale for certainty: all reachable labelings are
enumerated with their exact probabilities, and the fused decoding
objective is maximized over that complete distribution. Beam search and
best-path decoding are validated against these results. Enumeration walks
collapsed prefixes (with the blank/non-blank mass split), not raw paths,
so the cost is bounded by the number of distinct prefixes rather than V^T.
"""

from __future__ import annotations

import math

from .beam import LN_10, DecodeParams
from .ctc import Labeling, PosteriorTable
from .errors import ResourceLimitError
from .ngram import NgramModel

MAX_FRAMES = 12
MAX_SYMBOLS = 6


def enumerate_labelings(table: PosteriorTable) -> dict[Labeling, float]:
    """Exact probability of every labeling with nonzero mass; values sum to 1.

    Refuses tables beyond T=12 or V=6, where exhaustiveness stops being a
    test-budget-friendly idea.
    """
    if table.num_frames > MAX_FRAMES or len(table.alphabet) > MAX_SYMBOLS:
        raise ResourceLimitError(
            f"enumeration cap is T<={MAX_FRAMES}, V<={MAX_SYMBOLS}; "
            f"got T={table.num_frames}, V={len(table.alphabet)}"
        )
    alphabet = table.alphabet
    blank = alphabet.blank_index
    # state: prefix -> [mass ending in blank, mass ending in the last char]
    states: dict[str, list[float]] = {"": [1.0, 0.0]}
    for t in range(table.num_frames):
        frame = table.frames[t]
        nxt: dict[str, list[float]] = {}
        for prefix, (p_b, p_nb) in states.items():
            last = prefix[-1] if prefix else None
            for s, p in enumerate(frame.tolist()):
                if p == 0.0:
                    continue
                if s == blank:
                    nxt.setdefault(prefix, [0.0, 0.0])[0] += (p_b + p_nb) * p
                elif alphabet.symbols[s] == last:
                    nxt.setdefault(prefix, [0.0, 0.0])[1] += p_nb * p
                    if p_b:
                        nxt.setdefault(prefix + alphabet.symbols[s], [0.0, 0.0])[1] += p_b * p
                else:
                    nxt.setdefault(prefix + alphabet.symbols[s], [0.0, 0.0])[1] += (p_b + p_nb) * p
        states = nxt
    return {prefix: p_b + p_nb for prefix, (p_b, p_nb) in states.items() if p_b + p_nb > 0.0}


def oracle_best(
    table: PosteriorTable,
    model: NgramModel | None = None,
    params: DecodeParams | None = None,
) -> tuple[Labeling, float]:
    """Exact argmax of the fused objective over every labeling.

    Scores ln p_CTC + alpha * ln p_LM + beta * ln(word_count + 1) for each
    enumerated labeling, with the same start-sentinel history policy and
    lexicographic tie-break as the beam decoder. The LM product is computed
    directly, word by word, independent of the beam's incremental machinery.
    """
    if params is None:
        params = DecodeParams()
    distribution = enumerate_labelings(table)
    best: tuple[Labeling, float] | None = None
    for labeling in sorted(distribution):
        score = math.log(distribution[labeling])
        words = labeling.split()
        if model is not None and params.alpha > 0.0:
            sentinel = ("<s>",) if model.has_word("<s>") else ()
            context = model.order - 1
            for i, word in enumerate(words):
                history = (sentinel + tuple(words[:i]))[-context:] if context else ()
                score += params.alpha * LN_10 * model.score_word(
                    history, word, params.oov_log10_penalty
                )
        score += params.beta * math.log(len(words) + 1)
        if best is None or score > best[1]:
            best = (labeling, score)
    assert best is not None  # tables always have at least the all-blank path
    return best
