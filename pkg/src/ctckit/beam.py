"""Prefix beam search decoding with shallow n-gram LM fusion.

The search is frame-synchronous over text prefixes. Each surviving prefix
tracks two log-domain masses, for the paths that currently end in a blank
and for those that end in the prefix's last character; the split is what
lets a repeated character be distinguished from a merged duplicate.
Hypotheses are ranked by an acoustic + LM fused score

    logsumexp(log_p_blank, log_p_nonblank)
      + alpha * ln p_LM(completed words)
      + beta * ln(word_count + 1)
      + partial-word penalty while the trailing fragment is not a prefix
        of any vocabulary word

and pruned to the beam width after every frame. The LM term is applied
incrementally whenever a space completes a word; at the final frame the
trailing unfinished word is scored as a full word (and counted as one),
so the returned score of a hypothesis matches the exhaustive fused
objective over whole labelings. All arithmetic is in natural log; the
n-gram model's log10 values are converted once at this boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ctc import Labeling, PosteriorTable
from .errors import InvalidInputError, InvalidParamsError
from .ngram import DEFAULT_OOV_LOG10, NgramModel, VocabularyTrie

LOG_ZERO = float("-inf")
LN_10 = math.log(10.0)


def log_add(a: float, b: float) -> float:
    """logsumexp of two log-domain values; tolerant of -inf."""
    if a == LOG_ZERO:
        return b
    if b == LOG_ZERO:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


@dataclass(frozen=True)
class DecodeParams:
    """Beam search hyperparameters.

    ``alpha`` weights the language model, ``beta`` the word-insertion bonus.
    ``partial_word_penalty`` is a natural-log penalty applied while a
    hypothesis's trailing fragment cannot be completed to a vocabulary word
    (0 disables it). ``oov_log10_penalty`` is handed through to LM scoring
    for words missing from the vocabulary. Defaults are the tuple selected on
    accented development data; see ``default_params``.
    """

    alpha: float = 1.0
    beta: float = 1.5
    beam_width: int = 200
    partial_word_penalty: float = -1.0
    oov_log10_penalty: float = DEFAULT_OOV_LOG10

    def __post_init__(self):
        if self.beam_width < 1:
            raise InvalidParamsError(f"beam_width must be >= 1, got {self.beam_width}")
        if self.alpha < 0:
            raise InvalidParamsError(f"alpha must be >= 0, got {self.alpha}")


def default_params(corpus_profile: str) -> DecodeParams:
    """Grid-search winners for the two evaluation profiles.

    ``accented_dev`` (non-native read speech): alpha=1.0, beta=1.5, beam 200.
    ``clean_read`` (clean audiobook speech): alpha=0.5, beta=0.5, beam 100.
    """
    if corpus_profile == "accented_dev":
        return DecodeParams(alpha=1.0, beta=1.5, beam_width=200)
    if corpus_profile == "clean_read":
        return DecodeParams(alpha=0.5, beta=0.5, beam_width=100)
    raise InvalidParamsError(
        f"unknown corpus profile {corpus_profile!r}; expected 'accented_dev' or 'clean_read'"
    )


@dataclass
class PrefixHypothesis:
    """Search state for one text prefix.

    ``log_p_blank``/``log_p_nonblank`` carry the CTC mass split; ``lm_log_score``
    is the alpha-weighted natural-log LM total over completed words. The
    trailing fragment (text after the last space) has not been LM-scored yet.
    """

    text: str
    log_p_blank: float = LOG_ZERO
    log_p_nonblank: float = LOG_ZERO
    lm_log_score: float = 0.0
    words: tuple[str, ...] = ()
    fragment: str = ""

    @property
    def word_count(self) -> int:
        return len(self.words)

    def log_p_total(self) -> float:
        return log_add(self.log_p_blank, self.log_p_nonblank)


def fused_score(
    log_p_total: float,
    lm_log_score: float,
    word_count: int,
    beta: float,
    penalty: float = 0.0,
) -> float:
    """The ranking score: acoustic mass + weighted LM + word bonus + penalty."""
    return log_p_total + lm_log_score + beta * math.log(word_count + 1) + penalty


class _LmScorer:
    """Word-conditional LM lookups in natural log, memoized per utterance.

    Keys are (history suffix, word); the cache is a speed device only and has
    no effect on scores. The start sentinel seeds the history when the model
    knows it.
    """

    def __init__(self, model: NgramModel, oov_log10_penalty: float, use_cache: bool = True):
        self.model = model
        self.oov_log10_penalty = oov_log10_penalty
        self.context = model.order - 1
        self.sentinel: tuple[str, ...] = ("<s>",) if model.has_word("<s>") else ()
        self._cache: dict[tuple[tuple[str, ...], str], float] | None = {} if use_cache else None

    def word_log_score(self, prior_words: tuple[str, ...], word: str) -> float:
        """ln p(word | last n-1 prior words), sentinel-padded at utterance start."""
        history = (self.sentinel + prior_words)[-self.context:] if self.context else ()
        key = (history, word)
        if self._cache is not None and key in self._cache:
            return self._cache[key]
        value = self.model.score_word(history, word, self.oov_log10_penalty) * LN_10
        if self._cache is not None:
            self._cache[key] = value
        return value


def beam_decode(
    table: PosteriorTable,
    params: DecodeParams | None = None,
    model: NgramModel | None = None,
    trie: VocabularyTrie | None = None,
    use_lm_cache: bool = True,
) -> list[tuple[Labeling, float]]:
    """Decode one posterior table; returns hypotheses ranked by fused score.

    With no model, or with ``alpha == 0`` and the partial-word penalty
    disabled, the language model contributes nothing and the result depends
    only on the acoustics. Score ties are broken by lexicographic prefix
    order, making the ranking deterministic. The returned scores are final
    fused values: trailing fragments have been scored and counted as words.
    """
    if params is None:
        params = DecodeParams()
    if table.num_frames < 1:
        raise InvalidInputError("cannot decode an empty posterior table")

    alphabet = table.alphabet
    blank = alphabet.blank_index
    space = alphabet.space_index
    beta = params.beta

    scorer: _LmScorer | None = None
    if model is not None and params.alpha > 0.0:
        scorer = _LmScorer(model, params.oov_log10_penalty, use_cache=use_lm_cache)
    penalize = params.partial_word_penalty != 0.0 and model is not None
    if penalize and trie is None:
        trie = VocabularyTrie.from_model(model)

    with np.errstate(divide="ignore"):
        log_frames = np.log(table.frames)

    beam: dict[str, PrefixHypothesis] = {
        "": PrefixHypothesis(text="", log_p_blank=0.0, log_p_nonblank=LOG_ZERO)
    }

    for t in range(table.num_frames):
        log_frame = log_frames[t].tolist()
        next_beam: dict[str, PrefixHypothesis] = {}

        def successor(parent: PrefixHypothesis, symbol_index: int) -> PrefixHypothesis:
            ch = alphabet.symbols[symbol_index]
            text = parent.text + ch
            hyp = next_beam.get(text)
            if hyp is None:
                if symbol_index == space:
                    words, fragment = parent.words, parent.fragment
                    lm = parent.lm_log_score
                    if fragment:  # a space after a space completes nothing
                        if scorer is not None:
                            lm += params.alpha * scorer.word_log_score(words, fragment)
                        words, fragment = words + (fragment,), ""
                    hyp = PrefixHypothesis(text, lm_log_score=lm, words=words, fragment=fragment)
                else:
                    hyp = PrefixHypothesis(
                        text,
                        lm_log_score=parent.lm_log_score,
                        words=parent.words,
                        fragment=parent.fragment + ch,
                    )
                next_beam[text] = hyp
            return hyp

        for hyp in beam.values():
            total = hyp.log_p_total()
            last = hyp.text[-1] if hyp.text else None
            for s in range(len(alphabet)):
                lp = log_frame[s]
                if lp == LOG_ZERO:
                    continue
                if s == blank:
                    kept = next_beam.get(hyp.text)
                    if kept is None:
                        kept = PrefixHypothesis(
                            hyp.text,
                            lm_log_score=hyp.lm_log_score,
                            words=hyp.words,
                            fragment=hyp.fragment,
                        )
                        next_beam[hyp.text] = kept
                    kept.log_p_blank = log_add(kept.log_p_blank, total + lp)
                elif alphabet.symbols[s] == last:
                    # Same character again: without a blank in between it merges
                    # into the existing prefix; after a blank it starts a new one.
                    kept = next_beam.get(hyp.text)
                    if kept is None:
                        kept = PrefixHypothesis(
                            hyp.text,
                            lm_log_score=hyp.lm_log_score,
                            words=hyp.words,
                            fragment=hyp.fragment,
                        )
                        next_beam[hyp.text] = kept
                    kept.log_p_nonblank = log_add(kept.log_p_nonblank, hyp.log_p_nonblank + lp)
                    if hyp.log_p_blank != LOG_ZERO:
                        ext = successor(hyp, s)
                        ext.log_p_nonblank = log_add(ext.log_p_nonblank, hyp.log_p_blank + lp)
                else:
                    ext = successor(hyp, s)
                    ext.log_p_nonblank = log_add(ext.log_p_nonblank, total + lp)

        if len(next_beam) > params.beam_width:
            ranked = sorted(
                next_beam.values(),
                key=lambda h: (-_prune_score(h, beta, params, trie, penalize), h.text),
            )
            beam = {h.text: h for h in ranked[: params.beam_width]}
        else:
            beam = next_beam

    results: list[tuple[Labeling, float]] = []
    for hyp in beam.values():
        lm = hyp.lm_log_score
        n_words = hyp.word_count
        if hyp.fragment:
            if scorer is not None:
                lm += params.alpha * scorer.word_log_score(hyp.words, hyp.fragment)
            n_words += 1
        results.append((hyp.text, fused_score(hyp.log_p_total(), lm, n_words, beta)))
    results.sort(key=lambda item: (-item[1], item[0]))
    return results


def _prune_score(
    hyp: PrefixHypothesis,
    beta: float,
    params: DecodeParams,
    trie: VocabularyTrie | None,
    penalize: bool,
) -> float:
    penalty = 0.0
    if penalize and hyp.fragment and not trie.is_prefix(hyp.fragment):
        penalty = params.partial_word_penalty
    return fused_score(hyp.log_p_total(), hyp.lm_log_score, hyp.word_count, beta, penalty)
