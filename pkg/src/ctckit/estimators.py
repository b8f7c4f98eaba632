"""Scikit-learn style estimator wrappers around the decoders.

These provide the familiar ``fit`` / ``predict`` / ``get_params`` surface so
decoding slots into pipelines, cloning, and parameter search tooling. X is
always a sequence of ``PosteriorTable`` objects and predictions are transcript
strings; the functional API underneath (``beam_decode``, ``grid_search``)
remains the primary interface for one-off calls.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator

from .beam import DecodeParams, beam_decode
from .ctc import best_path_decode
from .ngram import NgramModel, VocabularyTrie
from .tuning import Grid, grid_search
from .validation import check_posterior_tables, check_transcripts


class BestPathDecoder(BaseEstimator):
    """Per-frame argmax decoding; stateless and parameter-free.

    Examples
    --------
    >>> BestPathDecoder().predict([table])
    ['the cat sat']
    """

    def fit(self, X=None, y=None):
        return self

    def predict(self, X) -> list[str]:
        return [best_path_decode(t)[0] for t in check_posterior_tables(X)]

    def predict_with_scores(self, X) -> list[tuple[str, float]]:
        """(labeling, path probability) per table."""
        return [best_path_decode(t) for t in check_posterior_tables(X)]


class BeamSearchDecoder(BaseEstimator):
    """Prefix beam search with optional n-gram LM fusion.

    Parameters
    ----------
    lm : NgramModel or None
        Language model for shallow fusion; None decodes on acoustics alone.
    alpha : float
        LM weight (0 neutralizes the LM).
    beta : float
        Word-insertion bonus weight.
    beam_width : int
        Number of hypotheses kept per frame.
    partial_word_penalty : float
        Natural-log penalty while a trailing fragment is not a vocabulary
        prefix; 0 disables.
    oov_log10_penalty : float
        log10 penalty for words missing from the LM vocabulary.
    """

    def __init__(
        self,
        lm: NgramModel | None = None,
        alpha: float = 1.0,
        beta: float = 1.5,
        beam_width: int = 200,
        partial_word_penalty: float = -1.0,
        oov_log10_penalty: float = -10.0,
    ):
        self.lm = lm
        self.alpha = alpha
        self.beta = beta
        self.beam_width = beam_width
        self.partial_word_penalty = partial_word_penalty
        self.oov_log10_penalty = oov_log10_penalty

    def _decode_setup(self) -> tuple[DecodeParams, VocabularyTrie | None]:
        params = DecodeParams(
            alpha=self.alpha,
            beta=self.beta,
            beam_width=self.beam_width,
            partial_word_penalty=self.partial_word_penalty,
            oov_log10_penalty=self.oov_log10_penalty,
        )
        trie = getattr(self, "trie_", None)
        if trie is None and self.lm is not None and self.partial_word_penalty != 0.0:
            trie = VocabularyTrie.from_model(self.lm)
        return params, trie

    def fit(self, X=None, y=None):
        """Precompute the vocabulary trie; decoding itself needs no fitting."""
        self.trie_ = VocabularyTrie.from_model(self.lm) if self.lm is not None else None
        return self

    def predict(self, X) -> list[str]:
        params, trie = self._decode_setup()
        return [
            beam_decode(t, params, model=self.lm, trie=trie)[0][0]
            for t in check_posterior_tables(X)
        ]

    def decode(self, table) -> list[tuple[str, float]]:
        """Full ranked (labeling, fused log score) list for one table."""
        params, trie = self._decode_setup()
        return beam_decode(table, params, model=self.lm, trie=trie)


class DecoderGridSearch(BaseEstimator):
    """WER-minimizing grid search over (alpha, beta, beam_width).

    ``fit(X, y)`` decodes every dev utterance at every grid point. After
    fitting, ``best_params_`` holds the winning ``DecodeParams``, ``best_wer_``
    its development WER, ``results_`` the full per-point table, and ``predict``
    decodes with the winner.
    """

    def __init__(
        self,
        lm: NgramModel | None = None,
        alphas: tuple = (0.5, 1.0, 1.5),
        betas: tuple = (0.5, 1.0, 1.5),
        beam_widths: tuple = (50, 100, 150, 200),
        partial_word_penalty: float = -1.0,
        oov_log10_penalty: float = -10.0,
    ):
        self.lm = lm
        self.alphas = alphas
        self.betas = betas
        self.beam_widths = beam_widths
        self.partial_word_penalty = partial_word_penalty
        self.oov_log10_penalty = oov_log10_penalty

    def fit(self, X, y):
        tables = check_posterior_tables(X)
        refs = check_transcripts(y, len(tables))
        grid = Grid(self.alphas, self.betas, self.beam_widths)
        base = DecodeParams(
            beam_width=max(grid.beam_widths),
            partial_word_penalty=self.partial_word_penalty,
            oov_log10_penalty=self.oov_log10_penalty,
        )
        best, rows = grid_search(list(zip(tables, refs)), self.lm, grid, base_params=base)
        self.best_params_ = best
        self.results_ = rows
        self.best_wer_ = min(row["wer"] for row in rows)
        return self

    def predict(self, X) -> list[str]:
        if not hasattr(self, "best_params_"):
            raise RuntimeError("DecoderGridSearch must be fitted before predicting")
        decoder = BeamSearchDecoder(
            lm=self.lm,
            alpha=self.best_params_.alpha,
            beta=self.best_params_.beta,
            beam_width=self.best_params_.beam_width,
            partial_word_penalty=self.partial_word_penalty,
            oov_log10_penalty=self.oov_log10_penalty,
        )
        return decoder.predict(X)
