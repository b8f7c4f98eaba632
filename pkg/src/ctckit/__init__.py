"""ctckit: decoding and evaluation for CTC speech recognizers.

Turns per-frame character posterior tables into transcripts (best-path and
prefix beam search with n-gram LM shallow fusion), scores them (WER and
Levenshtein edit-operation analysis), tunes decoding hyperparameters, and
builds the speaker/accent data-split protocols.
"""

from .beam import DecodeParams, PrefixHypothesis, beam_decode, default_params, fused_score, log_add
from .ctc import (
    Alphabet,
    Labeling,
    PosteriorTable,
    best_path_decode,
    collapse,
    forward_labeling_probability,
    labeling_probability,
)
from .errors import (
    ArpaParseError,
    InvalidInputError,
    InvalidParamsError,
    ResourceLimitError,
)
from .estimators import BeamSearchDecoder, BestPathDecoder, DecoderGridSearch
from .metrics import (
    EditOps,
    UtteranceScore,
    WerReport,
    delta_wer,
    edit_ops,
    ops_delta_report,
    wer,
    wer_report,
)
from .ngram import NgramModel, VocabularyTrie, is_prefix, parse_arpa, serialize_arpa
from .oracle import enumerate_labelings, oracle_best
from .splits import (
    Manifest,
    ManifestRow,
    SplitAssignment,
    Violation,
    make_all_folds,
    make_split,
    seeded_shuffle,
    validate_split,
)
from .tuning import Grid, grid_search, tuning_report

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "ArpaParseError",
    "BeamSearchDecoder",
    "BestPathDecoder",
    "DecodeParams",
    "DecoderGridSearch",
    "EditOps",
    "Grid",
    "InvalidInputError",
    "InvalidParamsError",
    "Labeling",
    "Manifest",
    "ManifestRow",
    "NgramModel",
    "PosteriorTable",
    "PrefixHypothesis",
    "ResourceLimitError",
    "SplitAssignment",
    "UtteranceScore",
    "Violation",
    "VocabularyTrie",
    "WerReport",
    "beam_decode",
    "best_path_decode",
    "collapse",
    "default_params",
    "delta_wer",
    "edit_ops",
    "enumerate_labelings",
    "forward_labeling_probability",
    "fused_score",
    "grid_search",
    "is_prefix",
    "labeling_probability",
    "log_add",
    "make_all_folds",
    "make_split",
    "ops_delta_report",
    "oracle_best",
    "parse_arpa",
    "seeded_shuffle",
    "serialize_arpa",
    "tuning_report",
    "validate_split",
    "wer",
    "wer_report",
]
