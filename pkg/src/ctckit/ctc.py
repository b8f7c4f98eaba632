"""Core CTC types and path-level decoding.

A CTC acoustic model emits, for every time frame, a probability
distribution over an alphabet that includes a dedicated *blank* symbol.
A frame-level path is turned into a text labeling by merging adjacent
duplicate symbols and then deleting blanks; many paths map to the same
labeling, and the probability of a labeling is the summed probability of
its paths.

This module works in the linear probability domain. That is exact and
convenient at the short, oracle-scale inputs it is meant for; the beam
search decoder (``ctckit.beam``) switches to log domain for real
utterance lengths.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, ResourceLimitError

#: A decoded text labeling: a string over the alphabet minus the blank.
Labeling = str

ROW_SUM_TOLERANCE = 1e-6
DEFAULT_ENUMERATION_CAP = 12


@dataclass(frozen=True)
class Alphabet:
    """An ordered character set with designated blank and word-delimiter symbols.

    ``symbols[i]`` is the character emitted for class index ``i``; indices are
    contiguous ``0..V-1``. The blank never appears in decoded text; the space
    symbol delimits words for language-model fusion.
    """

    symbols: tuple[str, ...]
    blank_index: int
    space_index: int

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(set(self.symbols)) != len(self.symbols):
            raise InvalidInputError("alphabet symbols must be unique")
        if any(len(s) != 1 for s in self.symbols):
            raise InvalidInputError("alphabet symbols must be single characters")
        v = len(self.symbols)
        if not (0 <= self.blank_index < v) or not (0 <= self.space_index < v):
            raise InvalidInputError("blank_index and space_index must be valid symbol indices")
        if self.blank_index == self.space_index:
            raise InvalidInputError("blank_index and space_index must differ")

    @classmethod
    def from_symbols(cls, symbols: Sequence[str], blank: str = "-", space: str = " ") -> "Alphabet":
        """Build an alphabet by locating ``blank`` and ``space`` in ``symbols``."""
        symbols = tuple(symbols)
        try:
            return cls(symbols, symbols.index(blank), symbols.index(space))
        except ValueError as exc:
            raise InvalidInputError(f"blank {blank!r} or space {space!r} not in symbols") from exc

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def blank(self) -> str:
        return self.symbols[self.blank_index]

    @property
    def space(self) -> str:
        return self.symbols[self.space_index]

    def index_of(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError as exc:
            raise InvalidInputError(f"symbol {symbol!r} not in alphabet") from exc


@dataclass(frozen=True)
class PosteriorTable:
    """Per-frame symbol probabilities for one utterance: a T x V row-stochastic matrix."""

    utterance_id: str
    frames: np.ndarray = field(repr=False)
    alphabet: Alphabet

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2:
            raise InvalidInputError("frames must be a 2-D (T x V) array")
        if frames.shape[0] < 1:
            raise InvalidInputError("posterior table must have at least one frame")
        if frames.shape[1] != len(self.alphabet):
            raise InvalidInputError(
                f"frame width {frames.shape[1]} does not match alphabet size {len(self.alphabet)}"
            )
        if np.any(frames < 0.0) or np.any(frames > 1.0):
            raise InvalidInputError("frame probabilities must lie in [0, 1]")
        row_sums = frames.sum(axis=1)
        bad = np.nonzero(np.abs(row_sums - 1.0) > ROW_SUM_TOLERANCE)[0]
        if bad.size:
            raise InvalidInputError(
                f"frame {bad[0]} probabilities sum to {row_sums[bad[0]]:.8f}, expected 1"
            )
        object.__setattr__(self, "frames", frames)

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]


def collapse(path: Sequence[int], alphabet: Alphabet) -> Labeling:
    """Collapse a frame-level symbol-index path into a labeling.

    Adjacent duplicates are merged first, then blanks are removed, so a blank
    between two equal symbols keeps both ("a-a" collapses to "aa").
    """
    out: list[str] = []
    prev = -1
    blank = alphabet.blank_index
    n = len(alphabet)
    for idx in path:
        if not (0 <= idx < n):
            raise InvalidInputError(f"path index {idx} out of range for alphabet of size {n}")
        if idx != prev and idx != blank:
            out.append(alphabet.symbols[idx])
        prev = idx
    return "".join(out)


def best_path_decode(table: PosteriorTable) -> tuple[Labeling, float]:
    """Decode by taking the single most probable symbol per frame, then collapsing.

    Returns the labeling and the probability of the chosen path (the product
    of the per-frame maxima). Ties at a frame go to the lowest symbol index.
    Fast, but blind to probability mass spread over many paths of the same
    labeling; see ``labeling_probability`` for the summed quantity.
    """
    path = np.argmax(table.frames, axis=1)  # argmax returns the first (lowest) index on ties
    prob = float(np.prod(table.frames[np.arange(table.num_frames), path]))
    return collapse(path.tolist(), table.alphabet), prob


def labeling_probability(
    table: PosteriorTable,
    labeling: Labeling,
    max_frames: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Exact probability of ``labeling``: the sum over every path that collapses to it.

    Brute-force enumeration of all V^T paths, so it refuses tables longer than
    ``max_frames`` rather than silently approximating; use
    ``forward_labeling_probability`` for longer inputs.
    """
    if table.num_frames > max_frames:
        raise ResourceLimitError(
            f"table has {table.num_frames} frames, enumeration cap is {max_frames}; "
            "use forward_labeling_probability for longer tables"
        )
    alphabet = table.alphabet
    for ch in labeling:
        alphabet.index_of(ch)  # validates the labeling up front
    frames = table.frames.tolist()
    total = 0.0
    for path in itertools.product(range(len(alphabet)), repeat=table.num_frames):
        p = 1.0
        for t, s in enumerate(path):
            p *= frames[t][s]
            if p == 0.0:
                break
        if p and collapse(path, alphabet) == labeling:
            total += p
    return total


def forward_labeling_probability(table: PosteriorTable, labeling: Labeling) -> float:
    """Probability of ``labeling`` by the CTC forward recursion (no length cap).

    Dynamic programming over the blank-augmented symbol sequence; agrees with
    ``labeling_probability`` up to floating error but runs in O(T * |labeling|).
    Linear domain, so very long low-probability inputs can underflow to 0.
    """
    alphabet = table.alphabet
    blank = alphabet.blank_index
    frames = table.frames
    # Augmented sequence: blank, l1, blank, l2, ..., blank.
    aug = [blank]
    for ch in labeling:
        aug.append(alphabet.index_of(ch))
        aug.append(blank)
    n_states = len(aug)
    if n_states - 1 > 2 * table.num_frames:
        return 0.0  # labeling longer than any path can produce

    alpha = np.zeros(n_states)
    alpha[0] = frames[0, aug[0]]
    if n_states > 1:
        alpha[1] = frames[0, aug[1]]
    for t in range(1, table.num_frames):
        prev = alpha
        alpha = np.zeros(n_states)
        for s in range(n_states):
            a = prev[s]
            if s >= 1:
                a += prev[s - 1]
            if s >= 2 and aug[s] != blank and aug[s] != aug[s - 2]:
                a += prev[s - 2]
            alpha[s] = a * frames[t, aug[s]]
    result = alpha[-1]
    if n_states > 1:
        result += alpha[-2]
    return float(result)
