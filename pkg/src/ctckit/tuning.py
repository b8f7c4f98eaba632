"""Grid search over decoding hyperparameters on a development set."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .beam import DecodeParams, beam_decode
from .ctc import PosteriorTable
from .errors import InvalidParamsError
from .metrics import wer_report
from .ngram import NgramModel, VocabularyTrie

#: The grid used to pick the shipped defaults (see ``beam.default_params``).
DEFAULT_GRID_ALPHAS = (0.5, 1.0, 1.5)
DEFAULT_GRID_BETAS = (0.5, 1.0, 1.5)
DEFAULT_GRID_BEAM_WIDTHS = (50, 100, 150, 200)


@dataclass(frozen=True)
class Grid:
    alphas: tuple[float, ...] = DEFAULT_GRID_ALPHAS
    betas: tuple[float, ...] = DEFAULT_GRID_BETAS
    beam_widths: tuple[int, ...] = DEFAULT_GRID_BEAM_WIDTHS

    def __post_init__(self):
        if not self.alphas or not self.betas or not self.beam_widths:
            raise InvalidParamsError("grid axes must be non-empty")
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "beam_widths", tuple(int(k) for k in self.beam_widths))

    def points(self) -> list[tuple[float, float, int]]:
        return [
            (alpha, beta, width)
            for alpha in self.alphas
            for beta in self.betas
            for width in self.beam_widths
        ]

    def to_dict(self) -> dict:
        return {
            "alphas": list(self.alphas),
            "betas": list(self.betas),
            "beam_widths": list(self.beam_widths),
        }


def grid_search(
    dev: Sequence[tuple[PosteriorTable, str]],
    model: NgramModel | None,
    grid: Grid | None = None,
    *,
    base_params: DecodeParams | None = None,
) -> tuple[DecodeParams, list[dict]]:
    """Decode the dev set at every grid point and return the WER-minimizing params.

    Each point decodes every utterance independently. Rows come back in grid
    order as {alpha, beta, beam_width, wer}. WER ties go to the cheaper point:
    smaller beam width, then smaller alpha, then smaller beta. Non-grid fields
    (penalties, OOV policy) are taken from ``base_params``.
    """
    if not dev:
        raise InvalidParamsError("development set must be non-empty")
    if grid is None:
        grid = Grid()
    if base_params is None:
        base_params = DecodeParams()
    trie = VocabularyTrie.from_model(model) if model is not None else None

    rows = []
    best: tuple[tuple[float, int, float, float], DecodeParams] | None = None
    for alpha, beta, width in grid.points():
        params = replace(base_params, alpha=alpha, beta=beta, beam_width=width)
        pairs = []
        for i, (table, gold) in enumerate(dev):
            top = beam_decode(table, params, model=model, trie=trie)[0][0]
            pairs.append((table.utterance_id or f"dev{i}", gold, top))
        point_wer = wer_report(pairs).wer
        rows.append({"alpha": alpha, "beta": beta, "beam_width": width, "wer": point_wer})
        key = (point_wer, width, alpha, beta)
        if best is None or key < best[0]:
            best = (key, params)
    assert best is not None
    return best[1], rows


def tuning_report(best: DecodeParams, rows: list[dict], grid: Grid) -> dict:
    """The JSON document shape emitted by the tune command."""
    return {
        "grid": grid.to_dict(),
        "rows": rows,
        "best": {
            "alpha": best.alpha,
            "beta": best.beta,
            "beam_width": best.beam_width,
            "wer": min(row["wer"] for row in rows),
        },
    }
