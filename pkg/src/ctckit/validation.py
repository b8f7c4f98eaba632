"""Input validation helpers for the estimator layer."""

from __future__ import annotations

from typing import Sequence

from .ctc import PosteriorTable
from .errors import InvalidInputError


def check_posterior_tables(X) -> list[PosteriorTable]:
    """Validate that X is a non-empty sequence of PosteriorTable objects."""
    if isinstance(X, PosteriorTable):
        raise InvalidInputError("pass a sequence of posterior tables, not a single table")
    tables = list(X)
    if not tables:
        raise InvalidInputError("X must contain at least one posterior table")
    for i, t in enumerate(tables):
        if not isinstance(t, PosteriorTable):
            raise InvalidInputError(f"X[{i}] is {type(t).__name__}, expected PosteriorTable")
    return tables


def check_transcripts(y, n: int) -> list[str]:
    """Validate y as n reference transcripts aligned with X."""
    if y is None:
        raise InvalidInputError("reference transcripts are required")
    refs = list(y)
    if len(refs) != n:
        raise InvalidInputError(f"got {len(refs)} transcripts for {n} tables")
    for i, r in enumerate(refs):
        if not isinstance(r, str):
            raise InvalidInputError(f"y[{i}] is {type(r).__name__}, expected str")
    return refs


def check_ratio_triplet(value: Sequence[float]) -> tuple[float, float, float]:
    values = tuple(float(v) for v in value)
    if len(values) != 3 or any(v < 0 for v in values) or abs(sum(values) - 1.0) > 1e-9:
        raise InvalidInputError(f"expected three non-negative ratios summing to 1, got {value}")
    return values
