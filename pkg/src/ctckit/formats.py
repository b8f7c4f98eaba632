"""On-disk formats: posterior JSON files and transcript TSVs.

A posterior file is a JSON document

    {"utterance_id": str, "alphabet": [symbols], "blank": index,
     "space": index, "domain": "prob" | "logit", "frames": [[...], ...]}

Probability-domain frames must already be row-normalized; logit-domain
frames are passed through a per-frame softmax at load. Transcript TSVs
carry one ``utterance_id<TAB>text[<TAB>log_score]`` row per utterance;
lines starting with ``#`` are header comments and are skipped on read.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

import numpy as np

from .ctc import Alphabet, PosteriorTable
from .errors import InvalidInputError


def posterior_table_to_doc(table: PosteriorTable) -> dict:
    return {
        "utterance_id": table.utterance_id,
        "alphabet": list(table.alphabet.symbols),
        "blank": table.alphabet.blank_index,
        "space": table.alphabet.space_index,
        "domain": "prob",
        "frames": table.frames.tolist(),
    }


def posterior_table_from_doc(doc: dict) -> PosteriorTable:
    try:
        alphabet = Alphabet(tuple(doc["alphabet"]), int(doc["blank"]), int(doc["space"]))
        domain = doc["domain"]
        frames = np.asarray(doc["frames"], dtype=np.float64)
        utterance_id = str(doc["utterance_id"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed posterior document: {exc}") from exc
    if domain == "logit":
        if frames.ndim != 2 or frames.shape[0] < 1:
            raise InvalidInputError("logit frames must be a non-empty 2-D array")
        shifted = frames - frames.max(axis=1, keepdims=True)
        exp = np.exp(shifted)
        frames = exp / exp.sum(axis=1, keepdims=True)
    elif domain != "prob":
        raise InvalidInputError(f"domain must be 'prob' or 'logit', got {domain!r}")
    return PosteriorTable(utterance_id=utterance_id, frames=frames, alphabet=alphabet)


def load_posterior_file(path: str | Path) -> PosteriorTable:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return posterior_table_from_doc(doc)
    except InvalidInputError as exc:
        raise InvalidInputError(f"{path}: {exc}") from exc


def save_posterior_file(table: PosteriorTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(posterior_table_to_doc(table), f, sort_keys=True)
        f.write("\n")


def collect_posterior_paths(path: str | Path) -> list[Path]:
    """A single file, or every *.json under a directory in name order."""
    p = Path(path)
    if p.is_dir():
        found = sorted(p.glob("*.json"))
        if not found:
            raise InvalidInputError(f"{p}: no *.json posterior files found")
        return found
    if p.is_file():
        return [p]
    raise InvalidInputError(f"{p}: no such file or directory")


def write_transcript_tsv(
    path: str | Path,
    rows: Iterable[tuple[str, str, float]],
    header: dict | None = None,
) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if header:
            pairs = " ".join(f"{k}={v}" for k, v in header.items())
            f.write(f"# {pairs}\n")
        for utterance_id, text, score in rows:
            f.write(f"{utterance_id}\t{text}\t{score!r}\n")


def read_transcript_tsv(path: str | Path) -> dict[str, str]:
    """utterance_id -> text; extra columns (scores) are ignored."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 2:
                raise InvalidInputError(f"{path}:{lineno}: expected at least 2 tab-separated fields")
            if fields[0] in out:
                raise InvalidInputError(f"{path}:{lineno}: duplicate utterance id {fields[0]!r}")
            out[fields[0]] = fields[1]
    return out
