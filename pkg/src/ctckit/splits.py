"""Train/Dev/Test split protocols over an utterance manifest.

Five strategies cover the speaker/accent dependency matrix:

1. speaker-dependent, multi-accent: every speaker in all three partitions,
   prompt texts disjoint across partitions.
2. speaker-independent cross-validation: one held-out speaker per accent
   forms Test (all their utterances); remaining speakers split Train/Dev
   on disjoint prompts. One fold per speaker rank.
3. zero-shot accent: one accent absent from Train and Dev entirely; Test
   covers the test-prompt subset of every speaker, so it serves both as
   an all-accent test and, filtered to the held-out accent, a zero-shot one.
4. single-accent: the manifest filtered to one accent, then split as 1.
   One fold per accent.
5. speaker-independent within one accent: one speaker of the accent held
   out into Test (all their utterances); the accent's other speakers split
   Train/Dev on disjoint prompts. One fold per accent x speaker.

Prompts are identified by the basename (stem) of ``transcript_path``, the
corpus convention for prompt sheets shared across speakers. Because
speaker-holdout folds (2, 5) put a held-out speaker's entire recording set
in Test, their Test prompts necessarily recur in Train under other voices;
prompt disjointness there is enforced between Train and Dev. Strategies
1, 3 and 4 are prompt-disjoint across all three partitions.

Shuffling uses an explicit 64-bit linear congruential generator with
Fisher-Yates, so identical seeds reproduce identical folds on any platform
or implementation.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import PurePosixPath
from typing import Iterable, Sequence, TextIO

from .errors import InvalidInputError

PARTITIONS = ("train", "dev", "test")
DEFAULT_RATIOS = (0.8, 0.1, 0.1)

MANIFEST_COLUMNS = ("utterance_id", "speaker_id", "accent", "transcript_path", "posterior_path")

_LCG_MULTIPLIER = 6364136223846793005  # Knuth MMIX constants
_LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1


class Lcg:
    """64-bit linear congruential generator: state = state * a + c mod 2^64."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state * _LCG_MULTIPLIER + _LCG_INCREMENT) & _MASK64
        return self.state


def seeded_shuffle(items: Sequence, seed: int) -> list:
    """Fisher-Yates with the LCG; swap index j = next_u64() mod (i + 1)."""
    rng = Lcg(seed)
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.next_u64() % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


@dataclass(frozen=True)
class ManifestRow:
    utterance_id: str
    speaker_id: str
    accent: str
    transcript_path: str
    posterior_path: str

    @property
    def prompt_id(self) -> str:
        """Prompt identity: transcript file stem, shared across speakers."""
        return PurePosixPath(self.transcript_path.replace("\\", "/")).stem


@dataclass
class Manifest:
    rows: list[ManifestRow]

    def __post_init__(self):
        seen: set[str] = set()
        for row in self.rows:
            if row.utterance_id in seen:
                raise InvalidInputError(f"duplicate utterance_id {row.utterance_id!r}")
            seen.add(row.utterance_id)
            if not row.speaker_id or not row.accent:
                raise InvalidInputError(
                    f"utterance {row.utterance_id!r} has an empty speaker or accent"
                )

    def __len__(self) -> int:
        return len(self.rows)

    def accents(self) -> list[str]:
        return sorted({r.accent for r in self.rows})

    def speakers(self, accent: str | None = None) -> list[str]:
        return sorted({r.speaker_id for r in self.rows if accent is None or r.accent == accent})

    def by_id(self) -> dict[str, ManifestRow]:
        return {r.utterance_id: r for r in self.rows}

    @classmethod
    def read_csv(cls, source: str | TextIO) -> "Manifest":
        close = False
        if isinstance(source, str):
            source = open(source, newline="", encoding="utf-8")
            close = True
        try:
            reader = csv.DictReader(source)
            if tuple(reader.fieldnames or ()) != MANIFEST_COLUMNS:
                raise InvalidInputError(
                    f"manifest header must be {','.join(MANIFEST_COLUMNS)}"
                )
            rows = [ManifestRow(**{k: row[k] for k in MANIFEST_COLUMNS}) for row in reader]
        finally:
            if close:
                source.close()
        return cls(rows)

    def write_csv(self, target: str | TextIO) -> None:
        close = False
        if isinstance(target, str):
            target = open(target, "w", newline="", encoding="utf-8")
            close = True
        try:
            writer = csv.writer(target)
            writer.writerow(MANIFEST_COLUMNS)
            for r in self.rows:
                writer.writerow([r.utterance_id, r.speaker_id, r.accent, r.transcript_path, r.posterior_path])
        finally:
            if close:
                target.close()


@dataclass
class SplitAssignment:
    """One fold: utterance_id -> train/dev/test, plus what produced it."""

    strategy: int
    fold: str
    seed: int
    assignments: dict[str, str]

    def partition_ids(self, partition: str) -> set[str]:
        return {uid for uid, p in self.assignments.items() if p == partition}

    def to_json(self) -> str:
        doc = {
            "strategy": self.strategy,
            "fold": self.fold,
            "seed": self.seed,
            "assignments": self.assignments,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SplitAssignment":
        doc = json.loads(text)
        return cls(
            strategy=int(doc["strategy"]),
            fold=str(doc["fold"]),
            seed=int(doc["seed"]),
            assignments={str(k): str(v) for k, v in doc["assignments"].items()},
        )


@dataclass(frozen=True)
class Violation:
    rule: str
    ids: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        ids = ", ".join(self.ids[:5]) + ("..." if len(self.ids) > 5 else "")
        return f"[{self.rule}] {self.message} ({ids})" if self.ids else f"[{self.rule}] {self.message}"


def _check_ratios(ratios: Sequence[float]) -> tuple[float, float, float]:
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise InvalidInputError(f"ratios must be three non-negative values summing to 1, got {ratios}")
    return tuple(float(r) for r in ratios)


def _split_prompts(prompts: Iterable[str], ratios, seed: int) -> dict[str, str]:
    """Assign distinct prompts to partitions: floor(ratio*N) test and dev, rest train."""
    ordered = seeded_shuffle(sorted(set(prompts)), seed)
    n = len(ordered)
    n_test = int(ratios[2] * n)
    n_dev = int(ratios[1] * n)
    mapping = {}
    for i, prompt in enumerate(ordered):
        if i < n_test:
            mapping[prompt] = "test"
        elif i < n_test + n_dev:
            mapping[prompt] = "dev"
        else:
            mapping[prompt] = "train"
    return mapping


def _dev_prompts(prompts: Iterable[str], dev_ratio: float, seed: int) -> set[str]:
    ordered = seeded_shuffle(sorted(set(prompts)), seed)
    return set(ordered[: int(dev_ratio * len(ordered))])


def _speaker_fold_count(manifest: Manifest, accents: Sequence[str]) -> int:
    counts = {a: len(manifest.speakers(a)) for a in accents}
    short = [a for a, c in counts.items() if c < 2]
    if short:
        raise InvalidInputError(
            f"speaker-holdout strategies need >= 2 speakers per accent; too few in: {sorted(short)}"
        )
    return max(counts.values())


def _held_out_speakers(manifest: Manifest, rank: int) -> list[str]:
    """The rank-th speaker (sorted order, wrapping) of every accent."""
    held = []
    for accent in manifest.accents():
        speakers = manifest.speakers(accent)
        held.append(speakers[rank % len(speakers)])
    return held


def make_split(
    manifest: Manifest,
    strategy: int,
    *,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: int = 0,
    held_out: str | None = None,
) -> SplitAssignment:
    """Build one fold of the given strategy.

    ``held_out`` selects the fold: a speaker id for strategies 2 and 5, an
    accent for strategies 3 and 4. Strategy 1 has a single fold and takes no
    ``held_out``. Use ``make_all_folds`` to enumerate every fold.
    """
    ratios = _check_ratios(ratios)
    if strategy not in (1, 2, 3, 4, 5):
        raise InvalidInputError(f"strategy must be 1..5, got {strategy}")

    if strategy == 1:
        if held_out is not None:
            raise InvalidInputError("strategy 1 has no held-out fold")
        prompt_map = _split_prompts((r.prompt_id for r in manifest.rows), ratios, seed)
        assignments = {r.utterance_id: prompt_map[r.prompt_id] for r in manifest.rows}
        return SplitAssignment(1, "all", seed, assignments)

    if strategy == 2:
        if held_out is None:
            raise InvalidInputError("strategy 2 requires a held-out speaker id")
        accents = manifest.accents()
        _speaker_fold_count(manifest, accents)
        speaker_accent = {r.speaker_id: r.accent for r in manifest.rows}
        if held_out not in speaker_accent:
            raise InvalidInputError(f"held-out speaker {held_out!r} not in manifest")
        rank = manifest.speakers(speaker_accent[held_out]).index(held_out)
        held = set(_held_out_speakers(manifest, rank))
        rest = [r for r in manifest.rows if r.speaker_id not in held]
        dev = _dev_prompts((r.prompt_id for r in rest), ratios[1], seed)
        assignments = {}
        for r in manifest.rows:
            if r.speaker_id in held:
                assignments[r.utterance_id] = "test"
            else:
                assignments[r.utterance_id] = "dev" if r.prompt_id in dev else "train"
        return SplitAssignment(2, f"speakers={','.join(sorted(held))}", seed, assignments)

    if strategy == 3:
        if held_out is None:
            raise InvalidInputError("strategy 3 requires a held-out accent")
        if held_out not in manifest.accents():
            raise InvalidInputError(f"held-out accent {held_out!r} not in manifest")
        prompt_map = _split_prompts((r.prompt_id for r in manifest.rows), ratios, seed)
        assignments = {}
        for r in manifest.rows:
            part = prompt_map[r.prompt_id]
            if part == "test":
                assignments[r.utterance_id] = "test"
            elif r.accent != held_out:
                assignments[r.utterance_id] = part
            # held-out accent rows on train/dev prompts stay out of the fold
        return SplitAssignment(3, f"accent={held_out}", seed, assignments)

    if strategy == 4:
        if held_out is None:
            raise InvalidInputError("strategy 4 requires an accent (or use make_all_folds)")
        if held_out not in manifest.accents():
            raise InvalidInputError(f"accent {held_out!r} not in manifest")
        rows = [r for r in manifest.rows if r.accent == held_out]
        prompt_map = _split_prompts((r.prompt_id for r in rows), ratios, seed)
        assignments = {r.utterance_id: prompt_map[r.prompt_id] for r in rows}
        return SplitAssignment(4, f"accent={held_out}", seed, assignments)

    # strategy 5
    if held_out is None:
        raise InvalidInputError("strategy 5 requires a held-out speaker id")
    speaker_accent = {r.speaker_id: r.accent for r in manifest.rows}
    if held_out not in speaker_accent:
        raise InvalidInputError(f"held-out speaker {held_out!r} not in manifest")
    accent = speaker_accent[held_out]
    if len(manifest.speakers(accent)) < 2:
        raise InvalidInputError(
            f"speaker-holdout strategies need >= 2 speakers per accent; too few in: [{accent!r}]"
        )
    rows = [r for r in manifest.rows if r.accent == accent]
    rest = [r for r in rows if r.speaker_id != held_out]
    dev = _dev_prompts((r.prompt_id for r in rest), ratios[1], seed)
    assignments = {}
    for r in rows:
        if r.speaker_id == held_out:
            assignments[r.utterance_id] = "test"
        else:
            assignments[r.utterance_id] = "dev" if r.prompt_id in dev else "train"
    return SplitAssignment(5, f"accent={accent};speaker={held_out}", seed, assignments)


def make_all_folds(
    manifest: Manifest,
    strategy: int,
    *,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: int = 0,
) -> list[SplitAssignment]:
    """Every fold of a strategy: 1 for strategy 1, one per speaker rank for 2,
    per accent for 3 and 4, per accent x speaker for 5."""
    _check_ratios(ratios)
    if strategy == 1:
        return [make_split(manifest, 1, ratios=ratios, seed=seed)]
    if strategy == 2:
        accents = manifest.accents()
        n_folds = _speaker_fold_count(manifest, accents)
        folds = []
        for rank in range(n_folds):
            anchor = _held_out_speakers(manifest, rank)[0]
            folds.append(make_split(manifest, 2, ratios=ratios, seed=seed, held_out=anchor))
        return folds
    if strategy in (3, 4):
        return [
            make_split(manifest, strategy, ratios=ratios, seed=seed, held_out=accent)
            for accent in manifest.accents()
        ]
    if strategy == 5:
        folds = []
        for accent in manifest.accents():
            for speaker in manifest.speakers(accent):
                folds.append(make_split(manifest, 5, ratios=ratios, seed=seed, held_out=speaker))
        return folds
    raise InvalidInputError(f"strategy must be 1..5, got {strategy}")


def _parse_fold(fold: str) -> dict[str, str]:
    out = {}
    if fold == "all":
        return out
    for part in fold.split(";"):
        key, _, value = part.partition("=")
        out[key] = value
    return out


def validate_split(manifest: Manifest, assignment: SplitAssignment) -> list[Violation]:
    """Check an assignment against its strategy's rules; empty list when clean."""
    violations: list[Violation] = []
    by_id = manifest.by_id()

    unknown = sorted(set(assignment.assignments) - set(by_id))
    if unknown:
        violations.append(Violation("unknown-id", tuple(unknown), "assigned ids missing from manifest"))
    bad_parts = sorted(
        uid for uid, p in assignment.assignments.items() if p not in PARTITIONS
    )
    if bad_parts:
        violations.append(Violation("bad-partition", tuple(bad_parts), "partition not train/dev/test"))
    if violations:
        return violations

    rows = {p: [by_id[uid] for uid, part in assignment.assignments.items() if part == p] for p in PARTITIONS}
    prompts = {p: {r.prompt_id for r in rows[p]} for p in PARTITIONS}
    speakers = {p: {r.speaker_id for r in rows[p]} for p in PARTITIONS}
    fold = _parse_fold(assignment.fold)
    strategy = assignment.strategy

    def overlap(a: str, b: str):
        shared = prompts[a] & prompts[b]
        if shared:
            ids = tuple(sorted(r.utterance_id for p in (a, b) for r in rows[p] if r.prompt_id in shared))
            violations.append(
                Violation("prompt-overlap", ids, f"prompt text shared between {a} and {b}")
            )

    overlap("train", "dev")
    if strategy in (1, 3, 4):
        overlap("train", "test")
        overlap("dev", "test")

    if strategy in (1, 4):
        subset = manifest.rows if strategy == 1 else [r for r in manifest.rows if r.accent == fold.get("accent")]
        missing_cover = sorted(
            r.utterance_id for r in subset if r.utterance_id not in assignment.assignments
        )
        if missing_cover:
            violations.append(Violation("coverage", tuple(missing_cover), "subset rows left unassigned"))
        for speaker in sorted({r.speaker_id for r in subset}):
            absent = [p for p in PARTITIONS if speaker not in speakers[p]]
            if absent:
                violations.append(
                    Violation(
                        "speaker-coverage", (speaker,),
                        f"speaker missing from partitions {absent}",
                    )
                )

    if strategy == 2:
        held = set(fold.get("speakers", "").split(",")) - {""}
        leaked = sorted(
            r.utterance_id for p in ("train", "dev") for r in rows[p] if r.speaker_id in held
        )
        if leaked:
            violations.append(Violation("speaker-leak", tuple(leaked), "held-out speaker in train/dev"))
        not_tested = sorted(
            r.utterance_id
            for r in manifest.rows
            if r.speaker_id in held and assignment.assignments.get(r.utterance_id) != "test"
        )
        if not_tested:
            violations.append(
                Violation("holdout-coverage", tuple(not_tested), "held-out speaker rows not all in test")
            )
        for accent in manifest.accents():
            if not (set(manifest.speakers(accent)) & speakers["train"]):
                violations.append(
                    Violation("accent-starved", (accent,), "accent has no speaker left in train")
                )

    if strategy == 3:
        accent = fold.get("accent", "")
        leaked = sorted(
            r.utterance_id for p in ("train", "dev") for r in rows[p] if r.accent == accent
        )
        if leaked:
            violations.append(Violation("accent-leak", tuple(leaked), "held-out accent in train/dev"))
        test_accents = {r.accent for r in rows["test"]}
        missing = sorted(set(manifest.accents()) - test_accents)
        if missing:
            violations.append(
                Violation("test-all-coverage", tuple(missing), "accents absent from the test partition")
            )

    if strategy in (4, 5):
        accent = fold.get("accent", "")
        foreign = sorted(
            r.utterance_id for p in PARTITIONS for r in rows[p] if r.accent != accent
        )
        if foreign:
            violations.append(Violation("foreign-accent", tuple(foreign), "rows outside the fold's accent"))

    if strategy == 5:
        speaker = fold.get("speaker", "")
        leaked = sorted(
            r.utterance_id for p in ("train", "dev") for r in rows[p] if r.speaker_id == speaker
        )
        if leaked:
            violations.append(Violation("speaker-leak", tuple(leaked), "held-out speaker in train/dev"))
        stray = sorted(r.utterance_id for r in rows["test"] if r.speaker_id != speaker)
        if stray:
            violations.append(
                Violation("test-purity", tuple(stray), "test contains speakers other than the held-out one")
            )

    return violations
