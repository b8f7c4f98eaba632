"""Command-line frontend.

Subcommands:
  decode   posterior file(s) -> transcript TSV (beam search or best path)
  eval     hypothesis TSV vs reference TSV -> WER report JSON
  tune     grid search on a dev set -> tuning report JSON
  split    manifest CSV -> split assignment JSON file(s)
  oracle   small posterior file -> exact labeling distribution JSON

Outputs are deterministic: identical inputs and flags produce byte-identical
files (pass --stamp to add a timestamp header to transcript TSVs). The
CTCDECODE_THREADS environment variable bounds the decode worker pool.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import formats
from .beam import DecodeParams, beam_decode
from .ctc import best_path_decode
from .errors import ArpaParseError, InvalidInputError, InvalidParamsError, ResourceLimitError
from .metrics import delta_wer, ops_delta_report, wer_report
from .ngram import NgramModel, VocabularyTrie, parse_arpa
from .oracle import enumerate_labelings, oracle_best
from .splits import Manifest, make_all_folds, make_split
from .tuning import Grid, grid_search, tuning_report

THREADS_ENV = "CTCDECODE_THREADS"


class UsageError(Exception):
    pass


def worker_count() -> int:
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return os.cpu_count() or 1
    try:
        n = int(value)
    except ValueError:
        n = 0
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {value!r}")
    return n


def _load_lm(path: str) -> NgramModel:
    with open(path, encoding="utf-8") as f:
        return parse_arpa(f)


def _decode_tables(tables, decode_one):
    workers = worker_count()
    if workers == 1 or len(tables) == 1:
        return [decode_one(t) for t in tables]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(decode_one, tables))  # map preserves input order


def _json_dump(doc, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, sort_keys=True, indent=2)
        f.write("\n")


def cmd_decode(args) -> int:
    beam_flags_set = any(
        v is not None
        for v in (args.alpha, args.beta, args.beam_width, args.partial_penalty, args.lm)
    )
    if args.best_path and beam_flags_set:
        raise UsageError("--best-path cannot be combined with --lm/--alpha/--beta/--beam-width/--partial-penalty")

    tables = [formats.load_posterior_file(p) for p in formats.collect_posterior_paths(args.posteriors)]

    header = {"decoder": "best_path" if args.best_path else "beam"}
    if args.best_path:
        rows = _decode_tables(tables, lambda t: (t.utterance_id, *best_path_decode(t)))
        rows = [(uid, text, math.log(p) if p > 0.0 else float("-inf")) for uid, text, p in rows]
    else:
        model = _load_lm(args.lm) if args.lm else None
        params = DecodeParams(
            alpha=args.alpha if args.alpha is not None else 1.0,
            beta=args.beta if args.beta is not None else 1.5,
            beam_width=args.beam_width if args.beam_width is not None else 200,
            partial_word_penalty=args.partial_penalty if args.partial_penalty is not None else -1.0,
        )
        trie = VocabularyTrie.from_model(model) if model is not None else None
        header.update(
            alpha=params.alpha,
            beta=params.beta,
            beam_width=params.beam_width,
            partial_penalty=params.partial_word_penalty,
            lm=Path(args.lm).name if args.lm else "none",
        )

        def decode_one(table):
            top = beam_decode(table, params, model=model, trie=trie)[0]
            return (table.utterance_id, top[0], top[1])

        rows = _decode_tables(tables, decode_one)

    if args.stamp:
        import datetime

        header["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    formats.write_transcript_tsv(args.out, rows, header=header)
    print(f"decoded {len(rows)} utterance(s) -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    refs = formats.read_transcript_tsv(args.ref)
    hyps = formats.read_transcript_tsv(args.hyp)
    if set(refs) != set(hyps):
        missing = sorted(set(refs) ^ set(hyps))
        raise InvalidInputError(f"hyp and ref cover different utterance ids: {missing}")
    report = wer_report([(uid, refs[uid], hyps[uid]) for uid in sorted(refs)])
    doc = report.to_dict()

    if args.baseline_hyp:
        base_hyps = formats.read_transcript_tsv(args.baseline_hyp)
        if set(base_hyps) != set(refs):
            missing = sorted(set(refs) ^ set(base_hyps))
            raise InvalidInputError(f"baseline and ref cover different utterance ids: {missing}")
        base_report = wer_report([(uid, refs[uid], base_hyps[uid]) for uid in sorted(refs)])
        absolute, relative = delta_wer(100.0 * base_report.wer, 100.0 * report.wer)
        doc["delta"] = {
            "baseline_wer_percent": round(100.0 * base_report.wer, 4),
            "treatment_wer_percent": round(100.0 * report.wer, 4),
            "absolute_percent_points": round(absolute, 4),
            "relative_percent": round(relative, 4),
            "ops": ops_delta_report(base_report, report),
        }

    if args.out:
        _json_dump(doc, args.out)
    print(f"{100.0 * report.wer:.2f}")
    return 0


def cmd_tune(args) -> int:
    tables = [formats.load_posterior_file(p) for p in formats.collect_posterior_paths(args.dev_posteriors)]
    refs = formats.read_transcript_tsv(args.dev_refs)
    missing = sorted({t.utterance_id for t in tables} ^ set(refs))
    if missing:
        raise InvalidInputError(f"dev posteriors and refs cover different utterance ids: {missing}")
    model = _load_lm(args.lm) if args.lm else None

    if args.grid:
        with open(args.grid, encoding="utf-8") as f:
            doc = json.load(f)
        try:
            grid = Grid(tuple(doc["alphas"]), tuple(doc["betas"]), tuple(doc["beam_widths"]))
        except (KeyError, TypeError) as exc:
            raise UsageError(f"grid file must define alphas, betas and beam_widths: {exc}") from exc
    else:
        grid = Grid()

    base = DecodeParams(partial_word_penalty=args.partial_penalty)
    dev = [(t, refs[t.utterance_id]) for t in tables]
    best, rows = grid_search(dev, model, grid, base_params=base)
    _json_dump(tuning_report(best, rows, grid), args.out)
    print(
        f"best: alpha={best.alpha} beta={best.beta} beam_width={best.beam_width} "
        f"wer={min(r['wer'] for r in rows):.4f} ({len(rows)} points) -> {args.out}"
    )
    return 0


def cmd_split(args) -> int:
    manifest = Manifest.read_csv(args.manifest)
    ratios = tuple(float(x) for x in args.ratios.split(","))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.all_folds:
        folds = make_all_folds(manifest, args.strategy, ratios=ratios, seed=args.seed)
    else:
        folds = [
            make_split(manifest, args.strategy, ratios=ratios, seed=args.seed, held_out=args.held_out)
        ]
    for fold in folds:
        name = f"split{fold.strategy}_{fold.fold.replace(';', '_').replace('=', '-').replace(',', '+')}.json"
        path = out_dir / name
        path.write_text(fold.to_json(), encoding="utf-8")
        print(path)
    return 0


def cmd_oracle(args) -> int:
    table = formats.load_posterior_file(args.posteriors)
    model = _load_lm(args.lm) if args.lm else None
    params = DecodeParams(alpha=args.alpha, beta=args.beta, beam_width=1)
    distribution = enumerate_labelings(table)
    labeling, score = oracle_best(table, model=model, params=params)
    doc = {
        "utterance_id": table.utterance_id,
        "distribution": {k: distribution[k] for k in sorted(distribution)},
        "best": {"labeling": labeling, "fused_log_score": score},
        "alpha": args.alpha,
        "beta": args.beta,
    }
    if args.out:
        _json_dump(doc, args.out)
    else:
        json.dump(doc, sys.stdout, sort_keys=True, indent=2)
        print()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctckit",
        description="CTC decoding and evaluation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decode", help="decode posterior tables to transcripts")
    p.add_argument("--posteriors", required=True, help="posterior JSON file or directory")
    p.add_argument("--lm", help="ARPA language model")
    p.add_argument("--alpha", type=float, help="LM weight (default 1.0)")
    p.add_argument("--beta", type=float, help="word insertion weight (default 1.5)")
    p.add_argument("--beam-width", type=int, help="beam width (default 200)")
    p.add_argument("--partial-penalty", type=float, help="partial-word penalty (default -1.0, 0 disables)")
    p.add_argument("--best-path", action="store_true", help="per-frame argmax decoding instead of beam search")
    p.add_argument("--stamp", action="store_true", help="add a timestamp to the output header")
    p.add_argument("--out", required=True, help="output transcript TSV")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="score hypotheses against references")
    p.add_argument("--hyp", required=True, help="hypothesis transcript TSV")
    p.add_argument("--ref", required=True, help="reference transcript TSV")
    p.add_argument("--baseline-hyp", help="baseline hypothesis TSV for delta reporting")
    p.add_argument("--out", help="output WER report JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tune", help="grid search decoding hyperparameters")
    p.add_argument("--dev-posteriors", required=True, help="dev posterior JSON file or directory")
    p.add_argument("--dev-refs", required=True, help="dev reference TSV")
    p.add_argument("--lm", help="ARPA language model")
    p.add_argument("--grid", help="JSON file {alphas, betas, beam_widths}; default is the built-in grid")
    p.add_argument("--partial-penalty", type=float, default=-1.0)
    p.add_argument("--out", required=True, help="output tuning report JSON")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("split", help="partition a manifest into train/dev/test")
    p.add_argument("--manifest", required=True, help="manifest CSV")
    p.add_argument("--strategy", type=int, required=True, choices=[1, 2, 3, 4, 5])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratios", default="0.8,0.1,0.1", help="train,dev,test ratios")
    p.add_argument("--held-out", help="held-out speaker (2, 5) or accent (3, 4)")
    p.add_argument("--all-folds", action="store_true", help="emit every fold of the strategy")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("oracle", help="exact labeling distribution of a small table")
    p.add_argument("--posteriors", required=True, help="posterior JSON file")
    p.add_argument("--lm", help="ARPA language model")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--out", help="output JSON (default: stdout)")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (InvalidInputError, InvalidParamsError, ArpaParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
