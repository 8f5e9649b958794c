"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 I/O or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .adapter import AdapterConfig, AdapterError, make_adapter_extractor
from .experiments import (
    SCORE_COLUMNS,
    ErrorInjectionPlan,
    RatingRecord,
    aggregate_ratings,
    correlate_scores,
    inject_errors,
    permute_doc,
    roundtrip_grammar,
    score_document,
)
from .grammar import DEFAULT_CAP, GrammarError, enumerate_gold_trees, parse_grammar, validate_grammar
from .labels import LabelError
from .pipeline import (
    build_forest,
    extract_document,
    extractions_to_json,
    load_doc,
    load_spec,
)
from .tree import TreeError, canonical_serialize


class ConfigError(Exception):
    """Missing or inconsistent inputs (wrong paths, unknown pattern ids)."""


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])


def _load_grammar_file(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read grammar {path}: {exc}") from exc
    return parse_grammar(text)


def _load_grammar_dir(directory: Path) -> dict:
    grammars = {}
    files = sorted(directory.glob("*.grammar")) + sorted(directory.glob("*.txt"))
    if not files:
        raise ConfigError(f"no grammar files in {directory}")
    for path in files:
        g = _load_grammar_file(path)
        grammars[g.pattern_id] = g
    return grammars


def _make_extractor(args):
    if getattr(args, "extractor", "rule-based") == "adapter":
        if not args.adapter_url:
            raise ConfigError("--adapter-url is required with --extractor adapter")
        config = AdapterConfig(
            url=args.adapter_url,
            timeout=args.adapter_timeout,
            retries=args.adapter_retries,
            fallback_to_rules=args.adapter_fallback,
        )
        return make_adapter_extractor(config)
    return None


def _add_extractor_args(parser) -> None:
    parser.add_argument("--extractor", choices=["rule-based", "adapter"], default="rule-based")
    parser.add_argument("--adapter-url", default=None)
    parser.add_argument("--adapter-timeout", type=float, default=10.0)
    parser.add_argument("--adapter-retries", type=int, default=1)
    parser.add_argument(
        "--adapter-fallback",
        action="store_true",
        help="fall back to rule-based extraction when the adapter fails",
    )


def cmd_gen_gold(args) -> int:
    grammar = _load_grammar_file(Path(args.grammar))
    trees = enumerate_gold_trees(grammar, args.cap)
    payload = {
        "pattern_id": grammar.pattern_id,
        "trees": [canonical_serialize(t) for t in trees],
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate_grammar(args) -> int:
    failed = False
    for path in args.grammars:
        grammar = _load_grammar_file(Path(path))
        violations = validate_grammar(grammar)
        if violations:
            failed = True
            print(f"{path}: INVALID")
            for v in violations:
                print(f"  {v}")
        else:
            print(f"{path}: OK")
    return 1 if failed else 0


def cmd_extract(args) -> int:
    doc = load_doc(args.doc)
    spec = load_spec(args.spec)
    extractions = extract_document(doc, spec, _make_extractor(args))
    text = json.dumps(extractions_to_json(doc, extractions), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_build(args) -> int:
    doc = load_doc(args.doc)
    spec = load_spec(args.spec)
    extractions = extract_document(doc, spec, _make_extractor(args))
    report = build_forest(doc, extractions, spec)
    payload = {"doc_id": doc.doc_id, **report.to_json()}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_score(args) -> int:
    corpus = Path(args.corpus)
    docs = [load_doc(p) for p in sorted(corpus.glob("*.json"))]
    if not docs:
        raise ConfigError(f"no documents in {corpus}")
    docs.sort(key=lambda d: d.doc_id)
    grammars = _load_grammar_dir(Path(args.grammars))
    specs = {}
    for path in sorted(Path(args.specs).glob("*.json")):
        spec = load_spec(path)
        specs[spec.pattern_id] = spec
    refs = {}
    if args.refs:
        for path in sorted(Path(args.refs).glob("*.json")):
            ref = load_doc(path)
            refs[ref.pattern_id] = ref

    gold_cache = {}

    def gold_for(pattern_id: str):
        if pattern_id not in gold_cache:
            gold_cache[pattern_id] = enumerate_gold_trees(grammars[pattern_id], args.cap)
        return gold_cache[pattern_id]

    extractor = _make_extractor(args)
    for doc in docs:
        if doc.pattern_id not in grammars:
            raise ConfigError(f"document {doc.doc_id}: no grammar for pattern {doc.pattern_id!r}")
        if doc.pattern_id not in specs:
            raise ConfigError(f"document {doc.doc_id}: no spec for pattern {doc.pattern_id!r}")
        gold_for(doc.pattern_id)  # enumerate up front, single-threaded

    def score_one(doc):
        return score_document(
            doc,
            gold_for(doc.pattern_id),
            specs[doc.pattern_id],
            reference=refs.get(doc.pattern_id),
            extractor=extractor,
        )

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(score_one, docs))
    else:
        results = [score_one(doc) for doc in docs]

    out_dir = Path(args.out)
    reports_dir = out_dir / "reports"
    reports_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for doc, (row, report) in zip(docs, results):
        rows.append(row)
        payload = {"doc_id": doc.doc_id, **report.to_json()}
        (reports_dir / f"{doc.doc_id}.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    _write_csv(out_dir / "scores.csv", SCORE_COLUMNS, rows)
    print(f"scored {len(rows)} documents -> {out_dir / 'scores.csv'}")
    return 0


def cmd_permute(args) -> int:
    doc = load_doc(args.doc)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for permuted in permute_doc(doc, args.seed, args.k):
        path = out_dir / f"{permuted.doc_id}.json"
        path.write_text(
            json.dumps(permuted.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    print(f"wrote {args.k} permutations to {out_dir}")
    return 0


def cmd_inject_errors(args) -> int:
    doc = load_doc(args.doc)
    spec = load_spec(args.spec)
    plan = ErrorInjectionPlan(args.swap, args.drop, args.wrong_piece)
    corrupted, applied = inject_errors(doc, plan, args.seed, spec)
    Path(args.out).write_text(
        json.dumps(corrupted.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"applied {applied} edits -> {args.out}")
    return 0


def cmd_correlate(args) -> int:
    with open(args.scores, encoding="utf-8", newline="") as fh:
        scores_rows = list(csv.DictReader(fh))
    with open(args.errors, encoding="utf-8", newline="") as fh:
        errors_rows = list(csv.DictReader(fh))
    columns = [c.strip() for c in args.columns.split(",") if c.strip()]
    results = correlate_scores(scores_rows, errors_rows, columns)
    out_columns = ["column", "n", "r", "t", "p"]
    if args.out:
        _write_csv(Path(args.out), out_columns, results)
    for row in results:
        print(f"{row['column']}: r={row['r']:.4f} t={row['t']:.4f} p={row['p']:.6f} (n={row['n']})")
    return 0


def cmd_roundtrip(args) -> int:
    grammars = _load_grammar_dir(Path(args.grammars))
    failed = False
    for pattern_id in sorted(grammars):
        failures = roundtrip_grammar(grammars[pattern_id], args.cap)
        if failures:
            failed = True
            print(f"{pattern_id}: FAIL")
            for message in failures:
                print(f"  {message}")
        else:
            print(f"{pattern_id}: PASS")
    return 1 if failed else 0


def cmd_aggregate_ratings(args) -> int:
    records = []
    with open(args.ratings, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), start=2):
            try:
                records.append(
                    RatingRecord(
                        row["doc_id"],
                        int(row["step_index"]),
                        row["question"],
                        int(row["rating"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{args.ratings} line {lineno}: {exc}") from exc
    rows = aggregate_ratings(records)
    columns = ["doc_id"]
    for question in ("S1", "S2", "S3", "S4", "S5"):
        columns += [f"{question}_mean", f"{question}_above3", f"{question}_below3"]
    _write_csv(Path(args.out), columns, rows)
    print(f"aggregated {len(records)} ratings -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sewtree",
        description="Tree-based evaluation of step-by-step assembly instructions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-gold", help="enumerate the gold trees of a grammar")
    p.add_argument("grammar")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_gold)

    p = sub.add_parser("validate-grammar", help="check grammar files")
    p.add_argument("grammars", nargs="+")
    p.set_defaults(func=cmd_validate_grammar)

    p = sub.add_parser("extract", help="extract per-step piece mentions")
    p.add_argument("--doc", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    _add_extractor_args(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("build", help="build the predicted forest for a document")
    p.add_argument("--doc", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    _add_extractor_args(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("score", help="score a corpus against its grammars")
    p.add_argument("--corpus", required=True)
    p.add_argument("--grammars", required=True)
    p.add_argument("--specs", required=True)
    p.add_argument("--refs", help="directory of gold reference documents for BLEU/ROUGE")
    p.add_argument("--out", required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _add_extractor_args(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("permute", help="seeded step permutations of a document")
    p.add_argument("--doc", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_permute)

    p = sub.add_parser("inject-errors", help="seeded mechanical corruption of a document")
    p.add_argument("--doc", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--swap", type=int, default=0, help="adjacent step swaps")
    p.add_argument("--drop", type=int, default=0, help="step deletions")
    p.add_argument("--wrong-piece", type=int, default=0, help="piece-label relabelings")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_inject_errors)

    p = sub.add_parser("correlate", help="Pearson correlation of scores vs errors per step")
    p.add_argument("--scores", required=True)
    p.add_argument("--errors", required=True)
    p.add_argument("--columns", default="tree_f1")
    p.add_argument("--out")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("roundtrip", help="linearize-and-rebuild every gold tree")
    p.add_argument("--grammars", required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("aggregate-ratings", help="summarize step-level ratings per document")
    p.add_argument("--ratings", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_aggregate_ratings)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GrammarError, TreeError, LabelError, AdapterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
