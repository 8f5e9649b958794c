"""Experiment harness: scoring, permutation, error injection, correlation,
round-trips, and rating aggregation."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .grammar import DEFAULT_CAP, GoldGrammar, enumerate_gold_trees
from .labels import LabelError, PieceLabel, parse_piece_label
from .metrics import (
    DEFAULT_METRIC_CONFIG,
    MetricConfig,
    ScoreBreakdown,
    bleu,
    pearson,
    rouge_l,
    tree_score,
)
from .pipeline import (
    BuildReport,
    InstructionDoc,
    PatternSpec,
    build_forest,
    extract_document,
    linearize_gold_tree,
    placeholder_spec,
)
from .rng import SplitMix64, derive_seed
from .tree import canonical_serialize, depth_one_subtrees


def join_steps(doc: InstructionDoc) -> str:
    return "\n".join(doc.steps)


def score_document(
    doc: InstructionDoc,
    gold_trees,
    spec: PatternSpec,
    reference: InstructionDoc | None = None,
    extractor=None,
    cfg: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> tuple[dict, BuildReport]:
    """One scores-CSV row (as a dict) plus the underlying build report."""
    if not doc.steps:
        raise ValueError(f"document {doc.doc_id} has no steps")
    extractions = extract_document(doc, spec, extractor)
    report = build_forest(doc, extractions, spec)
    breakdown = tree_score(report.forest, gold_trees)
    row = {
        "doc_id": doc.doc_id,
        "pattern_id": doc.pattern_id,
        "n_steps": len(doc.steps),
        "tree_f1": breakdown.f1,
        "tree_precision": breakdown.precision,
        "tree_recall": breakdown.recall,
        "best_gold_index": breakdown.best_gold_index,
        "bleu": bleu(join_steps(doc), join_steps(reference), cfg) if reference else None,
        "rouge_l": rouge_l(join_steps(doc), join_steps(reference), cfg) if reference else None,
        "diagnostics_count": len(report.diagnostics),
        "bert_score": None,  # merged externally by doc_id when available
    }
    return row, report


SCORE_COLUMNS = [
    "doc_id",
    "pattern_id",
    "n_steps",
    "tree_f1",
    "tree_precision",
    "tree_recall",
    "best_gold_index",
    "bleu",
    "rouge_l",
    "diagnostics_count",
    "bert_score",
]


def permute_doc(doc: InstructionDoc, seed: int, k: int) -> list[InstructionDoc]:
    """``k`` seeded step permutations; each draw has its own derived stream."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out: list[InstructionDoc] = []
    for index in range(1, k + 1):
        rng = SplitMix64(derive_seed(seed, doc.doc_id, f"perm{index}"))
        steps = list(doc.steps)
        rng.shuffle(steps)
        out.append(InstructionDoc(doc.pattern_id, f"{doc.doc_id}-perm{index}", tuple(steps)))
    return out


@dataclass(frozen=True)
class ErrorInjectionPlan:
    swap_adjacent: int = 0
    drop_step: int = 0
    wrong_piece: int = 0

    def __post_init__(self) -> None:
        if min(self.swap_adjacent, self.drop_step, self.wrong_piece) < 0:
            raise ValueError("error counts must be non-negative")

    @property
    def total(self) -> int:
        return self.swap_adjacent + self.drop_step + self.wrong_piece


_MENTION_RE = re.compile(r"\(([A-Za-z0-9]+)\)")


def inject_errors(
    doc: InstructionDoc, plan: ErrorInjectionPlan, seed: int, spec: PatternSpec
) -> tuple[InstructionDoc, int]:
    """Corrupt a document with seeded mechanical edits, in kind order:
    adjacent swaps, step drops, then piece relabelings.  Returns the new
    document and exactly how many edits were applied."""
    rng = SplitMix64(derive_seed(seed, doc.doc_id, "inject"))
    steps = list(doc.steps)
    applied = 0

    for _ in range(plan.swap_adjacent):
        if len(steps) < 2:
            raise ValueError(f"{doc.doc_id}: cannot swap steps of a {len(steps)}-step document")
        i = rng.randrange(len(steps) - 1)
        steps[i], steps[i + 1] = steps[i + 1], steps[i]
        applied += 1

    for _ in range(plan.drop_step):
        if len(steps) < 2:
            raise ValueError(f"{doc.doc_id}: cannot drop a step and keep the document non-empty")
        del steps[rng.randrange(len(steps))]
        applied += 1

    inventory = sorted(spec.inventory)
    for _ in range(plan.wrong_piece):
        sites: list[tuple[int, int, int, PieceLabel]] = []
        for step_index, step in enumerate(steps):
            for m in _MENTION_RE.finditer(step):
                try:
                    piece = parse_piece_label(m.group(1))
                except LabelError:
                    continue
                if piece in spec.inventory:
                    sites.append((step_index, m.start(), m.end(), piece))
        if not sites:
            raise ValueError(f"{doc.doc_id}: no piece mentions left to relabel")
        step_index, start, end, piece = sites[rng.randrange(len(sites))]
        others = [p for p in inventory if p != piece]
        if not others:
            raise ValueError(f"{doc.doc_id}: inventory has no alternative piece")
        replacement = others[rng.randrange(len(others))]
        step = steps[step_index]
        steps[step_index] = f"{step[:start]}({replacement}){step[end:]}"
        applied += 1

    return InstructionDoc(doc.pattern_id, doc.doc_id, tuple(steps)), applied


def roundtrip_grammar(
    grammar: GoldGrammar, cap: int = DEFAULT_CAP, mutate_steps=None
) -> list[str]:
    """Linearize every gold tree and rebuild it; returns failure messages.

    ``mutate_steps`` is a test hook that corrupts the linearized steps before
    rebuilding (negative control).
    """
    failures: list[str] = []
    gold_trees = enumerate_gold_trees(grammar, cap)
    spec = placeholder_spec(grammar.pattern_id, grammar.inventory)
    for index, tree in enumerate(gold_trees):
        doc = linearize_gold_tree(tree, spec)
        doc = InstructionDoc(doc.pattern_id, f"{doc.doc_id}-{index}", doc.steps)
        steps = list(doc.steps)
        if mutate_steps is not None:
            steps = mutate_steps(steps)
            doc = InstructionDoc(doc.pattern_id, doc.doc_id, tuple(steps))
        if not doc.steps:
            # single-leaf gold tree linearizes to zero steps; nothing to check
            continue
        extractions = extract_document(doc, spec)
        report = build_forest(doc, extractions, spec)
        breakdown = tree_score(report.forest, gold_trees)
        if breakdown.f1 != 1.0:
            failures.append(
                f"{grammar.pattern_id} tree {index} ({canonical_serialize(tree)}): "
                f"round-trip F1 {breakdown.f1:.4f}"
            )
        elif report.subtrees() != depth_one_subtrees(tree):
            failures.append(
                f"{grammar.pattern_id} tree {index}: rebuilt subtree set differs"
            )
    return failures


@dataclass(frozen=True)
class RatingRecord:
    doc_id: str
    step_index: int
    question: str
    rating: int

    def __post_init__(self) -> None:
        if self.question not in RATING_QUESTIONS:
            raise ValueError(f"unknown question {self.question!r}")
        if self.rating not in (1, 2, 3, 4, 5):
            raise ValueError(f"rating must be 1..5, got {self.rating}")


RATING_QUESTIONS = ("S1", "S2", "S3", "S4", "S5")


def aggregate_ratings(records) -> list[dict]:
    """Per document and question: mean rating, fraction above 3, fraction
    below 3 (three summaries for each of the five step-level questions)."""
    grouped: dict[str, dict[str, list[int]]] = {}
    for rec in records:
        grouped.setdefault(rec.doc_id, {}).setdefault(rec.question, []).append(rec.rating)
    rows: list[dict] = []
    for doc_id in sorted(grouped):
        row: dict = {"doc_id": doc_id}
        for question in RATING_QUESTIONS:
            ratings = grouped[doc_id].get(question, [])
            if ratings:
                row[f"{question}_mean"] = sum(ratings) / len(ratings)
                row[f"{question}_above3"] = sum(1 for r in ratings if r > 3) / len(ratings)
                row[f"{question}_below3"] = sum(1 for r in ratings if r < 3) / len(ratings)
            else:
                row[f"{question}_mean"] = None
                row[f"{question}_above3"] = None
                row[f"{question}_below3"] = None
        rows.append(row)
    return rows


def correlate_scores(scores_rows, errors_rows, columns) -> list[dict]:
    """Pearson correlation of score columns against errors per step.

    ``scores_rows`` are scores-CSV rows; ``errors_rows`` carry ``doc_id`` and
    ``errors``; the join key is ``doc_id``.
    """
    errors_by_doc = {row["doc_id"]: float(row["errors"]) for row in errors_rows}
    joined: list[tuple[dict, float]] = []
    for row in scores_rows:
        if row["doc_id"] in errors_by_doc:
            rate = errors_by_doc[row["doc_id"]] / float(row["n_steps"])
            joined.append((row, rate))
    if len(joined) < 3:
        raise ValueError(f"only {len(joined)} documents joined; need at least 3")
    out: list[dict] = []
    for column in columns:
        values = []
        for row, _ in joined:
            if row.get(column) in (None, ""):
                raise ValueError(f"column {column!r} missing for {row['doc_id']}")
            values.append(float(row[column]))
        rates = [rate for _, rate in joined]
        r, t, p = pearson(values, rates)
        out.append({"column": column, "n": len(joined), "r": r, "t": t, "p": p})
    return out
