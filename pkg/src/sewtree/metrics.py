"""Scoring: depth-1 subtree F1 against gold trees, plus BLEU / ROUGE-L /
Pearson utilities for baseline comparison and analysis."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from scipy.special import stdtr

from .tree import AssemblyNode, DepthOneSubtree, Forest, depth_one_subtrees

BLEU_EPSILON = 1e-9


@dataclass(frozen=True)
class MetricConfig:
    bleu_max_n: int = 4
    bleu_smoothing: bool = True
    rouge_beta: float = 1.0

    def __post_init__(self) -> None:
        if self.bleu_max_n < 1:
            raise ValueError("bleu_max_n must be >= 1")
        if self.rouge_beta <= 0:
            raise ValueError("rouge_beta must be positive")


DEFAULT_METRIC_CONFIG = MetricConfig()


@dataclass(frozen=True)
class ScoreBreakdown:
    precision: float
    recall: float
    f1: float
    best_gold_index: int | None = None
    matched: frozenset[DepthOneSubtree] = frozenset()


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def subtree_f1(predicted: Forest | AssemblyNode, gold: AssemblyNode) -> ScoreBreakdown:
    """Exact-match F1 over the depth-1 subtree sets of prediction and gold."""
    pred = depth_one_subtrees(predicted)
    gold_set = depth_one_subtrees(gold)
    matched = pred & gold_set
    precision = len(matched) / len(pred) if pred else 0.0
    recall = len(matched) / len(gold_set) if gold_set else 0.0
    return ScoreBreakdown(precision, recall, _f1(precision, recall), None, frozenset(matched))


def tree_score(predicted: Forest | AssemblyNode, gold_set) -> ScoreBreakdown:
    """The best subtree F1 over all gold trees; ties go to the lowest index."""
    gold_list = list(gold_set)
    if not gold_list:
        raise ValueError("gold set must be non-empty")
    best: ScoreBreakdown | None = None
    for index, gold in enumerate(gold_list):
        breakdown = subtree_f1(predicted, gold)
        if best is None or breakdown.f1 > best.f1:
            best = ScoreBreakdown(
                breakdown.precision, breakdown.recall, breakdown.f1, index, breakdown.matched
            )
    return best


_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str) -> list[str]:
    """Lowercase, whitespace-split, punctuation as separate tokens."""
    return _TOKEN_RE.findall(text.lower())


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def ngram_precisions(candidate: str, reference: str, max_n: int = 4) -> list[float]:
    """Modified (clipped) n-gram precisions for n = 1..max_n, unsmoothed."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    precisions: list[float] = []
    for n in range(1, max_n + 1):
        cand_grams = _ngrams(cand, n)
        total = sum(cand_grams.values())
        if total == 0:
            precisions.append(0.0)
            continue
        ref_grams = _ngrams(ref, n)
        clipped = sum(min(count, ref_grams[gram]) for gram, count in cand_grams.items())
        precisions.append(clipped / total)
    return precisions


def bleu(candidate: str, reference: str, cfg: MetricConfig = DEFAULT_METRIC_CONFIG) -> float:
    """Document-level BLEU: geometric mean of clipped n-gram precisions times
    the brevity penalty; zero counts floored at epsilon when smoothing is on."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand:
        return 0.0
    precisions = ngram_precisions(candidate, reference, cfg.bleu_max_n)
    log_sum = 0.0
    for p in precisions:
        if p == 0.0:
            if not cfg.bleu_smoothing:
                return 0.0
            p = BLEU_EPSILON
        log_sum += math.log(p)
    geo_mean = math.exp(log_sum / cfg.bleu_max_n)
    brevity = 1.0 if len(cand) >= len(ref) else math.exp(1 - len(ref) / len(cand))
    return brevity * geo_mean


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, reference: str, cfg: MetricConfig = DEFAULT_METRIC_CONFIG) -> float:
    """Token-level LCS F-measure with configurable beta."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    beta_sq = cfg.rouge_beta**2
    return (1 + beta_sq) * precision * recall / (recall + beta_sq * precision)


def pearson(xs, ys) -> tuple[float, float, float]:
    """Sample Pearson correlation with a t statistic and approximate
    two-sided p from the t distribution (n - 2 degrees of freedom)."""
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 3:
        raise ValueError("need at least 3 paired observations")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    syy = sum((y - mean_y) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        raise ValueError("correlation undefined for a constant input")
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    if abs(r) == 1.0:
        return r, math.inf if r > 0 else -math.inf, 0.0
    t = r * math.sqrt((n - 2) / (1 - r * r))
    p = 2 * float(stdtr(n - 2, -abs(t)))
    return r, t, p
