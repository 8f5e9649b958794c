"""Instruction ingestion: piece extraction, resolution, and forest building.

Walks a document step by step, mapping mentioned pieces to the intermediate
component currently containing them, and folds each step into a growing
forest: two resolved components merge, one resolved component self-attaches,
none leaves the state untouched.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .labels import (
    LabelError,
    NodeLabel,
    PieceLabel,
    parse_piece_label,
)
from .tree import (
    AssemblyNode,
    DepthOneSubtree,
    Forest,
    binary,
    canonical_serialize,
    forest_to_json,
    leaf,
    unary,
)


@dataclass(frozen=True)
class PatternSpec:
    """Piece inventory of one pattern with human-readable piece names."""

    pattern_id: str
    pieces: dict[PieceLabel, str]

    def __post_init__(self) -> None:
        if not self.pieces:
            raise ValueError(f"pattern {self.pattern_id!r} has no pieces")

    @property
    def inventory(self) -> frozenset[PieceLabel]:
        return frozenset(self.pieces)

    def name_of(self, piece: PieceLabel) -> str:
        return self.pieces.get(piece, f"Piece {piece}")

    @classmethod
    def from_json(cls, data: dict) -> "PatternSpec":
        pieces = {parse_piece_label(k): v for k, v in data["pieces"].items()}
        return cls(data["pattern_id"], pieces)

    def to_json(self) -> dict:
        return {
            "pattern_id": self.pattern_id,
            "pieces": {str(k): v for k, v in sorted(self.pieces.items(), key=lambda kv: kv[0].sort_key())},
        }


@dataclass(frozen=True)
class InstructionDoc:
    pattern_id: str
    doc_id: str
    steps: tuple[str, ...]

    @classmethod
    def from_json(cls, data: dict) -> "InstructionDoc":
        return cls(data["pattern_id"], data["doc_id"], tuple(data["steps"]))

    def to_json(self) -> dict:
        return {"pattern_id": self.pattern_id, "doc_id": self.doc_id, "steps": list(self.steps)}


@dataclass(frozen=True)
class StepExtraction:
    """Pieces mentioned in one step, in first-mention order, deduplicated."""

    step_index: int
    mentions: tuple[PieceLabel, ...]
    unknown: tuple[str, ...] = ()
    dropped: tuple[PieceLabel, ...] = ()
    source: str = "rule"


@dataclass(frozen=True)
class Diagnostic:
    step_index: int
    kind: str
    message: str

    def __str__(self) -> str:
        return f"step {self.step_index}: {self.kind}: {self.message}"


@dataclass(frozen=True)
class BuildReport:
    forest: Forest
    subtree_trace: tuple[tuple[int, DepthOneSubtree], ...]
    diagnostics: tuple[Diagnostic, ...]

    def subtrees(self) -> frozenset[DepthOneSubtree]:
        return frozenset(st for _, st in self.subtree_trace)

    def to_json(self) -> dict:
        return {
            "forest": forest_to_json(self.forest),
            "subtree_trace": [[i, str(st)] for i, st in self.subtree_trace],
            "diagnostics": [[d.step_index, d.kind, d.message] for d in self.diagnostics],
        }


# Verbs that mark a step as an attachment; bare stems, matched as word
# prefixes so inflections like "sewn" or "seams" count.
DEFAULT_ATTACHMENT_VERBS = frozenset({"sew", "stitch", "attach", "join", "close", "seam"})

_MENTION_RE = re.compile(r"\(([A-Za-z0-9]+)\)")
_SENTENCE_SPLIT_RE = re.compile(r"[.!?;]")
_WORD_RE = re.compile(r"[a-z]+")


def _has_attachment_verb(sentence: str, verbs: frozenset[str]) -> bool:
    for word in _WORD_RE.findall(sentence.lower()):
        for verb in verbs:
            if word.startswith(verb):
                return True
    return False


def extract_pieces_rule_based(
    step: str,
    spec: PatternSpec,
    step_index: int = 0,
    verbs: frozenset[str] = DEFAULT_ATTACHMENT_VERBS,
) -> StepExtraction:
    """Collect parenthesized piece labels from a step, gated by attachment verbs.

    Mentions only count when some sentence contains both a known piece label
    and an attachment verb; finishing steps (hem, fold, press) mention pieces
    without attaching anything and must contribute no subtree.
    """
    inventory = spec.inventory
    mentions: list[PieceLabel] = []
    unknown: list[str] = []
    gate_open = False
    for sentence in _SENTENCE_SPLIT_RE.split(step):
        sentence_has_mention = False
        for token in _MENTION_RE.findall(sentence):
            try:
                piece = parse_piece_label(token)
            except LabelError:
                continue  # parenthetical prose, not a label
            if piece in inventory:
                sentence_has_mention = True
                if piece not in mentions:
                    mentions.append(piece)
            elif token not in unknown:
                unknown.append(token)
        if sentence_has_mention and _has_attachment_verb(sentence, verbs):
            gate_open = True
    if gate_open:
        return StepExtraction(step_index, tuple(mentions), tuple(unknown))
    return StepExtraction(step_index, (), tuple(unknown), dropped=tuple(mentions))


def extract_document(doc: InstructionDoc, spec: PatternSpec, extractor=None) -> list[StepExtraction]:
    """Run an extractor over every step; defaults to the rule-based one."""
    if extractor is None:
        extractor = extract_pieces_rule_based
    return [extractor(step, spec, step_index=i) for i, step in enumerate(doc.steps)]


def extractions_to_json(doc: InstructionDoc, extractions: list[StepExtraction]) -> dict:
    return {
        "doc_id": doc.doc_id,
        "pieces_per_step": [[str(p) for p in x.mentions] for x in extractions],
    }


def extractions_from_json(data: dict) -> list[StepExtraction]:
    return [
        StepExtraction(i, tuple(parse_piece_label(p) for p in pieces))
        for i, pieces in enumerate(data["pieces_per_step"])
    ]


class AssemblyState:
    """Mutable build state: which component currently contains each piece."""

    def __init__(self) -> None:
        self.component_of: dict[PieceLabel, NodeLabel] = {}
        self.built: dict[NodeLabel, AssemblyNode] = {}

    def node_for(self, label: NodeLabel) -> AssemblyNode:
        node = self.built.get(label)
        if node is None:
            if len(label.pieces) != 1 or label.self_attach != 0:
                raise ValueError(f"component {label} was never built")
            node = leaf(label.pieces[0])
            self.built[label] = node
        return node

    def current_components(self) -> list[NodeLabel]:
        return list(dict.fromkeys(self.component_of.values()))


def resolve_components(x: StepExtraction, state: AssemblyState) -> list[NodeLabel]:
    """Map each mention to its containing component, then deduplicate."""
    resolved: list[NodeLabel] = []
    for piece in x.mentions:
        label = state.component_of.get(piece, NodeLabel((piece,), 0))
        if label not in resolved:
            resolved.append(label)
    return resolved


def apply_step(
    state: AssemblyState, resolved: list[NodeLabel], step_index: int
) -> tuple[list[DepthOneSubtree], list[Diagnostic]]:
    """Fold one step's resolved components into the state.

    One component self-attaches, two merge, three or more left-fold into a
    chain of merges with a diagnostic.  Mutates ``state``.
    """
    subtrees: list[DepthOneSubtree] = []
    diagnostics: list[Diagnostic] = []
    if not resolved:
        return subtrees, diagnostics

    def register(node: AssemblyNode) -> None:
        state.built[node.label] = node
        for piece in node.label.pieces:
            state.component_of[piece] = node.label

    if len(resolved) == 1:
        child = state.node_for(resolved[0])
        node = unary(child)
        register(node)
        subtrees.append(DepthOneSubtree(node.label, (child.label,)))
        return subtrees, diagnostics

    if len(resolved) > 2:
        diagnostics.append(
            Diagnostic(
                step_index,
                "multi-component",
                f"{len(resolved)} components in one step, folding left to right",
            )
        )
    acc = state.node_for(resolved[0])
    for label in resolved[1:]:
        other = state.node_for(label)
        node = binary(acc, other)
        subtrees.append(DepthOneSubtree(node.label, tuple(c.label for c in node.children)))
        acc = node
    register(acc)
    return subtrees, diagnostics


def build_forest(
    doc: InstructionDoc, extractions: list[StepExtraction], spec: PatternSpec
) -> BuildReport:
    """Thread the state through all steps and assemble the predicted forest."""
    if len(extractions) != len(doc.steps):
        raise ValueError("one extraction per step required")
    state = AssemblyState()
    trace: list[tuple[int, DepthOneSubtree]] = []
    diagnostics: list[Diagnostic] = []
    for x in extractions:
        for token in x.unknown:
            diagnostics.append(
                Diagnostic(x.step_index, "unknown-label", f"({token}) is not in the inventory")
            )
        if x.dropped:
            names = ", ".join(str(p) for p in x.dropped)
            diagnostics.append(
                Diagnostic(x.step_index, "no-attachment-verb", f"ignored mentions [{names}]")
            )
        if x.source == "fallback":
            diagnostics.append(
                Diagnostic(x.step_index, "adapter-fallback", "adapter failed, used rule-based extraction")
            )
        resolved = resolve_components(x, state)
        subtrees, step_diags = apply_step(state, resolved, x.step_index)
        trace.extend((x.step_index, st) for st in subtrees)
        diagnostics.extend(step_diags)

    roots = [state.built[label] for label in state.current_components()]
    touched = set(state.component_of)
    roots.extend(leaf(p) for p in sorted(spec.inventory) if p not in touched)
    roots.sort(key=canonical_serialize)
    return BuildReport(Forest(tuple(roots)), tuple(trace), tuple(diagnostics))


def linearize_gold_tree(tree: AssemblyNode, spec: PatternSpec) -> InstructionDoc:
    """Emit templated steps, bottom-up, that rebuild exactly this tree.

    Each component is referred to by the name and label of its first piece;
    resolution maps that piece back to the component while rebuilding.
    """
    steps: list[str] = []

    def mention(node: AssemblyNode) -> str:
        piece = node.label.pieces[0]
        name = spec.name_of(piece)
        if node.is_leaf():
            return f"{name} ({piece})"
        return f"component containing the {name} ({piece})"

    def emit(node: AssemblyNode) -> None:
        for child in node.children:
            emit(child)
        if len(node.children) == 2:
            a, b = node.children
            steps.append(f"Sew the {mention(a)} to the {mention(b)}.")
        elif len(node.children) == 1:
            steps.append(f"Sew the {mention(node.children[0])} to itself.")

    emit(tree)
    doc_id = f"{spec.pattern_id}-{canonical_serialize(tree).count('(')}steps"
    return InstructionDoc(spec.pattern_id, doc_id, tuple(steps))


def placeholder_spec(pattern_id: str, inventory) -> PatternSpec:
    """Spec with generic piece names, for grammars without a pattern spec."""
    return PatternSpec(pattern_id, {p: f"Piece {p}" for p in sorted(inventory)})


def load_doc(path) -> InstructionDoc:
    with open(path, encoding="utf-8") as fh:
        return InstructionDoc.from_json(json.load(fh))


def load_spec(path) -> PatternSpec:
    with open(path, encoding="utf-8") as fh:
        return PatternSpec.from_json(json.load(fh))
