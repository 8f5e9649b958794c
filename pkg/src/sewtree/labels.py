"""Piece labels and canonical node labels for garment assembly trees.

A piece label is a single capital letter, optionally suffixed with ``l``/``r``
for a mirrored pair or with a positive integer for unmirrored copies
(``A``, ``Bl``, ``Br``, ``X3``).  A node label is a strictly sorted
concatenation of distinct piece labels plus a self-attachment counter,
displayed as a ``_n`` suffix and omitted when the counter is zero
(``ABlBr``, ``AB_1``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering


class LabelError(ValueError):
    """A piece or node label could not be parsed or combined."""


PLAIN = "plain"
LEFT = "left"
RIGHT = "right"
COPY = "copy"

_VARIANT_RANK = {PLAIN: 0, LEFT: 1, RIGHT: 2, COPY: 3}
_VARIANT_SUFFIX = {PLAIN: "", LEFT: "l", RIGHT: "r"}

_PIECE_RE = re.compile(r"([A-Z])(l|r|[0-9]+)?")


@total_ordering
@dataclass(frozen=True)
class PieceLabel:
    """One pattern piece: a base letter plus a mirror/copy variant."""

    base: str
    variant: str = PLAIN
    copy_index: int = 0

    def __post_init__(self) -> None:
        if len(self.base) != 1 or not "A" <= self.base <= "Z":
            raise LabelError(f"piece base must be one letter A-Z, got {self.base!r}")
        if self.variant not in _VARIANT_RANK:
            raise LabelError(f"unknown piece variant {self.variant!r}")
        if self.variant == COPY:
            if self.copy_index < 1:
                raise LabelError(f"copy index must be >= 1, got {self.copy_index}")
        elif self.copy_index != 0:
            raise LabelError("copy_index is only meaningful for the copy variant")

    def sort_key(self) -> tuple[str, int, int]:
        # Base letter first; l/r and copy numbers only break ties within a base.
        return (self.base, _VARIANT_RANK[self.variant], self.copy_index)

    def __lt__(self, other: "PieceLabel") -> bool:
        if not isinstance(other, PieceLabel):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if self.variant == COPY:
            return f"{self.base}{self.copy_index}"
        return f"{self.base}{_VARIANT_SUFFIX[self.variant]}"


def parse_piece_label(text: str) -> PieceLabel:
    """Parse one piece label; inverse of :func:`str` on :class:`PieceLabel`."""
    if not text:
        raise LabelError("empty piece label")
    m = _PIECE_RE.fullmatch(text)
    if m is None:
        raise LabelError(f"malformed piece label {text!r}")
    base, suffix = m.group(1), m.group(2)
    if suffix is None:
        return PieceLabel(base)
    if suffix == "l":
        return PieceLabel(base, LEFT)
    if suffix == "r":
        return PieceLabel(base, RIGHT)
    index = int(suffix)
    if index < 1:
        raise LabelError(f"copy index must be >= 1 in {text!r}")
    return PieceLabel(base, COPY, index)


def compare_piece_labels(a: PieceLabel, b: PieceLabel) -> int:
    """Total order over pieces: -1, 0, or 1."""
    ka, kb = a.sort_key(), b.sort_key()
    return (ka > kb) - (ka < kb)


@dataclass(frozen=True)
class NodeLabel:
    """A component label: sorted distinct pieces plus a self-attachment counter."""

    pieces: tuple[PieceLabel, ...]
    self_attach: int = 0

    def __post_init__(self) -> None:
        if not self.pieces:
            raise LabelError("node label needs at least one piece")
        if self.self_attach < 0:
            raise LabelError(f"negative self-attachment counter {self.self_attach}")
        for prev, cur in zip(self.pieces, self.pieces[1:]):
            if not prev < cur:
                raise LabelError(
                    f"pieces must be strictly sorted, got {prev} before {cur}"
                )

    @property
    def piece_set(self) -> frozenset[PieceLabel]:
        return frozenset(self.pieces)

    def __str__(self) -> str:
        return format_node_label(self)


def format_node_label(label: NodeLabel) -> str:
    body = "".join(str(p) for p in label.pieces)
    if label.self_attach:
        return f"{body}_{label.self_attach}"
    return body


def parse_node_label(text: str) -> NodeLabel:
    """Parse a concatenated node label such as ``ABlBr`` or ``BlBrFlFr_2``."""
    if not text:
        raise LabelError("empty node label")
    body, sep, counter_text = text.partition("_")
    if sep and not counter_text.isdigit():
        raise LabelError(f"malformed self-attachment counter in {text!r}")
    counter = int(counter_text) if sep else 0

    pieces: list[PieceLabel] = []
    pos = 0
    while pos < len(body):
        m = _PIECE_RE.match(body, pos)
        if m is None:
            raise LabelError(f"malformed node label {text!r} at position {pos}")
        pieces.append(parse_piece_label(m.group(0)))
        pos = m.end()
    if not pieces:
        raise LabelError(f"node label {text!r} has no pieces")
    try:
        return NodeLabel(tuple(pieces), counter)
    except LabelError as exc:
        raise LabelError(f"{text!r}: {exc}") from exc


def merge_labels(a: NodeLabel, b: NodeLabel) -> NodeLabel:
    """Label of the component formed by attaching two disjoint components.

    The pieces are the sorted union; the counter is the larger of the two.
    """
    overlap = a.piece_set & b.piece_set
    if overlap:
        shared = ", ".join(sorted(str(p) for p in overlap))
        raise LabelError(f"cannot merge {a} and {b}: shared pieces {shared}")
    pieces = tuple(sorted(a.pieces + b.pieces))
    return NodeLabel(pieces, max(a.self_attach, b.self_attach))


def bump_self_attach(a: NodeLabel) -> NodeLabel:
    """Label after sewing the component to itself once."""
    return NodeLabel(a.pieces, a.self_attach + 1)
