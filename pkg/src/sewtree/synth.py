"""Synthetic patterns, trees, and grammars for experiments and stress tests."""

from __future__ import annotations

import string

from .grammar import GoldGrammar, GrammarRule
from .labels import COPY, LEFT, RIGHT, NodeLabel, PieceLabel
from .rng import SplitMix64
from .tree import AssemblyNode, binary, leaf, subtrees_of, unary


def random_inventory(rng: SplitMix64, n_pieces: int) -> list[PieceLabel]:
    """An inventory of roughly ``n_pieces`` pieces mixing plain pieces,
    mirrored pairs, and numbered copies."""
    pieces: list[PieceLabel] = []
    for letter in string.ascii_uppercase:
        if len(pieces) >= n_pieces:
            break
        kind = rng.randrange(4)
        if kind == 0 and len(pieces) + 2 <= n_pieces:
            pieces.append(PieceLabel(letter, LEFT))
            pieces.append(PieceLabel(letter, RIGHT))
        elif kind == 1 and len(pieces) + 2 <= n_pieces:
            pieces.append(PieceLabel(letter, COPY, 1))
            pieces.append(PieceLabel(letter, COPY, 2))
        else:
            pieces.append(PieceLabel(letter))
    return pieces


def random_tree(
    rng: SplitMix64,
    pieces,
    unary_prob_percent: int = 25,
    chain: bool = False,
) -> AssemblyNode:
    """A random valid assembly tree over the given pieces.

    ``chain=True`` builds a caterpillar (each merge extends one growing
    component), which admits exactly one assembly order; useful for
    permutation experiments where reordered steps must actually break.
    """
    nodes = [leaf(p) for p in pieces]
    rng.shuffle(nodes)

    def maybe_self_attach(node: AssemblyNode) -> AssemblyNode:
        while rng.randrange(100) < unary_prob_percent:
            node = unary(node)
        return node

    while len(nodes) > 1:
        if chain:
            i, j = 0, 1
        else:
            i = rng.randrange(len(nodes))
            j = rng.randrange(len(nodes) - 1)
            if j >= i:
                j += 1
        a = nodes[i]
        b = nodes[j]
        for idx in sorted((i, j), reverse=True):
            del nodes[idx]
        merged = maybe_self_attach(binary(a, b))
        nodes.insert(0, merged)
    return nodes[0]


def grammar_from_trees(pattern_id: str, trees) -> GoldGrammar:
    """The grammar whose rules are exactly the depth-1 subtrees of the trees."""
    rules: dict[GrammarRule, None] = {}
    roots: dict[NodeLabel, None] = {}
    inventory: set[PieceLabel] = set()
    for tree in trees:
        roots[tree.label] = None
        inventory.update(tree.label.pieces)
        for st in subtrees_of(tree):
            rules[GrammarRule(st.parent, st.children)] = None
    return GoldGrammar(pattern_id, frozenset(inventory), tuple(roots), tuple(rules))


def random_grammar(
    rng: SplitMix64,
    pattern_id: str,
    n_pieces: int,
    n_trees: int = 1,
    unary_prob_percent: int = 25,
    chain: bool = False,
) -> GoldGrammar:
    inventory = random_inventory(rng, n_pieces)
    trees = [
        random_tree(rng, inventory, unary_prob_percent, chain=chain) for _ in range(n_trees)
    ]
    return grammar_from_trees(pattern_id, trees)


def grammar_to_text(g: GoldGrammar) -> str:
    """Render back into the grammar file format."""
    lines = [
        f"pattern: {g.pattern_id}",
        "pieces: " + " ".join(str(p) for p in sorted(g.inventory)),
        "roots: " + " ".join(str(r) for r in g.roots),
    ]
    lines.extend(str(rule) for rule in g.rules)
    return "\n".join(lines) + "\n"
