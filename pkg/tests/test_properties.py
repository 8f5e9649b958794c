"""Randomized structural properties over small synthetic grammars.

A quick slice runs here; the full 1,000-grammar sweep lives in the
acceptance suite.
"""

import pytest

from sewtree.experiments import roundtrip_grammar
from sewtree.pipeline import build_forest, extract_document, linearize_gold_tree, placeholder_spec
from sewtree.grammar import enumerate_gold_trees
from sewtree.tree import depth_one_subtrees, glue_subtrees

from helpers import check_grammar_properties, make_random_grammar


@pytest.mark.parametrize("index", range(100))
def test_random_grammar_properties(index):
    check_grammar_properties(make_random_grammar(2024, index))


@pytest.mark.parametrize("index", range(25))
def test_random_grammar_roundtrip(index):
    grammar = make_random_grammar(77, index)
    assert roundtrip_grammar(grammar, cap=50_000) == []


@pytest.mark.parametrize("index", range(25))
def test_build_glue_equivalence_on_random_docs(index):
    grammar = make_random_grammar(55, index)
    spec = placeholder_spec(grammar.pattern_id, grammar.inventory)
    trees = enumerate_gold_trees(grammar, cap=50_000)
    doc = linearize_gold_tree(trees[0], spec)
    if not doc.steps:
        return
    report = build_forest(doc, extract_document(doc, spec), spec)
    glued = glue_subtrees(
        (st for _, st in report.subtree_trace), report.forest.isolated_leaves()
    )
    assert glued == report.forest
    assert report.subtrees() == depth_one_subtrees(trees[0])
