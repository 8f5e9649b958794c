import json
from pathlib import Path

import pytest

from sewtree.grammar import parse_grammar
from sewtree.pipeline import InstructionDoc, PatternSpec

FIXTURES = Path(__file__).parent / "fixtures"

GRAMMAR_NAMES = ["skirt", "pants_a", "pants_b", "pants_combined", "shirt", "jumpsuit"]


def load_grammar(name: str):
    return parse_grammar((FIXTURES / "grammars" / f"{name}.grammar").read_text())


@pytest.fixture(scope="session")
def grammars():
    return {name: load_grammar(name) for name in GRAMMAR_NAMES}


@pytest.fixture(scope="session")
def skirt_grammar(grammars):
    return grammars["skirt"]


@pytest.fixture(scope="session")
def skirt_spec():
    data = json.loads((FIXTURES / "specs" / "skirt.json").read_text())
    return PatternSpec.from_json(data)


@pytest.fixture(scope="session")
def skirt_doc():
    data = json.loads((FIXTURES / "docs" / "skirt-demo.json").read_text())
    return InstructionDoc.from_json(data)
