from __future__ import annotations

from pathlib import Path

import pytest

from stepmark.kb import KnowledgeBase, load_kb

FIXTURE_KB = Path(__file__).resolve().parent.parent / "fixtures" / "kb.json"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def kb() -> KnowledgeBase:
    return load_kb(FIXTURE_KB)


@pytest.fixture(scope="session")
def q1(kb):
    return kb.question("Q1")


@pytest.fixture(scope="session")
def q2(kb):
    return kb.question("Q2")
