from __future__ import annotations

import itertools
from pathlib import Path

import pytest
from hypothesis import strategies as st

from relfix.relations import Carrier, FiniteRelation, SelfMap

FIXTURES = Path(__file__).parent / "fixtures"


@st.composite
def relations(draw, min_n: int = 1, max_n: int = 4):
    n = draw(st.integers(min_n, max_n))
    mask = draw(st.integers(0, 2 ** (n * n) - 1))
    return FiniteRelation(Carrier.of_size(n), mask)


@st.composite
def relation_and_map(draw, min_n: int = 1, max_n: int = 4):
    R = draw(relations(min_n, max_n))
    img = draw(st.lists(st.integers(0, R.n - 1), min_size=R.n, max_size=R.n))
    return R, SelfMap(R.carrier, tuple(img))


def all_relations(n: int):
    carrier = Carrier.of_size(n)
    return [FiniteRelation(carrier, m) for m in range(2 ** (n * n))]


def all_maps(n: int):
    carrier = Carrier.of_size(n)
    return [SelfMap(carrier, img) for img in itertools.product(range(n), repeat=n)]


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


ACCEPTANCE_LINES: list[str] = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
