from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pathchoice.core import ChoiceRule, Universe  # noqa: E402


@pytest.fixture
def xyz():
    return Universe(("x", "y", "z"))


def rule_from_dict(universe: Universe, mapping: dict[str, str]) -> ChoiceRule:
    """Rule from a partial ``{"x,y": "x"}`` mapping; unspecified sets choose themselves."""
    table = list(range(universe.size))
    for key, chosen in mapping.items():
        table[universe.mask(key)] = universe.mask(chosen)
    return ChoiceRule(universe, table)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
