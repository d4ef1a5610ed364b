"""Bundled rule files: the three-contract rule that is path independent but
violates LAD (``footnote.json``) and the identity rule on three contracts."""

from __future__ import annotations

from importlib import resources

from .core import ChoiceRule, Universe, parse_rule, serialize_rule

FIXTURES = ("footnote.json", "identity3.json")


def _build_footnote() -> ChoiceRule:
    U = Universe(("x", "y", "z"))
    x = U.mask("x")
    return ChoiceRule.from_function(U, lambda X: x if X & x else X)


def fixture_bytes(name: str) -> bytes:
    return resources.files("pathchoice.data").joinpath(name).read_bytes()


def footnote_rule() -> ChoiceRule:
    """C(X) = {x} when x ∈ X, otherwise C(X) = X, on {x, y, z}."""
    return parse_rule(fixture_bytes("footnote.json"))


def identity3() -> ChoiceRule:
    return parse_rule(fixture_bytes("identity3.json"))


def regenerate(directory) -> None:
    """Rewrite the bundled files from their definitions."""
    from pathlib import Path

    d = Path(directory)
    (d / "footnote.json").write_bytes(serialize_rule(_build_footnote()))
    (d / "identity3.json").write_bytes(serialize_rule(ChoiceRule.identity(Universe(("x", "y", "z")))))
