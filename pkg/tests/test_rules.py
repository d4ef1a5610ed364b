from __future__ import annotations

import pytest

import oracles
from conftest import rule_from_dict
from pathchoice.core import ChoiceRule, Universe
from pathchoice.fixtures import footnote_rule
from pathchoice.generators import enumerate_rules, random_rules
from pathchoice.rules import (
    check_rule,
    contains_full_choice,
    is_path_independent,
    satisfies_irc,
    satisfies_lad,
    satisfies_substitutes,
)


@pytest.fixture
def ab_rule():
    U = Universe(("a", "b"))
    return rule_from_dict(U, {"a,b": "a", "a": "", "b": "b"})


def test_identity_satisfies_everything(xyz):
    rule = ChoiceRule.identity(xyz)
    for check in (is_path_independent, satisfies_substitutes, satisfies_irc, satisfies_lad):
        assert check(rule)


def test_footnote_rule(xyz):
    rule = footnote_rule()
    assert is_path_independent(rule)
    assert satisfies_substitutes(rule)
    assert satisfies_irc(rule)
    lad = satisfies_lad(rule, definitional=True)
    assert not lad
    assert lad.witness.rendered() == {"X": "x,y,z", "Xprime": "y,z"}
    cover = satisfies_lad(rule)
    assert cover.witness.rendered() == {"Xprime": "y,z", "x": "x", "X": "x,y,z"}


def test_pi_witness(ab_rule):
    check = is_path_independent(ab_rule)
    assert not check
    assert check.witness.rendered() == {"X": "a", "Xprime": "b"}
    assert "C({a,b}) = {a}" in check.witness.detail


def test_substitutes_witness(ab_rule):
    check = satisfies_substitutes(ab_rule)
    assert check.witness.rendered() == {"X": "a", "Xprime": "a,b"}


def test_irc_witness(ab_rule):
    check = satisfies_irc(ab_rule)
    assert check.witness.rendered() == {"X": "a", "Xprime": "a,b"}


def test_empty_choice_satisfies_lad(xyz):
    rule = ChoiceRule(xyz, [0] * 8)
    assert satisfies_lad(rule)
    assert satisfies_lad(rule, definitional=True)


def test_witness_json_shape(ab_rule):
    doc = is_path_independent(ab_rule).to_json()
    assert doc["property"] == "pi" and doc["holds"] is False
    assert set(doc) == {"property", "holds", "witness", "detail"}
    assert check_rule(ab_rule, "pi").to_json(with_witness=False) == {"property": "pi", "holds": False}


@pytest.mark.parametrize("n", [1, 2])
def test_checkers_match_oracles_exhaustively(n):
    for rule in enumerate_rules(n):
        for check, oracle in ((is_path_independent, oracles.pi), (satisfies_substitutes, oracles.substitutes), (satisfies_irc, oracles.irc)):
            c = check(rule)
            o = oracle(rule)
            assert bool(c) == (o is None)
            if o is not None:
                assert (c.witness.get("X"), c.witness.get("Xprime")) == o


def _assert_same(rule):
    for check, oracle in ((is_path_independent, oracles.pi), (satisfies_substitutes, oracles.substitutes), (satisfies_irc, oracles.irc)):
        c, o = check(rule), oracle(rule)
        assert bool(c) == (o is None)
        if o is not None:
            assert (c.witness.get("X"), c.witness.get("Xprime")) == o
    d, o = satisfies_lad(rule, definitional=True), oracles.lad(rule)
    assert bool(d) == (o is None)
    if o is not None:
        assert (d.witness.get("X"), d.witness.get("Xprime")) == o
    c, o = satisfies_lad(rule), oracles.lad_cover(rule)
    assert bool(c) == (o is None)
    if o is not None:
        assert (c.witness.get("Xprime"), c.witness.get("x")) == (o[0], rule.universe.labels[o[1]])


def test_random_rules_match_oracles():
    for n in (3, 4):
        for rule in random_rules(n, 60, seed=11):
            _assert_same(rule)


def test_witnesses_on_pi_rules_match_oracles():
    for rule in enumerate_rules(3):
        if oracles.pi(rule) is None:
            _assert_same(rule)


def test_pi_implies_full_choice_containment():
    count = 0
    for rule in enumerate_rules(3):
        if is_path_independent(rule):
            count += 1
            assert contains_full_choice(rule)
            assert oracles.full_choice(rule)
    assert count == 35


def test_checkers_are_pure():
    for rule in random_rules(4, 5, seed=3):
        assert is_path_independent(rule) == is_path_independent(rule)
        assert satisfies_lad(rule) == satisfies_lad(rule)
