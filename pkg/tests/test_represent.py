from __future__ import annotations

from fractions import Fraction

import pytest

import oracles
from conftest import rule_from_dict
from pathchoice.concavity import induce_choice, is_ordinally_concave, is_ordinally_concave_plus, rationalizes
from pathchoice.core import ChoiceRule, Universe, popcount
from pathchoice.errors import EmptyBaseSet, EpsilonOutOfRange, NotPathIndependent
from pathchoice.fixtures import footnote_rule
from pathchoice.generators import enumerate_rules, sample_pi_rules
from pathchoice.represent import (
    alpha_weights,
    construct,
    default_epsilon,
    e_monotonicity_check,
    e_sequence,
    proof_trace,
    represent,
)
from pathchoice.rules import is_path_independent


@pytest.fixture(scope="module")
def pi_rules3():
    return [r for r in enumerate_rules(3) if oracles.pi(r) is None]


def test_e_sequence_examples(xyz):
    rule = footnote_rule()
    assert e_sequence(rule, xyz.mask("y")).sets == (7, xyz.mask("y,z"), xyz.mask("y"))
    identity = ChoiceRule.identity(xyz)
    for X in range(8):
        assert e_sequence(identity, X).sets == (7, X, X)
        assert e_sequence(rule, 7).sets == (7, 7, 7)


def test_alpha_examples(xyz):
    assert alpha_weights(footnote_rule()).alpha == (9, 3, 1)
    assert alpha_weights(ChoiceRule.identity(xyz)).alpha == (16, 4, 1)
    assert alpha_weights(ChoiceRule.identity(Universe.of_size(1))).alpha == (1,)


def test_footnote_values(xyz):
    rep = construct(footnote_rule())
    eps = rep.epsilon
    assert eps == Fraction(1, 6)
    u = rep.utility
    assert u[xyz.mask("y,z")] == 8
    assert u[xyz.mask("z")] == 4
    assert rep.base[7] == 13
    # C(E^1) = {x} is already inside the full set, so its penalty is 2
    assert rep.penalty[7] == 2 and rep.kstar[7] == 1
    assert u[7] == 13 - 2 * eps == Fraction(38, 3)


def test_identity_values(xyz):
    u = represent(ChoiceRule.identity(xyz))
    assert all(u[X] == 21 * popcount(X) for X in range(8))


def test_refuses_non_pi_and_bad_epsilon(xyz):
    bad = rule_from_dict(Universe(("a", "b")), {"a,b": "a", "a": "", "b": "b"})
    with pytest.raises(NotPathIndependent):
        represent(bad)
    forced = construct(bad, force=True)
    assert forced.forced
    for eps in (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(-1, 7)):
        with pytest.raises(EpsilonOutOfRange):
            represent(footnote_rule(), eps)


def test_matches_independent_construction(pi_rules3):
    for rule in pi_rules3:
        assert alpha_weights(rule).alpha == oracles.alpha(rule)
        rep = construct(rule)
        expected = oracles.represent(rule, rep.epsilon)
        for X in range(8):
            base, tilde = expected[X]
            assert rep.base[X] == base
            assert rep.utility[X] == tilde
            assert e_sequence(rule, X).sets == tuple(oracles.to_mask(E) for E in oracles.e_sequence(rule, oracles.all_sets(3)[X]))


def test_only_if_direction_exhaustive(pi_rules3):
    assert len(pi_rules3) == 35
    for rule in pi_rules3:
        u = represent(rule)
        assert oracles.rationalizes(u, rule) is None
        assert oracles.oc(u) is None
        assert oracles.ocplus(u) is None


def test_epsilon_invariance_and_bounds(pi_rules3):
    for rule in pi_rules3:
        a = construct(rule, Fraction(1, 6))
        b = construct(rule, Fraction(1, 4))
        assert induce_choice(a.utility) == induce_choice(b.utility) == rule
        for X in range(8):
            assert a.base[X] >= a.utility[X] > a.base[X] - 1


def test_v_bound(pi_rules3):
    for rule in pi_rules3:
        full = rule(7)
        for X in range(8):
            for Y in range(8):
                if Y & ~X == 0:
                    assert popcount(rule(X) & full) >= popcount(Y & full)


def test_e_monotonicity(xyz):
    assert e_monotonicity_check(footnote_rule())
    assert e_monotonicity_check(ChoiceRule.identity(xyz))
    for rule in enumerate_rules(2):
        c, o = e_monotonicity_check(rule), oracles.e_monotone(rule)
        assert bool(c) == (o is None)
        if o is not None:
            assert (c.witness.get("X"), c.witness.get("Xprime"), int(c.witness.get("j"))) == o


def test_trace_footnote_two_steps(xyz):
    report = proof_trace(footnote_rule(), xyz.mask("y,z"))
    assert report.passed
    assert report.case1_step == 2
    assert [s.case for s in report.steps] == [2, 1]
    assert report.steps[0].psi_size == 4
    assert report.xstar == xyz.mask("y,z")
    doc = report.to_json()
    assert doc["Xstar"] == "y,z" and doc["case1_step"] == 2


def test_trace_case1_immediately(xyz):
    report = proof_trace(footnote_rule(), xyz.mask("x,y"))
    assert report.case1_step == 1 and report.xstar == xyz.mask("x")
    assert proof_trace(ChoiceRule.identity(xyz), 7).case1_step == 1


def test_trace_rejects_empty_and_non_pi(xyz):
    with pytest.raises(EmptyBaseSet):
        proof_trace(footnote_rule(), 0)
    bad = ChoiceRule(xyz, [0] * 7 + [1])
    assert not is_path_independent(bad)
    with pytest.raises(NotPathIndependent):
        proof_trace(bad, 7)


def test_trace_all_pi_rules(pi_rules3):
    for rule in pi_rules3:
        rep = construct(rule)
        for xbar in range(1, 8):
            report = proof_trace(rule, xbar, rep=rep)
            assert report.passed and 1 <= report.case1_step <= 3


@pytest.mark.parametrize("n", [4, 5])
def test_sampled_round_trip(n):
    for rule in sample_pi_rules(n, 25, seed=2).items:
        u = represent(rule)
        assert induce_choice(u) == rule
        assert rationalizes(u, rule)
        assert is_ordinally_concave(u) and is_ordinally_concave_plus(u)


def test_default_epsilon():
    assert default_epsilon(3) == Fraction(1, 6)
