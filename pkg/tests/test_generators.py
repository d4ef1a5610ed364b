from __future__ import annotations

import pytest

import oracles
from pathchoice.concavity import induce_choice, is_mnatural_concave, is_ordinally_concave, is_size_restricted_concave, is_submodular
from pathchoice.core import ChoiceRule, Universe, popcount, serialize_rule, serialize_utility
from pathchoice.errors import BadPriority, BadQuota, BudgetExhausted, InputError, NotLaminar, TooLarge
from pathchoice.generators import (
    SEARCH_TARGETS,
    LaminarCell,
    enumerate_rules,
    laminar_concave_valuation,
    responsive_rule,
    rule_count,
    sample_laminar_valuations,
    sample_ordinal_tables,
    sample_pi_rules,
    search_counterexample,
)
from pathchoice.rules import is_path_independent, satisfies_lad

ABC = Universe(("a", "b", "c"))


def brute_count(n):
    count = 1
    for X in range(1 << n):
        count *= 2 ** popcount(X)
    return count


@pytest.mark.parametrize("n, expected", [(1, 2), (2, 16), (3, 4096)])
def test_enumeration_counts(n, expected):
    rules = list(enumerate_rules(n))
    assert len(rules) == expected == rule_count(n) == brute_count(n)
    assert len({serialize_rule(r) for r in rules}) == expected


def test_enumeration_limited():
    with pytest.raises(TooLarge):
        next(enumerate_rules(4))


def test_responsive_examples():
    assert responsive_rule(ABC, ["a", "b", "c"], 3) == ChoiceRule.identity(ABC)
    top = responsive_rule(ABC, ["a", "b", "c"], 1)
    assert [top(X) for X in range(8)] == [0, 1, 2, 1, 4, 1, 2, 1]
    assert responsive_rule(ABC, ["c", "a", "b"], 0).table.tolist() == [0] * 8
    for q in range(4):
        rule = responsive_rule(ABC, ["b", "c", "a"], q)
        assert oracles.pi(rule) is None and oracles.lad(rule) is None


def test_responsive_errors():
    with pytest.raises(BadPriority):
        responsive_rule(ABC, ["a", "b"], 1)
    with pytest.raises(BadPriority):
        responsive_rule(ABC, ["a", "a", "b"], 1)
    with pytest.raises(BadQuota):
        responsive_rule(ABC, ["a", "b", "c"], 4)


def test_laminar_examples():
    size = laminar_concave_valuation(ABC, [LaminarCell(7, (0, 1, 2, 3))])
    assert size.values == tuple(popcount(X) for X in range(8))
    unit = laminar_concave_valuation(ABC, [LaminarCell(7, (0, 11, 12, 13))])
    assert is_mnatural_concave(unit) and oracles.mnat(unit) is None
    additive = laminar_concave_valuation(ABC, [LaminarCell(1, (0, 2)), LaminarCell(2, (0, 2))])
    assert additive.values == tuple(2 * popcount(X & 3) for X in range(8))


def test_laminar_errors():
    with pytest.raises(NotLaminar):
        laminar_concave_valuation(ABC, [LaminarCell(3, (0, 1, 2)), LaminarCell(6, (0, 1, 2))])
    with pytest.raises(NotLaminar):
        laminar_concave_valuation(ABC, [LaminarCell(7, (0, 1, 3, 4))])


def test_laminar_samples_are_mnat():
    for u in sample_laminar_valuations(4, 20, seed=3):
        assert oracles.mnat(u) is None


def test_pi_sampler_example():
    sample = sample_pi_rules(4, 10, seed=7)
    assert len(sample.items) == 10
    for rule, source in zip(sample.items, sample.sources):
        assert is_path_independent(rule)
        if source == "responsive":
            assert satisfies_lad(rule)
    assert "responsive" in sample.sources
    assert 0 < sample.yield_rate <= 1


def test_samplers_are_deterministic():
    a = sample_pi_rules(4, 8, seed=9)
    b = sample_pi_rules(4, 8, seed=9)
    assert [serialize_rule(r) for r in a.items] == [serialize_rule(r) for r in b.items]
    c = [serialize_utility(u) for u in sample_laminar_valuations(4, 5, seed=9)]
    d = [serialize_utility(u) for u in sample_laminar_valuations(4, 5, seed=9)]
    assert c == d
    assert [serialize_rule(r) for r in sample_pi_rules(4, 8, seed=10).items] != [serialize_rule(r) for r in a.items]


@pytest.mark.parametrize("n", [3, 4, 5])
def test_ordinal_table_sampler(n):
    sample = sample_ordinal_tables(n, 10, seed=4, require_src=True)
    assert len(sample.items) == 10
    for u in sample.items:
        assert is_ordinally_concave(u) and is_size_restricted_concave(u)
        induce_choice(u)


@pytest.mark.parametrize("target", SEARCH_TARGETS)
def test_search_results_are_certified(target):
    result = search_counterexample(target, 3, seed=0, budget=5000)
    doc = result.to_json()
    assert doc["found"] is True and doc["target"] == target
    if target == "oc-not-submodular":
        assert is_ordinally_concave(result.table) and not is_submodular(result.table)
        assert not oracles.submodular(result.table)
    elif target == "submodular-not-oc":
        assert is_submodular(result.table) and not is_ordinally_concave(result.table)
        assert oracles.submodular(result.table) and oracles.oc(result.table) is not None
    elif target == "submodular-rationalizable-not-pi":
        assert oracles.submodular(result.table)
        assert induce_choice(result.table) == result.rule
        assert oracles.pi(result.rule) is not None
    else:
        assert oracles.lad(result.rule) is None
        assert [c.holds for c in result.checks] == [True, False, False]


def test_oc_not_submodular_at_n2():
    result = search_counterexample("oc-not-submodular", 2, seed=0, budget=100)
    assert is_ordinally_concave(result.table) and not is_submodular(result.table)


def test_search_budget_and_target_errors():
    with pytest.raises(BudgetExhausted):
        search_counterexample("oc-not-submodular", 3, seed=0, budget=0)
    with pytest.raises(InputError):
        search_counterexample("nonsense", 3, seed=0, budget=5)
