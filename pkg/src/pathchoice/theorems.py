"""Verification harnesses tying checkers, constructor and generators together.

Each harness returns a :class:`Report` of legs; a leg counts the objects it
examined and records every failure with the offending object serialized, so
a failure can be replayed from the report alone. Reports never contain
timings, which keeps their JSON a pure function of the parameters.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from . import fixtures
from .concavity import (
    affine_transform,
    induce_choice,
    is_mnatural_concave,
    is_ordinally_concave,
    is_ordinally_concave_plus,
    is_size_restricted_concave,
    rationalizes,
)
from .core import ChoiceRule, UtilityTable, Universe, rule_to_json, utility_to_json
from .errors import HarnessFailure, InputError, PathChoiceError
from .generators import (
    enumerate_rules,
    laminar_concave_valuation,
    LaminarCell,
    sample_laminar_valuations,
    sample_ordinal_tables,
    sample_pi_rules,
)
from .represent import represent
from .rules import is_path_independent, satisfies_irc, satisfies_lad, satisfies_substitutes


@dataclass
class Leg:
    name: str
    checked: int = 0
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"leg": self.name, "checked": self.checked, "failures": len(self.failures), "counterexamples": self.failures}


@dataclass
class Report:
    name: str
    params: dict
    legs: list[Leg] = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(not leg.failures for leg in self.legs)

    def leg(self, name: str) -> Leg:
        for leg in self.legs:
            if leg.name == name:
                return leg
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "verify": self.name,
            "params": self.params,
            "passed": self.passed,
            "stats": self.stats,
            "legs": [leg.to_json() for leg in self.legs],
        }


def _pmap(fn: Callable, items: Iterable, threads: int) -> list:
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _run_leg(leg: Leg, fn: Callable, items: Iterable, threads: int) -> None:
    """``fn`` returns None on success or a failure dict."""

    def guarded(obj):
        try:
            return fn(obj)
        except PathChoiceError as exc:
            return {"error": exc.to_json(), "object": _serialize(obj)}

    for result in _pmap(guarded, items, threads):
        leg.checked += 1
        if result is not None:
            leg.failures.append(result)


def _serialize(obj) -> dict:
    if isinstance(obj, ChoiceRule):
        return {"rule": rule_to_json(obj)}
    if isinstance(obj, UtilityTable):
        return {"utility": utility_to_json(obj)}
    return {"object": repr(obj)}


def _failed(obj, names: list[str]) -> Optional[dict]:
    if not names:
        return None
    return {**_serialize(obj), "failed": names}


def _check_mode(n: int, mode: str) -> None:
    if mode not in ("exhaustive", "sampled"):
        raise InputError(f"mode must be exhaustive or sampled, got {mode!r}")
    if mode == "exhaustive" and n > 3:
        raise InputError(f"exhaustive mode needs n ≤ 3, got {n}")
    if n < 1:
        raise InputError("n must be positive")


def _pi_rules(n: int, mode: str, seed: int, count: int, report: Report) -> list[ChoiceRule]:
    if mode == "exhaustive":
        rules = [r for r in enumerate_rules(n) if is_path_independent(r)]
        report.stats["pi_rules"] = len(rules)
        return rules
    sample = sample_pi_rules(n, count, seed)
    report.stats["pi_rules"] = len(sample.items)
    report.stats["pi_attempts"] = sample.attempts
    report.stats["responsive_rules"] = sample.sources.count("responsive")
    return sample.items


def _finish(report: Report, started: float, raise_on_failure: bool) -> Report:
    report.runtime = time.perf_counter() - started
    if raise_on_failure and not report.passed:
        raise HarnessFailure(f"{report.name}: counterexample found", report)
    return report


def _only_if_thm1(rule: ChoiceRule) -> Optional[dict]:
    u = represent(rule)
    names = [c.property for c in (rationalizes(u, rule), is_ordinally_concave(u), is_ordinally_concave_plus(u)) if not c]
    return _failed(rule, names)


def _induces_pi(u: UtilityTable) -> Optional[dict]:
    rule = induce_choice(u)
    return None if is_path_independent(rule) else _failed(u, ["pi"])


def verify_theorem1(n: int, mode: str = "exhaustive", seed: int = 0, count: int = 200, threads: int = 1, raise_on_failure: bool = True) -> Report:
    """Path independence versus rationalizability by an ordinally concave utility.

    Only-if leg: every path-independent rule (all of them at n ≤ 3, or a
    seeded sample) is rationalized by its constructed utility, which is
    ordinally concave and concave-plus. If leg: sampled tie-free ordinally
    concave tables induce path-independent rules.
    """
    _check_mode(n, mode)
    started = time.perf_counter()
    report = Report("theorem1", {"n": n, "mode": mode, "seed": seed, "count": count})
    only_if = Leg("only-if")
    _run_leg(only_if, _only_if_thm1, _pi_rules(n, mode, seed, count, report), threads)
    report.legs.append(only_if)
    if n == 3:
        fixture = Leg("footnote-only-if")
        _run_leg(fixture, _only_if_thm1, [fixtures.footnote_rule()], threads)
        report.legs.append(fixture)
    tables = sample_ordinal_tables(n, count, seed)
    report.stats["oc_tables"] = len(tables.items)
    report.stats["oc_attempts"] = tables.attempts
    if_leg = Leg("if")
    _run_leg(if_leg, _induces_pi, tables.items, threads)
    report.legs.append(if_leg)
    return _finish(report, started, raise_on_failure)


def _only_if_thm2(rule: ChoiceRule) -> Optional[dict]:
    u = represent(rule)
    names = [c.property for c in (rationalizes(u, rule), is_ordinally_concave(u), is_size_restricted_concave(u)) if not c]
    return _failed(rule, names)


def _corollary_thm2(rule: ChoiceRule) -> Optional[dict]:
    u = represent(rule)
    return _failed(rule, ["src-unexpectedly-holds"] if is_size_restricted_concave(u) else [])


def _induces_pi_lad(u: UtilityTable) -> Optional[dict]:
    rule = induce_choice(u)
    names = [c.property for c in (is_path_independent(rule), satisfies_lad(rule)) if not c]
    return _failed(u, names)


def verify_theorem2(n: int, mode: str = "exhaustive", seed: int = 0, count: int = 200, threads: int = 1, raise_on_failure: bool = True) -> Report:
    """Path independence plus LAD versus ordinal and size-restricted concavity.

    The corollary leg checks that a path-independent rule failing LAD gets a
    constructed utility that fails size-restricted concavity.
    """
    _check_mode(n, mode)
    started = time.perf_counter()
    report = Report("theorem2", {"n": n, "mode": mode, "seed": seed, "count": count})
    rules = _pi_rules(n, mode, seed, count, report)
    with_lad = [r for r in rules if satisfies_lad(r)]
    without_lad = [r for r in rules if not satisfies_lad(r)]
    report.stats["pi_lad_rules"] = len(with_lad)
    report.stats["pi_not_lad_rules"] = len(without_lad)
    only_if, corollary = Leg("only-if"), Leg("corollary")
    _run_leg(only_if, _only_if_thm2, with_lad, threads)
    _run_leg(corollary, _corollary_thm2, without_lad, threads)
    report.legs += [only_if, corollary]
    if n == 3:
        fixture = Leg("footnote-corollary")
        _run_leg(fixture, _corollary_thm2, [fixtures.footnote_rule()], threads)
        report.legs.append(fixture)
    tables = sample_ordinal_tables(n, count, seed, require_src=True)
    report.stats["oc_src_tables"] = len(tables.items)
    report.stats["oc_src_attempts"] = tables.attempts
    if_leg = Leg("if")
    _run_leg(if_leg, _induces_pi_lad, tables.items, threads)
    report.legs.append(if_leg)
    return _finish(report, started, raise_on_failure)


def _prop1(rule: ChoiceRule) -> Optional[dict]:
    pi = bool(is_path_independent(rule))
    rhs = bool(satisfies_substitutes(rule)) and bool(satisfies_irc(rule))
    return None if pi == rhs else {**_serialize(rule), "pi": pi, "subs_and_irc": rhs}


def verify_prop1(n: int, threads: int = 1, raise_on_failure: bool = True) -> Report:
    """Path independence iff substitutes and IRC, over every rule on n ≤ 3."""
    _check_mode(n, "exhaustive")
    started = time.perf_counter()
    report = Report("prop1", {"n": n})
    leg = Leg("equivalence")
    rules = list(enumerate_rules(n))
    _run_leg(leg, _prop1, rules, threads)
    report.stats["pi_rules"] = sum(1 for r in rules if is_path_independent(r))
    report.legs.append(leg)
    return _finish(report, started, raise_on_failure)


def _prop2(u: UtilityTable) -> Optional[dict]:
    rule = induce_choice(u)
    checks = (
        is_path_independent(rule),
        satisfies_lad(rule),
        is_ordinally_concave(u),
        is_size_restricted_concave(u),
    )
    names = [c.property for c in checks if not c]
    if induce_choice(affine_transform(u)) != rule:
        names.append("monotone-transform")
    return _failed(u, names)


def _prop2_fixtures(n: int) -> list[UtilityTable]:
    U = Universe.of_size(n)
    size = UtilityTable.from_function(U, lambda X: bin(X).count("1"))
    weights = [2**i for i in range(n)]
    additive = laminar_concave_valuation(U, [LaminarCell(1 << i, (0, w)) for i, w in enumerate(weights)])
    return [size, additive]


def verify_prop2(n: int, seed: int = 0, count: int = 100, threads: int = 1, raise_on_failure: bool = True) -> Report:
    """Argmax rules of M-natural concave tables are path independent with LAD.

    Tables come from random laminar concave families (tie-free ones only),
    each confirmed M-natural concave; every table also has to be ordinally
    and size-restricted concave, and induce the same rule after v -> 2v + 1.
    """
    if not 1 <= n <= 6:
        raise InputError(f"prop2 harness needs 1 ≤ n ≤ 6, got {n}")
    started = time.perf_counter()
    report = Report("prop2", {"n": n, "seed": seed, "count": count})
    tables = list(sample_laminar_valuations(n, count, seed, tie_free=True))
    report.stats["laminar_tables"] = len(tables)
    leg = Leg("laminar")
    _run_leg(leg, _prop2, tables, threads)
    fixed = Leg("fixtures")
    _run_leg(fixed, lambda u: _prop2(u) or (None if is_mnatural_concave(u) else _failed(u, ["mnat"])), _prop2_fixtures(n), threads)
    if len(tables) < count:
        leg.failures.append({"failed": ["sample-shortfall"], "wanted": count, "got": len(tables)})
    report.legs += [leg, fixed]
    return _finish(report, started, raise_on_failure)
