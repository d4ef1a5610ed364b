"""Enumerators and seeded samplers for rules and utility tables.

Every sampler draws attempt ``i`` from ``numpy.random.default_rng([seed,
tag, i])``, so a stream is a pure function of its parameters and can be
produced in any order or in parallel without changing its content.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .concavity import (
    has_unique_argmax,
    induce_choice,
    is_rationalizable,
    is_mnatural_concave,
    is_ordinally_concave,
    is_size_restricted_concave,
    is_submodular,
)
from .core import Check, ChoiceRule, UtilityTable, Universe, popcount, popcount_array, subsets_of
from .errors import BadPriority, BadQuota, BudgetExhausted, InputError, NotLaminar, TooLarge
from .rules import is_path_independent, satisfies_lad

# stream tags keep the samplers' random streams apart under one seed
_PI_TAG, _LAMINAR_TAG, _PERTURBED_TAG, _RANK_TAG, _RANDOM_RULE_TAG, _SEARCH_TAG = range(6)


def stream_rng(seed: int, tag: int, i: int) -> np.random.Generator:
    return np.random.default_rng([seed, tag, i])


def rule_count(n: int) -> int:
    """Number of choice rules on n contracts: the product of 2^|X| over X."""
    return 2 ** (n * 2 ** (n - 1))


def enumerate_rules(n: int, universe: Universe | None = None) -> Iterator[ChoiceRule]:
    """Every rule on n ≤ 3 contracts once, lexicographic in (C(∅), C(1), ...)."""
    if n > 3:
        raise TooLarge(f"exhaustive enumeration is limited to n ≤ 3, got {n}")
    U = universe or Universe.of_size(n)
    options = [subsets_of(X) for X in range(U.size)]
    for table in itertools.product(*options):
        yield ChoiceRule(U, table)


def responsive_rule(universe: Universe, priority: Sequence[str], quota: int) -> ChoiceRule:
    """Choose the ``quota`` highest-priority available contracts."""
    if sorted(priority) != sorted(universe.labels) or len(set(priority)) != universe.n:
        raise BadPriority(f"priority {list(priority)} is not a permutation of {list(universe.labels)}")
    if not 0 <= quota <= universe.n:
        raise BadQuota(f"quota must be in [0, {universe.n}], got {quota}")
    order = [universe.index(p) for p in priority]

    def choose(X: int) -> int:
        out, taken = 0, 0
        for i in order:
            if taken == quota:
                break
            if X >> i & 1:
                out |= 1 << i
                taken += 1
        return out

    rule = ChoiceRule.from_function(universe, choose)
    assert is_path_independent(rule) and satisfies_lad(rule), "responsive rule failed its self-check"
    return rule


def random_rule(universe: Universe, rng: np.random.Generator) -> ChoiceRule:
    """Uniform over all rules: C(X) keeps each member of X with probability 1/2."""
    X = np.arange(universe.size, dtype=np.int64)
    return ChoiceRule(universe, X & rng.integers(0, universe.size, size=universe.size))


def random_rules(n: int, count: int, seed: int) -> Iterator[ChoiceRule]:
    U = Universe.of_size(n)
    for i in range(count):
        yield random_rule(U, stream_rng(seed, _RANDOM_RULE_TAG, i))


def random_rank_table(universe: Universe, rng: np.random.Generator) -> UtilityTable:
    """Distinct values: a random bijection from subsets to ranks."""
    return UtilityTable(universe, tuple(int(v) for v in rng.permutation(universe.size)))


@dataclass(frozen=True)
class LaminarCell:
    """Cell A of a laminar family with phi[t] = value at |X ∩ A| = t."""

    mask: int
    phi: tuple[int, ...]


def _is_laminar(masks: Sequence[int]) -> bool:
    for a, b in itertools.combinations(masks, 2):
        inter = a & b
        if inter and inter != a and inter != b:
            return False
    return True


def laminar_concave_valuation(universe: Universe, cells: Sequence[LaminarCell], self_check: bool = True) -> UtilityTable:
    """u(X) = sum over cells A of phi_A(|X ∩ A|).

    Raises NotLaminar for crossing cells or a non-concave phi. With
    ``self_check`` the result is verified M-natural concave when n ≤ 6.
    """
    masks = [c.mask for c in cells]
    if not _is_laminar(masks):
        raise NotLaminar("cells cross")
    X = np.arange(universe.size, dtype=np.int64)
    total = np.zeros(universe.size, dtype=object)
    for c in cells:
        if c.mask == 0 or c.mask >> universe.n:
            raise NotLaminar(f"cell mask {c.mask} outside the universe")
        phi = list(c.phi)
        if len(phi) != popcount(c.mask) + 1:
            raise NotLaminar(f"phi needs {popcount(c.mask) + 1} values, got {len(phi)}")
        if any(phi[t + 1] - phi[t] > phi[t] - phi[t - 1] for t in range(1, len(phi) - 1)):
            raise NotLaminar(f"phi {phi} is not concave")
        phi_arr = np.array(phi, dtype=object)
        total = total + phi_arr[popcount_array(X & c.mask)]
    u = UtilityTable(universe, tuple(int(v) for v in total))
    if self_check and universe.n <= 6:
        assert is_mnatural_concave(u), "laminar valuation failed its M-natural self-check"
    return u


def _concave_phi(rng: np.random.Generator, size: int, spread: int) -> tuple[int, ...]:
    steps = np.sort(rng.integers(-spread, spread + 1, size=size))[::-1]
    return tuple(int(v) for v in np.concatenate([[0], np.cumsum(steps)]))


def random_laminar_family(universe: Universe, rng: np.random.Generator, spread: int = 20) -> list[LaminarCell]:
    """Random recursive partition of the universe, every singleton kept."""
    n = universe.n
    masks: list[int] = []

    def split(mask: int) -> None:
        masks.append(mask)
        elems = [i for i in range(n) if mask >> i & 1]
        if len(elems) <= 1:
            return
        k = int(rng.integers(2, len(elems) + 1))
        labels = rng.integers(0, k, size=len(elems))
        for b in range(k):
            sub = sum(1 << e for e, lab in zip(elems, labels) if lab == b)
            if sub and sub != mask:
                split(sub)

    split(universe.full)
    keep = [m for m in masks if popcount(m) == 1 or rng.random() < 0.7]
    for i in range(n):
        if 1 << i not in keep:
            keep.append(1 << i)
    return [LaminarCell(m, _concave_phi(rng, popcount(m), spread)) for m in keep]


def sample_laminar_valuations(n: int, count: int, seed: int, tie_free: bool = False, max_attempts: int | None = None) -> Iterator[UtilityTable]:
    """Random laminar concave (hence M-natural concave) tables."""
    U = Universe.of_size(n)
    emitted = 0
    limit = max_attempts if max_attempts is not None else 50 * count + 100
    for i in range(limit):
        if emitted == count:
            return
        rng = stream_rng(seed, _LAMINAR_TAG, i)
        u = laminar_concave_valuation(U, random_laminar_family(U, rng))
        if tie_free and not has_unique_argmax(u):
            continue
        emitted += 1
        yield u


def perturbed_laminar_table(universe: Universe, rng: np.random.Generator) -> UtilityTable:
    """Laminar table scaled by 4 plus independent noise in {0, 1, 2}; not
    M-natural in general."""
    base = laminar_concave_valuation(universe, random_laminar_family(universe, rng), self_check=False)
    noise = rng.integers(0, 3, size=universe.size)
    return UtilityTable(universe, tuple(4 * v + int(e) for v, e in zip(base.values, noise)))


@dataclass
class Sample:
    """Accepted objects plus the attempt bookkeeping behind them."""

    items: list = field(default_factory=list)
    sources: list = field(default_factory=list)
    attempts: int = 0

    @property
    def yield_rate(self) -> float:
        return len(self.items) / self.attempts if self.attempts else 0.0


def _pi_attempt(U: Universe, seed: int, i: int):
    rng = stream_rng(seed, _PI_TAG, i)
    if i % 5 == 4:
        priority = [U.labels[j] for j in rng.permutation(U.n)]
        return responsive_rule(U, priority, int(rng.integers(0, U.n + 1))), "responsive"
    rule = induce_choice(random_rank_table(U, rng))
    if is_path_independent(rule):
        return rule, "random-utility"
    return None, None


def sample_pi_rules(n: int, count: int, seed: int, max_attempts: int | None = None) -> Sample:
    """Path-independent rules: argmax rules of random strict tables kept when
    path independent, with a responsive rule on every fifth attempt."""
    U = Universe.of_size(n)
    out = Sample()
    limit = max_attempts if max_attempts is not None else 400 * count + 100
    while len(out.items) < count and out.attempts < limit:
        rule, source = _pi_attempt(U, seed, out.attempts)
        out.attempts += 1
        if rule is not None:
            out.items.append(rule)
            out.sources.append(source)
    return out


def sample_ordinal_tables(n: int, count: int, seed: int, require_src: bool = False, max_attempts: int | None = None) -> Sample:
    """Tie-free ordinally concave tables (optionally also size-restricted concave).

    Attempts alternate between random rank tables (only for n ≤ 4) and
    perturbed laminar tables; candidates failing the filters or having a
    tied argmax are dropped.
    """
    U = Universe.of_size(n)
    out = Sample()
    limit = max_attempts if max_attempts is not None else 200 * count + 100
    while len(out.items) < count and out.attempts < limit:
        i = out.attempts
        out.attempts += 1
        if n <= 4 and i % 2 == 0:
            u, source = random_rank_table(U, stream_rng(seed, _RANK_TAG, i)), "rank"
        else:
            u, source = perturbed_laminar_table(U, stream_rng(seed, _PERTURBED_TAG, i)), "perturbed-laminar"
        if not has_unique_argmax(u) or not is_ordinally_concave(u):
            continue
        if require_src and not is_size_restricted_concave(u):
            continue
        out.items.append(u)
        out.sources.append(source)
    return out


SEARCH_TARGETS = ("submodular-not-oc", "oc-not-submodular", "submodular-rationalizable-not-pi", "src-no-lad-link")


@dataclass
class SearchResult:
    target: str
    draws: int
    table: Optional[UtilityTable]
    rule: Optional[ChoiceRule]
    checks: list[Check]

    def to_json(self) -> dict:
        from .core import rule_to_json, utility_to_json

        out = {
            "target": self.target,
            "found": True,
            "draws": self.draws,
            "checks": [c.to_json() for c in self.checks],
        }
        if self.table is not None:
            out["utility"] = utility_to_json(self.table)
        if self.rule is not None:
            out["rule"] = rule_to_json(self.rule)
        return out


def _concave_sum_table(U: Universe, rng: np.random.Generator) -> UtilityTable:
    """Sum of concave functions of |X ∩ A| over arbitrary (crossing) sets A,
    plus a modular term; always submodular."""
    X = np.arange(U.size, dtype=np.int64)
    total = np.zeros(U.size, dtype=np.int64)
    for _ in range(int(rng.integers(1, 2 * U.n + 1))):
        A = int(rng.integers(1, U.size))
        phi = np.array(_concave_phi(rng, popcount(A), 20), dtype=np.int64)
        total += phi[popcount_array(X & A)]
    w = rng.integers(-10, 11, size=U.n)
    for i in range(U.n):
        total += w[i] * ((X >> i) & 1)
    return UtilityTable(U, tuple(int(v) for v in total))


def _convex_increasing_table(U: Universe, rng: np.random.Generator) -> UtilityTable:
    """(sum of positive weights)^2: strictly increasing, strictly supermodular on pairs."""
    w = rng.integers(1, 6, size=U.n)
    X = np.arange(U.size, dtype=np.int64)
    s = sum(int(w[i]) * ((X >> i) & 1) for i in range(U.n))
    return UtilityTable(U, tuple(int(v) ** 2 for v in s))


def search_counterexample(target: str, n: int, seed: int, budget: int) -> SearchResult:
    """Draw candidates until the checkers certify an example of ``target``.

    Only checker-certified objects are returned; an exhausted budget raises
    :class:`BudgetExhausted` and says nothing about whether examples exist.
    """
    if target not in SEARCH_TARGETS:
        raise InputError(f"unknown search target {target!r}; expected one of {', '.join(SEARCH_TARGETS)}")
    if n < 2:
        raise InputError("search needs n ≥ 2")
    U = Universe.of_size(n)
    for i in range(budget):
        rng = stream_rng(seed, _SEARCH_TAG, i)
        if target == "oc-not-submodular":
            u = _convex_increasing_table(U, rng)
            oc, sub = is_ordinally_concave(u), is_submodular(u)
            if oc and not sub:
                return SearchResult(target, i + 1, u, None, [oc, sub])
        elif target == "submodular-not-oc":
            u = _concave_sum_table(U, rng)
            oc, sub = is_ordinally_concave(u), is_submodular(u)
            if sub and not oc:
                return SearchResult(target, i + 1, u, None, [sub, oc])
        elif target == "submodular-rationalizable-not-pi":
            u = _concave_sum_table(U, rng)
            if not has_unique_argmax(u):
                continue
            sub = is_submodular(u)
            if not sub:
                continue
            rule = induce_choice(u)
            pi = is_path_independent(rule)
            if not pi:
                return SearchResult(target, i + 1, u, rule, [sub, pi])
        else:
            # rationalizability by a size-restricted concave utility already
            # forces LAD, so the open direction is LAD without such a
            # rationalization; a revealed-preference cycle rules out every utility
            rule = random_rule(U, rng)
            lad = satisfies_lad(rule)
            if not lad:
                continue
            rat = is_rationalizable(rule)
            if not rat:
                return SearchResult(target, i + 1, None, rule, [lad, rat, is_path_independent(rule)])
    raise BudgetExhausted(f"no witness for {target} found in {budget} draws")
