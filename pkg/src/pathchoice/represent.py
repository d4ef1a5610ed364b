"""Utility construction for path-independent rules and its proof tracer.

For every subset X the construction runs a shrinking sequence

    E^1 = full set,   E^k = E^{k-1} minus (C(E^{k-1}) minus X),

scores X by integer weights on |X ∩ C(E^k)| and subtracts a small penalty
at the first k with C(E^k) ⊆ X. Weights satisfy

    alpha_n = 1,   alpha_k = 1 + max_X sum_{j>k} alpha_j |X ∩ C(E^j_X)|,

so a one-unit gain at index k outweighs everything after it. All 2^n
sequences are computed at once, vectorized over X.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import (
    Check,
    ChoiceRule,
    Index,
    UtilityTable,
    Witness,
    format_rational,
    popcount_array,
    set_str,
    subsets_of,
)
from .errors import ConditionViolated, EmptyBaseSet, EpsilonOutOfRange, NotPathIndependent
from .rules import is_path_independent


@dataclass(frozen=True)
class ESequence:
    """E^1 ⊇ E^2 ⊇ ... ⊇ E^n for one base set X (masks, index 0 is E^1)."""

    X: int
    sets: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        """E^k with 1-based ``k``."""
        return self.sets[k - 1]


@lru_cache(maxsize=32)
def _e_table(rule: ChoiceRule, depth: int | None = None) -> np.ndarray:
    """Row k-1 holds E^k_X for every X; ``depth`` rows (default n)."""
    n = rule.n
    depth = n if depth is None else depth
    C = rule.table
    X = np.arange(rule.universe.size, dtype=np.int64)
    rows = np.empty((depth, X.size), dtype=np.int64)
    E = np.full(X.size, rule.universe.full, dtype=np.int64)
    for k in range(depth):
        rows[k] = E
        E = E & ~(C[E] & ~X)
    rows.setflags(write=False)
    return rows


def e_sequence(rule: ChoiceRule, X: int) -> ESequence:
    rows = _e_table(rule)
    return ESequence(X, tuple(int(e) for e in rows[:, X]))


def _int_dtype(n: int):
    # alpha_k <= (n+1)^(n-k), and u(X) <= n * sum(alpha) <= (n+1)^n
    return np.int64 if (n + 1) ** n < (1 << 62) else object


@dataclass(frozen=True)
class AlphaWeights:
    alpha: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        return self.alpha[k - 1]


def _counts(rule: ChoiceRule) -> np.ndarray:
    """|X ∩ C(E^k_X)| for every k (rows) and X (columns)."""
    rows = _e_table(rule)
    X = np.arange(rule.universe.size, dtype=np.int64)
    return popcount_array(X[None, :] & rule.table[rows])


def alpha_weights(rule: ChoiceRule) -> AlphaWeights:
    n = rule.n
    counts = _counts(rule).astype(_int_dtype(n))
    alpha = [0] * n
    alpha[n - 1] = 1
    tail = np.zeros(rule.universe.size, dtype=counts.dtype)
    for k in range(n - 1, 0, -1):
        # tail = sum_{j>k} alpha_j * counts_j over 1-based j
        tail = tail + alpha[k] * counts[k]
        alpha[k - 1] = int(tail.max()) + 1
    return AlphaWeights(tuple(int(a) for a in alpha))


@dataclass(frozen=True, eq=False)
class Representation:
    """The constructed utility together with its integer bookkeeping.

    ``base[X]`` is the weighted intersection score, ``penalty[X]`` the count
    |X ∖ C(E^{k*}_X)| at the first k* with C(E^{k*}_X) ⊆ X (0 when no such
    index exists), ``kstar[X]`` that index (0 when absent). The utility is
    ``base - epsilon * penalty``; its order is lexicographic in
    ``(base, -penalty)`` for every epsilon in (0, 1/n).
    """

    rule: ChoiceRule
    epsilon: Fraction
    alpha: AlphaWeights
    base: tuple[int, ...] = field(repr=False)
    penalty: tuple[int, ...] = field(repr=False)
    kstar: tuple[int, ...] = field(repr=False)
    forced: bool = False

    @property
    def utility(self) -> UtilityTable:
        eps = self.epsilon
        return UtilityTable(self.rule.universe, tuple(Fraction(b) - eps * m for b, m in zip(self.base, self.penalty)))

    def internals_json(self) -> dict:
        key = self.rule.universe.key
        return {
            "epsilon": format_rational(self.epsilon),
            "alpha": [str(a) for a in self.alpha.alpha],
            "forced": self.forced,
            "subsets": {
                key(X): {"u": str(b), "m": m, "kstar": k}
                for X, (b, m, k) in enumerate(zip(self.base, self.penalty, self.kstar))
            },
        }


def default_epsilon(n: int) -> Fraction:
    return Fraction(1, 2 * n)


def construct(rule: ChoiceRule, epsilon: Optional[Fraction] = None, force: bool = False) -> Representation:
    """Build the representation; refuses rules that are not path independent
    unless ``force`` is set (the result then carries no guarantee)."""
    n = rule.n
    eps = default_epsilon(n) if epsilon is None else Fraction(epsilon)
    if not 0 < eps < Fraction(1, n):
        raise EpsilonOutOfRange(f"epsilon must lie in (0, 1/{n}), got {format_rational(eps)}")
    if not force:
        pi = is_path_independent(rule)
        if not pi:
            raise NotPathIndependent(pi.witness)
    alpha = alpha_weights(rule)
    counts = _counts(rule).astype(_int_dtype(n))
    weights = np.array(alpha.alpha, dtype=counts.dtype)
    base = (weights[:, None] * counts).sum(axis=0)

    rows = _e_table(rule)
    X = np.arange(rule.universe.size, dtype=np.int64)
    chosen = rule.table[rows]
    inside = (chosen & ~X[None, :]) == 0
    has = inside.any(axis=0)
    first = inside.argmax(axis=0)
    kstar = np.where(has, first + 1, 0)
    leftover = X & ~chosen[first, X]
    penalty = np.where(has, popcount_array(leftover), 0)
    return Representation(
        rule=rule,
        epsilon=eps,
        alpha=alpha,
        base=tuple(int(b) for b in base),
        penalty=tuple(int(m) for m in penalty),
        kstar=tuple(int(k) for k in kstar),
        forced=force,
    )


def represent(rule: ChoiceRule, epsilon: Optional[Fraction] = None, force: bool = False) -> UtilityTable:
    return construct(rule, epsilon, force).utility


def e_monotonicity_check(rule: ChoiceRule) -> Check:
    """E^j_X ⊆ E^j_X' for every X ⊆ X' and every j."""
    rows = _e_table(rule)
    Xp = np.arange(rule.universe.size, dtype=np.int64)
    s = lambda m: set_str(rule.universe, int(m))
    for X in range(rule.universe.size):
        nested = (Xp & X) == X
        bad = nested[None, :] & ((rows[:, X][:, None] & ~rows) != 0)
        cols = np.flatnonzero(bad.any(axis=0))
        if cols.size:
            Y = int(cols[0])
            j = int(np.flatnonzero(bad[:, Y])[0]) + 1
            detail = f"E^{j} of {s(X)} = {s(rows[j - 1, X])} is not inside E^{j} of {s(Y)} = {s(rows[j - 1, Y])}"
            return Check("e-monotone", False, Witness("e-monotone", rule.universe, (("X", X), ("Xprime", Y), ("j", Index(j))), detail))
    return Check("e-monotone", True)


@dataclass
class TraceStep:
    k: int
    case: int
    E: int
    chosen: int
    psi_size: int
    conditions: dict[str, bool]


@dataclass
class TraceReport:
    rule: ChoiceRule
    xbar: int
    xstar: int
    steps: list[TraceStep]
    case1_step: int | None

    @property
    def passed(self) -> bool:
        return self.case1_step is not None and all(all(s.conditions.values()) for s in self.steps)

    def to_json(self) -> dict:
        key = self.rule.universe.key
        return {
            "Xbar": key(self.xbar),
            "Xstar": key(self.xstar),
            "case1_step": self.case1_step,
            "passed": self.passed,
            "steps": [
                {
                    "k": s.k,
                    "case": s.case,
                    "E": key(s.E),
                    "C_E": key(s.chosen),
                    "psi_size": s.psi_size,
                    "conditions": s.conditions,
                }
                for s in self.steps
            ],
        }


def proof_trace(rule: ChoiceRule, xbar: int, strict: bool = True, rep: Representation | None = None) -> TraceReport:
    """Replay the step-by-step argument that C(Xbar) is the unique maximizer.

    Psi^0 is every subset of Xbar; Psi^k keeps the members of Psi^{k-1}
    with the most elements in C(E^k_Xbar). A step is Case 1 when
    C(E^k_Xbar) ⊆ Xbar, which must end the argument; otherwise the four
    Case 2 conditions are checked. With ``strict`` a failing condition
    raises :class:`ConditionViolated`; otherwise it is only recorded.
    """
    if xbar == 0:
        raise EmptyBaseSet("the trace needs a nonempty base set")
    if rep is None:
        rep = construct(rule)
    n = rule.n
    C = rule.table
    rows = _e_table(rule, n + 1)
    base, kstar, util = rep.base, rep.kstar, rep.utility
    xstar = int(C[xbar])
    E_bar = lambda k: int(rows[k - 1, xbar])
    psi = subsets_of(xbar)
    psi0 = psi
    steps: list[TraceStep] = []
    case1_step = None

    def record(step: TraceStep, name: str, ok: bool):
        step.conditions[name] = bool(ok)
        if strict and not ok:
            raise ConditionViolated(step.k, name)

    for k in range(1, n + 1):
        F = int(C[E_bar(k)])
        top = max(bin(X & F).count("1") for X in psi)
        nxt = [X for X in psi if bin(X & F).count("1") == top]
        case = 1 if F & ~xbar == 0 else 2
        step = TraceStep(k, case, E_bar(k), F, len(nxt), {})
        steps.append(step)
        record(step, "filtration", nxt == [X for X in psi if X & (xbar & F) == (xbar & F)])
        if case == 1:
            record(step, "xstar-is-C(E)", xstar == F)
            winner = util[xstar]
            record(step, "(a)", xstar in psi0 and all(util[X] < winner for X in psi0 if X != xstar))
            case1_step = k
            break
        record(step, "delta-zero", all(kstar[X] != k for X in psi))
        record(step, "(i)", xstar in nxt)
        target = xbar & F
        record(step, "(ii)", all(X & int(C[rows[k - 1, X]]) == target for X in nxt))
        e_next = int(rows[k, xbar])
        record(step, "(iii)", e_next != E_bar(k) and all(int(rows[k, X]) == e_next for X in nxt))
        dropped = [X for X in psi if X not in set(nxt)]
        low = min(base[X] for X in nxt)
        record(step, "(iv)", all(base[Y] < low for Y in dropped))
        if k == n:
            record(step, "(a|n)", False)
        psi = nxt
    return TraceReport(rule, xbar, xstar, steps, case1_step)
