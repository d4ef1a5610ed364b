"""Exhaustive checkers for choice-rule properties.

Each checker scans its quantifier space in canonical order (outer variable
first, masks ascending) and returns a :class:`~pathchoice.core.Check`
carrying the first falsifying tuple it meets.
"""

from __future__ import annotations

import numpy as np

from .core import Check, ChoiceRule, Witness, popcount_array, set_str

RULE_PROPERTIES = ("pi", "subs", "irc", "lad")


def _all_masks(rule: ChoiceRule) -> np.ndarray:
    return np.arange(rule.universe.size, dtype=np.int64)


def _fail(rule, prop, bindings, detail) -> Check:
    return Check(prop, False, Witness(prop, rule.universe, tuple(bindings), detail))


def is_path_independent(rule: ChoiceRule) -> Check:
    """C(X ∪ X') == C(C(X) ∪ X') for every ordered pair (X, X')."""
    C = rule.table
    Xp = _all_masks(rule)
    s = lambda m: set_str(rule.universe, int(m))
    for X in range(rule.universe.size):
        lhs = C[X | Xp]
        rhs = C[C[X] | Xp]
        bad = np.flatnonzero(lhs != rhs)
        if bad.size:
            Y = int(bad[0])
            detail = (
                f"C({s(X | Y)}) = {s(lhs[Y])} but C(C({s(X)}) ∪ {s(Y)}) = "
                f"C({s(C[X] | Y)}) = {s(rhs[Y])}"
            )
            return _fail(rule, "pi", [("X", X), ("Xprime", Y)], detail)
    return Check("pi", True)


def satisfies_substitutes(rule: ChoiceRule) -> Check:
    """C(X) ⊇ C(X') ∩ X whenever X ⊆ X'."""
    C = rule.table
    Xp = _all_masks(rule)
    s = lambda m: set_str(rule.universe, int(m))
    for X in range(rule.universe.size):
        nested = (Xp & X) == X
        bad = np.flatnonzero(nested & ((C[Xp] & X & ~C[X]) != 0))
        if bad.size:
            Y = int(bad[0])
            detail = f"C({s(Y)}) ∩ {s(X)} = {s(C[Y] & X)} is not contained in C({s(X)}) = {s(C[X])}"
            return _fail(rule, "subs", [("X", X), ("Xprime", Y)], detail)
    return Check("subs", True)


def satisfies_irc(rule: ChoiceRule) -> Check:
    """C(X) == C(X') whenever X ⊆ X' and C(X') ⊆ X."""
    C = rule.table
    Xp = _all_masks(rule)
    s = lambda m: set_str(rule.universe, int(m))
    for X in range(rule.universe.size):
        nested = (Xp & X) == X
        bad = np.flatnonzero(nested & ((C[Xp] & ~X) == 0) & (C[Xp] != C[X]))
        if bad.size:
            Y = int(bad[0])
            detail = f"C({s(Y)}) = {s(C[Y])} ⊆ {s(X)} but C({s(X)}) = {s(C[X])}"
            return _fail(rule, "irc", [("X", X), ("Xprime", Y)], detail)
    return Check("irc", True)


def _sizes(rule: ChoiceRule) -> np.ndarray:
    return popcount_array(rule.table)


def satisfies_lad(rule: ChoiceRule, definitional: bool = False) -> Check:
    """Law of aggregate demand.

    The default scans covering pairs (X', X'+x) only, which is equivalent by
    chaining covers; the witness binds ``Xprime``, ``x`` and ``X = X'+x``.
    ``definitional=True`` scans every nested pair X ⊇ X' instead and is kept
    as the oracle for the cover scan.
    """
    if definitional:
        return _lad_definitional(rule)
    n = rule.universe.n
    sizes = _sizes(rule)
    masks = _all_masks(rule)
    fail = np.zeros((rule.universe.size, n), dtype=bool)
    for i in range(n):
        bit = 1 << i
        outside = (masks & bit) == 0
        fail[:, i] = outside & (sizes[masks | bit] < sizes)
    hits = np.flatnonzero(fail.ravel())
    if not hits.size:
        return Check("lad", True)
    Xs, i = divmod(int(hits[0]), n)
    big = Xs | (1 << i)
    s = lambda m: set_str(rule.universe, int(m))
    detail = (
        f"{s(Xs)} ⊆ {s(big)} but |C({s(Xs)})| = {sizes[Xs]} > "
        f"{sizes[big]} = |C({s(big)})|"
    )
    return _fail(rule, "lad", [("Xprime", Xs), ("x", rule.universe.labels[i]), ("X", big)], detail)


def _lad_definitional(rule: ChoiceRule) -> Check:
    sizes = _sizes(rule)
    Xp = _all_masks(rule)
    s = lambda m: set_str(rule.universe, int(m))
    for X in range(rule.universe.size):
        nested = (Xp & ~X) == 0
        bad = np.flatnonzero(nested & (sizes > sizes[X]))
        if bad.size:
            Y = int(bad[0])
            detail = f"{s(Y)} ⊆ {s(X)} but |C({s(Y)})| = {sizes[Y]} > {sizes[X]} = |C({s(X)})|"
            return _fail(rule, "lad", [("X", X), ("Xprime", Y)], detail)
    return Check("lad", True)


def contains_full_choice(rule: ChoiceRule) -> Check:
    """C(X) ⊇ X ∩ C(full set) for every X; a consequence of path independence."""
    C = rule.table
    full = C[rule.universe.full]
    X = _all_masks(rule)
    bad = np.flatnonzero((X & full & ~C) != 0)
    if not bad.size:
        return Check("full-choice", True)
    Y = int(bad[0])
    s = lambda m: set_str(rule.universe, int(m))
    return _fail(rule, "full-choice", [("X", Y)], f"C({s(Y)}) = {s(C[Y])} misses {s(Y & full & ~C[Y])}")


CHECKERS = {
    "pi": is_path_independent,
    "subs": satisfies_substitutes,
    "irc": satisfies_irc,
    "lad": satisfies_lad,
}


def check_rule(rule: ChoiceRule, prop: str, definitional_lad: bool = False) -> Check:
    if prop == "lad":
        return satisfies_lad(rule, definitional=definitional_lad)
    return CHECKERS[prop](rule)
