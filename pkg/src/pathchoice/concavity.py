"""Set-function properties, the argmax choice inducer and rationalizability.

Ordinal properties compare single values and are decided on the dense rank
array of the table; cardinal ones (M-natural concavity, the size exchange,
submodularity) compare sums and use the exact scaled-integer array. Neither
path touches floating point.

The exchange checkers fix the outer set X and vectorize over every X', every
removed contract x and every partner x'. The partner index ``n`` encodes the
empty partner, for which X - x + ∅ = X - x and X' + x - ∅ = X' + x.
"""

from __future__ import annotations

import graphlib

import numpy as np

from .core import (
    Check,
    ChoiceRule,
    UtilityTable,
    Witness,
    check_same_universe,
    members,
    popcounts,
    set_str,
    subsets_of,
)
from .errors import TiedMaximizers, TooLarge

DEFAULT_MAX_N = 12

TABLE_PROPERTIES = ("oc", "ocplus", "src", "mnat", "sizeexch", "submodular")


def _guard(u: UtilityTable, allow_large: bool) -> None:
    if u.n > DEFAULT_MAX_N and not allow_large:
        raise TooLarge(f"exhaustive check at n={u.n} exceeds n={DEFAULT_MAX_N}; pass allow_large")


def _fail(u, prop, bindings, detail) -> Check:
    return Check(prop, False, Witness(prop, u.universe, tuple(bindings), detail))


class _Exchange:
    """Index arrays for the (X', x, x') exchange space at a fixed X."""

    def __init__(self, u: UtilityTable, X: int):
        n = u.n
        self.X = X
        self.Xp = np.arange(u.universe.size, dtype=np.int64)[:, None, None]
        self.xs = np.array(list(members(X)), dtype=np.int64)
        outside = [j for j in range(n) if not (X >> j) & 1]
        self.partners = outside + [None]
        xbit = (np.int64(1) << self.xs)[None, :, None]
        pbit = np.array([1 << j for j in outside] + [0], dtype=np.int64)[None, None, :]
        self.xbit, self.pbit = xbit, pbit
        # X - x + x' does not depend on X'
        self.A = ((X & ~xbit) | pbit)[0]
        self.B = (self.Xp | xbit) & ~pbit
        self.x_ok = ((self.Xp & xbit) == 0)[:, :, 0]
        self.p_ok = ((self.Xp & pbit) != 0) | (pbit == 0)

    def first_failure(self, fail: np.ndarray):
        hits = np.flatnonzero(fail.ravel())
        if not hits.size:
            return None
        Y, k = divmod(int(hits[0]), fail.shape[1])
        return Y, int(self.xs[k])


def _exchange_scan(u: UtilityTable, prop: str, satisfied, allow_large: bool, describe) -> Check:
    _guard(u, allow_large)
    for X in range(1, u.universe.size):
        ex = _Exchange(u, X)
        ok = satisfied(ex) & ex.p_ok
        fail = ex.x_ok & ~ok.any(axis=-1)
        found = ex.first_failure(fail)
        if found:
            Y, i = found
            return _fail(
                u, prop,
                [("X", X), ("Xprime", Y), ("x", u.universe.labels[i])],
                describe(X, Y, i),
            )
    return Check(prop, True)


def _no_partner(u, clauses):
    def describe(X, Y, i):
        s = lambda m: set_str(u.universe, m)
        return f"X={s(X)}, X'={s(Y)}, x={u.universe.labels[i]}: no x' in (X'∖X)∪{{∅}} satisfies {clauses}"
    return describe


def is_ordinally_concave(u: UtilityTable, allow_large: bool = False) -> Check:
    r = u.ranks

    def satisfied(ex):
        vX, vA = r[ex.X], r[ex.A][None]
        vY, vB = r[ex.Xp], r[ex.B]
        return (vX < vA) | (vY < vB) | ((vX == vA) & (vY == vB))

    return _exchange_scan(u, "oc", satisfied, allow_large, _no_partner(u, "(i), (ii) or (iii)"))


def is_ordinally_concave_plus(u: UtilityTable, allow_large: bool = False) -> Check:
    """For every X, X', x ∈ X∖X': some partner x' has u(X) < u(X - x + x'), or u(X') < u(X' + x)."""
    _guard(u, allow_large)
    r = u.ranks
    s = lambda m: set_str(u.universe, m)
    for X in range(1, u.universe.size):
        ex = _Exchange(u, X)
        up_from_X = ((r[X] < r[ex.A])[None] & ex.p_ok).any(axis=-1)
        up_from_Y = r[ex.Xp[:, :, 0]] < r[ex.Xp[:, :, 0] | ex.xbit[:, :, 0]]
        fail = ex.x_ok & ~(up_from_X | up_from_Y)
        found = ex.first_failure(fail)
        if found:
            Y, i = found
            detail = (
                f"X={s(X)}, X'={s(Y)}, x={u.universe.labels[i]}: no exchange raises u(X) "
                f"and u(X'+x) ≤ u(X')"
            )
            return _fail(u, "ocplus", [("X", X), ("Xprime", Y), ("x", u.universe.labels[i])], detail)
    return Check("ocplus", True)


def is_mnatural_concave(u: UtilityTable, allow_large: bool = False) -> Check:
    v = u.scaled

    def satisfied(ex):
        return v[ex.X] + v[ex.Xp] <= v[ex.A][None] + v[ex.B]

    return _exchange_scan(
        u, "mnat", satisfied, allow_large,
        _no_partner(u, "u(X)+u(X') ≤ u(X-x+x')+u(X'+x-x')"),
    )


def _size_scan(u: UtilityTable, prop: str, satisfied, allow_large: bool, clauses: str) -> Check:
    """∀ X, X' with |X| > |X'| ∃ x ∈ X∖X' meeting ``satisfied``."""
    _guard(u, allow_large)
    card = popcounts(u.n)
    Xp = np.arange(u.universe.size, dtype=np.int64)[:, None]
    s = lambda m: set_str(u.universe, m)
    for X in range(1, u.universe.size):
        xbit = (np.int64(1) << np.array(list(members(X)), dtype=np.int64))[None, :]
        x_ok = (Xp & xbit) == 0
        ok = satisfied(X, X & ~xbit, Xp, Xp | xbit) & x_ok
        fail = (card < card[X]) & ~ok.any(axis=1)
        hits = np.flatnonzero(fail)
        if hits.size:
            Y = int(hits[0])
            return _fail(u, prop, [("X", X), ("Xprime", Y)], f"X={s(X)}, X'={s(Y)}: no x in X∖X' satisfies {clauses}")
    return Check(prop, True)


def is_size_restricted_concave(u: UtilityTable, allow_large: bool = False) -> Check:
    r = u.ranks

    def satisfied(X, Xminus, Y, Yplus):
        return (r[X] < r[Xminus]) | (r[Y] < r[Yplus]) | ((r[X] == r[Xminus]) & (r[Y] == r[Yplus]))

    return _size_scan(u, "src", satisfied, allow_large, "(i), (ii) or (iii)")


def satisfies_size_exchange(u: UtilityTable, allow_large: bool = False) -> Check:
    v = u.scaled

    def satisfied(X, Xminus, Y, Yplus):
        return v[X] + v[Y] <= v[Xminus] + v[Yplus]

    return _size_scan(u, "sizeexch", satisfied, allow_large, "u(X)+u(X') ≤ u(X-x)+u(X'+x)")


def is_submodular(u: UtilityTable, allow_large: bool = False) -> Check:
    """Local form: u(X+x+y) + u(X) ≤ u(X+x) + u(X+y) for all X and x ≠ y outside X."""
    _guard(u, allow_large)
    v = u.scaled
    n = u.n
    X = np.arange(u.universe.size, dtype=np.int64)
    fail = np.zeros((u.universe.size, n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = 1 << i, 1 << j
            free = (X & (a | b)) == 0
            fail[:, i, j] = free & (v[X | a | b] + v[X] > v[X | a] + v[X | b])
    hits = np.flatnonzero(fail.ravel())
    if not hits.size:
        return Check("submodular", True)
    Y, rest = divmod(int(hits[0]), n * n)
    i, j = divmod(rest, n)
    lab = u.universe.labels
    s = lambda m: set_str(u.universe, m)
    a, b = 1 << i, 1 << j
    detail = (
        f"u({s(Y | a | b)}) + u({s(Y)}) = {u[Y | a | b] + u[Y]} > "
        f"{u[Y | a] + u[Y | b]} = u({s(Y | a)}) + u({s(Y | b)})"
    )
    return _fail(u, "submodular", [("X", Y), ("x", lab[i]), ("y", lab[j])], detail)


def satisfies_local_exchange(u: UtilityTable, allow_large: bool = False) -> Check:
    """Local M-natural exchange on the full cube.

    Submodularity on pairs plus, for distinct a, b, c outside X,
    u(X+a+b) + u(X+c) ≤ max(u(X+a+c) + u(X+b), u(X+b+c) + u(X+a)).
    """
    sub = is_submodular(u, allow_large)
    if not sub:
        w = sub.witness
        return Check("local-exchange", False, Witness("local-exchange", w.universe, w.bindings, w.detail))
    v = u.scaled
    n = u.n
    X = np.arange(u.universe.size, dtype=np.int64)
    lab = u.universe.labels
    s = lambda m: set_str(u.universe, m)
    best = None
    for ia in range(n):
        for ib in range(ia + 1, n):
            for ic in range(n):
                if ic in (ia, ib):
                    continue
                a, b, c = 1 << ia, 1 << ib, 1 << ic
                free = (X & (a | b | c)) == 0
                lhs = v[X | a | b] + v[X | c]
                rhs = np.maximum(v[X | a | c] + v[X | b], v[X | b | c] + v[X | a])
                hits = np.flatnonzero(free & (lhs > rhs))
                if hits.size:
                    cand = (int(hits[0]), ia, ib, ic)
                    if best is None or cand < best:
                        best = cand
    if best is None:
        return Check("local-exchange", True)
    Y, ia, ib, ic = best
    return _fail(
        u, "local-exchange",
        [("X", Y), ("a", lab[ia]), ("b", lab[ib]), ("c", lab[ic])],
        f"three-element exchange fails at X={s(Y)}",
    )


TABLE_CHECKERS = {
    "oc": is_ordinally_concave,
    "ocplus": is_ordinally_concave_plus,
    "src": is_size_restricted_concave,
    "mnat": is_mnatural_concave,
    "sizeexch": satisfies_size_exchange,
    "submodular": is_submodular,
}


def check_table(u: UtilityTable, prop: str, allow_large: bool = False) -> Check:
    return TABLE_CHECKERS[prop](u, allow_large=allow_large)


def _subset_argmax(ranks: np.ndarray, n: int):
    """Best rank over the subsets of every X plus its two smallest maximizers.

    Sum-over-subsets sweep: after processing bit i, each entry aggregates the
    subsets differing from X in bits 0..i. The two families merged at each
    step are disjoint, so the maximizer lists never share a mask.
    """
    size = 1 << n
    best = np.array(ranks, dtype=np.int64)
    m1 = np.arange(size, dtype=np.int64)
    m2 = np.full(size, -1, dtype=np.int64)
    masks = np.arange(size, dtype=np.int64)
    big = np.int64(size)
    for i in range(n):
        hi = masks[(masks >> i) & 1 == 1]
        lo = hi ^ (1 << i)
        va, vb = best[hi], best[lo]
        a1, a2, b1, b2 = m1[hi], m2[hi], m1[lo], m2[lo]
        cand = np.stack([a1, a2, b1, b2], axis=1)
        cand = np.where(cand < 0, big, cand)
        cand.sort(axis=1)
        e1 = cand[:, 0]
        e2 = np.where(cand[:, 1] == big, -1, cand[:, 1])
        take_b = vb > va
        eq = va == vb
        best[hi] = np.maximum(va, vb)
        m1[hi] = np.where(eq, e1, np.where(take_b, b1, a1))
        m2[hi] = np.where(eq, e2, np.where(take_b, b2, a2))
    return best, m1, m2


def induce_choice(u: UtilityTable) -> ChoiceRule:
    """C(X) = the unique maximizer of u over subsets of X; ties raise."""
    _, m1, m2 = _subset_argmax(u.ranks, u.n)
    tied = np.flatnonzero(m2 >= 0)
    if tied.size:
        X = int(tied[0])
        raise TiedMaximizers(u.universe, X, int(m1[X]), int(m2[X]))
    return ChoiceRule(u.universe, m1)


def has_unique_argmax(u: UtilityTable) -> bool:
    _, _, m2 = _subset_argmax(u.ranks, u.n)
    return not np.any(m2 >= 0)


def rationalizes(u: UtilityTable, rule: ChoiceRule) -> Check:
    """u(C(X)) > u(X') for every X and every X' ⊆ X other than C(X)."""
    check_same_universe(u, rule)
    _, m1, m2 = _subset_argmax(u.ranks, u.n)
    C = rule.table
    bad = np.flatnonzero((m2 >= 0) | (m1 != C))
    if not bad.size:
        return Check("rationalizes", True)
    X = int(bad[0])
    chosen = int(C[X])
    r = u.ranks
    for Y in subsets_of(X):
        if Y != chosen and r[Y] >= r[chosen]:
            break
    s = lambda m: set_str(u.universe, m)
    detail = f"u(C({s(X)})) = u({s(chosen)}) = {u[chosen]} is not above u({s(Y)}) = {u[Y]}"
    return _fail(u, "rationalizes", [("X", X), ("Xprime", Y)], detail)


def affine_transform(u: UtilityTable, scale: int = 2, shift: int = 1) -> UtilityTable:
    """Entrywise v -> scale*v + shift; strictly increasing for scale > 0."""
    return u.map(lambda v: scale * v + shift)


def is_rationalizable(rule: ChoiceRule) -> Check:
    """Whether *some* utility rationalizes the rule.

    C(X) must beat every other X' ⊆ X; this strict revealed relation has a
    utility representation iff it is acyclic. The witness lists a cycle
    S0 > S1 > ... > S0.
    """
    graph: dict[int, set[int]] = {}
    for X in range(rule.universe.size):
        chosen = int(rule.table[X])
        for Y in subsets_of(X):
            if Y != chosen:
                # Y must rank below chosen: chosen is a predecessor of Y
                graph.setdefault(Y, set()).add(chosen)
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        # each listed node is a predecessor (strictly better) of the next
        body = exc.args[1][:-1]
        start = body.index(min(body))
        ordered = body[start:] + body[:start] + [body[start]]
        s = lambda m: set_str(rule.universe, m)
        detail = "revealed strict preference cycle " + " > ".join(s(m) for m in ordered)
        bindings = tuple((f"S{i}", m) for i, m in enumerate(ordered[:-1]))
        return Check("rationalizable", False, Witness("rationalizable", rule.universe, bindings, detail))
    return Check("rationalizable", True)
