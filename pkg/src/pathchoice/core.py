"""Ground types: universes, bitmask subsets, choice rules and utility tables.

A subset of the universe is a plain ``int`` bitmask; bit ``i`` stands for
``universe.labels[i]``. The canonical order on subsets is the numeric order of
the masks, and every checker in the package reports the smallest falsifying
tuple under that order.

Utility values are :class:`fractions.Fraction` throughout.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import (
    BadLabel,
    DuplicateKey,
    DuplicateLabel,
    MalformedJson,
    MalformedRational,
    MissingKey,
    NotASubset,
    UniverseMismatch,
    UniverseTooLarge,
    UnknownLabel,
    ZeroDenominator,
)

MAX_N = 20

ExactValue = Fraction

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")
_BAD_LABEL_CHARS = re.compile(r"[,\s]")


def popcount(x: int) -> int:
    return bin(x).count("1")


def members(mask: int) -> Iterator[int]:
    """Yield the bit indices set in ``mask`` in ascending order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def subsets_of(mask: int) -> list[int]:
    """All submasks of ``mask`` in ascending numeric order."""
    out = []
    sub = mask
    while True:
        out.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    out.reverse()
    return out


def popcounts(n: int) -> np.ndarray:
    """Cardinality of every subset of an ``n``-element universe."""
    size = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        size[1 << i : 1 << (i + 1)] = size[: 1 << i] + 1
    return size


def popcount_array(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint64)
    out = np.zeros(a.shape, dtype=np.int64)
    while np.any(a):
        out += (a & np.uint64(1)).astype(np.int64)
        a = a >> np.uint64(1)
    return out


def parse_rational(text) -> Fraction:
    if not isinstance(text, str):
        raise MalformedRational(f"expected a rational string, got {text!r}")
    m = _RATIONAL.match(text)
    if m is None:
        raise MalformedRational(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ZeroDenominator(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(v: Fraction) -> str:
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class Universe:
    """Ordered finite set of contract labels; index ``i`` is bit ``i``."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not 1 <= len(labels) <= MAX_N:
            raise UniverseTooLarge(f"universe size must be in [1, {MAX_N}], got {len(labels)}")
        for lab in labels:
            if not isinstance(lab, str) or not lab or _BAD_LABEL_CHARS.search(lab):
                raise BadLabel(f"bad contract label {lab!r}")
        if len(set(labels)) != len(labels):
            raise DuplicateLabel(f"duplicate labels in {list(labels)}")

    @classmethod
    def of_size(cls, n: int) -> "Universe":
        if n <= 26:
            return cls(tuple("abcdefghijklmnopqrstuvwxyz"[:n]))
        return cls(tuple(f"c{i}" for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def size(self) -> int:
        return 1 << self.n

    @cached_property
    def _index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(f"unknown contract {label!r}") from None

    def key(self, mask: int) -> str:
        return ",".join(self.labels[i] for i in members(mask))

    def parse_key(self, key: str) -> int:
        if not isinstance(key, str):
            raise MalformedJson(f"subset key must be a string, got {key!r}")
        if key.strip() == "":
            return 0
        mask = 0
        for part in key.split(","):
            bit = 1 << self.index(part.strip())
            if mask & bit:
                raise DuplicateKey(f"label repeated in key {key!r}")
            mask |= bit
        return mask

    def mask(self, labels: Union[str, Iterable[str]]) -> int:
        """Mask for ``"y,z"`` or an iterable of labels."""
        if isinstance(labels, str):
            return self.parse_key(labels)
        mask = 0
        for lab in labels:
            mask |= 1 << self.index(lab)
        return mask

    def keys(self) -> list[str]:
        return [self.key(m) for m in range(self.size)]


class Index(int):
    """Integer binding (a step number) that renders as a number, not a set."""


@dataclass(frozen=True)
class Witness:
    """Smallest falsifying tuple for a universally quantified property.

    ``bindings`` holds ``(role, value)`` pairs in quantifier order; an
    ``int`` value is a subset mask, a ``str`` value is a contract label and
    ``None`` stands for the empty exchange partner.
    """

    property: str
    universe: Universe
    bindings: tuple[tuple[str, object], ...]
    detail: str

    def get(self, role: str):
        for r, v in self.bindings:
            if r == role:
                return v
        raise KeyError(role)

    def rendered(self) -> dict:
        out = {}
        for role, value in self.bindings:
            if isinstance(value, Index):
                out[role] = int(value)
            elif isinstance(value, (int, np.integer)) and not isinstance(value, bool):
                out[role] = self.universe.key(int(value))
            elif value is None:
                out[role] = None
            else:
                out[role] = value
        return out

    def to_json(self) -> dict:
        return {"property": self.property, "holds": False, "witness": self.rendered(), "detail": self.detail}


@dataclass(frozen=True)
class Check:
    """Outcome of a property checker; truthy iff the property holds."""

    property: str
    holds: bool
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self, with_witness: bool = True) -> dict:
        if self.holds or self.witness is None:
            return {"property": self.property, "holds": self.holds}
        if not with_witness:
            return {"property": self.property, "holds": False}
        return self.witness.to_json()


def _frozen_table(table, size: int, dtype=np.int64) -> np.ndarray:
    arr = np.array(table, dtype=dtype)
    if arr.shape != (size,):
        raise MissingKey(f"table must have {size} entries, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ChoiceRule:
    """Total choice table: ``table[X]`` is the chosen submask of ``X``."""

    universe: Universe
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        size = self.universe.size
        arr = _frozen_table(self.table, size)
        object.__setattr__(self, "table", arr)
        xs = np.arange(size, dtype=np.int64)
        bad = np.nonzero((arr & ~xs) != 0)[0]
        if bad.size:
            X = int(bad[0])
            raise NotASubset(
                f"C({{{self.universe.key(X)}}}) = {{{self.universe.key(int(arr[X]))}}} is not a subset"
            )

    @property
    def n(self) -> int:
        return self.universe.n

    def __call__(self, X: int) -> int:
        return int(self.table[X])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChoiceRule):
            return NotImplemented
        return self.universe == other.universe and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.universe, self.table.tobytes()))

    @classmethod
    def from_function(cls, universe: Universe, fn) -> "ChoiceRule":
        return cls(universe, [fn(X) for X in range(universe.size)])

    @classmethod
    def identity(cls, universe: Universe) -> "ChoiceRule":
        return cls(universe, np.arange(universe.size))


@dataclass(frozen=True, eq=False)
class UtilityTable:
    """Exact utility for every subset of the universe."""

    universe: Universe
    values: tuple[Fraction, ...] = field(repr=False)

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        if len(vals) != self.universe.size:
            raise MissingKey(f"utility table needs {self.universe.size} values, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.universe.n

    def __getitem__(self, X: int) -> Fraction:
        return self.values[X]

    def __eq__(self, other) -> bool:
        if not isinstance(other, UtilityTable):
            return NotImplemented
        return self.universe == other.universe and self.values == other.values

    def __hash__(self) -> int:
        return hash((self.universe, self.values))

    @classmethod
    def from_function(cls, universe: Universe, fn) -> "UtilityTable":
        return cls(universe, tuple(Fraction(fn(X)) for X in range(universe.size)))

    def map(self, g) -> "UtilityTable":
        return UtilityTable(self.universe, tuple(Fraction(g(v)) for v in self.values))

    @cached_property
    def ranks(self) -> np.ndarray:
        """Dense integer ranks; equal values share a rank.

        Every ordinal property (strict or weak comparisons between single
        values) is decided on this array, which is exact.
        """
        distinct = sorted(set(self.values))
        pos = {v: i for i, v in enumerate(distinct)}
        arr = np.fromiter((pos[v] for v in self.values), dtype=np.int64, count=len(self.values))
        arr.setflags(write=False)
        return arr

    @cached_property
    def scaled(self) -> np.ndarray:
        """Values times the lcm of their denominators, as exact integers.

        Sums of two values are compared on this array. Falls back to an
        object array when int64 could overflow.
        """
        lcm = math.lcm(*(v.denominator for v in self.values))
        ints = [v.numerator * (lcm // v.denominator) for v in self.values]
        if max(abs(i) for i in ints) < (1 << 61):
            arr = np.array(ints, dtype=np.int64)
        else:
            arr = np.empty(len(ints), dtype=object)
            arr[:] = ints
        arr.setflags(write=False)
        return arr


def _no_duplicates(pairs) -> dict:
    out = {}
    for key, value in pairs:
        if key in out:
            raise DuplicateKey(f"key {key!r} listed twice")
        out[key] = value
    return out


def _load_json(text: Union[bytes, str]) -> dict:
    try:
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        obj = json.loads(text, object_pairs_hook=_no_duplicates)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedJson(str(exc)) from None
    if not isinstance(obj, dict) or not isinstance(obj.get("universe"), list):
        raise MalformedJson("expected an object with a 'universe' list")
    return obj


def _read_keyed(universe: Universe, mapping, what: str) -> dict[int, object]:
    if not isinstance(mapping, dict):
        raise MalformedJson(f"'{what}' must be an object")
    out: dict[int, object] = {}
    for key, value in mapping.items():
        X = universe.parse_key(key)
        if X in out:
            raise DuplicateKey(f"subset {{{universe.key(X)}}} listed twice")
        out[X] = value
    for X in range(universe.size):
        if X not in out:
            raise MissingKey(f"missing key {universe.key(X)!r}")
    return out


def parse_rule(text: Union[bytes, str]) -> ChoiceRule:
    obj = _load_json(text)
    universe = Universe(tuple(obj["universe"]))
    entries = _read_keyed(universe, obj.get("choice"), "choice")
    table = []
    for X in range(universe.size):
        chosen = entries[X]
        if not isinstance(chosen, str):
            raise MalformedJson(f"choice for {universe.key(X)!r} must be a key string")
        table.append(universe.parse_key(chosen))
    return ChoiceRule(universe, table)


def parse_utility(text: Union[bytes, str]) -> UtilityTable:
    obj = _load_json(text)
    universe = Universe(tuple(obj["universe"]))
    entries = _read_keyed(universe, obj.get("values"), "values")
    return UtilityTable(universe, tuple(parse_rational(entries[X]) for X in range(universe.size)))


def dumps(obj) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def rule_to_json(rule: ChoiceRule) -> dict:
    u = rule.universe
    return {"universe": list(u.labels), "choice": {u.key(X): u.key(int(c)) for X, c in enumerate(rule.table)}}


def utility_to_json(util: UtilityTable) -> dict:
    u = util.universe
    return {"universe": list(u.labels), "values": {u.key(X): format_rational(v) for X, v in enumerate(util.values)}}


def serialize_rule(rule: ChoiceRule) -> bytes:
    return dumps(rule_to_json(rule))


def serialize_utility(util: UtilityTable) -> bytes:
    return dumps(utility_to_json(util))


def check_same_universe(a, b) -> None:
    if a.universe != b.universe:
        raise UniverseMismatch(f"universes differ: {list(a.universe.labels)} vs {list(b.universe.labels)}")


def element_label(universe: Universe, i: int | None) -> str | None:
    return None if i is None else universe.labels[i]


def set_str(universe: Universe, X: int) -> str:
    return "{" + universe.key(X) + "}"


__all__: Sequence[str] = [
    "MAX_N",
    "ExactValue",
    "Universe",
    "ChoiceRule",
    "UtilityTable",
    "Witness",
    "Check",
    "parse_rule",
    "parse_utility",
    "serialize_rule",
    "serialize_utility",
    "parse_rational",
    "format_rational",
    "popcount",
    "popcounts",
    "members",
    "subsets_of",
]
