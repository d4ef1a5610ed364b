"""Exception hierarchy.

Input problems derive from :class:`InputError` so the CLI can map them to
exit code 2 in one place. Everything else signals either a property failure
the caller asked about (tied maximizers, a non path-independent rule handed
to the constructor) or an internal bug (``ConditionViolated``,
``HarnessFailure``).
"""

from __future__ import annotations


class PathChoiceError(Exception):
    """Base class for all package errors."""

    code = "Error"

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


class InputError(PathChoiceError, ValueError):
    code = "InputError"


class MalformedJson(InputError):
    code = "MalformedJson"


class MissingKey(InputError):
    code = "MissingKey"


class DuplicateKey(InputError):
    code = "DuplicateKey"


class UnknownLabel(InputError):
    code = "UnknownLabel"


class BadLabel(InputError):
    code = "BadLabel"


class DuplicateLabel(InputError):
    code = "DuplicateLabel"


class UniverseTooLarge(InputError):
    code = "UniverseTooLarge"


class UniverseMismatch(InputError):
    code = "UniverseMismatch"


class NotASubset(InputError):
    code = "NotASubset"


class MalformedRational(InputError):
    code = "MalformedRational"


class ZeroDenominator(MalformedRational):
    code = "ZeroDenominator"


class EpsilonOutOfRange(InputError):
    code = "EpsilonOutOfRange"


class TooLarge(InputError):
    code = "TooLarge"


class BadPriority(InputError):
    code = "BadPriority"


class BadQuota(InputError):
    code = "BadQuota"


class NotLaminar(InputError):
    code = "NotLaminar"


class EmptyBaseSet(InputError):
    code = "EmptyBaseSet"


class TiedMaximizers(PathChoiceError):
    """Some X has two or more subsets attaining the maximal utility."""

    code = "TiedMaximizers"

    def __init__(self, universe, X: int, first: int, second: int):
        self.universe = universe
        self.X, self.first, self.second = X, first, second
        super().__init__(
            f"tied maximizers under {{{universe.key(X)}}}: "
            f"{{{universe.key(first)}}} and {{{universe.key(second)}}}"
        )

    def to_json(self) -> dict:
        key = self.universe.key
        return {
            "error": self.code,
            "X": key(self.X),
            "S1": key(self.first),
            "S2": key(self.second),
            "message": str(self),
        }


class NotPathIndependent(PathChoiceError):
    code = "NotPathIndependent"

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"rule is not path independent: {witness.detail}")

    def to_json(self) -> dict:
        return {"error": self.code, **self.witness.to_json(), "message": str(self)}


class ConditionViolated(PathChoiceError):
    """A proof-trace condition failed; only possible through a bug."""

    code = "ConditionViolated"

    def __init__(self, step: int, condition: str, detail: str = ""):
        self.step, self.condition = step, condition
        super().__init__(f"step {step}: condition {condition} violated {detail}".rstrip())


class BudgetExhausted(PathChoiceError):
    code = "BudgetExhausted"


class HarnessFailure(PathChoiceError):
    """A verification harness found an object contradicting a proven result."""

    code = "HarnessFailure"

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)
