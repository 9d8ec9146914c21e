"""Exception hierarchy for copack."""

from __future__ import annotations


class CopackError(Exception):
    """Base class for every error raised by copack."""


class NonPositiveEntry(CopackError, ValueError):
    """A duration in a speedup profile is not a positive finite number."""


class ParseError(CopackError, ValueError):
    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ValidationError(CopackError, ValueError):
    """Raised in strict mode when profiles break the monotonicity assumptions."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations[:20])
        more = len(self.violations) - 20
        if more > 0:
            lines += f"\n  ... and {more} more"
        super().__init__(f"{len(self.violations)} profile violation(s):\n{lines}")


class TooManyTasks(CopackError, ValueError):
    """A single pack was asked to hold more tasks than there are processors."""


class EmptyPack(CopackError, ValueError):
    pass


class InfeasibleSchedule(CopackError, ValueError):
    """A co-schedule breaks one of its structural invariants.

    ``invariant`` is one of ``partition``, ``capacity``, ``cardinality``,
    ``allocation`` or ``empty``.
    """

    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}")


class BudgetExceeded(CopackError, RuntimeError):
    pass


class InfeasibleAssignment(CopackError, ValueError):
    """An ILP assignment violates a constraint (``i``, ``ii``, ``iii``, ``iv`` or ``integrality``)."""

    def __init__(self, constraint: str, detail: str):
        self.constraint = constraint
        super().__init__(f"constraint ({constraint}): {detail}")
