"""Exception hierarchy.

Everything a caller can provoke with bad input derives from :class:`DomainError`.
:class:`InconsistencyError` and :class:`VerificationError` signal that a
mathematical guarantee was observed to fail, which points at a bug rather than
at the input.
"""


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class ConstructionError(DomainError):
    """A graph family produced a non-positive weight or conductance."""


class ParseError(DomainError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class PreconditionError(DomainError):
    """A documented precondition (positivity, residual, ...) does not hold."""


class CapacityError(DomainError):
    """A dense computation was requested on a region above the configured cap."""


class BudgetError(DomainError):
    """A lazy exploration exhausted its vertex budget before closing."""


class UnreachableError(DomainError):
    pass


class UndeterminedError(DomainError):
    pass


class UnsupportedError(DomainError):
    pass


class NumericError(DomainError):
    """Floating point underflow or overflow made a computation meaningless."""


class InconsistencyError(RuntimeError):
    """A proven identity or inequality was contradicted by a computed result."""


class VerificationError(AssertionError):
    """A named check from a reproduction pipeline failed."""

    def __init__(self, check, detail=""):
        self.check = check
        super().__init__(f"{check}: {detail}" if detail else check)
