"""Exception hierarchy shared by all probtable modules."""

from __future__ import annotations


class ProbTableError(Exception):
    """Base class for every error raised by probtable."""


class InputError(ProbTableError, ValueError):
    """The caller handed in data that violates a documented precondition."""


class TableSyntaxError(InputError):
    """Malformed JSON/CSV table or model input."""


class ValidationError(InputError):
    """A table entry or column violates a probability-table invariant.

    ``row``/``col`` are global indices; ``outcome``/``state``/``measurement``
    carry the corresponding names when known.
    """

    def __init__(self, message, *, row=None, col=None, outcome=None, state=None, measurement=None):
        super().__init__(message)
        self.row = row
        self.col = col
        self.outcome = outcome
        self.state = state
        self.measurement = measurement


class InvalidWeights(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class SingularBasis(InputError):
    pass


class OutOfDomain(InputError):
    pass


class MixedMeasurements(InputError):
    pass


class NotDistinguishable(InputError):
    pass


class NotHermitian(InputError):
    pass


class InvalidModel(InputError):
    pass


class NotSpanning(InputError):
    pass


class DegenerateTable(ProbTableError):
    pass


class InconsistentRank(ProbTableError):
    """Float-mode pivoting could not reproduce the SVD rank."""


class InconsistentTable(ProbTableError):
    """Outcome vectors of some measurement do not sum to the trivial vector."""


class SolverFailure(ProbTableError):
    pass


class SearchBudgetExceeded(ProbTableError):
    pass
