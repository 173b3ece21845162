"""Exception hierarchy shared by all modules."""


class WaveSBVPError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WaveSBVPError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResolutionError(DomainError):
    """Requested polynomial order or basis size exceeds the supported cap."""


class UnsupportedWeightError(DomainError):
    """The family has no bounded-interval weight moment."""


class ExprSyntaxError(WaveSBVPError, ValueError):
    """Malformed expression text. ``offset`` is the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EvaluationError(WaveSBVPError, ArithmeticError):
    """Evaluation produced a non-finite or undefined value.

    ``index`` is the position of the first offending sample when the
    expression was evaluated on an array, otherwise ``None``.
    """

    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} (sample {index})"
        super().__init__(message)
        self.index = index


class SchemaError(WaveSBVPError, ValueError):
    """A problem document does not match the expected JSON layout."""


class UnknownProblemError(WaveSBVPError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else "unknown builtin"


class SingularMatrixError(WaveSBVPError, ArithmeticError):
    """LU factorisation hit a pivot below the singularity threshold."""


class ConditioningError(SingularMatrixError):
    """A solver iteration produced a singular linear system."""

    def __init__(self, message, iteration):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration
