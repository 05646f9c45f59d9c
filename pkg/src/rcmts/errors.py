"""Exception hierarchy for the rcmts library.

Every error raised by the library derives from RcmtsError, so callers can
catch one base type. Subtypes distinguish bad inputs, bad arguments, parse
failures, and numerical breakdowns, which the command line tool maps to
distinct exit codes.
"""


class RcmtsError(Exception):
    """Base class for all library errors."""


class InvalidInputError(RcmtsError):
    """Input data violates a precondition (non-finite values, empty data)."""


class InvalidArgumentError(RcmtsError):
    """A parameter is out of range or inconsistent with the data."""


class InvalidLabelError(RcmtsError):
    """Class labels are malformed or a class is missing from training data."""


class ParseError(RcmtsError):
    """A dataset or config file could not be parsed.

    Attributes:
        line: 1-based line number of the offending line, when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(RcmtsError):
    """Base class for numerical breakdowns (exit code 3 in the CLI)."""


class SingularityError(NumericalError):
    """A linear system is singular and no regularization was requested."""


class ConvergenceError(NumericalError):
    """An iterative method hit its iteration cap.

    Attributes:
        last_estimate: the estimate at the final iteration, for diagnostics.
    """

    def __init__(self, message, last_estimate=None):
        super().__init__(message)
        self.last_estimate = last_estimate


class DivergenceError(NumericalError):
    """Training produced a non-finite loss.

    Attributes:
        epoch: 0-based epoch index at which the loss became non-finite.
    """

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class DegenerateReservoirError(NumericalError):
    """Reservoir sampling repeatedly produced an all-zero recurrent matrix."""


class SampleTooShortError(InvalidInputError):
    """A sample is too short for the requested operation.

    Attributes:
        sample_index: index of the offending sample within its dataset.
    """

    def __init__(self, message, sample_index=None):
        super().__init__(message)
        self.sample_index = sample_index
