"""
Exceptions raised by :mod:`sprockets.dfr`.

Every exception derives from :exc:`DFRError` and from the closest
built-in exception so that callers can catch either.

"""


class DFRError(Exception):
    """Base class of all errors raised by this package."""


class DimensionError(DFRError, ValueError):
    """Operands have incompatible shapes."""


class NonFiniteError(DFRError, ValueError):
    """A NaN or infinite value was found where finite values are required."""


class SingularMatrixError(DFRError, ArithmeticError):
    """The Gram matrix of a ridge system cannot be factored."""


class DegenerateStateError(DFRError, ValueError):
    """An all-zero shift register state was supplied."""


class MaskSizeError(DFRError, ValueError):
    """The mask cannot provide a column for every input variable."""


class NonlinearityPoleError(DFRError, ArithmeticError):
    """The Mackey-Glass denominator ``1 + t**p`` evaluated to zero."""


class EmptyTrajectoryError(DFRError, ValueError):
    """A trajectory with no input steps was supplied."""


class SeriesTooLongError(DFRError, ValueError):
    """A series exceeds the configured maximal length."""


class RepresentationMismatch(DFRError, ValueError):
    """A representation does not match what a model was trained on."""


class InsufficientClassesError(DFRError, ValueError):
    """Training data must contain at least two distinct labels."""


class ConfigurationError(DFRError, ValueError):
    """An experiment configuration is invalid."""


class EmptySplitError(DFRError, ValueError):
    """A dataset split that must contain instances is empty."""


class ModelFormatError(DFRError, ValueError):
    """A model bundle is malformed or has an unsupported version."""


class DatasetFormatError(DFRError, ValueError):
    """
    A dataset file could not be parsed.

    :param str message: description of the problem
    :param str|None path: the file being read
    :param int|None lineno: 1-based line number of the problem

    """

    def __init__(self, message, path=None, lineno=None):
        self.message = message
        self.path = path
        self.lineno = lineno
        location = []
        if path is not None:
            location.append(str(path))
        if lineno is not None:
            location.append('line {}'.format(lineno))
        if location:
            message = '{}: {}'.format(', '.join(location), message)
        super().__init__(message)
