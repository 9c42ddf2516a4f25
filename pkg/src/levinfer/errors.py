"""Exception types raised across the package."""


class LevInferError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class DataError(LevInferError, ValueError):
    """Malformed or invalid input data (CLI exit code 2 when raised while parsing)."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class RankDeficientError(LevInferError, ValueError):
    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class SingularSampleError(RankDeficientError):
    """The scaled subsample does not span p dimensions."""


class ZeroProbabilityError(LevInferError, ValueError):
    pass


class BootstrapFailure(LevInferError, RuntimeError):
    pass
