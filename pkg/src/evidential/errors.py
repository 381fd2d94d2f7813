"""Exception hierarchy.

Validation errors mean the input is malformed (CLI exit code 1).
Computation errors mean the input is well formed but the requested
quantity does not exist or could not be found (CLI exit code 2).
"""


class EvidentialError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(EvidentialError):
    pass


class ComputationError(EvidentialError):
    pass


class FrameMismatchError(ValidationError):
    pass


class NotABeliefFunctionError(ValidationError):
    """Möbius inversion produced a negative mass."""


class EnumerationCapError(ComputationError):
    """An operation needing 2^n (or n!) enumeration was refused."""


class NonCombinableError(ComputationError):
    """Total conflict: the combination (or conditioning) is undefined."""


class ZeroSingletonBeliefError(ComputationError):
    pass


class SingularSystemError(ComputationError):
    pass


class UnsolvedInstanceError(ComputationError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])
