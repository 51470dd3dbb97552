"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit codes: data/format problems exit with 3,
numerical failures with 4.
"""


class MiScalingError(Exception):
    """Base class for all package errors."""


class DomainError(MiScalingError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(MiScalingError, ValueError):
    """A model parameter set is malformed or violates an invariant."""


class InsufficientDataError(MiScalingError, ValueError):
    """Too few usable points remain for a fit."""


class FormatError(MiScalingError, ValueError):
    """An input file does not follow its documented format."""


class NumericalError(MiScalingError, ArithmeticError):
    """A numerical procedure (factorization, root finding) failed."""
