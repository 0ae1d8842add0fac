"""Exception taxonomy shared across the package.

The CLI maps ValidationError (and subclasses) to exit code 1 and
CapacityError to exit code 2; everything else is a genuine bug.
"""


class LmomentError(Exception):
    """Base class for all package errors."""


class ValidationError(LmomentError):
    """A precondition on user-supplied input is violated."""


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class NotInvertibleError(DomainError):
    """Residue has no multiplicative inverse for the given modulus."""


class CapacityError(LmomentError):
    """Requested exact computation exceeds the supported size budget."""


class UnsupportedCaseError(LmomentError):
    """A closed form was requested outside its validity domain.

    Callers are expected to fall back to the brute-force route.
    """


class ContourSymmetryError(LmomentError):
    """Inverse-Mellin quadrature produced a non-negligible imaginary part.

    Signals a bug in the integrand (it must be conjugate-symmetric), not a
    user error.
    """


class CoverageError(ValidationError):
    """Supplied eigenvalue data does not reach the required truncation point."""


class ParseError(ValidationError):
    """Malformed eigenvalue file."""
