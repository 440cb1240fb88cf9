"""Error taxonomy shared across the package.

ValidationError maps to CLI exit code 2, NumericalFailure to exit code 3.
"""


class SpectralHullError(Exception):
    pass


class ValidationError(SpectralHullError):
    """Bad inputs: dimension/field mismatch, constraint violations."""


class NumericalFailure(SpectralHullError):
    """A numerical contract broke: eigensolver residual, invariant breach."""
