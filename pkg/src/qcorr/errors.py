"""Exception hierarchy shared by every qcorr module."""


class QcorrError(Exception):
    """Base class for all errors raised by qcorr."""


class NonFinite(QcorrError, ValueError):
    pass


class NotHermitian(QcorrError, ValueError):
    pass


class NotPSD(QcorrError, ValueError):
    pass


class NoConvergence(QcorrError, ArithmeticError):
    pass


class NotADistribution(QcorrError, ValueError):
    pass


class InvalidState(QcorrError, ValueError):
    """A matrix failed the density-matrix checks (Hermitian, unit trace, PSD)."""


class Unphysical(QcorrError, ValueError):
    """A correlation vector lies outside the tetrahedron of valid Bell-diagonal states."""

    def __init__(self, message, eigenvalue_name=None, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue_name = eigenvalue_name
        self.eigenvalue = eigenvalue


class ParamOutOfRange(QcorrError, ValueError):
    pass


class MapUnavailable(QcorrError):
    """No closed-form coefficient map exists for the requested channel settings."""
