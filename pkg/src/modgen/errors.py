"""Exception types shared across the package."""


class ModgenError(Exception):
    """Base class for all errors raised by this package."""


class NonConvergence(ModgenError):
    """An iterative eigensolver did not reach its tolerance within budget.

    Usually a sign that the working precision is too low for the input,
    or that the input violates a symmetry precondition.
    """


class SpectrumOutOfRange(ModgenError):
    """An eigenvalue sits too close to (or beyond) the boundary of (-1, 1).

    Carries the observed spectral margin so callers can decide how many
    additional digits a retry would need.
    """

    def __init__(self, message, margin=None, digits=None):
        super().__init__(message)
        self.margin = margin
        self.digits = digits


class QuadratureFailure(ModgenError):
    """Adaptive integration could not meet its tolerance within max depth."""


class InvalidRegion(ModgenError):
    """Region is empty, degenerate, or not representable on the ambient."""


class ConfigError(ModgenError):
    """Run configuration is malformed or internally inconsistent."""


class ConfigMismatch(ModgenError):
    """A closed-form reference was requested for an unsupported layout."""


class RootNotBracketed(ModgenError):
    """A 1-D root search found no sign change on the candidate interval."""


class DomainError(ModgenError):
    """A scalar function was evaluated outside its mathematical domain."""


class ExportError(ModgenError):
    """Reading or writing a run artifact failed."""
