"""Exception taxonomy shared by every module in the toolkit."""

from __future__ import annotations

import numpy as np


class ToolkitError(Exception):
    """Base class for all toolkit-specific failures."""


class InvalidInputError(ToolkitError, ValueError):
    """A numeric argument is non-finite or structurally malformed."""


class ConfigurationError(ToolkitError, ValueError):
    """Construction parameters violate a documented bound."""


class PreconditionError(ToolkitError, ValueError):
    """An operation's stated precondition does not hold for these arguments."""


class DegenerateSurfaceError(ToolkitError):
    """The radial profile is minimized at radius zero, so there is no
    hypersurface of extrema to build on."""


class OutOfBandError(ToolkitError):
    """A tabulated Fourier transform was queried outside its resolved band.

    Raised instead of extrapolating silently; the caller must either
    enlarge the table or shrink the query region.
    """


class ConsistencyError(ToolkitError):
    """An assembled object failed an internal structural check.

    Signals a broken convention upstream (e.g. a non-Hermitian kernel
    matrix from a Fourier transform that is not conjugate-symmetric).
    """


class GaugeSingularityError(ToolkitError):
    """A band eigenvector was requested where the gauge is undefined."""


class ConvergenceError(ToolkitError):
    """An iterative eigensolver exhausted its budget.

    Carries the best available Ritz values and residual norms so the
    failure is diagnosable.
    """

    def __init__(self, message, eigenvalues=None, residuals=None):
        super().__init__(message)
        self.eigenvalues = None if eigenvalues is None else np.asarray(eigenvalues)
        self.residuals = None if residuals is None else np.asarray(residuals)
