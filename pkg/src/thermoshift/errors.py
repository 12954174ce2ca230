"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: invalid inputs exit 2,
budget overruns exit 3, numerical failures exit 4.
"""


class ThermoshiftError(Exception):
    """Base class for all package errors."""


class SftError(ThermoshiftError, ValueError):
    """Invalid subshift data (non-square, non-0/1, reducible, periodic)."""


class PotentialError(ThermoshiftError, ValueError):
    """Invalid potential data or mismatched systems."""


class BudgetError(ThermoshiftError, RuntimeError):
    """An orbit enumeration exceeded its configured budget."""


class NumericsError(ThermoshiftError, RuntimeError):
    """Base class for numerical failures that are not input errors."""


class ConvergenceError(NumericsError):
    """Power iteration failed to reach tolerance within its iteration cap."""


class BranchAmbiguityError(NumericsError):
    """Two eigenvalue branches became indistinguishable during tracking."""


class BracketError(NumericsError):
    """A root bracket could not be established on the scanned interval."""


class PoleFitError(NumericsError):
    """The pole-model fit residual exceeded its acceptance threshold."""


class DegenerateVarianceError(NumericsError):
    """A variance scale was too close to zero to normalize by."""
