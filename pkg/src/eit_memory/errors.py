"""Exception hierarchy.

``InfeasibleError`` subclasses mark physically infeasible requests (an
unmatchable pulse, a bath that recurs inside the window, an integration
step that is too coarse). The command-line front end maps them to exit
code 2; every other ``ValueError`` is a usage problem (exit code 1).
"""


class CutoffError(ValueError):
    """Photon-number cutoff too small for the requested state."""

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim


class TruncationError(ValueError):
    """A sampled envelope loses too much norm at the grid edges."""


class GridMismatchError(ValueError):
    """Two sampled quantities do not live on the same time grid."""


class NormalizationError(ValueError):
    """An envelope that must be normalized is not."""


class InfeasibleError(ValueError):
    """Base class for physically infeasible requests."""


class UnmatchableError(InfeasibleError):
    """The pulse rises faster than the cavity can follow.

    ``time`` is the first grid time at which cos^2(theta) would exceed 1.
    """

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class RecurrenceError(InfeasibleError):
    """Bath recurrence time 2*pi/delta falls inside the simulation window."""


class BandwidthError(InfeasibleError):
    """Bath bandwidth is too narrow for the pulse spectrum."""


class StepSizeError(InfeasibleError):
    """Integration step violates the fixed-step stability bound."""
