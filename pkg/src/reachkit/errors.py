"""Exception types shared across the toolkit."""


class ReachkitError(Exception):
    """Base class for toolkit-specific failures."""


class CapacityError(ReachkitError):
    """A brute-force routine was asked to exceed its configured size cap."""


class InfeasibleError(ReachkitError):
    """No solution exists within the stated constraints or budget."""


class ReductionIntegrityError(ReachkitError):
    """A mapped solution failed a check that the construction guarantees.

    This signals a bug in the reduction machinery or the numerical kernel,
    not bad user input.
    """


class InstanceFormatError(ReachkitError, ValueError):
    """An instance file could not be parsed into a consistent document."""
