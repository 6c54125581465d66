"""Exception types shared across the package."""


class LipconjError(Exception):
    """Base class for all package errors."""


class ResourceLimitError(LipconjError):
    """A configured cap (breakpoints, cylinders, points) would be exceeded."""


class MarkovError(LipconjError, ValueError):
    """The partition is not a Markov partition for the map."""


class WindowError(LipconjError, ValueError):
    """A finite window is too small for an exact computation."""


class DivergenceError(LipconjError, ValueError):
    """A series that should converge for the given parameter does not."""
