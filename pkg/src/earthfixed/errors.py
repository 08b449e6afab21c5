"""Exception types raised across the package."""


class EarthFixedError(Exception):
    """Base class for all package errors."""


class NoIntersection(EarthFixedError):
    """A beam cone edge misses the Earth."""


class BeyondHorizon(EarthFixedError):
    """A ground point or direction is not visible from the satellite."""


class NoMainLobe(EarthFixedError):
    """The pattern has no main lobe around the pointing direction."""


class InvalidSpec(EarthFixedError, ValueError):
    """A layout or experiment specification is inconsistent."""


class DegenerateBeam(EarthFixedError):
    """A beam delivers zero power to its own reference user."""


class NotAchievable(EarthFixedError):
    """The SINR target cannot be met for any number of hops."""


class SchemeInfeasible(EarthFixedError):
    """A scheduling scheme cannot cover all hops within the SSB period."""


class EmptyMap(EarthFixedError):
    """A statistic was requested over an empty set of points."""
