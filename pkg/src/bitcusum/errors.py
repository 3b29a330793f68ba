"""Exception types raised across the package."""


class DisconnectedGraph(ValueError):
    """The sensor graph has more than one connected component."""


class SpectralGapViolation(ValueError):
    """A consensus weight matrix has sigma2 outside the open interval (0, 1)."""


class DimensionMismatch(ValueError):
    """An innovation vector or matrix does not match the network size."""


class DegenerateBits(ValueError):
    """A bit pool is all zeros or all ones, so the inverse-CDF estimate diverges."""


class DegenerateLogArgument(ValueError):
    """A logarithm or inverse-CDF argument left (0, 1), typically because
    consensus estimates transiently overshot the true sums."""


class OracleScaleExceeded(ValueError):
    """The numeric likelihood oracle was asked for an instance larger than it
    is meant to handle (it exists for small-scale testing only)."""


class InfeasibleMN(ValueError):
    """M*N is too small for the false-alarm period guarantee to be meaningful."""


class DomainError(ValueError):
    """An argument lies outside its documented domain."""


class ConfigError(ValueError):
    """A configuration or topology file is invalid; the message names the field."""
