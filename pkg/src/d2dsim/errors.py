"""Exception hierarchy shared by every module."""


class D2DSimError(Exception):
    """Base class; ``kind`` is the short tag printed by the command line."""

    kind = "error"


class ConfigError(D2DSimError, ValueError):
    kind = "config"


class UsageError(D2DSimError, ValueError):
    kind = "usage"


class InfeasibleInstanceError(D2DSimError):
    kind = "infeasible"


class InstanceTooLargeError(D2DSimError):
    kind = "too-large"


class DegenerateDistributionError(D2DSimError, ValueError):
    kind = "degenerate"
