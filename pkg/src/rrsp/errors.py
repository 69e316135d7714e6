"""Exception hierarchy shared by all solvers."""

from __future__ import annotations


class RRSPError(Exception):
    """Base class for every error raised by this package."""


class CycleDetected(RRSPError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(f"graph contains a directed cycle through nodes {self.cycle}")


class NotSeriesParallel(RRSPError):
    pass


class Unreachable(RRSPError):
    pass


class Infeasible(RRSPError):
    pass


class TooManyPaths(RRSPError):
    def __init__(self, cap):
        self.cap = cap
        super().__init__(f"more than {cap} paths; refusing to enumerate")


class UnsupportedStructure(RRSPError):
    pass


class InvalidInstance(RRSPError, ValueError):
    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class AlphaZero(RRSPError):
    """Some arc has zero nominal cost but positive deviation."""


class DZero(RRSPError):
    """All deviations are zero, so the budget-spread scenario is undefined."""


class SolverUnavailable(RRSPError):
    pass


class SolverError(RRSPError):
    def __init__(self, message, returncode=None):
        self.returncode = returncode
        super().__init__(message)


class LpParseError(RRSPError):
    pass
