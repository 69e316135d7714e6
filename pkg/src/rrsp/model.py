"""Problem instances, uncertainty sets, scenarios and solutions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import (
    ABS_TOL,
    REL_TOL,
    Multidigraph,
    close,
    is_acyclic,
    path_cost,
    reachable_from,
)
from .errors import InvalidInstance


class Neighborhood(enum.Enum):
    INCL = "incl"
    EXCL = "excl"
    SYM = "sym"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class Interval:
    kind = "interval"


@dataclass(frozen=True)
class DiscreteBudget:
    budget: int
    kind = "discrete_budget"


@dataclass(frozen=True)
class ContinuousBudget:
    budget: float
    kind = "continuous_budget"


def _frozen(values, m, name):
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape[0] != m:
        raise InvalidInstance(f"{name} has {arr.shape[0]} entries, expected {m}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Instance:
    """A recoverable robust shortest path instance.

    ``first`` holds the first-stage costs, ``nominal`` and ``deviation`` the
    interval ``[nominal, nominal + deviation]`` of each second-stage cost.
    """

    graph: Multidigraph
    first: np.ndarray
    nominal: np.ndarray
    deviation: np.ndarray
    k: int = 0
    neighborhood: Neighborhood = Neighborhood.INCL
    uncertainty: object = field(default_factory=Interval)
    label: str = ""

    def __post_init__(self):
        m = self.graph.m
        object.__setattr__(self, "first", _frozen(self.first, m, "first-stage cost"))
        object.__setattr__(self, "nominal", _frozen(self.nominal, m, "nominal cost"))
        object.__setattr__(self, "deviation", _frozen(self.deviation, m, "deviation"))
        object.__setattr__(self, "neighborhood", Neighborhood.parse(self.neighborhood))
        if int(self.k) != self.k:
            raise InvalidInstance("recovery parameter k must be an integer")
        object.__setattr__(self, "k", int(self.k))

    @property
    def upper(self):
        """Upper second-stage costs, always derived from nominal + deviation."""
        return self.nominal + self.deviation

    @property
    def m(self):
        return self.graph.m

    def replace(self, **changes):
        return replace(self, **changes)

    def interval_version(self, second_stage=None):
        """Same instance under plain interval uncertainty.

        With ``second_stage`` given, the second-stage costs are fixed to that
        vector (zero deviation), which is how Rec SP(S) is posed.
        """
        if second_stage is None:
            return replace(self, uncertainty=Interval())
        return replace(
            self,
            nominal=np.asarray(second_stage, dtype=float),
            deviation=np.zeros(self.m),
            uncertainty=Interval(),
        )


@dataclass(frozen=True)
class Scenario:
    costs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.costs, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "costs", arr)


def scenario_violations(inst, scenario, tol=ABS_TOL):
    c = np.asarray(getattr(scenario, "costs", scenario), dtype=float)
    out = []
    if c.shape != (inst.m,):
        return ["scenario length differs from arc count"]
    if np.any(c < inst.nominal - tol) or np.any(c > inst.upper + tol):
        out.append("scenario leaves the cost intervals")
    unc = inst.uncertainty
    if isinstance(unc, DiscreteBudget):
        if int(np.sum(c > inst.nominal + tol)) > unc.budget:
            out.append("too many deviating arcs")
    elif isinstance(unc, ContinuousBudget):
        if float(np.sum(c - inst.nominal)) > unc.budget + tol * max(1, inst.m):
            out.append("total deviation exceeds the budget")
    return out


@dataclass
class Solution:
    first_stage: tuple
    second_stage: tuple
    value: float
    method: str
    scenario: np.ndarray | None = None
    info: dict = field(default_factory=dict)


def neighborhood_contains(x, y, kind, k):
    """Whether path ``y`` lies in the ``kind`` neighborhood of ``x`` with parameter ``k``."""
    kind = Neighborhood.parse(kind)
    xs, ys = set(x), set(y)
    added = len(ys - xs)
    removed = len(xs - ys)
    if kind is Neighborhood.INCL:
        return added <= k
    if kind is Neighborhood.EXCL:
        return removed <= k
    return added + removed <= k


def upper_bound_scenario(inst):
    return Scenario(inst.upper)


def nominal_scenario(inst):
    return Scenario(inst.nominal)


def pair_value(inst, x, y, second_stage=None):
    """``C(x) + c(y)`` with ``c`` the upper costs unless a vector is given."""
    c = inst.upper if second_stage is None else second_stage
    return path_cost(inst.first, x) + path_cost(c, y)


def validate_instance(inst):
    """List of human-readable violations; empty when the instance is usable."""
    g = inst.graph
    out = []
    for name, arr in (("first-stage cost", inst.first), ("nominal cost", inst.nominal),
                      ("deviation", inst.deviation)):
        if not np.all(np.isfinite(arr)):
            out.append(f"{name} has non-finite entries")
    if np.any(inst.nominal < 0):
        out.append("negative nominal cost")
    if np.any(inst.deviation < 0):
        out.append("negative deviation")
    acyclic = is_acyclic(g)
    if np.any(inst.first < 0) and not acyclic:
        out.append("negative first-stage cost on a cyclic graph")
    if inst.k < 0:
        out.append("recovery parameter k is negative")
    unc = inst.uncertainty
    if isinstance(unc, DiscreteBudget):
        if int(unc.budget) != unc.budget or not 0 <= unc.budget <= g.m:
            out.append("budget out of range")
    elif isinstance(unc, ContinuousBudget):
        if not (math.isfinite(unc.budget) and unc.budget >= 0):
            out.append("budget out of range")
    elif not isinstance(unc, Interval):
        out.append(f"unknown uncertainty {unc!r}")
    if not reachable_from(g, g.s)[g.t]:
        out.append("sink unreachable")
    return out


def check_instance(inst):
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstance(problems)
    return inst


def check_solution(inst, sol, rel=REL_TOL):
    """Re-validate a Rec SP (interval) solution: membership and objective."""
    g = inst.graph
    if not g.is_path(sol.first_stage) or not g.is_path(sol.second_stage):
        return False
    if not neighborhood_contains(sol.first_stage, sol.second_stage, inst.neighborhood, inst.k):
        return False
    return close(pair_value(inst, sol.first_stage, sol.second_stage), sol.value, rel=rel)
