"""Recoverable robust shortest paths on multidigraphs."""

from __future__ import annotations

from .errors import (
    InvalidInstance,
    NotSeriesParallel,
    RRSPError,
    TooManyPaths,
    UnsupportedStructure,
)
from .graph import Multidigraph, asp_decompose, classify, enumerate_st_paths
from .model import (
    ContinuousBudget,
    DiscreteBudget,
    Instance,
    Interval,
    Neighborhood,
    Scenario,
    Solution,
    neighborhood_contains,
)
from .recsolve import solve, solve_acyclic, solve_layered, solve_minmax_k0
from .aspdp import solve_asp
from .secondstage import adversarial_interval, evaluate_objective, solve_incremental
from .approx import approx_solve

__version__ = "0.1.0"
