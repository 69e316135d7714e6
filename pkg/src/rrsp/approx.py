"""Approximate Rec Rob SP under budgeted uncertainty on acyclic graphs.

The approximate first-stage path comes from solving Rec SP under a single
fixed scenario: the nominal costs (discrete budget) or the budget-spread
scenario ``S'`` (continuous budget).  Each applicable ratio certificate is
checked before it is reported.

* alpha: ``1 / min_e c_hat_e / (c_hat_e + delta_e)``; needs ``C >= 0``.
* beta: ``1 / min(1, budget / D)`` with ``D = sum(delta)``; needs ``C >= 0``.
* gamma: ``1 / (1 - budget / F(x_hat))`` when ``budget < F(x_hat)``; needs
  the exact ``F(x_hat)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AlphaZero, DZero, InvalidInstance, TooManyPaths, UnsupportedStructure
from .graph import DEFAULT_PATH_CAP, is_acyclic
from .model import ContinuousBudget, DiscreteBudget, Scenario
from .recsolve import solve
from .secondstage import adversarial_interval, evaluate_objective


@dataclass
class ApproxResult:
    first_stage: tuple
    recovery: tuple
    value: float            # F(x_hat), or an upper bound when ``exact`` is False
    exact: bool
    ratio: float            # best certified ratio, inf when none applies
    certificate: str | None
    certificates: dict = field(default_factory=dict)
    scenario: np.ndarray | None = None
    surrogate_value: float = math.nan   # Rec SP optimum under the fixed scenario


def compute_alpha(inst):
    """``min_e c_hat_e / (c_hat_e + delta_e)``, arcs with zero upper cost counting as 1."""
    nom, dev = inst.nominal, inst.deviation
    if np.any((nom == 0) & (dev > 0)):
        raise AlphaZero("an arc has zero nominal cost but positive deviation")
    upper = nom + dev
    ratios = np.ones(inst.m)
    pos = upper > 0
    ratios[pos] = nom[pos] / upper[pos]
    return float(ratios.min()) if inst.m else 1.0


def build_sprime(inst):
    """Spread the continuous budget over all arcs in proportion to their deviation."""
    if not isinstance(inst.uncertainty, ContinuousBudget):
        raise InvalidInstance("S' is defined for the continuous budget only")
    D = float(inst.deviation.sum())
    if D <= 0:
        raise DZero("all deviations are zero")
    budget = inst.uncertainty.budget
    return Scenario(np.minimum(inst.upper, inst.nominal + budget * inst.deviation / D))


def _alpha_certificate(inst, certs):
    if np.any(inst.first < 0):
        return
    try:
        certs["alpha"] = 1.0 / compute_alpha(inst)
    except AlphaZero:
        pass


def approx_solve(inst, cap=DEFAULT_PATH_CAP):
    """Approximate solution with its certified ratio.

    When the exact ``F(x_hat)`` is out of reach (too many paths) the interval
    value is reported as an upper bound and the gamma certificate is skipped.
    """
    unc = inst.uncertainty
    if not isinstance(unc, (ContinuousBudget, DiscreteBudget)):
        raise InvalidInstance("approx_solve needs budgeted uncertainty")
    if not is_acyclic(inst.graph):
        raise UnsupportedStructure("approximation needs an acyclic graph")

    certs = {}
    if isinstance(unc, DiscreteBudget) or inst.deviation.sum() <= 0:
        scen = inst.nominal
    else:
        scen = build_sprime(inst).costs
    sur = solve(inst.interval_version(second_stage=scen))
    x = sur.first_stage

    exact = True
    try:
        ev = evaluate_objective(inst, x, cap)
        value, recovery = ev.value, ev.recovery
    except TooManyPaths:
        ev = adversarial_interval(inst, x)
        value, recovery, exact = ev.value, ev.recovery, False

    if inst.deviation.sum() <= 0:
        certs["alpha"] = 1.0  # no uncertainty left: the surrogate is the problem
    else:
        _alpha_certificate(inst, certs)
    if isinstance(unc, ContinuousBudget) and inst.deviation.sum() > 0:
        D = float(inst.deviation.sum())
        if unc.budget > 0 and not np.any(inst.first < 0):
            certs["beta"] = 1.0 / min(1.0, unc.budget / D)
        if exact:
            if value <= 0 and not np.any(inst.first < 0):
                certs["gamma"] = 1.0  # F >= 0 everywhere, so zero is optimal
            elif value > 0 and unc.budget < value:
                certs["gamma"] = 1.0 / (1.0 - unc.budget / value)
    if certs:
        best = min(certs, key=lambda c: (certs[c], c))
        ratio = certs[best]
    else:
        best, ratio = None, math.inf
    return ApproxResult(x, recovery, value, exact, ratio, best, certs,
                        np.array(scen), sur.value)
