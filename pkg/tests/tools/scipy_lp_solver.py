"""Minimal LP-file solver used by the test suite.

Usage: python3 scipy_lp_solver.py INPUT.lp OUTPUT.sol [TIMELIMIT]

Reads the LP file, solves it with scipy's HiGHS MILP interface and writes a
Gurobi-style solution file.  Exit status 1 when no optimum is found.
"""

from __future__ import annotations

import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from rrsp.mip import parse_lp


def main(argv):
    src, dst = argv[0], argv[1]
    limit = float(argv[2]) if len(argv) > 2 else None
    with open(src) as fh:
        model = parse_lp(fh.read())
    c, A, senses, b, lb, ub, integ, names = model.to_arrays()
    lo = np.where([s in (">=", "=") for s in senses], b, -np.inf)
    hi = np.where([s in ("<=", "=") for s in senses], b, np.inf)
    options = {"time_limit": limit} if limit else {}
    res = milp(c, constraints=LinearConstraint(A, lo, hi), integrality=integ,
               bounds=Bounds(lb, ub), options=options)
    if res.status != 0 or res.x is None:
        print(res.message, file=sys.stderr)
        return 1
    with open(dst, "w") as fh:
        fh.write(f"# Objective value = {float(res.fun)!r}\n")
        for name, val in zip(names, res.x):
            fh.write(f"{name} {float(val)!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
