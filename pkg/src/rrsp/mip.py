"""Compact MIP models, CPLEX LP export and an optional external solver run.

Two formulations are built:

* interval: binary first/second-stage flows ``x``, ``y`` and an overlap
  variable ``z <= x, y`` for the neighborhood row;
* continuous budget: ``m + 1`` second-stage blocks ``y{i}`` mixed with
  weights ``lam{i}`` (any point of the convex hull of the neighborhood is a
  mix of ``m + 1`` paths), with the inner adversary replaced by its LP dual
  (``g_e``, ``theta``).  Products ``lam{i} * y{i}_e`` become ``w{i}_e`` via
  the usual envelope for a binary times a [0, 1] variable.

Flow balance alone does not forbid extra cycles on cyclic graphs; decoding
keeps the simple s-t path and reports any leftover arcs.
"""

from __future__ import annotations

import math
import os
import re
import shlex
import subprocess
import tempfile
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInstance, LpParseError, SolverError, SolverUnavailable
from .model import ContinuousBudget, Interval, Neighborhood, neighborhood_contains

ENV_SOLVER = "RRSP_SOLVER_CMD"


@dataclass
class Var:
    name: str
    lb: float = 0.0
    ub: float = math.inf
    binary: bool = False


@dataclass
class Row:
    name: str
    terms: list  # [(var name, coefficient)]
    sense: str   # "<=", ">=", "="
    rhs: float


@dataclass
class MipModel:
    name: str = "rrsp"
    vars: dict = field(default_factory=dict)      # insertion-ordered
    rows: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)      # var name -> (role, block, arc)

    def add_var(self, name, lb=0.0, ub=math.inf, binary=False, meta=None):
        if name in self.vars:
            raise ValueError(f"duplicate variable {name}")
        if binary:
            lb, ub = 0.0, 1.0
        self.vars[name] = Var(name, lb, ub, binary)
        if meta is not None:
            self.meta[name] = meta
        return name

    def add_row(self, name, terms, sense, rhs):
        terms = [(v, float(c)) for v, c in terms if c != 0]
        self.rows.append(Row(name, terms, sense, float(rhs)))

    @property
    def num_vars(self):
        return len(self.vars)

    @property
    def num_binaries(self):
        return sum(1 for v in self.vars.values() if v.binary)

    def validate(self):
        if not self.rows:
            raise InvalidInstance("model has no constraints")
        for row in self.rows:
            if row.sense not in ("<=", ">=", "="):
                raise InvalidInstance(f"row {row.name}: bad sense {row.sense}")
            for v, _ in row.terms:
                if v not in self.vars:
                    raise InvalidInstance(f"row {row.name} references unknown {v}")
        for v, _ in self.objective:
            if v not in self.vars:
                raise InvalidInstance(f"objective references unknown {v}")
        for v in self.vars.values():
            if v.binary and (v.lb, v.ub) != (0.0, 1.0):
                raise InvalidInstance(f"binary {v.name} has bounds {v.lb}, {v.ub}")
        missing = [n for n in self.vars if n not in self.meta]
        if missing:
            raise InvalidInstance(f"variables without metadata: {missing[:5]}")
        return self

    def to_arrays(self):
        """Dense ``(c, A, senses, b, lb, ub, integrality, names)`` for matrix solvers."""
        names = list(self.vars)
        col = {n: j for j, n in enumerate(names)}
        c = np.zeros(len(names))
        for v, a in self.objective:
            c[col[v]] += a
        A = np.zeros((len(self.rows), len(names)))
        for i, row in enumerate(self.rows):
            for v, a in row.terms:
                A[i, col[v]] += a
        senses = [r.sense for r in self.rows]
        b = np.array([r.rhs for r in self.rows])
        lb = np.array([self.vars[n].lb for n in names])
        ub = np.array([self.vars[n].ub for n in names])
        integ = np.array([1 if self.vars[n].binary else 0 for n in names])
        return c, A, senses, b, lb, ub, integ, names


# --------------------------------------------------------------------------
# builders

def _flow_rows(model, g, prefix, var_of):
    for v in range(g.n):
        terms = [(var_of(e), 1.0) for e in g.out_arcs[v]]
        terms += [(var_of(e), -1.0) for e in g.in_arcs[v]]
        rhs = 1.0 if v == g.s else (-1.0 if v == g.t else 0.0)
        if terms or rhs:
            model.add_row(f"{prefix}_v{v}", terms, "=", rhs)


def _neighborhood_rows(model, inst, xname, yname, zname, tag):
    """Overlap ``z <= x, z <= y`` plus the budget row for the chosen kind."""
    m = inst.m
    for e in range(m):
        model.add_row(f"{tag}zx_e{e}", [(zname(e), 1), (xname(e), -1)], "<=", 0)
        model.add_row(f"{tag}zy_e{e}", [(zname(e), 1), (yname(e), -1)], "<=", 0)
    kind = inst.neighborhood
    if kind is Neighborhood.INCL:
        terms = [(yname(e), 1) for e in range(m)] + [(zname(e), -1) for e in range(m)]
    elif kind is Neighborhood.EXCL:
        terms = [(xname(e), 1) for e in range(m)] + [(zname(e), -1) for e in range(m)]
    else:
        terms = ([(xname(e), 1) for e in range(m)] + [(yname(e), 1) for e in range(m)]
                 + [(zname(e), -2) for e in range(m)])
    model.add_row(f"{tag}budget", terms, "<=", inst.k)


def build_interval_mip(inst):
    """``min C.x + c_bar.y`` over two unit flows linked by the neighborhood row."""
    if not isinstance(inst.uncertainty, Interval):
        raise InvalidInstance("interval model needs interval uncertainty")
    g = inst.graph
    model = MipModel("rrsp_interval")
    for e in range(g.m):
        model.add_var(f"x_e{e}", binary=True, meta=("x", None, e))
    for e in range(g.m):
        model.add_var(f"y_e{e}", binary=True, meta=("y", None, e))
    for e in range(g.m):
        model.add_var(f"z_e{e}", 0.0, 1.0, meta=("z", None, e))
    model.objective = ([(f"x_e{e}", inst.first[e]) for e in range(g.m)]
                       + [(f"y_e{e}", inst.upper[e]) for e in range(g.m)])
    model.objective = [(v, c) for v, c in model.objective if c != 0]
    _flow_rows(model, g, "fx", lambda e: f"x_e{e}")
    _flow_rows(model, g, "fy", lambda e: f"y_e{e}")
    _neighborhood_rows(model, inst, lambda e: f"x_e{e}", lambda e: f"y_e{e}",
                       lambda e: f"z_e{e}", "")
    return model.validate()


def build_continuous_budget_mip(inst):
    """Compact model for the continuous budget: ``m + 1`` mixed recovery blocks."""
    if not isinstance(inst.uncertainty, ContinuousBudget):
        raise InvalidInstance("continuous-budget model needs a continuous budget")
    g = inst.graph
    m = g.m
    blocks = m + 1
    model = MipModel("rrsp_cont_budget")
    for e in range(m):
        model.add_var(f"x_e{e}", binary=True, meta=("x", None, e))
    for i in range(blocks):
        model.add_var(f"lam{i}", 0.0, 1.0, meta=("lam", i, None))
        for e in range(m):
            model.add_var(f"y{i}_e{e}", binary=True, meta=("y", i, e))
            model.add_var(f"z{i}_e{e}", 0.0, 1.0, meta=("z", i, e))
            model.add_var(f"w{i}_e{e}", 0.0, 1.0, meta=("w", i, e))
    for e in range(m):
        model.add_var(f"g_e{e}", meta=("g", None, e))
    model.add_var("theta", meta=("theta", None, None))

    obj = [(f"x_e{e}", inst.first[e]) for e in range(m)]
    obj += [(f"w{i}_e{e}", inst.nominal[e]) for i in range(blocks) for e in range(m)]
    obj += [(f"g_e{e}", inst.deviation[e]) for e in range(m)]
    obj += [("theta", inst.uncertainty.budget)]
    model.objective = [(v, c) for v, c in obj if c != 0]

    _flow_rows(model, g, "fx", lambda e: f"x_e{e}")
    for i in range(blocks):
        _flow_rows(model, g, f"fy{i}", lambda e, i=i: f"y{i}_e{e}")
        _neighborhood_rows(model, inst, lambda e: f"x_e{e}", lambda e, i=i: f"y{i}_e{e}",
                           lambda e, i=i: f"z{i}_e{e}", f"b{i}")
        for e in range(m):
            w, y, lam = f"w{i}_e{e}", f"y{i}_e{e}", f"lam{i}"
            model.add_row(f"wl{i}_e{e}", [(w, 1), (lam, -1)], "<=", 0)
            model.add_row(f"wy{i}_e{e}", [(w, 1), (y, -1)], "<=", 0)
            model.add_row(f"wb{i}_e{e}", [(w, 1), (lam, -1), (y, -1)], ">=", -1)
    model.add_row("mix", [(f"lam{i}", 1) for i in range(blocks)], "=", 1)
    for e in range(m):
        terms = [(f"g_e{e}", 1), ("theta", 1)] + [(f"w{i}_e{e}", -1) for i in range(blocks)]
        model.add_row(f"dual_e{e}", terms, ">=", 0)
    return model.validate()


# --------------------------------------------------------------------------
# LP text

def _num(v):
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return format(float(v), ".17g")


def _expr(terms, width=200):
    parts = []
    for i, (v, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coef = "" if mag == 1 else _num(mag) + " "
        if i == 0:
            parts.append(("- " if c < 0 else "") + coef + v)
        else:
            parts.append(f"{sign} {coef}{v}")
    lines, cur = [], ""
    for p in parts:
        if cur and len(cur) + len(p) + 1 > width:
            lines.append(cur)
            cur = "   " + p
        else:
            cur = f"{cur} {p}" if cur else p
    lines.append(cur)
    return "\n".join(lines) if parts else "0"


def export_lp(model, destination=None):
    """CPLEX LP text for ``model``; also written to ``destination`` when given.

    Output depends only on the model, so equal models give equal bytes.
    """
    model.validate()
    out = [f"\\ {model.name}", "Minimize"]
    obj = model.objective or [(next(iter(model.vars)), 0.0)]
    out.append(" obj: " + _expr(obj))
    out.append("Subject To")
    for row in model.rows:
        lhs = _expr(row.terms) if row.terms else "0 " + next(iter(model.vars))
        out.append(f" {row.name}: {lhs} {row.sense} {_num(row.rhs)}")
    out.append("Bounds")
    for v in model.vars.values():
        if v.binary:
            continue
        if v.lb == 0 and v.ub == math.inf:
            continue
        if v.ub == math.inf:
            out.append(f" {v.name} >= {_num(v.lb)}")
        elif v.lb == -math.inf:
            out.append(f" -inf <= {v.name} <= {_num(v.ub)}")
        else:
            out.append(f" {_num(v.lb)} <= {v.name} <= {_num(v.ub)}")
    bins = [v.name for v in model.vars.values() if v.binary]
    if bins:
        out.append("Binaries")
        for i in range(0, len(bins), 10):
            out.append(" " + " ".join(bins[i:i + 10]))
    out.append("End")
    text = "\n".join(out) + "\n"
    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            Path(destination).write_text(text)
    return text


_SECTIONS = {
    "minimize": "obj", "minimum": "obj", "min": "obj",
    "subject to": "rows", "such that": "rows", "st": "rows", "s.t.": "rows",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "generals": "gen", "general": "gen", "end": "end",
}
_TERM = re.compile(r"([+-]?)\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.\[\]]*)")


def _parse_terms(text, where):
    text = text.strip()
    terms = []
    pos = 0
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if not mt or mt.end() == pos:
            raise LpParseError(f"{where}: cannot parse near {text[pos:pos + 20]!r}")
        sign, num, name = mt.groups()
        c = float(num) if num else 1.0
        terms.append((name, -c if sign == "-" else c))
        pos = mt.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return terms


def parse_lp(text):
    """Read the LP subset written by :func:`export_lp` back into a model.

    Metadata is not part of the file; every variable gets ``("lp", None, None)``.
    """
    model = MipModel()
    section = None
    chunks = {"obj": [], "rows": [], "bounds": [], "bin": [], "gen": []}
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTIONS:
            section = _SECTIONS[key]
            if section == "end":
                break
            continue
        if section is None:
            raise LpParseError(f"content before any section: {line!r}")
        chunks[section].append(line)

    def add(name):
        if name not in model.vars:
            model.add_var(name, meta=("lp", None, None))

    objtext = " ".join(chunks["obj"])
    if ":" in objtext:
        objtext = objtext.split(":", 1)[1]
    model.objective = _parse_terms(objtext, "objective") if objtext.strip() else []
    for v, _ in model.objective:
        add(v)

    # rows may wrap: a new row starts with "name:"
    rows, cur = [], ""
    for line in chunks["rows"]:
        if re.match(r"^[A-Za-z_][\w.]*\s*:", line) and cur:
            rows.append(cur)
            cur = line
        else:
            cur = f"{cur} {line}" if cur else line
    if cur:
        rows.append(cur)
    for r in rows:
        mt = re.match(r"^([A-Za-z_][\w.]*)\s*:\s*(.*?)\s*(<=|>=|=<|=>|=|<|>)\s*([+-]?[\d.eE+-]+)\s*$", r)
        if not mt:
            raise LpParseError(f"bad constraint {r!r}")
        name, lhs, sense, rhs = mt.groups()
        sense = {"=<": "<=", "<": "<=", "=>": ">=", ">": ">="}.get(sense, sense)
        terms = _parse_terms(lhs, name)
        for v, _ in terms:
            add(v)
        model.add_row(name, terms, sense, float(rhs))

    for line in chunks["bounds"]:
        toks = line.split()
        try:
            if len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
                add(toks[2])
                model.vars[toks[2]].lb = float(toks[0])
                model.vars[toks[2]].ub = float(toks[4])
            elif len(toks) == 3 and toks[1] in ("<=", ">=", "="):
                add(toks[0])
                val = float(toks[2])
                if toks[1] == "<=":
                    model.vars[toks[0]].ub = val
                elif toks[1] == ">=":
                    model.vars[toks[0]].lb = val
                else:
                    model.vars[toks[0]].lb = model.vars[toks[0]].ub = val
            elif len(toks) == 2 and toks[1].lower() == "free":
                add(toks[0])
                model.vars[toks[0]].lb = -math.inf
            else:
                raise ValueError
        except ValueError:
            raise LpParseError(f"bad bound {line!r}") from None
    for line in chunks["bin"] + chunks["gen"]:
        for v in line.split():
            add(v)
            var = model.vars[v]
            var.binary = True
            var.lb, var.ub = 0.0, 1.0
    return model


# --------------------------------------------------------------------------
# external solver

@dataclass
class SolverResult:
    objective: float
    values: dict
    first_stage: tuple | None = None
    second_stage: tuple | None = None
    valid: bool | None = None
    leftover: dict = field(default_factory=dict)


def parse_solution(text):
    """Parse a ``name value`` solution file with an objective comment line.

    Accepts Gurobi-style ``# Objective value = v`` and SCIP-style
    ``objective value: v`` headers.
    """
    objective = None
    values = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        mt = re.match(r"^#?\s*objective value\s*[:=]\s*(\S+)", line, re.IGNORECASE)
        if mt:
            try:
                objective = float(mt.group(1))
            except ValueError:
                raise LpParseError(f"line {n}: bad objective {mt.group(1)!r}") from None
            continue
        if line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) < 2:
            raise LpParseError(f"line {n}: expected 'name value', got {line!r}")
        try:
            values[toks[0]] = float(toks[1])
        except ValueError:
            raise LpParseError(f"line {n}: bad value {toks[1]!r}") from None
    if objective is None:
        raise LpParseError("solution file has no objective line")
    return objective, values


def _stage_path(g, arcs):
    """Simple s-t path inside the chosen arcs plus whatever arcs are left over."""
    chosen = sorted(set(arcs))
    out = {}
    for e in chosen:
        out.setdefault(g.tails[e], []).append(e)
    pred = {g.s: None}
    queue = deque([g.s])
    while queue:
        u = queue.popleft()
        for e in out.get(u, []):
            v = g.heads[e]
            if v not in pred:
                pred[v] = e
                queue.append(v)
    if g.t not in pred:
        return None, chosen
    path = []
    v = g.t
    while v != g.s:
        path.append(pred[v])
        v = g.tails[pred[v]]
    path.reverse()
    return tuple(path), sorted(set(chosen) - set(path))


def decode_solution(model, inst, values):
    """Recover ``(X, Y)`` from a solved model; ``Y`` is the block with most weight."""
    g = inst.graph
    xs = [meta[2] for n, meta in model.meta.items()
          if meta[0] == "x" and values.get(n, 0) > 0.5]
    blocks = {}
    for n, meta in model.meta.items():
        if meta[0] == "y" and values.get(n, 0) > 0.5:
            blocks.setdefault(meta[1], []).append(meta[2])
    if None in blocks:
        ys = blocks[None]
    else:
        weights = {meta[1]: values.get(n, 0.0) for n, meta in model.meta.items()
                   if meta[0] == "lam"}
        best = max(sorted(blocks), key=lambda i: weights.get(i, 0.0)) if blocks else None
        ys = blocks.get(best, [])
    x, xl = _stage_path(g, xs)
    y, yl = _stage_path(g, ys)
    leftover = {"x": xl, "y": yl}
    valid = (x is not None and y is not None
             and neighborhood_contains(x, y, inst.neighborhood, inst.k))
    return x, y, valid, leftover


def solver_command(command=None):
    cmd = command or os.environ.get(ENV_SOLVER)
    if not cmd:
        raise SolverUnavailable(f"no solver configured (set {ENV_SOLVER})")
    return cmd


def run_external_solver(lp, command=None, time_limit=60.0, model=None, inst=None):
    """Run a solver given as a template with ``{input}``, ``{output}``, ``{timelimit}``.

    ``lp`` is LP text or a :class:`MipModel`.  With ``model`` and ``inst``
    the assignment is decoded and re-validated.
    """
    cmd = solver_command(command)
    if isinstance(lp, MipModel):
        model = model or lp
        lp = export_lp(lp)
    with tempfile.TemporaryDirectory(prefix="rrsp_") as tmp:
        src = Path(tmp) / "model.lp"
        dst = Path(tmp) / "model.sol"
        src.write_text(lp)
        argv = [a.format(input=src, output=dst, timelimit=time_limit)
                for a in shlex.split(cmd)]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True,
                                  timeout=max(1.0, float(time_limit)) * 4 + 10)
        except FileNotFoundError as exc:
            raise SolverUnavailable(f"solver executable not found: {argv[0]}") from exc
        except subprocess.TimeoutExpired as exc:
            raise SolverError("solver did not finish in time") from exc
        if proc.returncode != 0:
            raise SolverError(f"solver exited with {proc.returncode}: {proc.stderr.strip()[-500:]}",
                              proc.returncode)
        if not dst.exists():
            raise LpParseError("solver wrote no solution file")
        objective, values = parse_solution(dst.read_text())
    res = SolverResult(objective, values)
    if model is not None and inst is not None:
        res.first_stage, res.second_stage, res.valid, res.leftover = decode_solution(
            model, inst, values)
    return res
