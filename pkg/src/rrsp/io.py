"""JSON instance documents: schema validation, parsing and serialization.

A document names its nodes and lists arcs by tail/head name; arc ids are
the positions in ``arcs``.  Parsing followed by serialization reproduces
any document written by :func:`dumps` byte for byte.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import numpy as np
from jsonschema import Draft202012Validator

from .errors import InvalidInstance
from .graph import Multidigraph
from .model import ContinuousBudget, DiscreteBudget, Instance, Interval, validate_instance

FORMAT = "rrsp-instance"
VERSION = 1


@lru_cache(maxsize=1)
def schema():
    text = resources.files("rrsp").joinpath("schema/instance.schema.json").read_text()
    return json.loads(text)


def _pointer(path):
    return "/" + "/".join(str(p) for p in path)


def schema_violations(doc):
    """Schema errors as ``"<json pointer>: <message>"`` strings, in document order."""
    validator = Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: [str(p) for p in e.absolute_path])
    return [f"{_pointer(e.absolute_path)}: {e.message}" for e in errors]


def _number(x):
    x = float(x)
    if x.is_integer() and abs(x) < 2 ** 53:
        return int(x)
    return x


def to_document(inst):
    g = inst.graph
    names = [g.name(v) for v in range(g.n)]
    arcs = []
    for e in range(g.m):
        u, v = g.arc(e)
        arcs.append({
            "tail": names[u],
            "head": names[v],
            "C": _number(inst.first[e]),
            "c_hat": _number(inst.nominal[e]),
            "delta": _number(inst.deviation[e]),
        })
    unc = inst.uncertainty
    unc_doc = {"kind": unc.kind}
    if isinstance(unc, DiscreteBudget):
        unc_doc["budget"] = int(unc.budget)
    elif isinstance(unc, ContinuousBudget):
        unc_doc["budget"] = _number(unc.budget)
    doc = {"format": FORMAT, "version": VERSION}
    if inst.label:
        doc["label"] = inst.label
    doc.update({
        "nodes": names,
        "source": names[g.s],
        "sink": names[g.t],
        "arcs": arcs,
        "k": int(inst.k),
        "neighborhood": inst.neighborhood.value,
        "uncertainty": unc_doc,
    })
    return doc


def from_document(doc):
    """Build an :class:`Instance`; raises InvalidInstance listing every problem."""
    problems = schema_violations(doc)
    if problems:
        raise InvalidInstance(problems)
    names = doc["nodes"]
    index = {name: i for i, name in enumerate(names)}
    problems = []
    for key in ("source", "sink"):
        if doc[key] not in index:
            problems.append(f"/{key}: unknown node {doc[key]!r}")
    for i, arc in enumerate(doc["arcs"]):
        for key in ("tail", "head"):
            if arc[key] not in index:
                problems.append(f"/arcs/{i}/{key}: unknown node {arc[key]!r}")
    if not problems and doc["source"] == doc["sink"]:
        problems.append("/sink: source and sink coincide")
    if problems:
        raise InvalidInstance(problems)

    arcs = [(index[a["tail"]], index[a["head"]]) for a in doc["arcs"]]
    g = Multidigraph.from_arcs(arcs, index[doc["source"]], index[doc["sink"]],
                               n=len(names), node_names=tuple(names))
    u = doc["uncertainty"]
    if u["kind"] == "interval":
        unc = Interval()
    elif u["kind"] == "discrete_budget":
        if float(u["budget"]) != int(u["budget"]):
            raise InvalidInstance(["/uncertainty/budget: discrete budget must be an integer"])
        unc = DiscreteBudget(int(u["budget"]))
    else:
        unc = ContinuousBudget(float(u["budget"]))
    inst = Instance(
        g,
        np.array([a["C"] for a in doc["arcs"]], dtype=float),
        np.array([a["c_hat"] for a in doc["arcs"]], dtype=float),
        np.array([a["delta"] for a in doc["arcs"]], dtype=float),
        k=doc["k"],
        neighborhood=doc["neighborhood"],
        uncertainty=unc,
        label=doc.get("label", ""),
    )
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstance(problems)
    return inst


def dumps(inst):
    return json.dumps(to_document(inst), indent=2) + "\n"


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstance([f"line {exc.lineno} column {exc.colno}: {exc.msg}"]) from exc
    return from_document(doc)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(inst, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(inst))
