"""JSON model and network documents.

Rationals are ``"p/q"`` strings, ranks are integers or ``"inf"``.  Parameter
vectors list worlds in the encoding order (``X1`` least significant).
"""

from __future__ import annotations

import itertools
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import algebras as A
from .bayesnet import UNDEFINED, Cpt, Dag, QuantitativeBN
from .core import ConditionalPlausibilityMeasure, PatchedMeasure, PlausibilityError, WorldSpace

VERSION = 1
_RATIONAL = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


class DocumentError(PlausibilityError, ValueError):
    pass


# -- scalars ----------------------------------------------------------------


def parse_rational(obj) -> Fraction:
    if isinstance(obj, bool):
        raise DocumentError(f"not a rational: {obj!r}")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str) and _RATIONAL.match(obj):
        try:
            return Fraction(obj.replace(" ", ""))
        except ZeroDivisionError:
            raise DocumentError(f"zero denominator in {obj!r}") from None
    raise DocumentError(f"not an exact rational: {obj!r} (use \"p/q\" strings)")


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def parse_rank(obj):
    if obj == "inf":
        return A.INF
    if isinstance(obj, int) and not isinstance(obj, bool) and obj >= 0:
        return obj
    raise DocumentError(f"not a rank: {obj!r}")


def format_rank(k):
    return "inf" if k == A.INF else int(k)


def format_value(domain, d):
    """JSON form of a plausibility value of ``domain``."""
    if isinstance(domain, A.RankDomain):
        return format_rank(d)
    if isinstance(domain, A.StarDomain):
        if d is A.BOTTOM:
            return "bottom"
        if d is A.TOP:
            return "top"
        return ["*" if e is None else format_rational(e) for e in d.entries]
    if isinstance(domain, A.IntervalDomain):
        return [format_rational(d.lo), format_rational(d.hi)]
    return format_rational(d)


def parse_value(domain, obj):
    if isinstance(domain, A.RankDomain):
        return parse_rank(obj)
    if isinstance(domain, A.StarDomain):
        if obj == "bottom":
            return A.BOTTOM
        if obj == "top":
            return A.TOP
        if not isinstance(obj, list) or len(obj) != domain.m:
            raise DocumentError(f"expected {domain.m} entries, got {obj!r}")
        val = A.star_value([None if e == "*" else parse_rational(e) for e in obj])
    elif isinstance(domain, A.IntervalDomain):
        if not isinstance(obj, list) or len(obj) != 2:
            raise DocumentError(f"expected [lo, hi], got {obj!r}")
        val = A.IntervalValue(parse_rational(obj[0]), parse_rational(obj[1]))
    else:
        val = parse_rational(obj)
    if not domain.owns(val):
        raise DocumentError(f"{obj!r} is not a {domain.tag} value")
    return val


def domain_for(algebra: str, arity: int | None = None):
    tags = {
        "probability": A.PROBABILITY_DOMAIN,
        "ranking": A.RANK_DOMAIN,
        "possibility-min": A.POSSIBILITY_MIN_DOMAIN,
        "possibility-div": A.POSSIBILITY_DIV_DOMAIN,
    }
    if algebra in tags:
        return tags[algebra]
    if algebra == "probset":
        if not arity:
            raise DocumentError("probset networks need an arity")
        return A.StarDomain(arity)
    raise DocumentError(f"unknown algebra {algebra!r}")


# -- events -----------------------------------------------------------------


def parse_event(text: str, space: WorldSpace, names: list[str]) -> int:
    """``W``, ``{}``, ``{0,3}`` (worlds) or ``X1=1&X2=0`` (assignment)."""
    text = text.strip()
    if text == "W":
        return space.full
    if text.startswith("{") and text.endswith("}"):
        body = text[1:-1].strip()
        try:
            worlds = [int(t) for t in body.split(",")] if body else []
            return space.event(worlds)
        except (ValueError, IndexError) as exc:
            raise DocumentError(f"bad world list {text!r}: {exc}") from None
    assignment = {}
    for part in text.split("&"):
        name, _, value = part.partition("=")
        name = name.strip()
        if name not in names or value.strip() not in ("0", "1"):
            raise DocumentError(f"bad event term {part!r}")
        assignment[names.index(name)] = int(value)
    return space.assignment_event(assignment)


def event_worlds(space: WorldSpace, e: int) -> list[int]:
    return space.members(e)


# -- models -----------------------------------------------------------------


@dataclass
class ModelDocument:
    variables: list[str]
    kind: str
    params: Any
    overrides: list[tuple[int, int, Any]] = field(default_factory=list)

    def build(self) -> ConditionalPlausibilityMeasure:
        cpm = A.make_measure(self.kind, self.params)
        if cpm.space.n != len(self.variables):
            raise DocumentError(f"{len(self.variables)} variables but parameters for {cpm.space.n}")
        if self.overrides:
            cpm = PatchedMeasure(cpm, {(u, v): val for u, v, val in self.overrides})
        return cpm


_PARAM_KEY = {
    "probability": "weights",
    "ranking": "ranks",
    "possibility-min": "possibilities",
    "possibility-div": "possibilities",
    "probset": "measures",
    "lower-strict": "measures",
    "lower-lenient": "measures",
    "upper": "measures",
    "interval": "measures",
    "lexicographic": "measures",
}


def _parse_params(kind, raw):
    if kind == "ranking":
        return [parse_rank(x) for x in raw]
    if _PARAM_KEY[kind] == "measures":
        if not isinstance(raw, list) or not all(isinstance(m, list) for m in raw):
            raise DocumentError("measures must be a list of weight vectors")
        return [[parse_rational(x) for x in m] for m in raw]
    return [parse_rational(x) for x in raw]


def _format_params(kind, params):
    if kind == "ranking":
        return [format_rank(x) for x in params]
    if _PARAM_KEY[kind] == "measures":
        return [[format_rational(x) for x in m] for m in params]
    return [format_rational(x) for x in params]


def model_from_json(doc: dict) -> ModelDocument:
    try:
        if doc.get("version") != VERSION:
            raise DocumentError(f"unsupported version {doc.get('version')!r}")
        variables = list(doc["variables"])
        measure = doc["measure"]
        kind = measure["kind"]
        if kind not in _PARAM_KEY:
            raise DocumentError(f"unknown measure kind {kind!r}")
        params = _parse_params(kind, measure[_PARAM_KEY[kind]])
    except (KeyError, TypeError) as exc:
        raise DocumentError(f"malformed model document: missing or bad {exc}") from None
    model = ModelDocument(variables, kind, params)
    raw_overrides = doc.get("overrides", [])
    if raw_overrides:
        cpm = A.make_measure(kind, params)
        for o in raw_overrides:
            try:
                u = cpm.space.event(o["U"])
                v = cpm.space.event(o["V"])
            except (KeyError, IndexError, TypeError) as exc:
                raise DocumentError(f"bad override {o!r}: {exc}") from None
            model.overrides.append((u, v, parse_value(cpm.domain, o["value"])))
    return model


def model_to_json(model: ModelDocument, domain=None) -> dict:
    doc = {
        "version": VERSION,
        "variables": list(model.variables),
        "measure": {"kind": model.kind, _PARAM_KEY[model.kind]: _format_params(model.kind, model.params)},
    }
    if model.overrides:
        if domain is None:
            domain = A.make_measure(model.kind, model.params).domain
        space = WorldSpace(len(model.variables))
        doc["overrides"] = [
            {"U": space.members(u), "V": space.members(v), "value": format_value(domain, val)}
            for u, v, val in model.overrides
        ]
    return doc


def model_of(cpm, variables: list[str] | None = None) -> ModelDocument:
    names = variables or [f"X{i + 1}" for i in range(cpm.space.n)]
    return ModelDocument(names, cpm.kind, A.parameters(cpm))


# -- networks ---------------------------------------------------------------


def _assignment_key(names, parents, values) -> str:
    return ",".join(f"{names[p]}={v}" for p, v in zip(parents, values))


@dataclass
class NetworkDocument:
    nodes: list[str]
    dag: Dag
    qbn: QuantitativeBN | None = None


def network_to_json(nodes: list[str], dag: Dag, qbn: QuantitativeBN | None = None) -> dict:
    doc: dict[str, Any] = {
        "version": VERSION,
        "nodes": list(nodes),
        "edges": [[nodes[p], nodes[c]] for p, c in sorted(dag.edges)],
    }
    if qbn is not None:
        doc["algebra"] = qbn.algebra
        if isinstance(qbn.domain, A.StarDomain):
            doc["arity"] = qbn.domain.m
        cpts = {}
        for x in dag.nodes:
            cpt = qbn.cpts[x]
            rows = {}
            for values, row in sorted(cpt.rows.items()):
                key = _assignment_key(nodes, cpt.parents, values)
                rows[key] = (
                    "undefined"
                    if row is UNDEFINED
                    else {"1": format_value(qbn.domain, row[0]), "0": format_value(qbn.domain, row[1])}
                )
            cpts[nodes[x]] = rows
        doc["cpts"] = cpts
    return doc


def network_from_json(doc: dict) -> NetworkDocument:
    try:
        if doc.get("version") != VERSION:
            raise DocumentError(f"unsupported version {doc.get('version')!r}")
        nodes = list(doc["nodes"])
        if len(set(nodes)) != len(nodes):
            raise DocumentError("duplicate node names")
        index = {name: i for i, name in enumerate(nodes)}
        edges = []
        for p, c in doc["edges"]:
            if p not in index or c not in index:
                raise DocumentError(f"edge {p}->{c} names an unknown node")
            edges.append((index[p], index[c]))
        if len(set(edges)) != len(edges):
            raise DocumentError("duplicate edges")
        try:
            dag = Dag(len(nodes), frozenset(edges))
        except PlausibilityError as exc:
            raise DocumentError(str(exc)) from None
        if "cpts" not in doc:
            return NetworkDocument(nodes, dag)
        domain = domain_for(doc["algebra"], doc.get("arity"))
        cpts = {}
        for x in dag.nodes:
            parents = dag.parents(x)
            raw = doc["cpts"][nodes[x]]
            cpt = Cpt(x, parents)
            expected = {_assignment_key(nodes, parents, vals): vals for vals in itertools.product((0, 1), repeat=len(parents))}
            if set(raw) != set(expected):
                raise DocumentError(f"cpt keys of {nodes[x]} must be exactly {sorted(expected)}")
            for key, vals in expected.items():
                entry = raw[key]
                cpt.rows[vals] = (
                    UNDEFINED if entry == "undefined" else (parse_value(domain, entry["1"]), parse_value(domain, entry["0"]))
                )
            cpts[x] = cpt
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(f"malformed network document: {exc}") from None
    return NetworkDocument(nodes, dag, QuantitativeBN(dag, cpts, domain))


# -- files ------------------------------------------------------------------


def read_json(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from None


def write_json(doc: dict, path: str | None):
    text = json.dumps(doc, indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
