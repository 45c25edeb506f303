"""Qualitative and quantitative Bayesian networks over plausibility measures.

Nodes are the 0-based variable indices of the measure's world space.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from typing import Iterable

from .algebras import make_probability
from .axioms import DEFAULT_SEED, CheckReport, Witness
from .core import (
    ConditionalPlausibilityMeasure,
    InvalidParameters,
    PlausibilityDomain,
    PlausibilityError,
)
from .independence import OverlappingSets, disjoint_tuples, indep_rv


class IncompatibleNetwork(PlausibilityError, ValueError):
    pass


class MissingCptRow(PlausibilityError, ValueError):
    pass


class DSeparatedQuery(PlausibilityError, ValueError):
    """A dependence witness was requested for a d-separated query."""


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Undefined"


UNDEFINED = _Undefined()


# -- graphs -----------------------------------------------------------------


@dataclass(frozen=True)
class Dag:
    n: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        edges = frozenset((int(p), int(c)) for p, c in self.edges)
        object.__setattr__(self, "edges", edges)
        for p, c in edges:
            if not (0 <= p < self.n and 0 <= c < self.n):
                raise InvalidParameters(f"edge {p}->{c} references a missing node")
            if p == c:
                raise InvalidParameters(f"self loop on node {p}")
        try:
            order = tuple(TopologicalSorter({v: self.parents(v) for v in range(self.n)}).static_order())
        except CycleError as exc:
            raise InvalidParameters(f"graph has a cycle: {exc.args[1]}") from None
        object.__setattr__(self, "_order", order)

    @property
    def nodes(self) -> range:
        return range(self.n)

    def _check(self, x):
        if not 0 <= x < self.n:
            raise InvalidParameters(f"unknown node {x}")

    def parents(self, x: int) -> tuple[int, ...]:
        return tuple(sorted(p for p, c in self.edges if c == x))

    def children(self, x: int) -> tuple[int, ...]:
        return tuple(sorted(c for p, c in self.edges if p == x))

    def descendants(self, x: int) -> frozenset[int]:
        """``x`` and every node reachable from it along directed edges."""
        self._check(x)
        seen = {x}
        stack = [x]
        while stack:
            for c in self.children(stack.pop()):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return frozenset(seen)

    def relatives(self, x: int):
        """(parents, descendants, nondescendants) of ``x``."""
        self._check(x)
        des = self.descendants(x)
        return frozenset(self.parents(x)), des, frozenset(self.nodes) - des

    def topological_order(self) -> tuple[int, ...]:
        return self._order

    def __str__(self):
        return "Dag(" + ", ".join(f"{p}->{c}" for p, c in sorted(self.edges)) + ")"


def complete_dag(order: Iterable[int]) -> Dag:
    order = list(order)
    return Dag(len(order), frozenset((order[i], order[j]) for j in range(len(order)) for i in range(j)))


def random_dag(n: int, rng: random.Random, edge_prob: float = 0.5) -> Dag:
    order = list(range(n))
    rng.shuffle(order)
    edges = {(order[i], order[j]) for j in range(n) for i in range(j) if rng.random() < edge_prob}
    return Dag(n, frozenset(edges))


# -- compatibility and construction -----------------------------------------


def _local_condition(G: Dag, x: int):
    par, _, nondes = G.relatives(x)
    return {x}, nondes - par, par


def is_compatible(G: Dag, cpm: ConditionalPlausibilityMeasure, memo: dict | None = None) -> bool:
    """Every node is independent of its non-parent nondescendants given its parents."""
    if G.n != cpm.space.n:
        raise InvalidParameters(f"dag has {G.n} nodes but the measure has {cpm.space.n} variables")
    return all(_indep(cpm, *_local_condition(G, x), memo) for x in G.nodes)


def _indep(cpm, xs, ys, zs, memo):
    if memo is None:
        return indep_rv(cpm, xs, ys, zs)
    key = (frozenset(xs), frozenset(ys), frozenset(zs))
    r = memo.get(key)
    if r is None:
        r = memo[key] = indep_rv(cpm, *key)
    return r


def build_network(cpm: ConditionalPlausibilityMeasure, order: Iterable[int], memo: dict | None = None) -> Dag:
    """Minimal-parent construction along a variable ordering.

    For each ``Y_k`` the parent set is the first ``P`` (by size, then
    lexicographically) among the predecessors with
    ``I^rv(predecessors - P, {Y_k} | P)``.
    """
    order = list(order)
    if sorted(order) != list(range(cpm.space.n)):
        raise InvalidParameters(f"{order} is not a permutation of the variables")
    edges = set()
    for k, y in enumerate(order):
        preds = order[:k]
        for size in range(len(preds) + 1):
            hit = next(
                (
                    P
                    for P in itertools.combinations(sorted(preds), size)
                    if _indep(cpm, set(preds) - set(P), {y}, set(P), memo)
                ),
                None,
            )
            if hit is not None:
                edges.update((p, y) for p in hit)
                break
    return Dag(cpm.space.n, frozenset(edges))


# -- quantitative networks --------------------------------------------------


@dataclass
class Cpt:
    """Rows keyed by parent values (in ``parents`` order); entries are
    ``(Pl(X=1|pa), Pl(X=0|pa))`` or :data:`UNDEFINED`."""

    node: int
    parents: tuple[int, ...]
    rows: dict[tuple[int, ...], object] = field(default_factory=dict)

    def entry(self, values: tuple[int, ...], x: int):
        row = self.rows[values]
        if row is UNDEFINED:
            return UNDEFINED
        return row[0] if x == 1 else row[1]


@dataclass
class QuantitativeBN:
    dag: Dag
    cpts: dict[int, Cpt]
    domain: PlausibilityDomain

    @property
    def algebra(self) -> str:
        return self.domain.tag

    def __post_init__(self):
        for x in self.dag.nodes:
            if self.cpts[x].parents != self.dag.parents(x):
                raise InvalidParameters(f"cpt of node {x} does not match its parents")
            if len(self.cpts[x].rows) != 1 << len(self.cpts[x].parents):
                raise InvalidParameters(f"cpt of node {x} needs one row per parent assignment")


def extract_cpts(G: Dag, cpm: ConditionalPlausibilityMeasure, check: bool = True) -> QuantitativeBN:
    if check and not is_compatible(G, cpm):
        raise IncompatibleNetwork(f"{G} is not compatible with the measure")
    space = cpm.space
    cpts = {}
    for x in G.nodes:
        parents = G.parents(x)
        cpt = Cpt(x, parents)
        for values in itertools.product((0, 1), repeat=len(parents)):
            pa = space.assignment_event(dict(zip(parents, values)))
            if cpm.is_conditionable(pa):
                cpt.rows[values] = (cpm.cond(space.var_event(x, 1), pa), cpm.cond(space.var_event(x, 0), pa))
            else:
                cpt.rows[values] = UNDEFINED
        cpts[x] = cpt
    return QuantitativeBN(G, cpts, cpm.domain)


def reconstruct(qbn: QuantitativeBN) -> list:
    """Unconditional plausibility of every world by the chain rule.

    Factors are combined in topological order as ``factor * accumulated``,
    the shape ``Pl(U|V & V') * Pl(V|V')`` of the product law.  A world whose
    running product reaches bottom stays bottom.
    """
    dom = qbn.domain
    order = qbn.dag.topological_order()
    n = qbn.dag.n
    out = []
    for w in range(1 << n):
        bits = [(w >> i) & 1 for i in range(n)]
        acc = None
        for x in order:
            cpt = qbn.cpts[x]
            factor = cpt.entry(tuple(bits[p] for p in cpt.parents), bits[x])
            if factor is UNDEFINED:
                if acc == dom.bottom:
                    break
                raise MissingCptRow(f"world {w} needs the undefined row of node {x}")
            acc = factor if acc is None else dom.otimes(factor, acc)
        out.append(acc)
    return out


# -- d-separation -----------------------------------------------------------


def _dsep_args(G, xs, ys, zs):
    X, Y, Z = frozenset(xs), frozenset(ys), frozenset(zs)
    for a, b in itertools.combinations((X, Y, Z), 2):
        if a & b:
            raise OverlappingSets(f"node sets overlap on {sorted(a & b)}")
    for v in X | Y | Z:
        G._check(v)
    return X, Y, Z


def d_separated(G: Dag, xs: Iterable[int], ys: Iterable[int], zs: Iterable[int] = ()) -> bool:
    """d-separation by reachability over (node, direction) states."""
    X, Y, Z = _dsep_args(G, xs, ys, zs)
    # nodes with a descendant in Z (including Z itself) unblock colliders
    anc_z = set()
    stack = list(Z)
    while stack:
        v = stack.pop()
        if v not in anc_z:
            anc_z.add(v)
            stack.extend(G.parents(v))
    # direction "up": arrived from a child; "down": arrived from a parent
    visited = set()
    stack = [(x, "up") for x in X]
    while stack:
        v, d = stack.pop()
        if (v, d) in visited:
            continue
        visited.add((v, d))
        if v in Y:
            return False
        if d == "up" and v not in Z:
            stack.extend((p, "up") for p in G.parents(v))
            stack.extend((c, "down") for c in G.children(v))
        elif d == "down":
            if v not in Z:
                stack.extend((c, "down") for c in G.children(v))
            if v in anc_z:
                stack.extend((p, "up") for p in G.parents(v))
    return True


def _blocked(G: Dag, path: list[int], Z: frozenset[int], des: dict[int, frozenset[int]]) -> bool:
    for i in range(1, len(path) - 1):
        prev, node, nxt = path[i - 1], path[i], path[i + 1]
        into_from_prev = (prev, node) in G.edges
        into_from_next = (nxt, node) in G.edges
        if into_from_prev and into_from_next:
            if not des[node] & Z:
                return True
        elif node in Z:
            return True
    return False


def d_separated_paths(G: Dag, xs: Iterable[int], ys: Iterable[int], zs: Iterable[int] = ()) -> bool:
    """d-separation by enumerating every simple undirected path (slow, exact)."""
    X, Y, Z = _dsep_args(G, xs, ys, zs)
    nbrs = {v: set(G.parents(v)) | set(G.children(v)) for v in G.nodes}
    des = {v: G.descendants(v) for v in G.nodes}

    def walk(path):
        v = path[-1]
        if v in Y:
            return not _blocked(G, path, Z, des)
        for u in nbrs[v]:
            if u not in path and walk(path + [u]):
                return True
        return False

    return not any(walk([x]) for x in X)


# -- checks -----------------------------------------------------------------


def check_dsep_soundness(G: Dag, cpm: ConditionalPlausibilityMeasure, max_variables: int = 4) -> CheckReport:
    """d-separation implies ``I^rv`` for every disjoint ``(X, Y, Z)``."""
    if cpm.space.n > max_variables:
        raise ValueError(f"soundness check enumerates all triples; needs n <= {max_variables}")
    memo: dict = {}
    if not is_compatible(G, cpm, memo):
        raise IncompatibleNetwork(f"{G} is not compatible with the measure")
    rep = CheckReport("dsep-soundness")
    separated = 0
    for X, Y, Z in disjoint_tuples(G.n, 3):
        if not X or not Y:
            continue
        rep.checked += 1
        if d_separated(G, X, Y, Z):
            separated += 1
            if not _indep(cpm, X, Y, Z, memo):
                rep.fail(Witness("dsep-soundness", {}, {"X": sorted(X), "Y": sorted(Y), "Z": sorted(Z)}))
    rep.info["d_separated_triples"] = separated
    return rep


def verify_construction(cpm: ConditionalPlausibilityMeasure, max_variables: int = 4) -> CheckReport:
    """Every ordering gives a compatible network that reproduces the world values."""
    n = cpm.space.n
    if n > max_variables:
        raise ValueError(f"construction check tries every ordering; needs n <= {max_variables}")
    memo: dict = {}
    parts = {"compatible": CheckReport("compatible"), "round-trip": CheckReport("round-trip")}
    truth = cpm.world_values()
    dags = set()
    for order in itertools.permutations(range(n)):
        G = build_network(cpm, order, memo)
        dags.add(G)
        parts["compatible"].checked += 1
        if not is_compatible(G, cpm, memo):
            parts["compatible"].fail(Witness("compatible", {}, {"order": order, "dag": str(G)}))
            continue
        try:
            got = reconstruct(extract_cpts(G, cpm, check=False))
        except MissingCptRow as exc:
            parts["round-trip"].fail(Witness("round-trip", {}, {"order": order, "error": str(exc)}))
            continue
        for w, (a, b) in enumerate(zip(got, truth)):
            parts["round-trip"].checked += 1
            if a != b:
                parts["round-trip"].fail(Witness("round-trip", {"w": 1 << w}, {"order": order, "chain": a, "direct": b}))
    rep = CheckReport("construction", parts=parts, info={"distinct_dags": len(dags)})
    rep.checked = parts["compatible"].checked
    for p in parts.values():
        for w in p.witnesses:
            rep.fail(w)
    return rep


# -- converse: dependence witnesses -----------------------------------------


def factored_probability(G: Dag, table: dict[int, dict[tuple[int, ...], Fraction]]):
    """Probability measure with ``mu(X=1 | pa) = table[X][pa]`` along G."""
    n = G.n
    weights = []
    for w in range(1 << n):
        bits = [(w >> i) & 1 for i in range(n)]
        p = Fraction(1)
        for x in G.nodes:
            q = table[x][tuple(bits[v] for v in G.parents(x))]
            p *= q if bits[x] else 1 - q
        weights.append(p)
    return make_probability(weights)


def _random_table(G: Dag, rng: random.Random, max_denominator: int = 8):
    table = {}
    for x in G.nodes:
        rows = {}
        for values in itertools.product((0, 1), repeat=len(G.parents(x))):
            d = rng.randint(2, max_denominator)
            rows[values] = Fraction(rng.randint(1, d - 1), d)
        table[x] = rows
    return table


def _grid_tables(G: Dag):
    """A few deterministic parameterizations covering skewed corners."""
    for base in (Fraction(1, 8), Fraction(1, 3), Fraction(7, 8)):
        table = {}
        for x in G.nodes:
            rows = {}
            for k, values in enumerate(itertools.product((0, 1), repeat=len(G.parents(x)))):
                rows[values] = base if (k + x) % 2 == 0 else 1 - base / 2
            table[x] = rows
        yield table


def find_dependence_witness(
    G: Dag, xs: Iterable[int], ys: Iterable[int], zs: Iterable[int] = (), budget: int = 200, seed: int | None = None
):
    """A probability measure compatible with G in which ``I^rv(X, Y|Z)`` fails.

    Returns ``None`` if neither ``budget`` random parameterizations nor the
    grid yields one.
    """
    X, Y, Z = _dsep_args(G, xs, ys, zs)
    if d_separated(G, X, Y, Z):
        raise DSeparatedQuery("the query is d-separated; no compatible measure can violate it")
    rng = random.Random(DEFAULT_SEED if seed is None else seed)
    tables = itertools.chain((_random_table(G, rng) for _ in range(budget)), _grid_tables(G))
    for table in tables:
        mu = factored_probability(G, table)
        if not indep_rv(mu, X, Y, Z):
            return mu
    return None


def _rows(G: Dag, x: int):
    return itertools.product((0, 1), repeat=len(G.parents(x)))


def _chain(G: Dag, pick, combine, unit):
    """World values ``combine`` of per-node row entries ``pick(x, row, bit)``."""
    out = []
    for w in range(1 << G.n):
        bits = [(w >> i) & 1 for i in range(G.n)]
        acc = unit
        for x in G.nodes:
            acc = combine(acc, pick(x, tuple(bits[v] for v in G.parents(x)), bits[x]))
        out.append(acc)
    return out


def random_factored_measure(kind: str, G: Dag, rng: random.Random):
    """A seeded measure of an algebraic family built node by node along G.

    Such measures carry the independencies of G, so networks rebuilt from
    them are sparse and d-separation has something to say.  The exception is
    min-based possibility: min-combined tables need not satisfy G's
    independencies under min-conditioning, so use :func:`build_network` on
    the result rather than G itself.
    """
    from . import algebras as A

    if kind == "probability":
        return factored_probability(G, _random_table(G, rng))
    if kind == "probset":
        return A.make_probset([factored_probability(G, _random_table(G, rng)).weights for _ in range(2)])
    if kind == "ranking":
        table = {}
        for x in G.nodes:
            for row in _rows(G, x):
                k = rng.choice([1, 1, 2, 3, A.INF])
                table[(x, row)] = (0, k) if rng.random() < 0.5 else (k, 0)
        return A.make_ranking(_chain(G, lambda x, r, b: table[(x, r)][b], lambda a, b: a + b, 0))
    if kind in ("possibility-min", "possibility-div"):
        table = {}
        for x in G.nodes:
            for row in _rows(G, x):
                p = Fraction(rng.randint(1, 4), 4)
                table[(x, row)] = (Fraction(1), p) if rng.random() < 0.5 else (p, Fraction(1))
        if kind == "possibility-min":
            return A.make_possibility_min(_chain(G, lambda x, r, b: table[(x, r)][b], min, Fraction(1)))
        return A.make_possibility_div(_chain(G, lambda x, r, b: table[(x, r)][b], lambda a, b: a * b, Fraction(1)))
    raise InvalidParameters(f"no factored generator for {kind!r}")
