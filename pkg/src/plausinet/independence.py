"""Conditional independence of events and variables, noninteraction, and the
semi-graphoid checks.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Sequence

from . import axioms
from .algebras import ProbSetMeasure, ProbabilityMeasure
from .axioms import CheckReport, Witness
from .core import (
    EXHAUSTIVE_MAX_VARIABLES,
    ConditionalPlausibilityMeasure,
    NotAlgebraic,
    PlausibilityError,
    WrongMeasureKind,
    submasks,
)


class QueryUndefined(PlausibilityError, ValueError):
    """The conditioning event of an independence query is not in F'."""


class OverlappingSets(PlausibilityError, ValueError):
    pass


# -- events -----------------------------------------------------------------


def indep_events(cpm: ConditionalPlausibilityMeasure, u: int, v: int, c: int) -> bool:
    """``I(U, V | C)``: each guarded conditional equals its unconditioned-on-V form."""
    if not cpm.is_conditionable(c):
        raise QueryUndefined("the conditioning event is not in F'")
    if cpm.is_conditionable(v & c) and cpm.cond(u, v & c) != cpm.cond(u, c):
        return False
    if cpm.is_conditionable(u & c) and cpm.cond(v, u & c) != cpm.cond(v, c):
        return False
    return True


def noninteractive(cpm: ConditionalPlausibilityMeasure, u: int, v: int, c: int) -> bool:
    """``NI(U, V | C)``: ``Pl(U & V | C) = Pl(U | C) * Pl(V | C)``; true if C is not in F'."""
    if not cpm.domain.has_otimes:
        raise NotAlgebraic(f"{cpm.kind} measure has no otimes")
    if not cpm.is_conditionable(c):
        return True
    return cpm.cond(u & v, c) == cpm.otimes(cpm.cond(u, c), cpm.cond(v, c))


def _weights(measure) -> Sequence[Fraction]:
    if isinstance(measure, ProbabilityMeasure):
        return measure.weights
    return [Fraction(x) for x in measure]


def prob_independent(measure, u: int, v: int, c: int) -> bool:
    """Probabilistic independence of U and V given C for a single measure.

    ``measure`` is a :class:`ProbabilityMeasure` or a weight vector.  Both
    clauses are guarded by the conditioning event having positive mass.
    """
    ws = _weights(measure)

    def mu(e):
        return sum((w for i, w in enumerate(ws) if (e >> i) & 1), Fraction(0))

    muc = mu(c)
    if mu(v & c) != 0 and mu(u & v & c) / mu(v & c) != mu(u & c) / muc:
        return False
    if mu(u & c) != 0 and mu(u & v & c) / mu(u & c) != mu(v & c) / muc:
        return False
    return True


def type1_indep(cpm, u: int, v: int, c: int) -> bool:
    """Independence with respect to every measure of a ``Pl_P`` instance."""
    if not isinstance(cpm, ProbSetMeasure):
        raise WrongMeasureKind("type-1 independence needs a set of probability measures")
    return all(prob_independent(ws, u, v, c) for ws in cpm.measures)


# -- random variables -------------------------------------------------------


def _check_disjoint(*sets: frozenset[int]):
    for a, b in itertools.combinations(sets, 2):
        if a & b:
            raise OverlappingSets(f"variable sets overlap on {sorted(a & b)}")


def indep_rv(cpm: ConditionalPlausibilityMeasure, xs: Iterable[int], ys: Iterable[int], zs: Iterable[int] = ()) -> bool:
    """``I^rv(X, Y | Z)`` for 0-based variable index sets.

    Vacuously true when X or Y is empty.  Values ``z`` with ``Z = z`` outside
    F' are skipped.
    """
    X, Y, Z = frozenset(xs), frozenset(ys), frozenset(zs)
    _check_disjoint(X, Y, Z)
    space = cpm.space
    for var in X | Y | Z:
        if not 0 <= var < space.n:
            raise IndexError(f"variable {var} out of range")
    if not X or not Y:
        return True
    xev = [space.assignment_event(a) for a in space.assignments(X)]
    yev = [space.assignment_event(a) for a in space.assignments(Y)]
    for za in space.assignments(Z):
        c = space.assignment_event(za)
        if not cpm.is_conditionable(c):
            continue
        for u in xev:
            for v in yev:
                if not indep_events(cpm, u, v, c):
                    return False
    return True


def _rv_events(cpm, xs, ys, zs):
    X, Y, Z = frozenset(xs), frozenset(ys), frozenset(zs)
    _check_disjoint(X, Y, Z)
    space = cpm.space
    for var in X | Y | Z:
        if not 0 <= var < space.n:
            raise IndexError(f"variable {var} out of range")
    ev = lambda S: [space.assignment_event(a) for a in space.assignments(S)]  # noqa: E731
    return ev(X), ev(Y), ev(Z)


def noninteractive_rv(cpm, xs, ys, zs=()) -> bool:
    """``NI(X=x, Y=y | Z=z)`` for every assignment."""
    xev, yev, zev = _rv_events(cpm, xs, ys, zs)
    return all(noninteractive(cpm, u, v, c) for c in zev for u in xev for v in yev)


def type1_indep_rv(cpm, xs, ys, zs=()) -> bool:
    xev, yev, zev = _rv_events(cpm, xs, ys, zs)
    return all(type1_indep(cpm, u, v, c) for c in zev for u in xev for v in yev)


def disjoint_tuples(n: int, k: int):
    """Every k-tuple of pairwise disjoint subsets of ``range(n)``."""
    for labels in itertools.product(range(k + 1), repeat=n):
        yield tuple(frozenset(i for i, lab in enumerate(labels) if lab == j + 1) for j in range(k))


def check_semigraphoid(cpm: ConditionalPlausibilityMeasure, max_variables: int = 4) -> CheckReport:
    """CIRV1-4 over every tuple ``(X, Y, Y', Z)`` of pairwise disjoint sets.

    For measures without oplus/otimes the result is informational only.
    """
    n = cpm.space.n
    if n > max_variables:
        raise ValueError(f"semi-graphoid check enumerates all tuples; needs n <= {max_variables}")
    memo: dict[tuple, bool] = {}

    def I(x, y, z):
        key = (x, y, z)
        r = memo.get(key)
        if r is None:
            r = memo[key] = indep_rv(cpm, x, y, z)
        return r

    rep = CheckReport("CIRV1-4")
    if not (cpm.domain.has_oplus and cpm.domain.has_otimes):
        rep.info["informational"] = "measure is not algebraic"

    def fail(name, x, y, y2, z):
        rep.fail(Witness(name, {}, {"X": sorted(x), "Y": sorted(y), "Y'": sorted(y2), "Z": sorted(z)}))

    for x, y, y2, z in disjoint_tuples(n, 4):
        rep.checked += 1
        if I(x, y, z) and not I(y, x, z):
            fail("CIRV1", x, y, y2, z)
        if I(x, y | y2, z):
            if not I(x, y, z):
                fail("CIRV2", x, y, y2, z)
            if not I(x, y, y2 | z):
                fail("CIRV3", x, y, y2, z)
        if I(x, y, z) and I(x, y2, y | z) and not I(x, y | y2, z):
            fail("CIRV4", x, y, y2, z)
    rep.info["triples"] = len(memo)
    return rep


def replay_semigraphoid(cpm, w: Witness) -> bool:
    """True iff a CIRV witness still violates its axiom."""
    x, y, y2, z = (frozenset(w.values[k]) for k in ("X", "Y", "Y'", "Z"))
    I = lambda a, b, c: indep_rv(cpm, a, b, c)  # noqa: E731
    if w.law == "CIRV1":
        return I(x, y, z) and not I(y, x, z)
    if w.law == "CIRV2":
        return I(x, y | y2, z) and not I(x, y, z)
    if w.law == "CIRV3":
        return I(x, y | y2, z) and not I(x, y, y2 | z)
    if w.law == "CIRV4":
        return I(x, y, z) and I(x, y2, y | z) and not I(x, y | y2, z)
    raise ValueError(w.law)


# -- noninteraction versus independence --------------------------------------


def check_alg4_prime(cpm) -> CheckReport:
    return axioms.check_algebraic(cpm).parts["Alg4'"]


def check_ni_vs_i(cpm: ConditionalPlausibilityMeasure) -> CheckReport:
    """I implies NI on every triple; NI implies I when standard and Alg4' hold.

    Triples range over ``C`` in F' and ``A, B <= C`` (by CPl4 both notions see
    U and V only through their intersections with C).  ``parts["NI=>I"]`` is
    ``n/a`` when its hypotheses fail; NI-without-I examples then go into its
    ``info["examples"]``.
    """
    if not (cpm.domain.has_oplus and cpm.domain.has_otimes):
        raise NotAlgebraic(f"{cpm.kind} measure provides no oplus/otimes")
    axioms._require_small(cpm)
    standard = axioms.check_standard(cpm).passed
    alg4p = check_alg4_prime(cpm)
    gated = standard and alg4p.passed
    t = axioms._table(cpm)
    vid = t.vid
    i_ni = CheckReport("I=>NI")
    ni_i = CheckReport("NI=>I") if gated else CheckReport("NI=>I", status="n/a")
    ni_i.info.update(standard=standard, alg4_prime=alg4p.status)
    examples = []
    counts = {"I": 0, "NI": 0, "both": 0}
    for c in t.fprime:
        subs = list(submasks(c))
        for a in subs:
            pa = vid[(a, c)]
            a_in = (a, a) in vid
            for b in subs:
                pb = vid[(b, c)]
                ab = a & b
                indep = (not (b, b) in vid or vid[(ab, b)] == pa) and (not a_in or vid[(ab, a)] == pb)
                ni = vid[(ab, c)] == t.times(pa, pb)
                i_ni.checked += 1
                counts["I"] += indep
                counts["NI"] += ni
                counts["both"] += indep and ni
                if indep and not ni:
                    i_ni.fail(Witness("I=>NI", {"U": a, "V": b, "C": c}))
                elif ni and not indep:
                    w = Witness("NI=>I", {"U": a, "V": b, "C": c})
                    if gated:
                        ni_i.fail(w)
                    elif len(examples) < axioms.MAX_WITNESSES:
                        examples.append(w)
    ni_i.checked = i_ni.checked
    ni_i.info["examples"] = examples
    ni_i.info["ni_without_i_found"] = bool(examples) or ni_i.failures > 0
    rep = CheckReport("NI-vs-I", checked=i_ni.checked, parts={"I=>NI": i_ni, "NI=>I": ni_i}, info=counts)
    for w in i_ni.witnesses + ni_i.witnesses:
        rep.fail(w)
    return rep


# -- probability-specific ---------------------------------------------------


def check_prop42(cpm) -> CheckReport:
    """For probability: ``mu(U) != 0 => mu(V|U) = mu(V)`` iff product rule iff
    ``mu(V) != 0 => mu(U|V) = mu(U)``, on every pair of events."""
    if not isinstance(cpm, ProbabilityMeasure):
        raise WrongMeasureKind("the three-way equivalence is about probability measures")
    axioms._require_small(cpm)
    rep = CheckReport("three-way-equivalence")
    full = cpm.space.full
    events = cpm.space.events()
    mass = [cpm.mass(e) for e in events]
    for u in events:
        for v in events:
            rep.checked += 1
            a = mass[u] == 0 or cpm.cond(v, u) == cpm.unconditional(v)
            b = mass[u & v] == mass[u] * mass[v]
            c = mass[v] == 0 or cpm.cond(u, v) == cpm.unconditional(u)
            if not a == b == c:
                rep.fail(Witness("three-way-equivalence", {"U": u, "V": v, "W": full}, {"a": a, "b": b, "c": c}))
    return rep


def check_complement_closure(cpm) -> CheckReport:
    """Whether ``I(U, V | W)`` implies ``I(complement U, V | W)``.

    Probability has this property; the definition used here does not ask for
    it, so the report is informational.
    """
    axioms._require_small(cpm)
    rep = CheckReport("complement-closure", info={"informational": True})
    full = cpm.space.full
    if not cpm.is_conditionable(full):
        return axioms.not_applicable("complement-closure", "W is not in F'")
    for u in cpm.space.events():
        for v in cpm.space.events():
            rep.checked += 1
            if indep_events(cpm, u, v, full) and not indep_events(cpm, full & ~u, v, full):
                rep.fail(Witness("complement-closure", {"U": u, "V": v}))
    return rep
