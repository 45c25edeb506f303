"""Law checkers for conditional plausibility measures.

Every checker returns a :class:`CheckReport`; a failing law is data, not an
exception.  Exhaustive checks enumerate ``(U, V)`` pairs with ``U`` restricted
to subsets of the conditioning event wherever CPl4 makes the restriction exact
(``Pl(U|V)`` only depends on ``U & V``); :func:`check_cpl` verifies CPl4 on
all pairs, so a measure that passes it is checked with full coverage.
"""

from __future__ import annotations

import os
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from .core import (
    EXHAUSTIVE_MAX_VARIABLES,
    ConditionalPlausibilityMeasure,
    NotAlgebraic,
    format_event,
    submasks,
)

DEFAULT_SEED = 20240601
DEFAULT_SAMPLES = 2000
MAX_WITNESSES = 10
_CHUNK = 512


def default_seed() -> int:
    env = os.environ.get("PLAUSINET_SEED")
    return int(env) if env else DEFAULT_SEED


@dataclass
class Witness:
    law: str
    events: dict[str, int]
    values: dict[str, Any] = field(default_factory=dict)

    def describe(self) -> str:
        ev = " ".join(f"{k}={format_event(v)}" for k, v in self.events.items())
        vals = " ".join(f"{k}={v!r}" for k, v in self.values.items())
        return f"{self.law} {ev} {vals}".strip()


@dataclass
class CheckReport:
    law: str
    status: str = "pass"
    checked: int = 0
    failures: int = 0
    witnesses: list[Witness] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)
    parts: dict[str, "CheckReport"] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def fail(self, witness: Witness):
        self.failures += 1
        self.status = "fail"
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)

    def merge(self, other: "CheckReport") -> "CheckReport":
        """Combine two reports on disjoint instance sets of the same law."""
        out = CheckReport(self.law, checked=self.checked + other.checked)
        out.info = {**self.info, **other.info}
        for w in self.witnesses + other.witnesses:
            out.fail(w)
        out.failures = self.failures + other.failures
        if self.status == other.status == "n/a":
            out.status = "n/a"
        return out


def not_applicable(law: str, reason: str) -> CheckReport:
    return CheckReport(law, status="n/a", info={"reason": reason})


def _require_small(cpm, limit=EXHAUSTIVE_MAX_VARIABLES):
    if cpm.space.n > limit:
        raise ValueError(f"exhaustive check needs n <= {limit}, got n = {cpm.space.n}")


def _require_algebraic(cpm):
    if not (cpm.domain.has_oplus and cpm.domain.has_otimes):
        raise NotAlgebraic(f"{cpm.kind} measure provides no oplus/otimes")


def conditionable_events(cpm) -> list[int]:
    return [v for v in cpm.space.events() if cpm.is_conditionable(v)]


def supersets(cpm, s: int) -> Iterable[int]:
    rest = cpm.space.complement(s)
    return (s | extra for extra in submasks(rest))


def _first_violation(L, pre_a, pre_b, post_a, post_b):
    """First (i, j) with ``L[pre_a[i], pre_b[j]]`` true and ``L[post_a[i], post_b[j]]`` false."""
    for start in range(0, len(pre_a), _CHUNK):
        sl = slice(start, start + _CHUNK)
        bad = L[np.ix_(pre_a[sl], pre_b)] & ~L[np.ix_(post_a[sl], post_b)]
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return start + int(i), int(j)
    return None


def _ids(xs) -> np.ndarray:
    return np.fromiter(xs, dtype=np.int64)


def _rng(seed):
    return random.Random(default_seed() if seed is None else seed)


def _random_conditionable(cpm, rng, tries=200):
    full = cpm.space.full
    for _ in range(tries):
        v = rng.randint(1, full)
        if cpm.is_conditionable(v):
            return v
    return full


# -- CPl1-4 -----------------------------------------------------------------


def check_cpl(cpm: ConditionalPlausibilityMeasure, samples: int | None = None, seed=None) -> CheckReport:
    """CPl1-4.  Exhaustive for n <= 3 unless ``samples`` is given.

    CPl3 is checked on covering pairs ``A < A + {w}`` inside V (transitivity
    of the order plus CPl4 extend it to all ``U <= U'``).  ``checked`` counts
    ``(U, V)`` pairs.
    """
    rep = CheckReport("CPl1-4")
    dom = cpm.domain
    full = cpm.space.full
    if samples is None and cpm.space.n <= EXHAUSTIVE_MAX_VARIABLES:
        rep.info["mode"] = "exhaustive"
        events = cpm.space.events()
        for v in conditionable_events(cpm):
            _cpl_at(cpm, v, rep, full)
            for u in events:
                if cpm.cond(u, v) != cpm.cond(u & v, v):
                    rep.fail(Witness("CPl4", {"U": u, "V": v}, {"Pl(U|V)": cpm.cond(u, v), "Pl(U&V|V)": cpm.cond(u & v, v)}))
            for a in submasks(v):
                pa = cpm.cond(a, v)
                rest = v & ~a
                while rest:
                    bit = rest & -rest
                    rest ^= bit
                    pb = cpm.cond(a | bit, v)
                    if not dom.leq(pa, pb):
                        rep.fail(Witness("CPl3", {"U": a, "U'": a | bit, "V": v}, {"Pl(U|V)": pa, "Pl(U'|V)": pb}))
            rep.checked += len(events)
    else:
        rng = _rng(seed)
        samples = samples or DEFAULT_SAMPLES
        rep.info["mode"] = f"sampled({samples})"
        for _ in range(samples):
            v = _random_conditionable(cpm, rng)
            u = rng.randint(0, full)
            u2 = u | rng.randint(0, full)
            _cpl_at(cpm, v, rep, full)
            if cpm.cond(u, v) != cpm.cond(u & v, v):
                rep.fail(Witness("CPl4", {"U": u, "V": v}))
            if not dom.leq(cpm.cond(u, v), cpm.cond(u2, v)):
                rep.fail(Witness("CPl3", {"U": u, "U'": u2, "V": v}))
            rep.checked += 1
    return rep


def _cpl_at(cpm, v, rep, full):
    dom = cpm.domain
    if cpm.cond(0, v) != dom.bottom:
        rep.fail(Witness("CPl1", {"V": v}, {"Pl(empty|V)": cpm.cond(0, v)}))
    if cpm.cond(full, v) != dom.top:
        rep.fail(Witness("CPl2", {"V": v}, {"Pl(W|V)": cpm.cond(full, v)}))


# -- CPl5 -------------------------------------------------------------------


def check_coherence(cpm: ConditionalPlausibilityMeasure, samples: int | None = None, seed=None) -> CheckReport:
    """CPl5 over all ``(U, U', V, V')`` with ``V & V'`` in F'.

    Both sides depend on ``U`` only through ``U & V & V'`` once CPl4 holds,
    so the check ranges over ``S = V & V'``, ``V' >= S`` and subsets of S,
    comparing the order induced by ``Pl(.|S)`` and ``Pl(.|V')`` on them.
    """
    rep = CheckReport("CPl5", info={"mode": "exhaustive (CPl4-reduced)"})
    if samples is not None or cpm.space.n > EXHAUSTIVE_MAX_VARIABLES:
        return _coherence_sampled(cpm, samples or DEFAULT_SAMPLES, seed, rep)
    table = _table(cpm)
    L = table.leq()
    vid = table.vid
    val = table.values
    for sv in table.fprime:
        subs = list(submasks(sv))
        left = [vid[(a, sv)] for a in subs]
        for vp in supersets(cpm, sv):
            if (sv, vp) not in vid:
                rep.info["skipped_non_conditionable"] = rep.info.get("skipped_non_conditionable", 0) + 1
                continue
            right = [vid[(a, vp)] for a in subs]
            rep.checked += len(subs) ** 2
            pairs: dict[tuple[int, int], int] = {}
            for a, x, y in zip(subs, left, right):
                pairs.setdefault((x, y), a)
            keys = list(pairs)
            xa = _ids(k[0] for k in keys)
            ya = _ids(k[1] for k in keys)
            mismatch = L[np.ix_(xa, xa)] != L[np.ix_(ya, ya)]
            if mismatch.any():
                i, j = np.argwhere(mismatch)[0]
                rep.fail(
                    Witness(
                        "CPl5",
                        {"U": pairs[keys[i]], "U'": pairs[keys[j]], "V": sv, "V'": vp},
                        {
                            "Pl(U|V&V')": val[keys[i][0]],
                            "Pl(U'|V&V')": val[keys[j][0]],
                            "Pl(U&V|V')": val[keys[i][1]],
                            "Pl(U'&V|V')": val[keys[j][1]],
                        },
                    )
                )
    return rep


def _coherence_sampled(cpm, samples, seed, rep):
    rng = _rng(seed)
    full = cpm.space.full
    rep.info["mode"] = f"sampled({samples})"
    for _ in range(samples):
        s = _random_conditionable(cpm, rng)
        vp = s | rng.randint(0, full)
        v = s | (rng.randint(0, full) & ~vp)
        u, u2 = rng.randint(0, full), rng.randint(0, full)
        rep.checked += 1
        w = _cpl5_violation(cpm, u, u2, v, vp)
        if w:
            rep.fail(w)
    return rep


def _cpl5_violation(cpm, u, u2, v, vp):
    if not cpm.is_conditionable(v & vp) or not cpm.is_conditionable(vp):
        return None
    leq = cpm.domain.leq
    lhs = leq(cpm.cond(u, v & vp), cpm.cond(u2, v & vp))
    rhs = leq(cpm.cond(u & v, vp), cpm.cond(u2 & v, vp))
    if lhs != rhs:
        return Witness("CPl5", {"U": u, "U'": u2, "V": v, "V'": vp})
    return None


# -- Acc1-4 -----------------------------------------------------------------


def check_acceptable(cpm: ConditionalPlausibilityMeasure, samples: int | None = None, seed=None) -> CheckReport:
    """Acc1-3 (Popper algebra) and Acc4 (acceptability)."""
    rep = CheckReport("Acc1-4")
    space = cpm.space
    full = space.full
    # Acc1: F is the powerset; closure is structural but asserted anyway.
    pop = cpm.popper
    if not (pop.in_algebra(full) and pop.in_algebra(0) and pop.in_algebra(space.complement(0))):
        rep.fail(Witness("Acc1", {}))
    exhaustive = samples is None and space.n <= EXHAUSTIVE_MAX_VARIABLES
    if exhaustive:
        fprime = conditionable_events(cpm)
        rep.info["mode"] = "exhaustive"
    else:
        rng = _rng(seed)
        fprime = list(dict.fromkeys(_random_conditionable(cpm, rng) for _ in range(samples or DEFAULT_SAMPLES)))
        rep.info["mode"] = f"sampled({samples or DEFAULT_SAMPLES})"
    if not fprime:
        rep.fail(Witness("Acc2", {}))
    bottom = cpm.domain.bottom
    for v in fprime:
        rest = full & ~v
        while rest:
            bit = rest & -rest
            rest ^= bit
            if not cpm.is_conditionable(v | bit):
                rep.fail(Witness("Acc3", {"V": v, "V'": v | bit}))
        us = space.events() if exhaustive else [rng.randint(0, full) for _ in range(8)]
        for u in us:
            rep.checked += 1
            if cpm.cond(u, v) != bottom and not cpm.is_conditionable(u & v):
                rep.fail(Witness("Acc4", {"U": u, "V": v}, {"Pl(U|V)": cpm.cond(u, v)}))
    return rep


# -- standardness and determination ------------------------------------------


def check_standard(cpm: ConditionalPlausibilityMeasure, samples: int | None = None, seed=None) -> CheckReport:
    """F' must equal the events with non-bottom unconditional plausibility."""
    rep = CheckReport("standard")
    space = cpm.space
    if samples is None and space.n <= 4:
        events = space.events()
        rep.info["mode"] = "exhaustive"
    else:
        rng = _rng(seed)
        events = [rng.randint(0, space.full) for _ in range(samples or DEFAULT_SAMPLES)]
        rep.info["mode"] = f"sampled({len(events)})"
    bottom = cpm.domain.bottom
    for u in events:
        rep.checked += 1
        nonbottom = cpm.unconditional(u) != bottom
        if nonbottom != cpm.is_conditionable(u):
            rep.fail(
                Witness("standard", {"U": u}, {"Pl(U)": cpm.unconditional(u), "in F'": cpm.is_conditionable(u)})
            )
    return rep


def check_determined(cpm: ConditionalPlausibilityMeasure, samples: int | None = None, seed=None) -> CheckReport:
    """``Pl(U|V)`` must be a function of ``(Pl(U & V), Pl(V))``.

    The exhaustive mode ranges over ``U <= V`` (CPl4 covers the rest).
    """
    space = cpm.space
    full = space.full
    if not cpm.is_conditionable(full):
        return not_applicable("determined", "W is not in F', so there is no unconditional plausibility")
    rep = CheckReport("determined")
    if samples is None and space.n <= EXHAUSTIVE_MAX_VARIABLES:
        rep.info["mode"] = "exhaustive (CPl4-reduced)"
        t = _table(cpm)
        vid, val = t.vid, t.values
        seen_ids: dict[tuple[int, int], tuple[int, int, int]] = {}
        for v in t.fprime:
            pv = vid[(v, full)]
            for a in submasks(v):
                rep.checked += 1
                i = vid[(a, v)]
                prev = seen_ids.setdefault((vid[(a, full)], pv), (a, v, i))
                if prev[2] != i:
                    rep.fail(
                        Witness(
                            "determined",
                            {"U1": prev[0], "V1": prev[1], "U2": a, "V2": v},
                            {"Pl(U1|V1)": val[prev[2]], "Pl(U2|V2)": val[i]},
                        )
                    )
        rep.info["keys"] = len(seen_ids)
        return rep
    rng = _rng(seed)
    n_samples = samples or DEFAULT_SAMPLES
    rep.info["mode"] = f"sampled({n_samples})"
    seen: dict[tuple, tuple[int, int, Any]] = {}
    for _ in range(n_samples):
        u, v = rng.randint(0, full), _random_conditionable(cpm, rng)
        rep.checked += 1
        key = (cpm.unconditional(u & v), cpm.unconditional(v))
        value = cpm.cond(u, v)
        prev = seen.setdefault(key, (u, v, value))
        if prev[2] != value:
            rep.fail(
                Witness(
                    "determined",
                    {"U1": prev[0], "V1": prev[1], "U2": u, "V2": v},
                    {"Pl(U1|V1)": prev[2], "Pl(U2|V2)": value},
                )
            )
    rep.info["keys"] = len(seen)
    return rep


# -- algebraic structure ----------------------------------------------------

GRID_MAX_VALUES = 120


class _Table:
    """Interned values ``Pl(A|V)`` for ``V`` in F' and ``A <= V``.

    Values get dense int ids so that the law checks hash ints rather than
    fractions or tuples.  ``oplus``/``otimes`` results are interned on demand
    and :meth:`leq` covers every id allocated so far.
    """

    def __init__(self, cpm):
        _require_small(cpm)
        self.cpm = cpm
        self.domain = cpm.domain
        self.fprime = conditionable_events(cpm)
        self.values: list = []
        self.index: dict = {}
        self.vid: dict[tuple[int, int], int] = {}
        self.provenance: dict[int, tuple[int, int]] = {}
        for v in self.fprime:
            for a in submasks(v):
                i = self.intern(cpm.cond(a, v))
                self.vid[(a, v)] = i
                self.provenance.setdefault(i, (a, v))
        self.produced = len(self.values)
        self.bottom = self.intern(self.domain.bottom)
        self._plus: dict[tuple[int, int], int] = {}
        self._times: dict[tuple[int, int], int] = {}
        self._leq = np.zeros((0, 0), dtype=bool)
        self._dom = None

    def intern(self, val) -> int:
        i = self.index.get(val)
        if i is None:
            i = self.index[val] = len(self.values)
            self.values.append(val)
        return i

    def plus(self, i: int, j: int) -> int:
        r = self._plus.get((i, j))
        if r is None:
            r = self._plus[(i, j)] = self.intern(self.domain.oplus(self.values[i], self.values[j]))
        return r

    def times(self, i: int, j: int) -> int:
        r = self._times.get((i, j))
        if r is None:
            r = self._times[(i, j)] = self.intern(self.domain.otimes(self.values[i], self.values[j]))
        return r

    def leq(self) -> np.ndarray:
        """Order matrix over the produced values (ids below ``produced``)."""
        if len(self._leq) != self.produced:
            self._leq = self.domain.leq_matrix(self.values[: self.produced])
        return self._leq

    def local(self, *id_lists):
        """Order matrix over the ids in ``id_lists`` plus the lists re-indexed into it."""
        ids = sorted(set().union(*id_lists))
        pos = {i: k for k, i in enumerate(ids)}
        L = self.domain.leq_matrix([self.values[i] for i in ids])
        return L, [_ids(pos[i] for i in lst) for lst in id_lists]

    def grid_ids(self) -> list[int]:
        """Produced value ids for the unrestricted grid checks, thinned if large."""
        ids = list(range(self.produced))
        if len(ids) > GRID_MAX_VALUES:
            step = len(ids) / GRID_MAX_VALUES
            ids = sorted({ids[int(k * step)] for k in range(GRID_MAX_VALUES)} | {self.bottom})
        return ids

    def domains(self):
        """(dom_plus, dom_times): id pairs mapped to the events producing them."""
        if self._dom is None:
            vid = self.vid
            dom_plus: dict[tuple[int, int], tuple[int, int, int]] = {}
            for v in self.fprime:
                for a in submasks(v):
                    pa = vid[(a, v)]
                    for a2 in submasks(v & ~a):
                        dom_plus.setdefault((pa, vid[(a2, v)]), (a, a2, v))
            dom_times: dict[tuple[int, int], tuple[int, int, int]] = {}
            for s in self.fprime:
                given = [(a, vid[(a, s)]) for a in submasks(s)]
                for vp in supersets(self.cpm, s):
                    if (s, vp) not in vid:
                        continue
                    c = vid[(s, vp)]
                    for a, pa in given:
                        dom_times.setdefault((pa, c), (a, s, vp))
            self._dom = (dom_plus, dom_times)
        return self._dom


def _table(cpm) -> _Table:
    t = cpm.__dict__.get("_plausinet_table")
    if t is None:
        t = cpm.__dict__["_plausinet_table"] = _Table(cpm)
    return t


def dom_oplus(cpm) -> set:
    t = _table(cpm)
    return {(t.values[i], t.values[j]) for i, j in t.domains()[0]}


def dom_otimes(cpm) -> set:
    t = _table(cpm)
    return {(t.values[i], t.values[j]) for i, j in t.domains()[1]}


def check_algebraic(cpm: ConditionalPlausibilityMeasure) -> CheckReport:
    """Alg1-4 on Dom(oplus)/Dom(otimes); Alg4' is probed and reported apart.

    The overall status covers Alg1-4 only.  ``parts["Alg4'"]`` records the
    cancellation law over all pairs of produced values.
    """
    _require_algebraic(cpm)
    t = _table(cpm)
    val = t.values
    vid = t.vid
    dom_plus, dom_times = t.domains()
    parts = {name: CheckReport(name) for name in ("Alg1", "Alg2", "Alg3", "Alg4", "Alg4'")}

    # Alg1 and Alg2 run over event tuples, not just distinct value pairs
    alg1 = parts["Alg1"]
    for v in t.fprime:
        for a in submasks(v):
            pa = vid[(a, v)]
            for a2 in submasks(v & ~a):
                alg1.checked += 1
                lhs, rhs = vid[(a | a2, v)], t.plus(pa, vid[(a2, v)])
                if lhs != rhs:
                    alg1.fail(Witness("Alg1", {"U": a, "U'": a2, "V": v}, {"lhs": val[lhs], "rhs": val[rhs]}))
    alg2 = parts["Alg2"]
    for s in t.fprime:
        given = [(a, vid[(a, s)]) for a in submasks(s)]
        for vp in supersets(cpm, s):
            if (s, vp) not in vid:
                continue
            c = vid[(s, vp)]
            for a, pa in given:
                alg2.checked += 1
                lhs, rhs = vid[(a, vp)], t.times(pa, c)
                if lhs != rhs:
                    alg2.fail(Witness("Alg2", {"U": a, "V": s, "V'": vp}, {"lhs": val[lhs], "rhs": val[rhs]}))

    firsts_by_second: dict[int, set[int]] = defaultdict(set)
    for a, c in dom_times:
        firsts_by_second[c].add(a)

    _check_alg3(t, dom_plus, dom_times, firsts_by_second, parts["Alg3"])
    _check_alg4(t, dom_times, firsts_by_second, parts["Alg4"])
    _check_alg4_prime(t, parts["Alg4'"])

    rep = CheckReport("Alg1-4", parts=parts)
    for k in ("Alg1", "Alg2", "Alg3", "Alg4"):
        rep.checked += parts[k].checked
        for w in parts[k].witnesses:
            rep.fail(w)
        rep.failures += parts[k].failures - len(parts[k].witnesses)
    rep.info["alg4_prime"] = parts["Alg4'"].status
    rep.info["dom_oplus"] = len(dom_plus)
    rep.info["dom_otimes"] = len(dom_times)
    return rep


def _check_alg3(t, dom_plus, dom_times, firsts_by_second, rep):
    empty: frozenset = frozenset()
    val = t.values
    for (b, b2), prov_b in dom_plus.items():
        bb = t.plus(b, b2)
        for a in firsts_by_second.get(b, empty) & firsts_by_second.get(b2, empty):
            if (a, bb) not in dom_times:
                continue
            ab, ab2 = t.times(a, b), t.times(a, b2)
            if (ab, ab2) not in dom_plus:
                continue
            rep.checked += 1
            lhs, rhs = t.times(a, bb), t.plus(ab, ab2)
            if lhs != rhs:
                ev = dom_times[(a, b)]
                rep.fail(
                    Witness(
                        "Alg3",
                        {"A": ev[0], "S": ev[1], "V'": ev[2], "B": prov_b[0], "B'": prov_b[1], "V": prov_b[2]},
                        {"a": val[a], "b": val[b], "b'": val[b2], "lhs": val[lhs], "rhs": val[rhs]},
                    )
                )


def _check_alg4(t, dom_times, firsts_by_second, rep):
    groups = []
    for c, firsts in firsts_by_second.items():
        if c == t.bottom:
            continue
        firsts = sorted(firsts)
        groups.append((c, firsts, [t.times(a, c) for a in firsts]))
    for c, firsts, prods in groups:
        L, (ids, pr) = t.local(firsts, prods)
        rep.checked += len(firsts) ** 2
        hit = _first_violation(L, pr, pr, ids, ids)
        if hit:
            a, b = firsts[hit[0]], firsts[hit[1]]
            pa, pb = dom_times[(a, c)], dom_times[(b, c)]
            rep.fail(
                Witness(
                    "Alg4",
                    {"A1": pa[0], "S1": pa[1], "V1'": pa[2], "A2": pb[0], "S2": pb[1], "V2'": pb[2]},
                    {"a": t.values[a], "b": t.values[b], "c": t.values[c]},
                )
            )


def _check_alg4_prime(t, rep):
    values = t.grid_ids()
    if len(values) < t.produced:
        rep.info["thinned_to"] = len(values)
    rows = [(c, [t.times(a, c) for a in values]) for c in values if c != t.bottom]
    for c, prods in rows:
        L, (ids, pr) = t.local(values, prods)
        rep.checked += len(values) ** 2
        hit = _first_violation(L, pr, pr, ids, ids)
        if hit:
            a, b = values[hit[0]], values[hit[1]]
            pv = t.provenance
            rep.fail(
                Witness(
                    "Alg4'",
                    {"Ua": pv[a][0], "Va": pv[a][1], "Ub": pv[b][0], "Vb": pv[b][1], "Uc": pv[c][0], "Vc": pv[c][1]},
                    {"a": t.values[a], "b": t.values[b], "c": t.values[c]},
                )
            )
            break


def check_monotonic(cpm: ConditionalPlausibilityMeasure) -> CheckReport:
    """``d <= d'`` and ``e <= e'`` imply ``d*e <= d'*e'`` on Dom(otimes).

    ``info["unrestricted"]`` reports the same law over all pairs of produced
    values (checked one argument at a time, which suffices on a grid).
    """
    _require_algebraic(cpm)
    t = _table(cpm)
    _, dom_times = t.domains()
    rep = CheckReport("monotonic")
    pairs = list(dom_times)
    prods = [t.times(d, e) for d, e in pairs]
    L, (d_ids, e_ids, r_ids) = t.local([p[0] for p in pairs], [p[1] for p in pairs], prods)
    rep.checked = len(pairs) ** 2
    for start in range(0, len(pairs), _CHUNK):
        sl = slice(start, start + _CHUNK)
        bad = L[np.ix_(d_ids[sl], d_ids)] & L[np.ix_(e_ids[sl], e_ids)] & ~L[np.ix_(r_ids[sl], r_ids)]
        if bad.any():
            i, j = np.argwhere(bad)[0]
            p, q = pairs[start + int(i)], pairs[int(j)]
            ep, eq = dom_times[p], dom_times[q]
            v = t.values
            rep.fail(
                Witness(
                    "monotonic",
                    {"A1": ep[0], "S1": ep[1], "V1'": ep[2], "A2": eq[0], "S2": eq[1], "V2'": eq[2]},
                    {"d": v[p[0]], "e": v[p[1]], "d'": v[q[0]], "e'": v[q[1]]},
                )
            )
            rep.failures += int(bad.sum()) - 1
    rep.info["unrestricted"] = _unrestricted_monotonic(t)
    return rep


def _unrestricted_monotonic(t) -> str:
    values = t.grid_ids()
    grid = {(a, b): t.times(a, b) for a in values for b in values}
    for fixed in values:
        L, (ids, left, right) = t.local(values, [grid[(a, fixed)] for a in values], [grid[(fixed, a)] for a in values])
        if _first_violation(L, ids, ids, left, left) or _first_violation(L, ids, ids, right, right):
            return "fail"
    return "pass"


# -- running everything -----------------------------------------------------

LAWS = ("CPl1-4", "CPl5", "Acc1-4", "Alg1-4", "standard", "determined", "monotonic")

# laws every cps must satisfy, regardless of what the constructor claims
UNIVERSAL = {"CPl1-4", "CPl5"}
CLAIM_FOR_LAW = {
    "Acc1-4": "acceptable",
    "Alg1-4": "algebraic",
    "standard": "standard",
    "determined": "determined",
    "monotonic": "monotonic",
}


def run_axioms(cpm: ConditionalPlausibilityMeasure, samples: int | None = None, seed=None) -> dict[str, CheckReport]:
    """All law checks; algebraic ones are n/a on measures without oplus/otimes."""
    reports = {
        "CPl1-4": check_cpl(cpm, samples, seed),
        "CPl5": check_coherence(cpm, samples, seed),
        "Acc1-4": check_acceptable(cpm, samples, seed),
    }
    exhaustive_ok = samples is None and cpm.space.n <= EXHAUSTIVE_MAX_VARIABLES
    if cpm.domain.has_otimes and cpm.domain.has_oplus:
        if exhaustive_ok:
            reports["Alg1-4"] = check_algebraic(cpm)
            reports["monotonic"] = check_monotonic(cpm)
        else:
            reports["Alg1-4"] = not_applicable("Alg1-4", "needs exhaustive mode (n <= 3)")
            reports["monotonic"] = not_applicable("monotonic", "needs exhaustive mode (n <= 3)")
    else:
        reports["Alg1-4"] = not_applicable("Alg1-4", "measure provides no oplus/otimes")
        reports["monotonic"] = not_applicable("monotonic", "measure provides no oplus/otimes")
    reports["standard"] = check_standard(cpm, samples, seed)
    reports["determined"] = check_determined(cpm, samples, seed)
    return reports


def required_laws(cpm) -> set[str]:
    """Laws whose failure counts against the measure: universal ones plus claims."""
    return UNIVERSAL | {law for law, claim in CLAIM_FOR_LAW.items() if claim in cpm.claims}


def lemma_implications(cpm, reports: dict[str, CheckReport]) -> dict[str, bool]:
    """Cross-report implications that must hold for every measure.

    ``cpl5-from-monotonic``: algebraic, standard and monotonic imply CPl5.
    ``standard-from-determined``: determined, acceptable and top != bottom imply standard.
    """
    def ok(name):
        r = reports.get(name)
        return r is not None and r.passed

    algebraic_ok = ok("Alg1-4") and ok("Acc1-4")
    return {
        "cpl5-from-monotonic": not (algebraic_ok and ok("standard") and ok("monotonic")) or ok("CPl5"),
        "standard-from-determined": not (ok("determined") and ok("Acc1-4") and cpm.domain.top != cpm.domain.bottom)
        or ok("standard"),
    }


# -- witness replay ---------------------------------------------------------


def replay_witness(cpm: ConditionalPlausibilityMeasure, w: Witness) -> bool:
    """Re-evaluate a witness through the measure; True iff it still violates."""
    e = w.events
    dom = cpm.domain
    c = cpm.cond
    full = cpm.space.full
    law = w.law
    if law == "CPl1":
        return c(0, e["V"]) != dom.bottom
    if law == "CPl2":
        return c(full, e["V"]) != dom.top
    if law == "CPl3":
        return not dom.leq(c(e["U"], e["V"]), c(e["U'"], e["V"]))
    if law == "CPl4":
        return c(e["U"], e["V"]) != c(e["U"] & e["V"], e["V"])
    if law == "CPl5":
        return _cpl5_violation(cpm, e["U"], e["U'"], e["V"], e["V'"]) is not None
    if law == "Acc2":
        return not any(cpm.is_conditionable(v) for v in cpm.space.events())
    if law == "Acc3":
        return cpm.is_conditionable(e["V"]) and not cpm.is_conditionable(e["V'"])
    if law == "Acc4":
        return c(e["U"], e["V"]) != dom.bottom and not cpm.is_conditionable(e["U"] & e["V"])
    if law == "Alg1":
        return c(e["U"] | e["U'"], e["V"]) != dom.oplus(c(e["U"], e["V"]), c(e["U'"], e["V"]))
    if law == "Alg2":
        return c(e["U"] & e["V"], e["V'"]) != dom.otimes(c(e["U"], e["V"] & e["V'"]), c(e["V"], e["V'"]))
    if law == "Alg3":
        a = c(e["A"], e["S"])
        b, b2 = c(e["B"], e["V"]), c(e["B'"], e["V"])
        return dom.otimes(a, dom.oplus(b, b2)) != dom.oplus(dom.otimes(a, b), dom.otimes(a, b2))
    if law in ("Alg4", "monotonic"):
        a, ca = c(e["A1"], e["S1"]), c(e["S1"], e["V1'"])
        b, cb = c(e["A2"], e["S2"]), c(e["S2"], e["V2'"])
        if law == "Alg4":
            return ca == cb and ca != dom.bottom and dom.leq(dom.otimes(a, ca), dom.otimes(b, cb)) and not dom.leq(a, b)
        return dom.leq(a, b) and dom.leq(ca, cb) and not dom.leq(dom.otimes(a, ca), dom.otimes(b, cb))
    if law == "Alg4'":
        a, b, cc = c(e["Ua"], e["Va"]), c(e["Ub"], e["Vb"]), c(e["Uc"], e["Vc"])
        return cc != dom.bottom and dom.leq(dom.otimes(a, cc), dom.otimes(b, cc)) and not dom.leq(a, b)
    if law == "standard":
        return (cpm.unconditional(e["U"]) != dom.bottom) != cpm.is_conditionable(e["U"])
    if law == "determined":
        k1 = (cpm.unconditional(e["U1"] & e["V1"]), cpm.unconditional(e["V1"]))
        k2 = (cpm.unconditional(e["U2"] & e["V2"]), cpm.unconditional(e["V2"]))
        return k1 == k2 and c(e["U1"], e["V1"]) != c(e["U2"], e["V2"])
    raise ValueError(f"no replay rule for law {law!r}")
