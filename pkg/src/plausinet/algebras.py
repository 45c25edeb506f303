"""Concrete conditional plausibility measures.

Five algebraic families (probability, ranking functions, the two possibility
conditionings, sets of probabilities as ``Pl_P``) and the non-algebraic lower,
upper and interval representations of a set of probabilities.  All numeric
values are exact: probabilities and possibilities are :class:`Fraction`,
ranks are ``int`` or :data:`INF`.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (
    ConditionalPlausibilityMeasure,
    InvalidParameters,
    PlausibilityDomain,
    TotalOrderDomain,
    WorldSpace,
    WrongMeasureKind,
)

INF = math.inf

ALGEBRAIC_FAMILIES = ("probability", "ranking", "possibility-min", "possibility-div", "probset")
ALL_KINDS = ALGEBRAIC_FAMILIES + ("lower-strict", "lower-lenient", "upper", "interval", "lexicographic")

_ALGEBRAIC_CLAIMS = frozenset(
    {"acceptable", "algebraic", "standard", "coherent", "determined", "monotonic"}
)


def _space_for(count: int, cap: int | None = None) -> WorldSpace:
    n = count.bit_length() - 1
    if count < 2 or 1 << n != count:
        raise InvalidParameters(f"parameter vector length {count} is not 2**n")
    return WorldSpace(n) if cap is None else WorldSpace(n, cap)


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        raise InvalidParameters(f"floats are not exact: {x!r}; use Fraction or 'p/q'")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InvalidParameters(f"not a rational: {x!r}") from exc


def _integer_weights(fracs: Sequence[Fraction]) -> tuple[tuple[int, ...], int]:
    den = math.lcm(*(f.denominator for f in fracs))
    return tuple(int(f * den) for f in fracs), den


def _int_mass(nums: Sequence[int], event: int) -> int:
    total, i = 0, 0
    while event:
        if event & 1:
            total += nums[i]
        event >>= 1
        i += 1
    return total


# -- domains ----------------------------------------------------------------


class UnitIntervalDomain(TotalOrderDomain):
    """``[0, 1]`` with the usual order; ops chosen per family."""

    bottom = Fraction(0)
    top = Fraction(1)

    def __init__(self, tag: str, oplus=None, otimes=None):
        self.tag = tag
        self._oplus = oplus
        self._otimes = otimes
        self.has_oplus = oplus is not None
        self.has_otimes = otimes is not None

    def owns(self, d) -> bool:
        return isinstance(d, Fraction) and 0 <= d <= 1

    def key(self, d):
        return d

    def oplus(self, d, e):
        if self._oplus is None:
            return super().oplus(d, e)
        return self._oplus(d, e)

    def otimes(self, d, e):
        if self._otimes is None:
            return super().otimes(d, e)
        return self._otimes(d, e)


def _bounded_sum(a, b):
    return min(Fraction(1), a + b)


def _product(a, b):
    return a * b


PROBABILITY_DOMAIN = UnitIntervalDomain("probability", _bounded_sum, _product)
POSSIBILITY_MIN_DOMAIN = UnitIntervalDomain("possibility-min", max, min)
POSSIBILITY_DIV_DOMAIN = UnitIntervalDomain("possibility-div", max, _product)
LOWER_DOMAIN = UnitIntervalDomain("lower")
UPPER_DOMAIN = UnitIntervalDomain("upper")


class RankDomain(TotalOrderDomain):
    """Extended naturals ordered in reverse: 0 is top, infinity is bottom."""

    tag = "ranking"
    bottom = INF
    top = 0
    has_oplus = True
    has_otimes = True

    def owns(self, d) -> bool:
        if d == INF and isinstance(d, float):
            return True
        return isinstance(d, int) and not isinstance(d, bool) and d >= 0

    def key(self, d):
        return -d

    def oplus(self, d, e):
        return min(d, e)

    def otimes(self, d, e):
        return d + e

    def format(self, d) -> str:
        return "inf" if d == INF else str(d)


RANK_DOMAIN = RankDomain()


class Sentinel(enum.Enum):
    BOTTOM = "bottom"
    TOP = "top"

    def __repr__(self):
        return "⊥" if self is Sentinel.BOTTOM else "⊤"


BOTTOM = Sentinel.BOTTOM
TOP = Sentinel.TOP
STAR = None


@dataclass(frozen=True)
class StarFunction:
    """A non-sentinel element of ``D*_P``: one entry per measure, ``None`` = *."""

    entries: tuple

    def __repr__(self):
        return "(" + ", ".join("*" if e is None else str(e) for e in self.entries) + ")"


def star_value(entries: Sequence[Fraction | None]):
    """Build an element of ``D*_P``, collapsing the bottom/top classes.

    An all-* vector is not an element of ``D*_P``; it only arises from
    ``oplus``/``otimes`` on pairs outside their domains, and is mapped to
    bottom so that the operations are total.
    """
    defined = [e for e in entries if e is not None]
    if not defined or all(e == 0 for e in defined):
        return BOTTOM
    if all(e == 1 for e in defined):
        return TOP
    return StarFunction(tuple(entries))


class StarDomain(PlausibilityDomain):
    """``D*_P`` for a set of ``m`` measures.

    ``sentinel_rules="identity"`` makes bottom the identity of oplus and top
    the identity of otimes; ``"absorbing"`` uses ``f + bottom = bottom`` and
    ``f * top = top`` instead.  ``star_times_zero="zero"`` makes a defined 0
    absorb *, ``"star"`` lets * absorb everything.  Only the defaults satisfy
    Alg1/Alg2; the alternatives exist so that the difference can be shown.
    """

    tag = "probset"
    bottom = BOTTOM
    top = TOP
    has_oplus = True
    has_otimes = True

    def __init__(self, m: int, sentinel_rules: str = "identity", star_times_zero: str = "zero"):
        if sentinel_rules not in ("identity", "absorbing"):
            raise ValueError(sentinel_rules)
        if star_times_zero not in ("zero", "star"):
            raise ValueError(star_times_zero)
        self.m = m
        self.sentinel_rules = sentinel_rules
        self.star_times_zero = star_times_zero

    def owns(self, d) -> bool:
        if isinstance(d, Sentinel):
            return True
        if not isinstance(d, StarFunction) or len(d.entries) != self.m:
            return False
        return all(e is None or (isinstance(e, Fraction) and 0 <= e <= 1) for e in d.entries)

    def leq(self, d, e) -> bool:
        if d is BOTTOM or e is TOP:
            return True
        if isinstance(d, Sentinel) or isinstance(e, Sentinel):
            return False
        for a, b in zip(d.entries, e.entries):
            if a is None or b is None:
                if a is not b:
                    return False
            elif a > b:
                return False
        return True

    def leq_matrix(self, values):
        k = len(values)
        bot = np.array([v is BOTTOM for v in values], dtype=bool)
        top = np.array([v is TOP for v in values], dtype=bool)
        fn = ~(bot | top)
        ok = np.ones((k, k), dtype=bool)
        for col in range(self.m):
            coords = [v.entries[col] for v in values if isinstance(v, StarFunction)]
            ranks = {c: r for r, c in enumerate(sorted({c for c in coords if c is not None}))}
            r = np.array(
                [
                    (-1 if v.entries[col] is None else ranks[v.entries[col]])
                    if isinstance(v, StarFunction)
                    else -1
                    for v in values
                ],
                dtype=np.int64,
            )
            ri, rj = r[:, None], r[None, :]
            both_star = (ri < 0) & (rj < 0)
            both_def = (ri >= 0) & (rj >= 0) & (ri <= rj)
            ok &= both_star | both_def
        return bot[:, None] | top[None, :] | (fn[:, None] & fn[None, :] & ok)

    def oplus(self, d, e):
        if d is TOP or e is TOP:
            return TOP
        if d is BOTTOM or e is BOTTOM:
            if self.sentinel_rules == "absorbing":
                return BOTTOM
            return e if d is BOTTOM else d
        return star_value(
            [None if a is None or b is None else min(Fraction(1), a + b) for a, b in zip(d.entries, e.entries)]
        )

    def otimes(self, d, e):
        if d is BOTTOM or e is BOTTOM:
            return BOTTOM
        if d is TOP or e is TOP:
            if self.sentinel_rules == "absorbing":
                return TOP
            return e if d is TOP else d
        out = []
        for a, b in zip(d.entries, e.entries):
            if self.star_times_zero == "zero" and (a == 0 or b == 0):
                out.append(Fraction(0))
            elif a is None or b is None:
                out.append(None)
            else:
                out.append(a * b)
        return star_value(out)

    def format(self, d) -> str:
        return repr(d)


@dataclass(frozen=True, order=True)
class IntervalValue:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi <= 1:
            raise InvalidParameters(f"need 0 <= a <= b <= 1, got ({self.lo}, {self.hi})")

    def __repr__(self):
        return f"({self.lo}, {self.hi})"


class IntervalDomain(PlausibilityDomain):
    """Pairs ``(a, b)``; ``(a, b) <= (a', b')`` iff equal or ``b <= a'``."""

    tag = "interval"
    bottom = IntervalValue(Fraction(0), Fraction(0))
    top = IntervalValue(Fraction(1), Fraction(1))

    def owns(self, d) -> bool:
        return isinstance(d, IntervalValue)

    def leq(self, d, e) -> bool:
        # the bare "b <= a'" rule is irreflexive on proper intervals
        return d == e or d.hi <= e.lo


INTERVAL_DOMAIN = IntervalDomain()


# -- measures ---------------------------------------------------------------


def _validate_weights(weights, cap=None) -> tuple[WorldSpace, tuple[Fraction, ...]]:
    ws = tuple(_as_fraction(x) for x in weights)
    space = _space_for(len(ws), cap)
    if any(x < 0 for x in ws):
        raise InvalidParameters("negative probability weight")
    if sum(ws) != 1:
        raise InvalidParameters(f"weights sum to {sum(ws)}, not 1")
    return space, ws


class ProbabilityMeasure(ConditionalPlausibilityMeasure):
    kind = "probability"
    claims = _ALGEBRAIC_CLAIMS | {"alg4_prime"}

    def __init__(self, weights, cap=None):
        space, self.weights = _validate_weights(weights, cap)
        self._nums, self._den = _integer_weights(self.weights)
        self._mass: dict[int, int] = {}
        super().__init__(space, PROBABILITY_DOMAIN)

    def mass(self, event: int) -> Fraction:
        return Fraction(self._imass(event), self._den)

    def _imass(self, event):
        try:
            return self._mass[event]
        except KeyError:
            m = self._mass[event] = _int_mass(self._nums, event)
            return m

    def _conditionable(self, v):
        return self._imass(v) > 0

    def _value(self, u, v):
        return Fraction(self._imass(u & v), self._imass(v))


class RankingMeasure(ConditionalPlausibilityMeasure):
    kind = "ranking"
    claims = _ALGEBRAIC_CLAIMS | {"alg4_prime"}

    def __init__(self, ranks, cap=None):
        rs = []
        for r in ranks:
            if r == INF or r == "inf":
                rs.append(INF)
            elif isinstance(r, int) and not isinstance(r, bool) and r >= 0:
                rs.append(r)
            else:
                raise InvalidParameters(f"rank must be a natural number or inf, got {r!r}")
        space = _space_for(len(rs), cap)
        if min(rs) != 0:
            raise InvalidParameters("the minimum rank over all worlds must be 0")
        self.ranks = tuple(rs)
        self._k: dict[int, float] = {}
        super().__init__(space, RANK_DOMAIN)

    def kappa(self, event: int):
        try:
            return self._k[event]
        except KeyError:
            k = self._k[event] = min(
                (r for i, r in enumerate(self.ranks) if (event >> i) & 1), default=INF
            )
            return k

    def _conditionable(self, v):
        return self.kappa(v) != INF

    def _value(self, u, v):
        return self.kappa(u & v) - self.kappa(v)


class _PossibilityBase(ConditionalPlausibilityMeasure):
    def __init__(self, possibilities, domain, cap=None):
        ps = tuple(_as_fraction(p) for p in possibilities)
        space = _space_for(len(ps), cap)
        if any(not 0 <= p <= 1 for p in ps):
            raise InvalidParameters("possibility values must lie in [0, 1]")
        if max(ps) != 1:
            raise InvalidParameters("the maximum possibility over all worlds must be 1")
        self.possibilities = ps
        self._p: dict[int, Fraction] = {}
        super().__init__(space, domain)

    def poss(self, event: int) -> Fraction:
        try:
            return self._p[event]
        except KeyError:
            p = self._p[event] = max(
                (x for i, x in enumerate(self.possibilities) if (event >> i) & 1),
                default=Fraction(0),
            )
            return p

    def _conditionable(self, v):
        return self.poss(v) > 0


class PossibilityMinMeasure(_PossibilityBase):
    """``Poss(U|V)``: the three-case, min-based conditioning."""

    kind = "possibility-min"
    claims = _ALGEBRAIC_CLAIMS

    def __init__(self, possibilities, cap=None):
        super().__init__(possibilities, POSSIBILITY_MIN_DOMAIN, cap)

    def _value(self, u, v):
        a, b = self.poss(u & v), self.poss(v)
        return a if a < b else Fraction(1)


class PossibilityDivMeasure(_PossibilityBase):
    """``Poss(U||V)``: ratio conditioning."""

    kind = "possibility-div"
    claims = _ALGEBRAIC_CLAIMS | {"alg4_prime"}

    def __init__(self, possibilities, cap=None):
        super().__init__(possibilities, POSSIBILITY_DIV_DOMAIN, cap)

    def _value(self, u, v):
        return self.poss(u & v) / self.poss(v)


class _MeasureSetBase(ConditionalPlausibilityMeasure):
    def __init__(self, measures, domain, cap=None):
        if not measures:
            raise InvalidParameters("a measure set needs at least one measure")
        validated = [_validate_weights(w, cap) for w in measures]
        spaces = {s for s, _ in validated}
        if len(spaces) != 1:
            raise InvalidParameters("all measures must live on the same world space")
        self.measures = tuple(ws for _, ws in validated)
        self._ints = [_integer_weights(ws) for ws in self.measures]
        self._mass: dict[int, tuple[int, ...]] = {}
        super().__init__(spaces.pop(), domain)

    def masses(self, event: int) -> tuple[int, ...]:
        """Unnormalized mass of ``event`` under each measure."""
        try:
            return self._mass[event]
        except KeyError:
            m = self._mass[event] = tuple(_int_mass(nums, event) for nums, _ in self._ints)
            return m

    def probabilities(self, event: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(m, den) for m, (_, den) in zip(self.masses(event), self._ints))

    def _conditionals(self, u, v):
        """``mu(U|V)`` per measure, None where ``mu(V) = 0``."""
        muv, mv = self.masses(u & v), self.masses(v)
        return [Fraction(a, b) if b else None for a, b in zip(muv, mv)]


class ProbSetMeasure(_MeasureSetBase):
    """``Pl_P``: a set of probabilities as a function-valued measure."""

    kind = "probset"
    claims = _ALGEBRAIC_CLAIMS

    def __init__(self, measures, cap=None, domain: StarDomain | None = None):
        super().__init__(measures, domain or StarDomain(len(measures)), cap)
        if self.domain.m != len(self.measures):
            raise InvalidParameters("domain arity does not match the measure set")

    def _conditionable(self, v):
        return any(self.masses(v))

    def _value(self, u, v):
        return star_value(self._conditionals(u, v))


class LowerProbability(_MeasureSetBase):
    """Lower probability; ``strict`` needs every measure to give V mass."""

    claims = frozenset({"acceptable"})

    def __init__(self, measures, variant: str = "strict", cap=None):
        if variant not in ("strict", "lenient"):
            raise InvalidParameters(f"unknown variant {variant!r}")
        self.variant = variant
        self.kind = f"lower-{variant}"
        if variant == "strict":
            self.claims = self.claims | {"coherent"}
        super().__init__(measures, LOWER_DOMAIN, cap)

    def _conditionable(self, v):
        ms = self.masses(v)
        return all(ms) if self.variant == "strict" else any(ms)

    def _value(self, u, v):
        return min(x for x in self._conditionals(u, v) if x is not None)


class UpperProbability(_MeasureSetBase):
    """Upper probability, sup over the measures that give V positive mass."""

    kind = "upper"
    claims = frozenset({"acceptable"})

    def __init__(self, measures, cap=None):
        super().__init__(measures, UPPER_DOMAIN, cap)

    def _conditionable(self, v):
        return any(self.masses(v))

    def _value(self, u, v):
        return max(x for x in self._conditionals(u, v) if x is not None)


class IntervalMeasure(_MeasureSetBase):
    """``U -> (P_*(U), P^*(U))``; unconditional only, so F' = {W}."""

    kind = "interval"
    claims = frozenset()

    def __init__(self, measures, cap=None):
        super().__init__(measures, INTERVAL_DOMAIN, cap)

    def _conditionable(self, v):
        return v == self.space.full

    def _value(self, u, v):
        ps = self.probabilities(u)
        return IntervalValue(min(ps), max(ps))


class LexicographicProbability(_MeasureSetBase):
    """Conditioning on the first measure of a sequence that gives V mass.

    This is a Popper-style conditional probability: every event some measure
    sees is conditionable, even when ``Pl(V|W) = 0``.  It is algebraic with
    the probability operations but not standard, which makes it the stock
    example of an algebraic cps where noninteraction does not imply
    independence.
    """

    kind = "lexicographic"
    claims = frozenset({"acceptable", "algebraic", "monotonic", "alg4_prime"})

    def __init__(self, measures, cap=None):
        super().__init__(measures, PROBABILITY_DOMAIN, cap)

    def _conditionable(self, v):
        return any(self.masses(v))

    def _value(self, u, v):
        for a, b in zip(self.masses(u & v), self.masses(v)):
            if b:
                return Fraction(a, b)
        raise AssertionError("unreachable: V is conditionable")


def make_probability(weights, cap=None) -> ProbabilityMeasure:
    return ProbabilityMeasure(weights, cap)


def make_ranking(ranks, cap=None) -> RankingMeasure:
    return RankingMeasure(ranks, cap)


def make_possibility_min(possibilities, cap=None) -> PossibilityMinMeasure:
    return PossibilityMinMeasure(possibilities, cap)


def make_possibility_div(possibilities, cap=None) -> PossibilityDivMeasure:
    return PossibilityDivMeasure(possibilities, cap)


def make_probset(measures, cap=None) -> ProbSetMeasure:
    return ProbSetMeasure(measures, cap)


def make_lower_probability(measures, variant="strict", cap=None) -> LowerProbability:
    return LowerProbability(measures, variant, cap)


def make_upper_probability(measures, cap=None) -> UpperProbability:
    return UpperProbability(measures, cap)


def make_interval(measures, cap=None) -> IntervalMeasure:
    return IntervalMeasure(measures, cap)


def interval_value(measures, u: int) -> IntervalValue:
    return IntervalMeasure(measures).unconditional(u)


def make_measure(kind: str, params, cap=None) -> ConditionalPlausibilityMeasure:
    """Construct a measure of ``kind`` from its parameter vector(s)."""
    if kind == "probability":
        return make_probability(params, cap)
    if kind == "ranking":
        return make_ranking(params, cap)
    if kind == "possibility-min":
        return make_possibility_min(params, cap)
    if kind == "possibility-div":
        return make_possibility_div(params, cap)
    if kind == "probset":
        return make_probset(params, cap)
    if kind == "lower-strict":
        return make_lower_probability(params, "strict", cap)
    if kind == "lower-lenient":
        return make_lower_probability(params, "lenient", cap)
    if kind == "upper":
        return make_upper_probability(params, cap)
    if kind == "interval":
        return make_interval(params, cap)
    if kind == "lexicographic":
        return LexicographicProbability(params, cap)
    raise InvalidParameters(f"unknown measure kind {kind!r}")


def parameters(measure) -> object:
    """The parameter vector(s) ``make_measure`` would need to rebuild ``measure``."""
    for attr in ("weights", "ranks", "possibilities", "measures"):
        if hasattr(measure, attr):
            return getattr(measure, attr)
    raise WrongMeasureKind(f"{type(measure).__name__} has no parameter vector")


# -- named examples ---------------------------------------------------------


def uniform(n: int) -> ProbabilityMeasure:
    return make_probability([Fraction(1, 1 << n)] * (1 << n))


def double_coin() -> ProbSetMeasure:
    """A coin known to be double-headed or double-tailed, tossed twice.

    Heads is 1; world 3 is hh and world 0 is tt.
    """
    return make_probset([[0, 0, 0, 1], [1, 0, 0, 0]])


def coin_family(alphas: Sequence[Fraction]) -> ProbSetMeasure:
    """Two independent tosses of a coin with heads-probability in ``alphas``."""
    ms = []
    for a in alphas:
        a = _as_fraction(a)
        ms.append([(1 - a) ** 2, a * (1 - a), (1 - a) * a, a * a])
    return make_probset(ms)


def lower_witness_set() -> list[list[Fraction]]:
    """Measures on worlds a=0, b=1, c=2 (world 3 is a null padding world).

    mu puts all mass on c; mu' gives a 2/3 and b 1/3.
    """
    return [
        [Fraction(0), Fraction(0), Fraction(1), Fraction(0)],
        [Fraction(2, 3), Fraction(1, 3), Fraction(0), Fraction(0)],
    ]


# -- seeded random instances ------------------------------------------------


def random_weights(n: int, rng: random.Random, max_weight: int = 3, zero_rate: float = 0.25):
    size = 1 << n
    while True:
        raw = [0 if rng.random() < zero_rate else rng.randint(1, max_weight) for _ in range(size)]
        if sum(raw) > 0:
            total = sum(raw)
            return [Fraction(r, total) for r in raw]


def random_ranks(n: int, rng: random.Random, max_rank: int = 3, inf_rate: float = 0.2):
    size = 1 << n
    ranks = [INF if rng.random() < inf_rate else rng.randint(0, max_rank) for _ in range(size)]
    finite = [r for r in ranks if r != INF]
    if not finite:
        ranks[rng.randrange(size)] = 0
    else:
        low = min(finite)
        ranks = [r if r == INF else r - low for r in ranks]
    return ranks


def random_possibilities(n: int, rng: random.Random, denominator: int = 4, zero_rate: float = 0.2):
    size = 1 << n
    ps = [
        Fraction(0) if rng.random() < zero_rate else Fraction(rng.randint(1, denominator), denominator)
        for _ in range(size)
    ]
    top = max(ps)
    if top == 0:
        ps[rng.randrange(size)] = Fraction(1)
    else:
        best = [i for i, p in enumerate(ps) if p == top]
        ps[rng.choice(best)] = Fraction(1)
    return ps


def random_measure(kind: str, n: int, rng: random.Random, set_size: int = 2):
    """An unstructured seeded instance of any measure kind."""
    if kind == "probability":
        return make_probability(random_weights(n, rng))
    if kind == "ranking":
        return make_ranking(random_ranks(n, rng))
    if kind == "possibility-min":
        return make_possibility_min(random_possibilities(n, rng))
    if kind == "possibility-div":
        return make_possibility_div(random_possibilities(n, rng))
    if kind == "probset":
        return make_probset([random_weights(n, rng, zero_rate=0.35) for _ in range(set_size)])
    if kind in ("lower-strict", "lower-lenient"):
        measures = [random_weights(n, rng, zero_rate=0.35) for _ in range(set_size)]
        return make_lower_probability(measures, kind.split("-")[1])
    if kind == "upper":
        return make_upper_probability([random_weights(n, rng, zero_rate=0.35) for _ in range(set_size)])
    if kind == "interval":
        return make_interval([random_weights(n, rng) for _ in range(set_size)])
    raise InvalidParameters(f"no random generator for {kind!r}")
