"""World spaces, events, plausibility domains and the conditional plausibility
measure interface.

Events are plain ``int`` bit masks over the worlds of a :class:`WorldSpace`:
bit ``w`` is set iff world ``w`` belongs to the event.  World ``w`` encodes the
assignment ``(x_1, ..., x_n)`` with ``x_1`` as the least significant bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

DEFAULT_MAX_VARIABLES = 10
EXHAUSTIVE_MAX_VARIABLES = 3


class PlausibilityError(Exception):
    """Base class for errors raised by this package."""


class ConditioningUndefined(PlausibilityError, ValueError):
    """The conditioning event is not in F' for this measure."""


class DomainMismatch(PlausibilityError, TypeError):
    """Values from different plausibility domains were mixed."""


class NotAlgebraic(PlausibilityError, TypeError):
    """The measure provides no oplus/otimes."""


class WrongMeasureKind(PlausibilityError, TypeError):
    pass


class InvalidParameters(PlausibilityError, ValueError):
    pass


class PartialComparison(enum.Enum):
    LESS = "LessThan"
    EQUAL = "Equal"
    GREATER = "GreaterThan"
    INCOMPARABLE = "Incomparable"


# -- worlds and events ------------------------------------------------------


@dataclass(frozen=True)
class WorldSpace:
    """The ``2**n`` worlds generated by ``n`` binary variables."""

    n: int
    cap: int = DEFAULT_MAX_VARIABLES

    def __post_init__(self):
        if not isinstance(self.n, int) or not 1 <= self.n <= self.cap:
            raise InvalidParameters(f"need 1 <= n <= {self.cap}, got {self.n!r}")

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    @property
    def empty(self) -> int:
        return 0

    @property
    def variables(self) -> range:
        return range(self.n)

    def worlds(self) -> range:
        return range(self.size)

    def events(self) -> range:
        """Every event, i.e. the whole powerset."""
        return range(self.full + 1)

    def decode(self, w: int) -> tuple[int, ...]:
        if not 0 <= w < self.size:
            raise IndexError(f"world {w} out of range")
        return tuple((w >> i) & 1 for i in range(self.n))

    def encode(self, values: Sequence[int]) -> int:
        if len(values) != self.n or any(v not in (0, 1) for v in values):
            raise InvalidParameters(f"bad assignment {values!r}")
        return sum(v << i for i, v in enumerate(values))

    def check_event(self, event: int) -> int:
        if not isinstance(event, (int, np.integer)) or not 0 <= event <= self.full:
            raise InvalidParameters(f"not an event of a {self.size}-world space: {event!r}")
        return int(event)

    def event(self, worlds: Iterable[int]) -> int:
        e = 0
        for w in worlds:
            if not 0 <= w < self.size:
                raise IndexError(f"world {w} out of range")
            e |= 1 << w
        return e

    def members(self, event: int) -> list[int]:
        return [w for w in range(self.size) if (event >> w) & 1]

    def complement(self, event: int) -> int:
        return self.full & ~event

    def var_event(self, i: int, x: int) -> int:
        """The event ``X_{i+1} = x`` (variables are 0-based here)."""
        if not 0 <= i < self.n:
            raise IndexError(f"variable {i} out of range")
        return self.event(w for w in range(self.size) if ((w >> i) & 1) == x)

    def assignment_event(self, assignment: Mapping[int, int]) -> int:
        e = self.full
        for i, x in assignment.items():
            e &= self.var_event(i, x)
        return e

    def assignments(self, variables: Iterable[int]) -> Iterator[dict[int, int]]:
        """All 0/1 assignments to ``variables`` in binary counting order."""
        vs = sorted(variables)
        for code in range(1 << len(vs)):
            yield {v: (code >> k) & 1 for k, v in enumerate(vs)}


def submasks(event: int) -> Iterator[int]:
    """Every subset of ``event``, the event itself first and 0 last."""
    sub = event
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & event


def popcount(event: int) -> int:
    return bin(event).count("1")


def format_event(event: int) -> str:
    members = [str(i) for i in range(event.bit_length()) if (event >> i) & 1]
    return "{" + ",".join(members) + "}"


# -- plausibility domains ---------------------------------------------------


class PlausibilityDomain:
    """A partially ordered set with bottom and top, plus optional oplus/otimes.

    Subclasses set ``tag``, ``bottom`` and ``top`` and implement :meth:`leq`
    and :meth:`owns`.  ``oplus``/``otimes`` are present only on algebraic
    domains.
    """

    tag: str = "abstract"
    bottom: Any = None
    top: Any = None
    has_oplus = False
    has_otimes = False

    def owns(self, d) -> bool:
        raise NotImplementedError

    def leq(self, d, e) -> bool:
        raise NotImplementedError

    def oplus(self, d, e):
        raise NotAlgebraic(f"{self.tag} domain has no oplus")

    def otimes(self, d, e):
        raise NotAlgebraic(f"{self.tag} domain has no otimes")

    def leq_matrix(self, values: Sequence[Any]) -> np.ndarray:
        """``M[i, j] = leq(values[i], values[j])``."""
        k = len(values)
        m = np.zeros((k, k), dtype=bool)
        for i, d in enumerate(values):
            for j, e in enumerate(values):
                m[i, j] = self.leq(d, e)
        return m

    def format(self, d) -> str:
        return str(d)

    def __repr__(self):
        return f"<{type(self).__name__} {self.tag}>"


class TotalOrderDomain(PlausibilityDomain):
    """Domain whose order is total and given by a numeric sort key."""

    def key(self, d):
        raise NotImplementedError

    def leq(self, d, e) -> bool:
        return self.key(d) <= self.key(e)

    def leq_matrix(self, values: Sequence[Any]) -> np.ndarray:
        keys = [self.key(v) for v in values]
        ranks = {k: r for r, k in enumerate(sorted(set(keys)))}
        r = np.fromiter((ranks[k] for k in keys), dtype=np.int64, count=len(keys))
        return r[:, None] <= r[None, :]


def compare(domain: PlausibilityDomain, d, e) -> PartialComparison:
    """Four-valued comparison of two elements of ``domain``."""
    for v in (d, e):
        if not domain.owns(v):
            raise DomainMismatch(f"{v!r} is not an element of the {domain.tag} domain")
    if d == e:
        return PartialComparison.EQUAL
    if domain.leq(d, e):
        return PartialComparison.LESS
    if domain.leq(e, d):
        return PartialComparison.GREATER
    return PartialComparison.INCOMPARABLE


# -- Popper algebras and measures -------------------------------------------


@dataclass(frozen=True)
class PopperAlgebra:
    """``F x F'`` with F the full powerset and F' given by a predicate."""

    space: WorldSpace
    conditionable: Callable[[int], bool]

    def in_algebra(self, event: int) -> bool:
        return 0 <= event <= self.space.full

    def conditionable_events(self) -> Iterator[int]:
        return (v for v in self.space.events() if self.conditionable(v))


class ConditionalPlausibilityMeasure:
    """``Pl(U|V)`` on ``2^W x F'`` with values in ``domain``.

    Subclasses implement ``_conditionable(V)`` and ``_value(U, V)``; the base
    class validates arguments and memoizes values.  ``claims`` lists the
    properties the constructor promises (checked by :mod:`plausinet.axioms`):
    any of ``acceptable``, ``algebraic``, ``standard``, ``alg4_prime``,
    ``coherent``, ``determined``, ``monotonic``.
    """

    kind = "abstract"
    claims: frozenset[str] = frozenset()

    def __init__(self, space: WorldSpace, domain: PlausibilityDomain):
        self.space = space
        self.domain = domain
        self.popper = PopperAlgebra(space, self.is_conditionable)
        self._values: dict[tuple[int, int], Any] = {}
        self._cond_cache: dict[int, bool] = {}
        if domain.bottom == domain.top:
            raise InvalidParameters("top and bottom of the domain coincide")

    def _conditionable(self, v: int) -> bool:
        raise NotImplementedError

    def _value(self, u: int, v: int):
        raise NotImplementedError

    @property
    def algebraic(self) -> bool:
        return "algebraic" in self.claims and self.domain.has_otimes

    def is_conditionable(self, v: int) -> bool:
        try:
            return self._cond_cache[v]
        except KeyError:
            self.space.check_event(v)
            ok = self._cond_cache[v] = bool(self._conditionable(v))
            return ok

    def cond(self, u: int, v: int):
        """``Pl(U|V)``; raises :class:`ConditioningUndefined` if V is not in F'."""
        key = (u, v)
        try:
            return self._values[key]
        except KeyError:
            pass
        self.space.check_event(u)
        if not self.is_conditionable(v):
            raise ConditioningUndefined(f"cannot condition on {format_event(v)}")
        val = self._values[key] = self._value(u, v)
        return val

    def unconditional(self, u: int):
        return self.cond(u, self.space.full)

    def oplus(self, d, e):
        return self.domain.oplus(d, e)

    def otimes(self, d, e):
        return self.domain.otimes(d, e)

    def world_values(self) -> list:
        """Unconditional plausibility of each singleton world."""
        return [self.unconditional(1 << w) for w in self.space.worlds()]

    def __repr__(self):
        return f"<{type(self).__name__} n={self.space.n}>"


class PatchedMeasure(ConditionalPlausibilityMeasure):
    """A copy of ``base`` with some ``(U, V)`` values overridden.

    Used to build deliberately broken measures; it keeps the base measure's
    claims so that the checkers can catch the breakage.
    """

    def __init__(self, base: ConditionalPlausibilityMeasure, patches: Mapping[tuple[int, int], Any]):
        self.base = base
        self.patches = dict(patches)
        self.kind = base.kind
        self.claims = base.claims
        super().__init__(base.space, base.domain)
        for (u, v), val in self.patches.items():
            if not base.is_conditionable(v):
                raise ConditioningUndefined(f"patch conditions on {format_event(v)}, not in F'")
            if not base.domain.owns(val):
                raise DomainMismatch(f"patched value {val!r} not in the {base.domain.tag} domain")

    def _conditionable(self, v):
        return self.base.is_conditionable(v)

    def _value(self, u, v):
        if (u, v) in self.patches:
            return self.patches[(u, v)]
        return self.base.cond(u, v)

    def __getattr__(self, name):
        # expose kind-specific parameters (weights, measures, ...) of the base
        if name == "base":
            raise AttributeError(name)
        return getattr(self.base, name)
