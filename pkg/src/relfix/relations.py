"""Exact relation algebra over small finite carriers.

Relations are stored as an ``n*n`` bit matrix packed into a Python int: the
pair ``(i, j)`` lives at bit ``i * n + j``.  Everything here is a pure
function of immutable values.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

MAX_CARRIER = 16


@dataclass(frozen=True)
class Carrier:
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.labels) < 1:
            raise ValueError("carrier must contain at least one point")
        if len(self.labels) > MAX_CARRIER:
            raise ValueError(f"carrier size {len(self.labels)} exceeds cap {MAX_CARRIER}")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("carrier labels must be distinct")

    @classmethod
    def of_size(cls, n: int) -> Carrier:
        return cls(tuple(f"p{i}" for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown point label {label!r}") from None

    def check_index(self, i: int) -> None:
        if not 0 <= i < self.size:
            raise IndexError(f"point index {i} out of range for carrier of size {self.size}")


@dataclass(frozen=True)
class Witness:
    """Verdict of a decision procedure.

    ``counterexample`` is present exactly when ``verdict`` is false and holds
    the lexicographically least violating tuple of point indices.  ``support``
    carries auxiliary index data (a sequence range, a subsequence) and
    ``reason`` a short tag naming the violated clause or the justification.
    """

    verdict: bool
    counterexample: tuple[int, ...] | None = None
    reason: str = ""
    support: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.verdict and self.counterexample is not None:
            raise ValueError("a true verdict cannot carry a counterexample")
        if not self.verdict and self.counterexample is None:
            raise ValueError("a false verdict needs a counterexample")

    def __bool__(self) -> bool:
        return self.verdict

    @classmethod
    def ok(cls, reason: str = "", support: tuple[int, ...] | None = None) -> Witness:
        return cls(True, None, reason, support)

    @classmethod
    def fail(
        cls, counterexample: tuple[int, ...], reason: str = "", support: tuple[int, ...] | None = None
    ) -> Witness:
        return cls(False, tuple(counterexample), reason, support)


class PropertyKind(enum.Enum):
    REFLEXIVE = "reflexive"
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"
    TRANSITIVE = "transitive"
    COMPLETE = "complete"
    PARTIAL_ORDER = "partial_order"
    EMPTY = "empty"
    UNIVERSAL = "universal"


def _mask_of(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


def _points_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class FiniteRelation:
    """A binary relation on a finite carrier.

    ``scope`` records the sub-carrier a restriction lives on; it does not take
    part in equality, so ``restrict(R, all points) == R``.
    """

    carrier: Carrier
    mask: int
    scope: frozenset[int] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        n = self.carrier.size
        if self.mask < 0 or self.mask >> (n * n):
            raise ValueError("relation mask has bits outside the carrier square")
        if self.scope is not None:
            for p in self.scope:
                self.carrier.check_index(p)

    @classmethod
    def from_pairs(cls, carrier: Carrier | int, pairs: Iterable[tuple[int, int]]) -> FiniteRelation:
        if isinstance(carrier, int):
            carrier = Carrier.of_size(carrier)
        n = carrier.size
        mask = 0
        for i, j in pairs:
            carrier.check_index(i)
            carrier.check_index(j)
            mask |= 1 << (i * n + j)
        return cls(carrier, mask)

    @classmethod
    def universal(cls, carrier: Carrier | int) -> FiniteRelation:
        if isinstance(carrier, int):
            carrier = Carrier.of_size(carrier)
        return cls(carrier, (1 << (carrier.size ** 2)) - 1)

    @classmethod
    def empty(cls, carrier: Carrier | int) -> FiniteRelation:
        if isinstance(carrier, int):
            carrier = Carrier.of_size(carrier)
        return cls(carrier, 0)

    @property
    def n(self) -> int:
        return self.carrier.size

    @property
    def points(self) -> tuple[int, ...]:
        """Points the relation is considered on: the scope if restricted."""
        if self.scope is None:
            return tuple(range(self.n))
        return tuple(sorted(self.scope))

    def __contains__(self, pair: tuple[int, int]) -> bool:
        i, j = pair
        return bool(self.mask >> (i * self.n + j) & 1)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        n = self.n
        return tuple(divmod(b, n) for b in _points_of(self.mask))

    def successors(self, i: int) -> tuple[int, ...]:
        n = self.n
        return _points_of(self.mask >> (i * n) & ((1 << n) - 1))

    def is_empty(self) -> bool:
        return self.mask == 0

    def __repr__(self) -> str:
        return f"FiniteRelation(n={self.n}, pairs={sorted(self.pairs)})"


@dataclass(frozen=True)
class SelfMap:
    carrier: Carrier
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.image) != self.carrier.size:
            raise ValueError("self-map must assign an image to every point")
        for v in self.image:
            self.carrier.check_index(v)

    @classmethod
    def from_list(cls, carrier: Carrier | int, image: Iterable[int]) -> SelfMap:
        if isinstance(carrier, int):
            carrier = Carrier.of_size(carrier)
        return cls(carrier, tuple(image))

    @classmethod
    def identity(cls, carrier: Carrier | int) -> SelfMap:
        if isinstance(carrier, int):
            carrier = Carrier.of_size(carrier)
        return cls(carrier, tuple(range(carrier.size)))

    def __call__(self, i: int) -> int:
        return self.image[i]

    @property
    def n(self) -> int:
        return self.carrier.size

    def image_set(self) -> frozenset[int]:
        """The set T(X)."""
        return frozenset(self.image)

    def power(self, k: int) -> SelfMap:
        if k < 0:
            raise ValueError("iterate exponent must be nonnegative")
        img = tuple(range(self.n))
        for _ in range(k):
            img = tuple(self.image[v] for v in img)
        return SelfMap(self.carrier, img)

    def fixed_points(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.image) if v == i)


def _same_carrier(R: FiniteRelation, T: SelfMap) -> None:
    if R.carrier != T.carrier:
        raise ValueError("relation and map live on different carriers")


# --- algebra ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _transpose_mask(n: int, mask: int) -> int:
    out = 0
    for b in _points_of(mask):
        i, j = divmod(b, n)
        out |= 1 << (j * n + i)
    return out


def inverse(R: FiniteRelation) -> FiniteRelation:
    return FiniteRelation(R.carrier, _transpose_mask(R.n, R.mask), R.scope)


def symmetric_closure(R: FiniteRelation) -> FiniteRelation:
    return FiniteRelation(R.carrier, R.mask | _transpose_mask(R.n, R.mask), R.scope)


def _square_mask(n: int, E: Iterable[int]) -> int:
    pts = tuple(E)
    m = 0
    for i in pts:
        for j in pts:
            m |= 1 << (i * n + j)
    return m


def restrict(R: FiniteRelation, E: Iterable[int]) -> FiniteRelation:
    """``R ∩ E²``, remembering ``E`` as the scope."""
    E = frozenset(E)
    for p in E:
        R.carrier.check_index(p)
    return FiniteRelation(R.carrier, R.mask & _square_mask(R.n, sorted(E)), E)


def comparative(R: FiniteRelation, x: int, y: int) -> bool:
    R.carrier.check_index(x)
    R.carrier.check_index(y)
    return (x, y) in R or (y, x) in R


# --- property predicates ----------------------------------------------------


def _first_intransitive(R: FiniteRelation, pts: tuple[int, ...]) -> tuple[int, int, int] | None:
    for x in pts:
        for y in pts:
            if (x, y) not in R:
                continue
            for z in pts:
                if (y, z) in R and (x, z) not in R:
                    return (x, y, z)
    return None


def check_property(R: FiniteRelation, kind: PropertyKind) -> Witness:
    pts = R.points
    if kind is PropertyKind.REFLEXIVE:
        for x in pts:
            if (x, x) not in R:
                return Witness.fail((x,), "reflexive")
        return Witness.ok()
    if kind is PropertyKind.SYMMETRIC:
        for x, y in itertools.product(pts, repeat=2):
            if (x, y) in R and (y, x) not in R:
                return Witness.fail((x, y), "symmetric")
        return Witness.ok()
    if kind is PropertyKind.ANTISYMMETRIC:
        for x, y in itertools.product(pts, repeat=2):
            if x != y and (x, y) in R and (y, x) in R:
                return Witness.fail((x, y), "antisymmetric")
        return Witness.ok()
    if kind is PropertyKind.TRANSITIVE:
        bad = _first_intransitive(R, pts)
        return Witness.ok() if bad is None else Witness.fail(bad, "transitive")
    if kind is PropertyKind.COMPLETE:
        # the quantifier ranges over all x, y including x == y
        for x, y in itertools.product(pts, repeat=2):
            if (x, y) not in R and (y, x) not in R:
                return Witness.fail((x, y), "complete")
        return Witness.ok()
    if kind is PropertyKind.PARTIAL_ORDER:
        for part in (PropertyKind.REFLEXIVE, PropertyKind.ANTISYMMETRIC, PropertyKind.TRANSITIVE):
            w = check_property(R, part)
            if not w:
                return w
        return Witness.ok()
    if kind is PropertyKind.EMPTY:
        for x, y in itertools.product(pts, repeat=2):
            if (x, y) in R:
                return Witness.fail((x, y), "empty")
        return Witness.ok()
    if kind is PropertyKind.UNIVERSAL:
        for x, y in itertools.product(pts, repeat=2):
            if (x, y) not in R:
                return Witness.fail((x, y), "universal")
        return Witness.ok()
    raise ValueError(f"unknown property kind {kind!r}")


def is_T_closed(R: FiniteRelation, T: SelfMap) -> Witness:
    _same_carrier(R, T)
    n = R.n
    img = T.image
    mask = R.mask
    for b in _points_of(mask):
        x, y = divmod(b, n)
        if not mask >> (img[x] * n + img[y]) & 1:
            return Witness.fail((x, y), "T-closed")
    return Witness.ok()


def is_T_transitive(R: FiniteRelation, T: SelfMap) -> Witness:
    """Transitivity demanded only on image triples (Tx, Ty, Tz).

    The counterexample is the least preimage triple ``(x, y, z)``.
    """
    _same_carrier(R, T)
    img = T.image
    rng = range(R.n)
    for x in rng:
        for y in rng:
            if (img[x], img[y]) not in R:
                continue
            for z in rng:
                if (img[y], img[z]) in R and (img[x], img[z]) not in R:
                    return Witness.fail((x, y, z), "T-transitive")
    return Witness.ok()


# --- infinite R-preserving sequences on finite sets -------------------------


@lru_cache(maxsize=None)
def _walkable(n: int, mask: int, smask: int) -> dict[int, tuple[tuple[int, ...], tuple[int, ...]]]:
    """Map each walkable range (as a bitmask) to one realizing (prefix, cycle)."""
    succ = [
        _points_of(mask >> (i * n) & ((1 << n) - 1) & smask) if smask >> i & 1 else ()
        for i in range(n)
    ]

    def closed_walk(v: int, within: int) -> tuple[int, ...] | None:
        # shortest walk v -> ... -> v of length >= 1 inside `within`
        parent = {}
        queue = deque()
        for u in succ[v]:
            if within >> u & 1 and u not in parent:
                parent[u] = None
                queue.append(u)
        while queue:
            u = queue.popleft()
            if u == v:
                path = [u]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                path.reverse()
                # path runs from the first successor of v back to v
                return (v,) + tuple(path[:-1])
            for w in succ[u]:
                if within >> w & 1 and w not in parent:
                    parent[w] = u
                    queue.append(w)
        return None

    parent: dict[tuple[int, int], tuple[int, int] | None] = {}
    queue: deque[tuple[int, int]] = deque()
    for v in _points_of(smask):
        st = (1 << v, v)
        parent[st] = None
        queue.append(st)
    found: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    while queue:
        st = queue.popleft()
        visited, cur = st
        if visited not in found:
            cyc = closed_walk(cur, visited)
            if cyc is not None:
                walk = [cur]
                p = parent[st]
                while p is not None:
                    walk.append(p[1])
                    p = parent[p]
                walk.reverse()
                found[visited] = (tuple(walk[:-1]), cyc)
        for u in succ[cur]:
            nxt = (visited | 1 << u, u)
            if nxt not in parent:
                parent[nxt] = st
                queue.append(nxt)
    return found


def walkable_ranges(R: FiniteRelation, S: Iterable[int]) -> set[frozenset[int]]:
    """Every ``E ⊆ S`` that is the range of an infinite R-preserving sequence in ``S``."""
    smask = _mask_of(S)
    for p in _points_of(smask):
        R.carrier.check_index(p)
    return {frozenset(_points_of(m)) for m in _walkable(R.n, R.mask, smask)}


def realizing_sequence(R: FiniteRelation, E: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """An eventually periodic R-preserving sequence ``(prefix, cycle)`` with range exactly ``E``."""
    emask = _mask_of(E)
    table = _walkable(R.n, R.mask, emask)
    if emask not in table:
        raise ValueError(f"{sorted(_points_of(emask))} is not a walkable range of {R!r}")
    return table[emask]


def _sort_key(E: frozenset[int]) -> tuple[int, ...]:
    return tuple(sorted(E))


def locally_transitive_on(R: FiniteRelation, S: tuple[int, ...]) -> Witness:
    best: tuple[tuple[int, int, int], frozenset[int]] | None = None
    for E in sorted(walkable_ranges(R, S), key=_sort_key):
        bad = _first_intransitive(R, tuple(sorted(E)))
        if bad is not None and (best is None or bad < best[0]):
            best = (bad, E)
    if best is None:
        return Witness.ok()
    return Witness.fail(best[0], "locally transitive", _sort_key(best[1]))


def is_locally_transitive(R: FiniteRelation) -> Witness:
    """Failure witness: a violating triple, with the offending range in ``support``."""
    return locally_transitive_on(R, R.points)


def is_locally_T_transitive(R: FiniteRelation, T: SelfMap) -> Witness:
    _same_carrier(R, T)
    return locally_transitive_on(R, tuple(sorted(T.image_set())))


__all__ = [
    "MAX_CARRIER",
    "Carrier",
    "FiniteRelation",
    "PropertyKind",
    "SelfMap",
    "Witness",
    "check_property",
    "comparative",
    "inverse",
    "is_T_closed",
    "is_T_transitive",
    "is_locally_T_transitive",
    "is_locally_transitive",
    "locally_transitive_on",
    "realizing_sequence",
    "restrict",
    "symmetric_closure",
    "walkable_ranges",
]
