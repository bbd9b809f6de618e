"""Finite metric tables, a 1-D continuous mode, and sequence diagnostics."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .relations import Carrier, FiniteRelation, SelfMap, Witness

METRIC_TOL = 1e-12
CONTINUOUS_TOL = 1e-9


@dataclass(frozen=True)
class MetricTable:
    carrier: Carrier
    dist: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = self.carrier.size
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise ValueError(f"distance matrix must be {n}x{n}")

    @classmethod
    def from_matrix(cls, carrier: Carrier | int, rows: Sequence[Sequence[float]]) -> MetricTable:
        if isinstance(carrier, int):
            carrier = Carrier.of_size(carrier)
        return cls(carrier, tuple(tuple(float(v) for v in row) for row in rows))

    @classmethod
    def path(cls, carrier: Carrier | int) -> MetricTable:
        """``d(i, j) = |i - j|``."""
        if isinstance(carrier, int):
            carrier = Carrier.of_size(carrier)
        n = carrier.size
        return cls.from_matrix(carrier, [[abs(i - j) for j in range(n)] for i in range(n)])

    @classmethod
    def uniform(cls, carrier: Carrier | int) -> MetricTable:
        """The discrete metric: every two distinct points at distance 1."""
        if isinstance(carrier, int):
            carrier = Carrier.of_size(carrier)
        n = carrier.size
        return cls.from_matrix(carrier, [[0 if i == j else 1 for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return self.carrier.size

    def __call__(self, i: int, j: int) -> float:
        return self.dist[i][j]


@dataclass(frozen=True)
class NumericLine:
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not self.lower <= self.upper:
            raise ValueError("interval needs lower <= upper")

    def __call__(self, x: float, y: float) -> float:
        return abs(x - y)

    def __contains__(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def grid(self, size: int) -> tuple[float, ...]:
        if size < 2:
            return (self.lower,)
        step = (self.upper - self.lower) / (size - 1)
        return tuple(self.lower + k * step for k in range(size - 1)) + (self.upper,)


@dataclass(frozen=True)
class IndexedSequence:
    """Eventually periodic sequence ``prefix + cycle + cycle + ...``."""

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.cycle:
            raise ValueError("cycle must be nonempty")

    def transitions(self) -> list[tuple[int, int]]:
        """All consecutive pairs the infinite sequence ever produces."""
        seq = list(self.prefix) + list(self.cycle) + [self.cycle[0]]
        return list(zip(seq, seq[1:]))

    def range(self) -> frozenset[int]:
        return frozenset(self.prefix) | frozenset(self.cycle)

    def take(self, k: int) -> list[int]:
        out = list(self.prefix[:k])
        i = 0
        while len(out) < k:
            out.append(self.cycle[i % len(self.cycle)])
            i += 1
        return out


@dataclass(frozen=True)
class CauchyWitness:
    epsilon: float
    m_indices: tuple[int, ...]
    n_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.m_indices) != len(self.n_indices):
            raise ValueError("index lists must have equal length")

    def __len__(self) -> int:
        return len(self.m_indices)


def validate_metric(M: MetricTable, tol: float = METRIC_TOL) -> Witness:
    n = M.n
    d = M.dist
    for i in range(n):
        if abs(d[i][i]) > tol:
            return Witness.fail((i,), "identity: d(x,x) != 0")
    for i, j in itertools.product(range(n), repeat=2):
        if i != j and not d[i][j] > 0:
            return Witness.fail((i, j), "positivity: d(x,y) <= 0 for x != y")
        if not math.isfinite(d[i][j]):
            return Witness.fail((i, j), "finiteness")
    for i, j in itertools.product(range(n), repeat=2):
        if abs(d[i][j] - d[j][i]) > tol:
            return Witness.fail((i, j), "symmetry: d(x,y) != d(y,x)")
    for i, j, k in itertools.product(range(n), repeat=3):
        if d[i][k] > d[i][j] + d[j][k] + tol:
            return Witness.fail((i, j, k), "triangle: d(x,z) > d(x,y) + d(y,z)")
    return Witness.ok()


def is_R_preserving(seq: IndexedSequence, R: FiniteRelation) -> Witness:
    for p in seq.prefix + seq.cycle:
        R.carrier.check_index(p)
    for a, b in seq.transitions():
        if (a, b) not in R:
            return Witness.fail((a, b), "R-preserving")
    return Witness.ok()


def cauchy_failure_witness(
    xs: Sequence[float],
    epsilon: float,
    dist: Callable[[float, float], float] = lambda a, b: abs(a - b),
) -> CauchyWitness | None:
    """Extract the two non-Cauchy subsequences from a finite prefix.

    Index ``m`` is admissible when some later ``n`` has ``d(x_m, x_n) > epsilon``.
    For ``k = 0, 1, ...`` take ``m_k`` the least admissible index ``>= k`` and
    ``n_k`` the least such ``n``; this gives ``k <= m_k < n_k``,
    ``d(x_{m_k}, x_{n_k}) > epsilon`` and ``d(x_{m_k}, x_{n_k - 1}) <= epsilon``.
    Returns None when no index is admissible.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if len(xs) < 2:
        raise ValueError("need at least two terms")
    N = len(xs)
    first_far: list[int | None] = []
    for m in range(N):
        hit = None
        for n in range(m + 1, N):
            if dist(xs[m], xs[n]) > epsilon:
                hit = n
                break
        first_far.append(hit)
    ms: list[int] = []
    ns: list[int] = []
    m = 0
    for k in range(N):
        m = max(m, k)
        while m < N and first_far[m] is None:
            m += 1
        if m >= N:
            break
        ms.append(m)
        ns.append(first_far[m])  # type: ignore[arg-type]
    if not ms:
        return None
    return CauchyWitness(float(epsilon), tuple(ms), tuple(ns))


def replay_cauchy_witness(
    xs: Sequence[float],
    w: CauchyWitness,
    dist: Callable[[float, float], float] = lambda a, b: abs(a - b),
) -> list[str]:
    """Independent check of the three extraction invariants; returns the failures."""
    errors = []
    for k, (m, n) in enumerate(zip(w.m_indices, w.n_indices)):
        if not k <= m < n:
            errors.append(f"k={k}: ordering {k} <= {m} < {n} fails")
            continue
        if not dist(xs[m], xs[n]) > w.epsilon:
            errors.append(f"k={k}: d(x_{m}, x_{n}) <= epsilon")
        if not dist(xs[m], xs[n - 1]) <= w.epsilon:
            errors.append(f"k={k}: d(x_{m}, x_{n - 1}) > epsilon")
    return errors


def is_d_self_closed(R: FiniteRelation, M: MetricTable) -> Witness:
    """Always true on a finite space.

    A convergent sequence in a finite metric space is eventually constant at
    its limit ``x``, and an R-preserving tail that is constant forces
    ``(x, x) ∈ R``; the tail itself is the required subsequence.
    """
    if R.carrier != M.carrier:
        raise ValueError("relation and metric live on different carriers")
    return Witness.ok("finite-discrete")


def is_R_continuous_at(T: SelfMap, R: FiniteRelation, M: MetricTable, x: int) -> Witness:
    if not (T.carrier == R.carrier == M.carrier):
        raise ValueError("map, relation and metric live on different carriers")
    M.carrier.check_index(x)
    return Witness.ok("finite-discrete")


def is_R_complete(R: FiniteRelation, M: MetricTable) -> Witness:
    """Cauchy sequences in a finite metric space are eventually constant, hence convergent."""
    if R.carrier != M.carrier:
        raise ValueError("relation and metric live on different carriers")
    return Witness.ok("finite-discrete")


# --- continuous mode ---------------------------------------------------------


@dataclass(frozen=True)
class LineRelation:
    """A relation on an interval given by kind: universal, leq, geq, or explicit pairs."""

    kind: str
    pairs: tuple[tuple[float, float], ...] = ()

    KINDS = ("universal", "leq", "geq", "pairs")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown line relation kind {self.kind!r}")

    def holds(self, x: float, y: float) -> bool:
        if self.kind == "universal":
            return True
        if self.kind == "leq":
            return x <= y
        if self.kind == "geq":
            return x >= y
        return (x, y) in self.pairs

    def is_transitive(self) -> bool:
        if self.kind != "pairs":
            return True
        s = set(self.pairs)
        return all((a, d) in s for a, b in s for c, d in s if b == c)


SAMPLE_HEAD = 64
SAMPLE_MAX_EXP = 60


def _sample_indices() -> list[int]:
    idx = set(range(SAMPLE_HEAD))
    idx.update(2 ** j for j in range(SAMPLE_MAX_EXP + 1))
    return sorted(idx)


def is_R_continuous_at_sampled(
    f: Callable[[float], float],
    relation: LineRelation,
    x: float,
    sequences: Sequence[Callable[[int], float]],
    tol: float = CONTINUOUS_TOL,
) -> Witness:
    """Sampled R-continuity check at ``x`` in continuous mode.

    Each sequence is a callable ``n -> x_n`` probed at the first indices and at
    powers of two up to ``2**60``.  A sequence must look R-preserving at every
    probe and must come within ``tol`` of ``x``; the verdict fails on the first
    sequence whose image, at the last probe still distinct from ``x``, is more
    than ``tol`` away from ``f(x)``.  The
    counterexample is the position of that sequence in ``sequences``.
    """
    idx = _sample_indices()
    fx = f(x)
    for s, seq in enumerate(sequences):
        for k in idx:
            if not relation.holds(seq(k), seq(k + 1)):
                raise ValueError(f"sequence {s} is not R-preserving at n={k}")
        last = idx[-1]
        if abs(seq(last) - x) > tol:
            raise ValueError(f"sequence {s} does not reach {x} within {tol}")
        # floats saturate at x for fast sequences; probe the last term still distinct from x
        probe = next((seq(k) for k in reversed(idx) if seq(k) != x), seq(last))
        if abs(f(probe) - fx) > tol:
            return Witness.fail((s,), "R-continuity: image sequence misses f(x)")
    return Witness.ok("sampled")


def is_d_self_closed_sampled(
    relation: LineRelation,
    xs: Sequence[float],
    limit: float,
) -> Witness:
    """Find the subsequence of terms comparable with ``limit`` in a sampled sequence.

    The returned ``support`` holds the indices of the subsequence.  Fails if the
    sample is not R-preserving, or if no tail of the sample is comparable.
    """
    for k in range(len(xs) - 1):
        if not relation.holds(xs[k], xs[k + 1]):
            return Witness.fail((k,), "sample is not R-preserving")
    sub = tuple(k for k, v in enumerate(xs) if relation.holds(v, limit) or relation.holds(limit, v))
    if not sub or sub[-1] != len(xs) - 1:
        return Witness.fail((len(xs) - 1,), "d-self-closed: tail not comparable with limit")
    return Witness.ok("sampled", sub)


__all__ = [
    "CONTINUOUS_TOL",
    "METRIC_TOL",
    "CauchyWitness",
    "IndexedSequence",
    "LineRelation",
    "MetricTable",
    "NumericLine",
    "cauchy_failure_witness",
    "is_R_complete",
    "is_R_continuous_at",
    "is_R_continuous_at_sampled",
    "is_R_preserving",
    "is_d_self_closed",
    "is_d_self_closed_sampled",
    "replay_cauchy_witness",
    "validate_metric",
]
