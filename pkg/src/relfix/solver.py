"""Picard iteration under a relational phi-contraction."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Union

from .control import ControlFunction, Membership, analytic_verdict, verify_membership
from .metric import CONTINUOUS_TOL, LineRelation, MetricTable, NumericLine
from .relations import FiniteRelation, SelfMap, is_T_closed, symmetric_closure

if TYPE_CHECKING:
    from .certifier import HypothesisReport

DEFAULT_BUDGET = 1_000_000
CONTINUOUS_GRID = 201
CONTINUOUS_MARGIN = 1e-12


@dataclass(frozen=True)
class LineMap:
    """A self-map of an interval chosen from a small formula vocabulary.

    ``x/(1+x)``, ``alpha*x``, ``identity``, and ``step`` (0 below ``jump``, 1
    from ``jump`` on).
    """

    formula: str
    alpha: float = 0.5
    jump: float = 0.5

    FORMULAS = ("x/(1+x)", "alpha*x", "identity", "step")
    CONTINUOUS = ("x/(1+x)", "alpha*x", "identity")

    def __post_init__(self) -> None:
        if self.formula not in self.FORMULAS:
            raise ValueError(f"unknown map formula {self.formula!r}")

    def __call__(self, x: float) -> float:
        if self.formula == "x/(1+x)":
            return x / (1 + x)
        if self.formula == "alpha*x":
            return self.alpha * x
        if self.formula == "identity":
            return x
        return 0.0 if x < self.jump else 1.0

    @property
    def is_continuous(self) -> bool:
        return self.formula in self.CONTINUOUS


@dataclass(frozen=True)
class ProblemInstance:
    space: Union[MetricTable, NumericLine]
    relation: Union[FiniteRelation, LineRelation]
    map: Union[SelfMap, LineMap]
    phi: ControlFunction
    start: Any = None

    def __post_init__(self) -> None:
        if self.finite:
            if not isinstance(self.relation, FiniteRelation) or not isinstance(self.map, SelfMap):
                raise TypeError("a finite space needs a FiniteRelation and a SelfMap")
            if not (self.space.carrier == self.relation.carrier == self.map.carrier):
                raise ValueError("space, relation and map must share one carrier")
            if self.start is not None:
                self.space.carrier.check_index(self.start)
        else:
            if not isinstance(self.relation, LineRelation) or not isinstance(self.map, LineMap):
                raise TypeError("an interval needs a LineRelation and a LineMap")
            if self.start is not None and self.start not in self.space:
                raise ValueError("start lies outside the interval")

    @property
    def finite(self) -> bool:
        return isinstance(self.space, MetricTable)

    def d(self, x: Any, y: Any) -> float:
        return self.space(x, y)


class Status(enum.Enum):
    FIXED_POINT = "FixedPoint"
    CYCLE_DETECTED = "CycleDetected"
    TOLERANCE_REACHED = "ToleranceReached"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    HYPOTHESIS_FAILURE = "HypothesisFailure"


@dataclass
class SolveResult:
    status: Status
    fixed_point: Any = None
    trace: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    start: Any = None
    trace_exit: int | None = None
    warnings: list[str] = field(default_factory=list)
    report: "HypothesisReport | None" = None

    @property
    def steps(self) -> int:
        return len(self.residuals)


@dataclass(frozen=True)
class ContractionReport:
    verdict: bool
    worst_pair: tuple | None
    worst_margin: float
    checked_pairs: int
    symmetrized: bool = False


class TraceInvariantError(AssertionError):
    """Picard iterates left a T-closed relation from an admissible start."""


def admissible_starts(R: FiniteRelation, T: SelfMap) -> frozenset[int]:
    """``X(T, R)``: the points ``x`` with ``(x, Tx) ∈ R``."""
    if R.carrier != T.carrier:
        raise ValueError("relation and map live on different carriers")
    return frozenset(x for x in range(R.n) if (x, T(x)) in R)


def line_admissible(inst: ProblemInstance, grid_size: int = CONTINUOUS_GRID) -> list[float]:
    pts = list(inst.space.grid(grid_size))
    if inst.start is not None:
        pts.insert(0, inst.start)
    return [x for x in pts if inst.relation.holds(x, inst.map(x))]


def _check_phi(phi: ControlFunction) -> None:
    analytic = analytic_verdict(phi)
    in_omega = analytic[1] if analytic is not None else verify_membership(phi).in_omega
    if in_omega is Membership.REFUTED:
        raise ValueError(f"control function {phi!r} is refuted for OMEGA")


def verify_contraction(
    inst: ProblemInstance,
    symmetrized: bool = False,
    grid_size: int = CONTINUOUS_GRID,
    margin: float = CONTINUOUS_MARGIN,
) -> ContractionReport:
    """Check ``d(Tx, Ty) <= phi(d(x, y))`` over the relation.

    Finite mode is exact over every pair of ``R`` (or ``R^s``).  On an interval
    the pairs of a uniform grid related by the relation are checked, with an
    absolute ``margin`` absorbing rounding.
    """
    _check_phi(inst.phi)
    phi = inst.phi
    T = inst.map
    worst_pair = None
    worst = -math.inf
    count = 0
    if inst.finite:
        R = symmetric_closure(inst.relation) if symmetrized else inst.relation
        M = inst.space
        for x, y in R.pairs:
            count += 1
            m = M(T(x), T(y)) - phi(M(x, y))
            if m > worst:
                worst, worst_pair = m, (x, y)
        verdict = worst <= 0
    else:
        rel = inst.relation
        grid = inst.space.grid(grid_size)
        for x in grid:
            for y in grid:
                if not (rel.holds(x, y) or (symmetrized and rel.holds(y, x))):
                    continue
                count += 1
                m = abs(T(x) - T(y)) - phi(abs(x - y))
                if m > worst:
                    worst, worst_pair = m, (x, y)
        verdict = worst <= margin
    if count == 0:
        worst = 0.0
        verdict = True
    return ContractionReport(verdict, worst_pair, float(worst), count, symmetrized)


def picard(
    inst: ProblemInstance,
    start: Any,
    budget: int = DEFAULT_BUDGET,
    tol: float = CONTINUOUS_TOL,
) -> SolveResult:
    """Iterate ``x_{n+1} = T(x_n)`` from ``start``.

    Finite mode stops on ``x_{n+1} = x_n`` or on the first revisited point;
    interval mode stops once ``|x_{n+1} - x_n| < tol``.  When the relation is
    T-closed and the start admissible, every consecutive pair of the trace is
    asserted to lie in the relation.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    T = inst.map
    R = inst.relation
    notes: list[str] = []
    admissible = R.holds(start, T(start)) if not inst.finite else (start, T(start)) in R
    if not admissible:
        msg = f"start {start!r} is not admissible: (x0, T x0) is not in the relation"
        notes.append(msg)
        warnings.warn(msg, stacklevel=2)
    guarded = inst.finite and admissible and bool(is_T_closed(R, T))

    trace = [start]
    residuals: list[float] = []
    exit_at = None
    cur = start
    if inst.finite:
        seen = {start}
        for _ in range(budget):
            nxt = T(cur)
            residuals.append(inst.d(cur, nxt))
            trace.append(nxt)
            if exit_at is None and (cur, nxt) not in R:
                exit_at = len(trace) - 2
                if guarded:
                    raise TraceInvariantError(f"pair ({cur}, {nxt}) left a T-closed relation")
            if nxt == cur:
                return SolveResult(Status.FIXED_POINT, cur, trace, residuals, start, exit_at, notes)
            if nxt in seen:
                return SolveResult(Status.CYCLE_DETECTED, None, trace, residuals, start, exit_at, notes)
            seen.add(nxt)
            cur = nxt
        return SolveResult(Status.BUDGET_EXHAUSTED, None, trace, residuals, start, exit_at, notes)

    for _ in range(budget):
        nxt = T(cur)
        r = abs(nxt - cur)
        residuals.append(r)
        trace.append(nxt)
        if exit_at is None and not R.holds(cur, nxt):
            exit_at = len(trace) - 2
        if nxt == cur:
            return SolveResult(Status.FIXED_POINT, nxt, trace, residuals, start, exit_at, notes)
        if r < tol:
            return SolveResult(Status.TOLERANCE_REACHED, nxt, trace, residuals, start, exit_at, notes)
        cur = nxt
    return SolveResult(Status.BUDGET_EXHAUSTED, None, trace, residuals, start, exit_at, notes)


def is_verified_fixed_point(inst: ProblemInstance, p: Any, tol: float = CONTINUOUS_TOL) -> bool:
    """Independent re-check of a reported fixed point."""
    if inst.finite:
        return inst.map(p) == p and inst.d(p, inst.map(p)) == 0
    return abs(inst.map(p) - p) < tol


def _choose_start(inst: ProblemInstance) -> tuple[Any, list[str]]:
    if inst.finite:
        starts = admissible_starts(inst.relation, inst.map)
        if inst.start is not None:
            if inst.start in starts:
                return inst.start, []
            return min(starts), [f"requested start {inst.start} is not admissible; using {min(starts)}"]
        return min(starts), []
    if inst.start is not None and inst.relation.holds(inst.start, inst.map(inst.start)):
        return inst.start, []
    return line_admissible(inst)[0], ["no admissible start given; using the first admissible grid point"]


def solve(inst: ProblemInstance, budget: int = DEFAULT_BUDGET, tol: float = CONTINUOUS_TOL) -> SolveResult:
    """Run the hypothesis gate, then iterate from an admissible start.

    The start is the instance's own when it is admissible, otherwise the least
    admissible point.  A failed hypothesis yields ``HypothesisFailure`` with the
    report attached and no iteration.
    """
    from .certifier import check_hypotheses

    report = check_hypotheses(inst)
    if not report.passed:
        return SolveResult(Status.HYPOTHESIS_FAILURE, report=report)
    start, notes = _choose_start(inst)
    res = picard(inst, start, budget, tol)
    res.warnings = notes + res.warnings
    res.report = report
    if res.fixed_point is not None and not is_verified_fixed_point(inst, res.fixed_point, tol):
        raise AssertionError(f"reported fixed point {res.fixed_point!r} fails the re-check")
    return res


def solve_all_starts(
    inst: ProblemInstance, budget: int = DEFAULT_BUDGET, tol: float = CONTINUOUS_TOL
) -> dict[Any, SolveResult]:
    """Picard from every admissible start (finite) or admissible grid point (interval)."""
    starts = sorted(admissible_starts(inst.relation, inst.map)) if inst.finite else line_admissible(inst)
    return {s: picard(inst, s, budget, tol) for s in starts}


__all__ = [
    "ContractionReport",
    "LineMap",
    "ProblemInstance",
    "SolveResult",
    "Status",
    "TraceInvariantError",
    "admissible_starts",
    "is_verified_fixed_point",
    "line_admissible",
    "picard",
    "solve",
    "solve_all_starts",
    "verify_contraction",
]
