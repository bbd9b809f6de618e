"""Hypothesis reports for the existence theorem and uniqueness certificates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable

from .control import Membership, analytic_verdict, verify_membership
from .metric import is_d_self_closed, is_R_complete, is_R_continuous_at, validate_metric
from .relations import (
    FiniteRelation,
    Witness,
    comparative,
    is_locally_T_transitive,
    is_T_closed,
    locally_transitive_on,
)
from .solver import ProblemInstance, admissible_starts, line_admissible, verify_contraction

CONDITION_IDS = ("space", "a", "b1", "b2", "c", "d", "e")
PATH_POLICY = "intermediate path nodes may lie anywhere in X; endpoints in T(X)"


class PreconditionError(ValueError):
    """Raised when a certificate is requested for an instance failing the hypotheses."""

    def __init__(self, message: str, report: HypothesisReport | None = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class ConditionResult:
    id: str
    verdict: bool
    justification: str = ""
    witness: Any = None
    detail: str = ""


@dataclass(frozen=True)
class HypothesisReport:
    conditions: tuple[ConditionResult, ...]
    diagnostics: tuple[str, ...] = ()

    def __getitem__(self, cid: str) -> ConditionResult:
        for c in self.conditions:
            if c.id == cid:
                return c
        raise KeyError(cid)

    @property
    def passed(self) -> bool:
        return all(c.verdict for c in self.conditions)

    @property
    def failed(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.conditions if not c.verdict)


def _phi_in_omega(inst: ProblemInstance) -> tuple[bool, str]:
    analytic = analytic_verdict(inst.phi)
    if analytic is not None:
        return analytic[1] is Membership.VERIFIED, "analytic"
    v = verify_membership(inst.phi)
    return v.in_omega is Membership.VERIFIED, f"sampled: {v.in_omega.value}"


def _finite_conditions(inst: ProblemInstance) -> list[ConditionResult]:
    R, T, M = inst.relation, inst.map, inst.space
    out = []
    mw = validate_metric(M)
    out.append(ConditionResult("space", mw.verdict, "metric axioms", mw if not mw else None, mw.reason))
    aw = is_R_complete(R, M)
    out.append(ConditionResult("a", aw.verdict, aw.reason))
    w = is_T_closed(R, T)
    out.append(ConditionResult("b1", w.verdict, "T-closed", None if w else w))
    w = is_locally_T_transitive(R, T)
    out.append(ConditionResult("b2", w.verdict, "locally T-transitive", None if w else w))
    cont = all(is_R_continuous_at(T, R, M, x) for x in range(M.n))
    closed = bool(is_d_self_closed(R, M))
    which = "R-continuity" if cont else ("d-self-closedness" if closed else "")
    out.append(
        ConditionResult(
            "c", cont or closed, which,
            detail=f"R-continuous={cont} (finite-discrete); d-self-closed={closed} (finite-discrete)",
        )
    )
    starts = admissible_starts(R, T)
    out.append(
        ConditionResult("d", bool(starts), "X(T,R) nonempty", None, f"admissible starts: {sorted(starts)}")
    )
    out.append(_condition_e(inst))
    return out


def _condition_e(inst: ProblemInstance) -> ConditionResult:
    ok, how = _phi_in_omega(inst)
    if not ok:
        return ConditionResult("e", False, "phi not verified in OMEGA", None, how)
    rep = verify_contraction(inst)
    return ConditionResult(
        "e", rep.verdict, "d(Tx,Ty) <= phi(d(x,y)) on R", rep,
        f"checked {rep.checked_pairs} pairs, worst margin {rep.worst_margin:.3g} at {rep.worst_pair}",
    )


def _line_conditions(inst: ProblemInstance) -> list[ConditionResult]:
    rel, T, line = inst.relation, inst.map, inst.space
    grid = line.grid(101)
    out = [ConditionResult("space", True, "closed interval with |x - y|")]
    out.append(ConditionResult("a", True, "closed interval is complete"))

    bad = None
    if rel.kind == "pairs":
        pts = {p for pair in rel.pairs for p in pair}
        for a, b in rel.pairs:
            if not rel.holds(T(a), T(b)):
                bad = (a, b)
                break
        if bad is None and any(T(p) not in line for p in pts):
            bad = next((p, p) for p in pts if T(p) not in line)
    elif rel.kind != "universal":
        for x in grid:
            for y in grid:
                if rel.holds(x, y) and not rel.holds(T(x), T(y)):
                    bad = (x, y)
                    break
            if bad:
                break
    out.append(ConditionResult("b1", bad is None, "T-closed (sampled on grid)" if rel.kind in ("leq", "geq") else "T-closed", bad))

    if rel.is_transitive():
        out.append(ConditionResult("b2", True, "transitive relation kind"))
    else:
        # conservative: local transitivity of the finite pair set implies local T-transitivity
        pts = sorted({p for pair in rel.pairs for p in pair})
        fr = FiniteRelation.from_pairs(len(pts), [(pts.index(a), pts.index(b)) for a, b in rel.pairs])
        w = locally_transitive_on(fr, fr.points)
        out.append(ConditionResult("b2", w.verdict, "locally transitive on the pair set (conservative)", None if w else w))

    if T.is_continuous:
        out.append(ConditionResult("c", True, "R-continuity", detail="continuous formula"))
    else:
        out.append(
            ConditionResult(
                "c", True, "d-self-closedness",
                detail=f"{rel.kind}: R-preserving convergent sequences are comparable with their limit",
            )
        )
    starts = line_admissible(inst)
    out.append(ConditionResult("d", bool(starts), "X(T,R) nonempty (grid + start)", None, f"{len(starts)} admissible"))
    out.append(_condition_e(inst))
    return out


def check_hypotheses(inst: ProblemInstance) -> HypothesisReport:
    """Evaluate conditions (a)-(e) of the existence theorem, plus metric sanity.

    Condition (c) passes when either disjunct does; the entry's justification
    names the disjunct that carried it.
    """
    if inst.finite:
        conds = _finite_conditions(inst)
        diags = ("relation is empty",) if inst.relation.is_empty() else ()
    else:
        conds = _line_conditions(inst)
        diags = ()
    return HypothesisReport(tuple(conds), diags)


# --- paths, connectivity, directedness ---------------------------------------------


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.nodes) < 2:
            raise ValueError("a path has length at least 1")

    @property
    def length(self) -> int:
        return len(self.nodes) - 1

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.nodes, self.nodes[1:]))


def _sym_neighbors(R: FiniteRelation, v: int) -> list[int]:
    return [u for u in range(R.n) if (v, u) in R or (u, v) in R]


def find_path(
    R: FiniteRelation, S: Iterable[int], x: int, y: int, max_len: int | None = None
) -> Path | None:
    """Shortest path from ``x`` to ``y`` in ``R^s``, lexicographically least among ties.

    Paths have length at least 1, so ``x == y`` needs a loop ``[x, x]`` or a
    back-and-forth ``[x, z, x]``.
    """
    S = frozenset(S)
    R.carrier.check_index(x)
    R.carrier.check_index(y)
    if x not in S or y not in S:
        raise ValueError("path endpoints must lie in S")
    max_len = R.n if max_len is None else max_len
    if x == y:
        if (x, x) in R:
            return Path((x, x)) if max_len >= 1 else None
        nb = _sym_neighbors(R, x)
        return Path((x, nb[0], x)) if nb and max_len >= 2 else None
    dist = {y: 0}
    queue = deque([y])
    while queue:
        v = queue.popleft()
        for u in _sym_neighbors(R, v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    if x not in dist or dist[x] > max_len:
        return None
    nodes = [x]
    cur = x
    while cur != y:
        cur = min(u for u in _sym_neighbors(R, cur) if dist.get(u) == dist[cur] - 1)
        nodes.append(cur)
    return Path(tuple(nodes))


def is_Rs_connected(R: FiniteRelation, S: Iterable[int]) -> Witness:
    """Every pair of ``S`` (diagonal included) joined by a path in ``R^s``."""
    pts = sorted(set(S))
    for i, u in enumerate(pts):
        for v in pts[i:]:
            if find_path(R, pts, u, v) is None:
                return Witness.fail((u, v), "R^s-connected")
    return Witness.ok()


def is_Rs_directed(R: FiniteRelation, S: Iterable[int]) -> Witness:
    pts = sorted(set(S))
    for p in pts:
        R.carrier.check_index(p)
    for i, u in enumerate(pts):
        for v in pts[i:]:
            if not any(comparative(R, u, z) and comparative(R, v, z) for z in range(R.n)):
                return Witness.fail((u, v), "R^s-directed")
    return Witness.ok()


def is_complete_on(R: FiniteRelation, S: Iterable[int]) -> Witness:
    """``R`` restricted to ``S`` is complete (every ``u, v`` comparable, ``u == v`` included)."""
    pts = sorted(set(S))
    for p in pts:
        R.carrier.check_index(p)
    for i, u in enumerate(pts):
        for v in pts[i:]:
            if not comparative(R, u, v):
                return Witness.fail((u, v), "complete")
    for i, u in enumerate(pts):
        for v in pts[i:]:
            p = find_path(R, pts, u, v, max_len=1)
            if p is None or p.length != 1:
                raise AssertionError(f"complete on S but no length-1 path {u} -> {v}")
    return Witness.ok()


# --- uniqueness ----------------------------------------------------------------------


@dataclass
class UniquenessCertificate:
    fixed_points: tuple[int, ...]
    image: tuple[int, ...]
    connected: bool
    unreachable: tuple[int, int] | None
    paths: dict[tuple[int, int], Path] = field(default_factory=dict)
    chain_tables: dict[tuple[int, int], list[list[float]]] = field(default_factory=dict)
    collapse_steps: dict[tuple[int, int], int | None] = field(default_factory=dict)
    alarms: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def unique(self) -> bool:
        return len(self.fixed_points) == 1

    @property
    def max_collapse(self) -> int:
        return max((s for s in self.collapse_steps.values() if s is not None), default=0)


def chain_table(inst: ProblemInstance, path: Path, limit: int) -> tuple[list[list[float]], int | None]:
    """Rows ``t_n^i = d(T^n z_i, T^n z_{i+1})`` for ``n = 0, 1, ...`` until all vanish.

    Returns the table (one list per edge) and the first ``n`` with every entry
    zero, or ``None`` if that did not happen within ``limit`` steps.
    """
    T, M = inst.map, inst.space
    zs = list(path.nodes)
    table: list[list[float]] = [[] for _ in range(path.length)]
    for n in range(limit + 1):
        row = [M(zs[i], zs[i + 1]) for i in range(path.length)]
        for i, t in enumerate(row):
            table[i].append(t)
        if all(t == 0 for t in row):
            return table, n
        zs = [T(z) for z in zs]
    return table, None


def certify_uniqueness(inst: ProblemInstance, check: bool = True) -> UniquenessCertificate:
    """Uniqueness evidence for a finite instance.

    Scans every point for ``F(T)``, searches ``R^s`` paths between every pair of
    image points, and iterates each path's chain table until it collapses.  A
    chain that never collapses is raised as an alarm.
    """
    if not inst.finite:
        raise ValueError("uniqueness certificates need a finite space")
    if check:
        report = check_hypotheses(inst)
        if not report.passed:
            raise PreconditionError(f"hypotheses fail: {', '.join(report.failed)}", report)
    R, T = inst.relation, inst.map
    n = R.n
    image = tuple(sorted(T.image_set()))
    fixed = T.fixed_points()
    cert = UniquenessCertificate(fixed, image, True, None, notes=[PATH_POLICY])
    limit = max(2 * n, n * n)
    lab = inst.space.carrier.labels
    for i, u in enumerate(image):
        for v in image[i:]:
            p = find_path(R, image, u, v)
            if p is None:
                if cert.unreachable is None:
                    cert.unreachable = (u, v)
                cert.connected = False
                if u == v:
                    cert.notes.append(f"point {lab[u]} has no comparable neighbour: no path of length >= 1 to itself")
                continue
            cert.paths[(u, v)] = p
            if any(z not in image for z in p.nodes):
                cert.notes.append(f"path {lab[u]} -> {lab[v]} passes outside T(X): {[lab[z] for z in p.nodes]}")
            if u == v:
                continue
            table, step = chain_table(inst, p, limit)
            cert.chain_tables[(u, v)] = table
            cert.collapse_steps[(u, v)] = step
            if step is None:
                cert.alarms.append(f"chain {lab[u]} -> {lab[v]} did not collapse within {limit} steps")
    if cert.connected and len(fixed) > 1:
        cert.alarms.append(f"T(X) is R^s-connected but F(T) = {[lab[p] for p in fixed]}")
    return cert


__all__ = [
    "CONDITION_IDS",
    "PATH_POLICY",
    "ConditionResult",
    "HypothesisReport",
    "Path",
    "PreconditionError",
    "UniquenessCertificate",
    "certify_uniqueness",
    "chain_table",
    "check_hypotheses",
    "find_path",
    "is_Rs_connected",
    "is_Rs_directed",
    "is_complete_on",
]
