"""Exhaustive sweeps over every relation and self-map on a small carrier.

Instances are enumerated in a fixed order: relation bitmask, then map (as a
base-``n`` tuple in ``itertools.product`` order), then control family.  The
instance id ``(mask, map_index, phi_index)`` orders every finding, so results
do not depend on the number of workers.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

from .certifier import certify_uniqueness, check_hypotheses
from .control import ControlFunction, Linear, OmegaOscillator, RationalShrink, ScaledRational
from .instance_io import instance_document
from .metric import IndexedSequence, MetricTable, is_R_preserving
from .relations import (
    Carrier,
    FiniteRelation,
    PropertyKind,
    SelfMap,
    check_property,
    comparative,
    is_locally_T_transitive,
    is_locally_transitive,
    is_T_closed,
    is_T_transitive,
    restrict,
    symmetric_closure,
)
from .solver import ProblemInstance, Status, TraceInvariantError, admissible_starts, picard, verify_contraction

MAX_N = 4
DEFAULT_MAX_N = 3
LINEAR_MARGIN = 1e-9
DROPPABLE = ("a", "b1", "b2", "c", "d", "e", "u")
EXISTENCE_CONDITIONS = ("space", "a", "b1", "b2", "c", "d", "e")


class SweepCapError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    n: int
    metric: Any = "path"
    phis: tuple[str, ...] = ("linear", "rational")
    drop: str | None = None
    workers: int = 1
    allow_n4: bool = False

    def validate(self) -> None:
        if not 2 <= self.n <= MAX_N:
            raise SweepCapError(f"carrier size must be between 2 and {MAX_N}, got {self.n}")
        if self.n > DEFAULT_MAX_N and not self.allow_n4:
            raise SweepCapError(f"n={self.n} is opt-in; pass allow_n4=True (--full)")
        if self.drop is not None and self.drop not in DROPPABLE:
            raise ValueError(f"unknown hypothesis {self.drop!r}; choose from {DROPPABLE}")
        for name in self.phis:
            _phi_factory(name)

    def metric_table(self) -> MetricTable:
        carrier = Carrier.of_size(self.n)
        if self.metric == "path":
            return MetricTable.path(carrier)
        if self.metric == "uniform":
            return MetricTable.uniform(carrier)
        return MetricTable.from_matrix(carrier, self.metric)

    @property
    def expected_count(self) -> int:
        return 2 ** (self.n * self.n) * self.n ** self.n * len(self.phis)


@dataclass(frozen=True)
class Finding:
    instance_id: tuple[int, int, int]
    claim: str
    detail: str
    instance: dict

    def as_dict(self) -> dict:
        return {"id": list(self.instance_id), "claim": self.claim, "detail": self.detail, "instance": self.instance}


@dataclass
class SweepOutcome:
    spec: SweepSpec
    instances_checked: int = 0
    hypothesis_passing: int = 0
    uniqueness_passing: int = 0
    candidates: int = 0
    violations: list[Finding] = field(default_factory=list)
    separations: list[Finding] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def merge(self, other: SweepOutcome) -> None:
        self.instances_checked += other.instances_checked
        self.hypothesis_passing += other.hypothesis_passing
        self.uniqueness_passing += other.uniqueness_passing
        self.candidates += other.candidates
        self.violations.extend(other.violations)
        self.separations.extend(other.separations)

    def finalize(self) -> SweepOutcome:
        self.violations.sort(key=lambda f: (f.instance_id, f.claim))
        self.separations.sort(key=lambda f: (f.instance_id, f.claim))
        return self

    def as_dict(self) -> dict:
        spec = self.spec
        return {
            "spec": {"n": spec.n, "metric": spec.metric, "phis": list(spec.phis), "drop": spec.drop},
            "instances_checked": self.instances_checked,
            "hypothesis_passing": self.hypothesis_passing,
            "uniqueness_passing": self.uniqueness_passing,
            "candidates": self.candidates,
            "violations": [f.as_dict() for f in self.violations],
            "separations": [f.as_dict() for f in self.separations],
            "notes": list(self.notes),
        }


# --- control functions per instance -------------------------------------------------


def linear_modulus(R: FiniteRelation, T: SelfMap, M: MetricTable) -> float | None:
    """Least linear modulus plus margin, or None when no modulus below 1 exists."""
    worst = 0.0
    for x, y in R.pairs:
        if x != y:
            worst = max(worst, M(T(x), T(y)) / M(x, y))
    alpha = worst + LINEAR_MARGIN
    return None if worst >= 1 or alpha >= 1 else alpha


def _phi_factory(name: str):
    if name == "linear":
        return None
    if name == "rational":
        return RationalShrink()
    if name == "omega":
        return OmegaOscillator()
    if name.startswith("linear:"):
        return Linear(float(name.split(":", 1)[1]))
    if name.startswith("scaled:"):
        return ScaledRational(float(name.split(":", 1)[1]))
    raise ValueError(f"unknown phi family {name!r}")


def _phi_for(name: str, R: FiniteRelation, T: SelfMap, M: MetricTable) -> ControlFunction | None:
    phi = _phi_factory(name)
    if phi is not None:
        return phi
    alpha = linear_modulus(R, T, M)
    return None if alpha is None else Linear(alpha)


def _maps(carrier: Carrier) -> list[SelfMap]:
    n = carrier.size
    return [SelfMap(carrier, img) for img in itertools.product(range(n), repeat=n)]


# --- existence / uniqueness sweep ---------------------------------------------------


def _existence_findings(inst: ProblemInstance, require_replay: bool) -> list[tuple[str, str]]:
    """Run Picard from every admissible start; return (claim, detail) failures."""
    out = []
    R, T = inst.relation, inst.map
    if not T.fixed_points():
        out.append(("no-fixed-point", "F(T) is empty"))
    for s in sorted(admissible_starts(R, T)):
        try:
            res = picard(inst, s, budget=R.n + 1)
        except TraceInvariantError as exc:
            out.append(("trace-invariant", str(exc)))
            continue
        if res.status is not Status.FIXED_POINT:
            out.append(("picard-no-fixed-point", f"start {s}: {res.status.value}, trace {res.trace}"))
            continue
        if res.trace_exit is not None:
            out.append(("trace-left-relation", f"start {s}: pair {res.trace_exit} of trace {res.trace} not in R"))
        elif require_replay and not is_R_preserving(IndexedSequence(tuple(res.trace[:-1]), (res.fixed_point,)), R):
            out.append(("trace-left-relation", f"start {s}: replay of trace {res.trace} fails"))
        if res.residuals[-1] != 0 or T(res.fixed_point) != res.fixed_point:
            out.append(("fixed-point-recheck", f"start {s}: residual {res.residuals[-1]}"))
    return out


@dataclass(frozen=True)
class MapTables:
    """Lookup tables deciding T-closedness and ``X(T, R) != {}`` from a bitmask.

    ``rows[i][r]`` is the mask of image pairs ``(T i, T j)`` for the bits ``j`` set
    in row ``r`` of a relation; ``graph`` holds the pairs ``(x, T x)``.
    """

    n: int
    rows: tuple[tuple[int, ...], ...]
    graph: int

    @classmethod
    def of(cls, T: SelfMap) -> MapTables:
        n = T.n
        def bits(pairs) -> int:
            m = 0
            for a, b in pairs:
                m |= 1 << (a * n + b)
            return m

        rows = tuple(
            tuple(bits((T(i), T(j)) for j in range(n) if r >> j & 1) for r in range(1 << n))
            for i in range(n)
        )
        return cls(n, rows, bits((x, T(x)) for x in range(n)))

    def image(self, mask: int) -> int:
        n, full = self.n, (1 << self.n) - 1
        out = 0
        for i, row in enumerate(self.rows):
            out |= row[(mask >> (i * n)) & full]
        return out

    def closed(self, mask: int) -> bool:
        return self.image(mask) & ~mask == 0

    def has_start(self, mask: int) -> bool:
        return mask & self.graph != 0


def _sweep_chunk(spec: SweepSpec, masks: Sequence[int]) -> SweepOutcome:
    out = SweepOutcome(spec)
    M = spec.metric_table()
    carrier = M.carrier
    maps = _maps(carrier)
    tables = [MapTables.of(T) for T in maps]
    n = spec.n
    per_pair = len(spec.phis)
    check_closed = spec.drop != "b1"
    check_starts = spec.drop != "d"
    for mask in masks:
        R = None
        for ti, tab in enumerate(tables):
            out.instances_checked += per_pair
            # cheap necessary conditions of the gate; the gate re-decides both
            if check_closed and not tab.closed(mask):
                continue
            if check_starts and not tab.has_start(mask):
                continue
            if R is None:
                R = FiniteRelation(carrier, mask)
            T = maps[ti]
            for pi, name in enumerate(spec.phis):
                iid = (mask, ti, pi)
                phi = _phi_for(name, R, T, M)
                if phi is None:
                    if spec.drop != "e":
                        continue
                    phi = Linear(0.5)
                inst = ProblemInstance(M, R, T, phi)
                report = check_hypotheses(inst)
                if spec.drop is None:
                    _check_theorems(out, inst, report, iid, n)
                else:
                    _search_drop(out, inst, report, iid, spec.drop)
    return out


def _check_theorems(out: SweepOutcome, inst: ProblemInstance, report, iid, n: int) -> None:
    if not report.passed:
        return
    out.hypothesis_passing += 1
    for claim, detail in _existence_findings(inst, True):
        out.violations.append(Finding(iid, f"existence:{claim}", detail, instance_document(inst)))
    cert = certify_uniqueness(inst, check=False)
    for (u, v), step in cert.collapse_steps.items():
        if step is None or step > 2 * n:
            out.violations.append(
                Finding(iid, "uniqueness:chain-collapse", f"chain {u}->{v} collapse step {step}", instance_document(inst))
            )
    if cert.connected:
        out.uniqueness_passing += 1
        if not cert.unique:
            out.violations.append(
                Finding(iid, "uniqueness:fixed-points", f"F(T) = {list(cert.fixed_points)}", instance_document(inst))
            )
        for a in cert.alarms:
            out.violations.append(Finding(iid, "uniqueness:alarm", a, instance_document(inst)))


def _search_drop(out: SweepOutcome, inst: ProblemInstance, report, iid, drop: str) -> None:
    if drop == "u":
        if not report.passed:
            return
        cert = certify_uniqueness(inst, check=False)
        if cert.connected:
            return
        out.candidates += 1
        if not cert.unique:
            out.separations.append(
                Finding(
                    iid, "uniqueness:multiple-fixed-points",
                    f"F(T) = {list(cert.fixed_points)}, unreachable pair {cert.unreachable}",
                    instance_document(inst),
                )
            )
        return
    others = [c for c in EXISTENCE_CONDITIONS if c != drop]
    if not all(report[c].verdict for c in others) or report[drop].verdict:
        return
    out.candidates += 1
    for claim, detail in _existence_findings(inst, False):
        out.separations.append(Finding(iid, f"existence:{claim}", detail, instance_document(inst)))


def _mask_chunks(total: int, parts: int) -> list[range]:
    parts = max(1, min(parts, total))
    step = -(-total // parts)
    return [range(i, min(i + step, total)) for i in range(0, total, step)]


def _run(spec: SweepSpec) -> SweepOutcome:
    total = 2 ** (spec.n * spec.n)
    out = SweepOutcome(spec)
    if spec.workers <= 1:
        out.merge(_sweep_chunk(spec, range(total)))
    else:
        chunks = _mask_chunks(total, spec.workers * 4)
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            for part in pool.map(_sweep_chunk, [spec] * len(chunks), chunks):
                out.merge(part)
    return out.finalize()


def sweep_theorem(spec: SweepSpec) -> SweepOutcome:
    """Check existence and uniqueness over every instance of the sweep.

    Whenever the hypothesis gate passes, Picard must reach a fixed point from
    every admissible start along an R-preserving trace.  When ``T(X)`` is also
    ``R^s``-connected there must be exactly one fixed point and every chain
    table must collapse within ``2n`` steps.
    """
    spec.validate()
    if spec.drop is not None:
        raise ValueError("sweep_theorem takes no drop selector; use search_counterexample")
    out = _run(spec)
    if out.instances_checked != spec.expected_count:
        raise AssertionError(f"enumerated {out.instances_checked}, expected {spec.expected_count}")
    return out


def search_counterexample(spec: SweepSpec) -> SweepOutcome:
    """Look for instances where the conclusion fails once one hypothesis is dropped.

    Candidates satisfy every hypothesis except the dropped one, which fails.
    An empty result is a statement about the swept scale only.
    """
    spec.validate()
    if spec.drop is None:
        raise ValueError("search_counterexample needs a drop selector")
    out = _run(spec)
    if not out.separations:
        out.notes.append(
            f"no counterexample among {out.candidates} candidates at n={spec.n}; this is not a proof"
        )
    return out


# --- propositions -------------------------------------------------------------------


def _first(seps: dict, key: str, iid, inst: ProblemInstance) -> None:
    if key not in seps:
        seps[key] = Finding(iid, key, "separating instance", instance_document(inst))


def sweep_propositions(n: int, allow_n4: bool = False) -> SweepOutcome:
    """Check the relation-algebra propositions over every (R, T) on ``n`` points.

    Also records the first instance separating each one-way implication in the
    transitivity hierarchy.
    """
    spec = SweepSpec(n, phis=("linear:0.5",), allow_n4=allow_n4)
    spec.validate()
    out = SweepOutcome(spec)
    M = spec.metric_table()
    carrier = M.carrier
    maps = _maps(carrier)
    phis = (Linear(0.5), RationalShrink())
    seps: dict[str, Finding] = {}
    pts = range(n)

    def bad(iid, claim, detail, inst):
        out.violations.append(Finding(iid, claim, detail, instance_document(inst)))

    for mask in range(2 ** (n * n)):
        R = FiniteRelation(carrier, mask)
        Rs = symmetric_closure(R)
        trans = bool(check_property(R, PropertyKind.TRANSITIVE))
        loc = bool(is_locally_transitive(R))
        for ti, T in enumerate(maps):
            iid = (mask, ti, 0)
            out.instances_checked += 1
            inst = ProblemInstance(M, R, T, phis[0])
            if ti == 0:
                for x, y in itertools.product(pts, repeat=2):
                    if ((x, y) in Rs) != comparative(R, x, y):
                        bad(iid, "closure-comparative", f"pair ({x},{y})", inst)
            closed = bool(is_T_closed(R, T))
            if closed and not is_T_closed(Rs, T):
                bad(iid, "closure-keeps-T-closed", "R T-closed but R^s not", inst)
            if closed:
                for k in range(2 * n + 1):
                    if not is_T_closed(R, T.power(k)):
                        bad(iid, "iterates-keep-T-closed", f"fails for T^{k}", inst)
            image = T.image_set()
            t_trans = bool(is_T_transitive(R, T))
            loc_t = bool(is_locally_T_transitive(R, T))
            R_img = restrict(R, image)
            if t_trans != bool(check_property(R_img, PropertyKind.TRANSITIVE)):
                bad(iid, "T-transitive-iff-image-transitive", f"{t_trans}", inst)
            if loc_t != bool(is_locally_transitive(R_img)):
                bad(iid, "locally-T-transitive-iff-image-locally-transitive", f"{loc_t}", inst)
            if trans and not loc:
                bad(iid, "transitive-implies-locally-transitive", "", inst)
            if loc and not loc_t:
                bad(iid, "locally-transitive-implies-locally-T-transitive", "", inst)
            if trans and not t_trans:
                bad(iid, "transitive-implies-T-transitive", "", inst)
            if t_trans and not loc_t:
                bad(iid, "T-transitive-implies-locally-T-transitive", "", inst)
            if loc and not trans:
                _first(seps, "locally-transitive-not-transitive", iid, inst)
            if loc_t and not loc:
                _first(seps, "locally-T-transitive-not-locally-transitive", iid, inst)
            if t_trans and not trans:
                _first(seps, "T-transitive-not-transitive", iid, inst)
            if loc_t and not t_trans:
                _first(seps, "locally-T-transitive-not-T-transitive", iid, inst)
            for phi in phis:
                pinst = ProblemInstance(M, R, T, phi)
                a = verify_contraction(pinst, symmetrized=False).verdict
                b = verify_contraction(pinst, symmetrized=True).verdict
                if a != b:
                    bad(iid, "symmetrized-contraction", f"{phi!r}: plain={a} symmetrized={b}", pinst)
    out.separations = list(seps.values())
    missing = [k for k in SEPARATION_KINDS if k not in seps]
    if missing:
        out.notes.append(f"no separating instance found for: {', '.join(missing)}")
    return out.finalize()


SEPARATION_KINDS = (
    "locally-transitive-not-transitive",
    "locally-T-transitive-not-locally-transitive",
    "T-transitive-not-transitive",
    "locally-T-transitive-not-T-transitive",
)


__all__ = [
    "DROPPABLE",
    "MAX_N",
    "SEPARATION_KINDS",
    "Finding",
    "MapTables",
    "SweepCapError",
    "SweepOutcome",
    "SweepSpec",
    "linear_modulus",
    "search_counterexample",
    "sweep_propositions",
    "sweep_theorem",
]
