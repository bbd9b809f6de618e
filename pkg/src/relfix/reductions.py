"""Classical fixed point theorems as independent oracles, and their agreement sweeps.

Each oracle evaluates its own hypotheses directly from raw pair sets and
distance tables, without going through the relation or certifier modules,
so that agreement with the relational pipeline is a real cross-check.  The
control function handed to an oracle must already be known to be admissible
for that theorem (decreasing below the identity and right upper semicontinuous
for the nonlinear ones); the oracles only test the contraction inequality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .certifier import certify_uniqueness, check_hypotheses
from .control import ControlFunction, Linear, RationalShrink
from .metric import MetricTable
from .relations import Carrier, FiniteRelation, SelfMap
from .solver import ProblemInstance, Status, admissible_starts, picard, solve

Pairs = frozenset  # of (int, int)


@dataclass(frozen=True)
class OracleVerdict:
    """What a classical theorem promises for one instance."""

    hypotheses: bool
    failed: tuple[str, ...]
    existence: bool
    uniqueness: bool


def _verdict(checks: dict[str, bool], unique_if: bool) -> OracleVerdict:
    failed = tuple(k for k, ok in checks.items() if not ok)
    hyp = not failed
    return OracleVerdict(hyp, failed, hyp, hyp and unique_if)


def _contracts(pairs, d, T, phi: Callable[[float], float]) -> bool:
    return all(d[T[x]][T[y]] <= phi(d[x][y]) for x, y in pairs)


def boyd_wong_oracle(d, T, phi) -> OracleVerdict:
    """Unconstrained nonlinear contraction on a complete space: every pair contracts."""
    n = len(T)
    return _verdict({"contraction": _contracts(itertools.product(range(n), repeat=2), d, T, phi)}, True)


def ordered_oracle(order: Pairs, d, T, phi) -> OracleVerdict:
    """Order version: increasing map, a point below its image, contraction on ``x <= y``.

    Uniqueness is promised when every two points have a common upper bound.
    """
    n = len(T)
    pts = range(n)
    checks = {
        "increasing": all((T[x], T[y]) in order for x, y in order),
        "start": any((x, T[x]) in order for x in pts),
        "contraction": _contracts(order, d, T, phi),
    }
    bounded = all(any((x, z) in order and (y, z) in order for z in pts) for x in pts for y in pts)
    return _verdict(checks, bounded)


def transitive_set_oracle(M: Pairs, d, T, phi) -> OracleVerdict:
    """Set version: ``M`` is T-closed and transitive, a point relates to its image, contraction on ``M``."""
    n = len(T)
    checks = {
        "T-closed": all((T[x], T[y]) in M for x, y in M),
        "transitive": all((x, z) in M for x, y in M for y2, z in M if y == y2),
        "start": any((x, T[x]) in M for x in range(n)),
        "contraction": _contracts(M, d, T, phi),
    }
    return _verdict(checks, False)


def _connected(R: Pairs, n: int) -> bool:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    touched = set()
    for x, y in R:
        touched.update((x, y))
        parent[find(x)] = find(y)
    if n == 1:
        return bool(touched)
    return len({find(i) for i in range(n)}) == 1


def linear_relational_oracle(R: Pairs, d, T, alpha: float) -> OracleVerdict:
    """Relational contraction principle with a linear modulus.

    On a finite space completeness and the closedness condition hold outright,
    so the remaining checks are T-closedness, an admissible start and the
    linear inequality.  Uniqueness is promised when the whole space is
    connected under the symmetric closure.
    """
    n = len(T)
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    checks = {
        "T-closed": all((T[x], T[y]) in R for x, y in R),
        "start": any((x, T[x]) in R for x in range(n)),
        "contraction": _contracts(R, d, T, lambda t: alpha * t),
    }
    return _verdict(checks, _connected(R, n))


# --- agreement sweeps ----------------------------------------------------------------


@dataclass
class ReductionOutcome:
    name: str
    instances: int = 0
    oracle_passing: int = 0
    pipeline_passing: int = 0
    disagreements: list[tuple[tuple[int, ...], str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return not self.disagreements


def _linear_for(pairs, d, T) -> Linear | None:
    worst = max((d[T[x]][T[y]] / d[x][y] for x, y in pairs if x != y), default=0.0)
    alpha = worst + 1e-9
    return Linear(alpha) if alpha < 1 else None


def _fixed_points(T) -> tuple[int, ...]:
    return tuple(x for x in range(len(T)) if T[x] == x)


def _pipeline(inst: ProblemInstance):
    report = check_hypotheses(inst)
    if not report.passed:
        return report, None, None
    return report, solve(inst), certify_uniqueness(inst, check=False)


def _phis(pairs, d, T) -> list[ControlFunction]:
    out: list[ControlFunction] = [RationalShrink()]
    lin = _linear_for(pairs, d, T)
    if lin is not None:
        out.insert(0, lin)
    return out


def universal_reduction(n: int) -> ReductionOutcome:
    """Universal relation: pipeline verdicts equal the three classical oracles exactly."""
    out = ReductionOutcome("universal")
    carrier = Carrier.of_size(n)
    M = MetricTable.path(carrier)
    d = M.dist
    R = FiniteRelation.universal(carrier)
    full = frozenset(itertools.product(range(n), repeat=2))
    for ti, img in enumerate(itertools.product(range(n), repeat=n)):
        T = SelfMap(carrier, img)
        for pi, phi in enumerate(_phis(full, d, img)):
            out.instances += 1
            iid = (ti, pi)
            oracles = {
                "boyd-wong": boyd_wong_oracle(d, img, phi),
                "ordered": ordered_oracle(full, d, img, phi),
                "transitive-set": transitive_set_oracle(full, d, img, phi),
            }
            report, res, cert = _pipeline(ProblemInstance(M, R, T, phi))
            out.oracle_passing += oracles["boyd-wong"].hypotheses
            out.pipeline_passing += report.passed
            for name, v in oracles.items():
                if v.hypotheses != report.passed:
                    out.disagreements.append((iid, f"{name}: oracle {v.hypotheses}, pipeline {report.passed}"))
            if report.passed:
                truth = _fixed_points(img)
                if res.status is not Status.FIXED_POINT or (res.fixed_point,) != truth:
                    out.disagreements.append((iid, f"solve gave {res.status.value} {res.fixed_point}, F(T)={truth}"))
                if oracles["boyd-wong"].uniqueness != (cert.connected and cert.unique):
                    out.disagreements.append((iid, f"uniqueness: certificate {cert.unique}"))
    return out


def _is_partial_order(rel: Pairs, n: int) -> bool:
    if any((x, x) not in rel for x in range(n)):
        return False
    if any((y, x) in rel for x, y in rel if x != y):
        return False
    return all((x, z) in rel for x, y in rel for y2, z in rel if y == y2)


def _is_transitive(rel: Pairs) -> bool:
    return all((x, z) in rel for x, y in rel for y2, z in rel if y == y2)


def relation_reductions(n: int) -> dict[str, ReductionOutcome]:
    """Order, transitive-set and linear-modulus oracles over every relation and map.

    The relational hypotheses are weaker than each classical set, so the check
    is one-directional for the first two: oracle pass implies pipeline pass,
    and promised uniqueness implies a unique certified fixed point.  The linear
    oracle is compared on what it concludes: whenever it passes, Picard from
    every admissible start must end at a fixed point, and the fixed point must
    be unique when it promises so.
    """
    carrier = Carrier.of_size(n)
    M = MetricTable.path(carrier)
    d = M.dist
    order_out = ReductionOutcome("ordered")
    trans_out = ReductionOutcome("transitive-set")
    lin_out = ReductionOutcome("linear-relational")
    maps = list(itertools.product(range(n), repeat=n))
    gate_only_b2 = 0
    for mask in range(2 ** (n * n)):
        R = FiniteRelation(carrier, mask)
        pairs = frozenset(R.pairs)
        po = _is_partial_order(pairs, n)
        tr = _is_transitive(pairs)
        for ti, img in enumerate(maps):
            T = SelfMap(carrier, img)
            iid = (mask, ti)
            lin = _linear_for(pairs, d, img)
            if lin is not None:
                lin_out.instances += 1
                v = linear_relational_oracle(pairs, d, img, lin.alpha)
                inst = ProblemInstance(M, R, T, lin)
                report = check_hypotheses(inst)
                lin_out.oracle_passing += v.hypotheses
                lin_out.pipeline_passing += report.passed
                if report.passed and not v.hypotheses:
                    lin_out.disagreements.append((iid, f"pipeline passes but oracle fails {v.failed}"))
                if v.hypotheses and not report.passed:
                    if report.failed == ("b2",):
                        gate_only_b2 += 1
                    else:
                        lin_out.disagreements.append((iid, f"oracle passes, pipeline fails {report.failed}"))
                if v.hypotheses:
                    for s in sorted(admissible_starts(R, T)):
                        res = picard(inst, s, budget=n + 1)
                        if res.status is not Status.FIXED_POINT:
                            lin_out.disagreements.append((iid, f"start {s}: {res.status.value}"))
                    if v.uniqueness:
                        cert = certify_uniqueness(inst, check=False)
                        if not (cert.connected and cert.unique):
                            lin_out.disagreements.append((iid, f"promised unique, certificate F(T)={cert.fixed_points}"))
            if not (po or tr):
                continue
            for pi, phi in enumerate(_phis(pairs, d, img)):
                iid3 = (mask, ti, pi)
                report, res, cert = _pipeline(ProblemInstance(M, R, T, phi))
                checks = []
                if po:
                    checks.append((order_out, ordered_oracle(pairs, d, img, phi)))
                if tr:
                    checks.append((trans_out, transitive_set_oracle(pairs, d, img, phi)))
                for out, v in checks:
                    out.instances += 1
                    out.oracle_passing += v.hypotheses
                    out.pipeline_passing += report.passed
                    if v.hypotheses and not report.passed:
                        out.disagreements.append((iid3, f"oracle passes, pipeline fails {report.failed}"))
                    if v.hypotheses and (res is None or res.status is not Status.FIXED_POINT):
                        out.disagreements.append((iid3, "oracle promises a fixed point, solve found none"))
                    if v.uniqueness and not (cert is not None and cert.connected and cert.unique):
                        out.disagreements.append((iid3, "oracle promises uniqueness, certificate disagrees"))
    lin_out.notes.append(
        f"{gate_only_b2} instances pass the linear oracle but fail only local T-transitivity in the gate; "
        "Picard still reaches a fixed point on each"
    )
    return {o.name: o for o in (order_out, trans_out, lin_out)}


def all_reductions(n: int) -> dict[str, ReductionOutcome]:
    out = {"universal": universal_reduction(n)}
    out.update(relation_reductions(n))
    return out


__all__ = [
    "OracleVerdict",
    "ReductionOutcome",
    "all_reductions",
    "boyd_wong_oracle",
    "linear_relational_oracle",
    "ordered_oracle",
    "relation_reductions",
    "transitive_set_oracle",
    "universal_reduction",
]
