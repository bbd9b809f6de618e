from __future__ import annotations

import warnings

import pytest
from hypothesis import given, settings, strategies as st

from conftest import relation_and_map
from relfix.control import Linear, OmegaOscillator, RationalShrink, ScaledRational, TablePiecewise
from relfix.metric import IndexedSequence, LineRelation, MetricTable, NumericLine, is_R_preserving
from relfix.relations import FiniteRelation, SelfMap, is_T_closed
from relfix.solver import (
    LineMap,
    ProblemInstance,
    Status,
    admissible_starts,
    is_verified_fixed_point,
    picard,
    solve,
    solve_all_starts,
    verify_contraction,
)

R3 = FiniteRelation.from_pairs(3, [(1, 0), (2, 1), (0, 0)])
P3 = MetricTable.path(3)


def inst3(img, R=R3, phi=Linear(0.5), start=None):
    return ProblemInstance(P3, R, SelfMap.from_list(3, img), phi, start)


def boyd_wong(start=1.0):
    return ProblemInstance(NumericLine(0.0, 1.0), LineRelation("universal"), LineMap("x/(1+x)"), RationalShrink(), start)


class TestAdmissibleStarts:
    def test_all_three(self):
        assert admissible_starts(R3, SelfMap.from_list(3, (0, 0, 1))) == {0, 1, 2}

    def test_empty(self):
        assert admissible_starts(FiniteRelation.empty(3), SelfMap.identity(3)) == frozenset()

    @given(st.integers(1, 5))
    def test_universal(self, n):
        T = SelfMap.from_list(n, [0] * n)
        assert admissible_starts(FiniteRelation.universal(n), T) == frozenset(range(n))


class TestContraction:
    def test_constant_map(self):
        rep = verify_contraction(inst3((0, 0, 0)))
        assert rep.verdict and rep.worst_margin <= 0

    def test_single_bad_pair(self):
        rep = verify_contraction(inst3((0, 0, 1)))
        assert not rep.verdict and rep.worst_pair == (2, 1)
        assert rep.worst_margin == pytest.approx(0.5)

    def test_continuous(self):
        rep = verify_contraction(boyd_wong())
        assert rep.verdict and rep.checked_pairs == 201 * 201

    def test_refuted_omega_rejected(self):
        with pytest.raises(ValueError):
            verify_contraction(inst3((0, 0, 0), phi=TablePiecewise(((0.0, 1.0, 0.0),))))

    @settings(max_examples=200)
    @given(relation_and_map(max_n=4), st.sampled_from([Linear(0.5), RationalShrink(), ScaledRational(0.7)]))
    def test_symmetrized_agrees(self, rt, phi):
        R, T = rt
        inst = ProblemInstance(MetricTable.path(R.carrier), R, T, phi)
        assert verify_contraction(inst).verdict == verify_contraction(inst, symmetrized=True).verdict


class TestPicard:
    def test_constant_map(self):
        inst = inst3((0, 0, 0), R=FiniteRelation.universal(3))
        res = picard(inst, 2)
        assert res.trace == [2, 0, 0] and res.status is Status.FIXED_POINT and res.fixed_point == 0

    @given(st.integers(0, 2))
    def test_identity(self, x):
        res = picard(inst3((0, 1, 2), R=FiniteRelation.universal(3)), x)
        assert res.status is Status.FIXED_POINT and res.fixed_point == x and res.trace == [x, x]

    def test_cycle(self):
        res = picard(inst3((1, 2, 0), R=FiniteRelation.universal(3)), 0)
        assert res.status is Status.CYCLE_DETECTED and len(res.trace) <= 3 + 1

    def test_inadmissible_start_warns(self):
        with pytest.warns(UserWarning):
            res = picard(inst3((0, 0, 0)), 2)
        assert res.warnings and res.status is Status.FIXED_POINT

    def test_exit_recorded_when_not_closed(self):
        R = FiniteRelation.from_pairs(3, [(0, 1)])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = picard(inst3((1, 2, 2), R=R), 0)
        assert res.trace_exit == 1

    def test_continuous_closed_form(self):
        res = picard(boyd_wong(), 1.0, budget=1000, tol=0.0)
        assert res.status is Status.BUDGET_EXHAUSTED
        assert max(abs(x - 1 / (n + 1)) for n, x in enumerate(res.trace)) < 1e-12

    def test_continuous_tolerance(self):
        res = picard(boyd_wong(), 1.0, budget=10_000, tol=1e-4)
        assert res.status is Status.TOLERANCE_REACHED
        # residual 1/((n+1)(n+2)) first drops below 1e-4 at n = 99
        assert res.steps == 100

    def test_continuous_residuals_follow_phi(self):
        res = picard(boyd_wong(), 1.0, budget=500, tol=0.0)
        r = res.residuals
        assert all(b <= a for a, b in zip(r, r[1:]))
        assert all(b <= RationalShrink()(a) for a, b in zip(r, r[1:]))

    def test_budget_floor(self):
        with pytest.raises(ValueError):
            picard(boyd_wong(), 1.0, budget=0)


class TestSolve:
    def test_three_point(self):
        res = solve(inst3((0, 0, 0)))
        assert res.status is Status.FIXED_POINT and res.fixed_point == 0
        assert res.start == 0 and res.report.passed

    def test_own_start_used(self):
        res = solve(inst3((0, 0, 0), start=1))
        assert res.trace == [1, 0, 0]

    def test_not_closed(self):
        R = FiniteRelation.from_pairs(2, [(0, 1)])
        inst = ProblemInstance(MetricTable.path(2), R, SelfMap.from_list(2, (1, 0)), Linear(0.5))
        res = solve(inst)
        assert res.status is Status.HYPOTHESIS_FAILURE and "b1" in res.report.failed

    def test_boyd_wong(self):
        res = solve(boyd_wong(), tol=1e-4)
        assert res.status is Status.TOLERANCE_REACHED and res.fixed_point < 0.011
        assert is_verified_fixed_point(boyd_wong(), res.fixed_point, tol=1e-4)

    def test_all_starts(self):
        runs = solve_all_starts(inst3((0, 0, 0)))
        assert sorted(runs) == [0, 1]
        assert {r.fixed_point for r in runs.values()} == {0}

    def test_oscillator_instance(self):
        res = solve(inst3((0, 0, 0), phi=OmegaOscillator()))
        assert res.status is Status.FIXED_POINT

    def test_shared_carrier(self):
        with pytest.raises(ValueError):
            ProblemInstance(MetricTable.path(2), R3, SelfMap.from_list(3, (0, 0, 0)), Linear(0.5))


class TestInvariants:
    @settings(max_examples=300)
    @given(relation_and_map(min_n=2, max_n=4), st.sampled_from([Linear(0.5), RationalShrink()]))
    def test_trace_preserved_and_fixed_point_rechecked(self, rt, phi):
        R, T = rt
        inst = ProblemInstance(MetricTable.path(R.carrier), R, T, phi)
        res = solve(inst)
        if res.status is Status.HYPOTHESIS_FAILURE:
            return
        assert res.status is Status.FIXED_POINT
        assert res.residuals[-1] == 0
        assert T(res.fixed_point) == res.fixed_point
        assert is_T_closed(R, T)
        assert is_R_preserving(IndexedSequence(tuple(res.trace[:-1]), (res.fixed_point,)), R)
