from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from conftest import all_maps, all_relations, relation_and_map, relations
from relfix.certifier import (
    CONDITION_IDS,
    PATH_POLICY,
    Path,
    PreconditionError,
    certify_uniqueness,
    chain_table,
    check_hypotheses,
    find_path,
    is_complete_on,
    is_Rs_connected,
    is_Rs_directed,
)
from relfix.control import Linear, RationalShrink, TablePiecewise
from relfix.instance_io import parse_instance
from relfix.metric import LineRelation, MetricTable, NumericLine
from relfix.relations import FiniteRelation, SelfMap, comparative
from relfix.solver import LineMap, ProblemInstance


def rel(n, pairs):
    return FiniteRelation.from_pairs(n, pairs)


R3 = rel(3, [(1, 0), (2, 1), (0, 0)])


def inst(R, img, phi=Linear(0.5)):
    return ProblemInstance(MetricTable.path(R.carrier), R, SelfMap.from_list(R.n, img), phi)


class TestHypotheses:
    def test_three_point_passes(self):
        rep = check_hypotheses(inst(R3, (0, 0, 0)))
        assert rep.passed and tuple(c.id for c in rep.conditions) == CONDITION_IDS
        assert rep["c"].justification == "R-continuity"
        assert rep["a"].justification == "finite-discrete"

    def test_not_closed(self):
        rep = check_hypotheses(inst(rel(2, [(0, 1)]), (1, 0)))
        assert rep.failed[0] == "b1"
        assert rep["b1"].witness.counterexample == (0, 1)

    def test_empty_relation(self):
        rep = check_hypotheses(inst(FiniteRelation.empty(2), (0, 1)))
        assert "d" in rep.failed and "relation is empty" in rep.diagnostics

    def test_identity_fails_contraction(self):
        rep = check_hypotheses(inst(FiniteRelation.universal(3), (0, 1, 2)))
        assert rep.failed == ("e",)

    def test_unknown_phi_fails_e(self):
        rep = check_hypotheses(inst(R3, (0, 0, 0), TablePiecewise(((0.0, 0.5, 0.0),))))
        assert rep.failed == ("e",) and "unknown" in rep["e"].detail

    def test_broken_metric(self):
        M = MetricTable.from_matrix(3, [[0, 5, 1], [5, 0, 1], [1, 1, 0]])
        rep = check_hypotheses(ProblemInstance(M, R3, SelfMap.from_list(3, (0, 0, 0)), Linear(0.5)))
        assert "space" in rep.failed and "triangle" in rep["space"].detail

    def test_line_mode(self):
        line = ProblemInstance(NumericLine(0, 1), LineRelation("universal"), LineMap("x/(1+x)"), RationalShrink(), 1.0)
        assert check_hypotheses(line).passed
        step = ProblemInstance(NumericLine(0, 1), LineRelation("leq"), LineMap("step"), RationalShrink(), 0.0)
        rep = check_hypotheses(step)
        assert rep["c"].justification == "d-self-closedness"
        assert rep.failed == ("e",)


class TestPaths:
    def test_two_hops(self):
        p = find_path(rel(3, [(1, 0), (2, 1)]), range(3), 2, 0)
        assert p.nodes == (2, 1, 0) and p.length == 2

    def test_loop(self):
        assert find_path(rel(2, [(1, 1)]), [1], 1, 1).nodes == (1, 1)

    def test_back_and_forth(self):
        assert find_path(rel(2, [(0, 1)]), [0], 0, 0).nodes == (0, 1, 0)

    def test_disconnected(self):
        assert find_path(rel(4, [(0, 1), (2, 3)]), range(4), 0, 3) is None

    def test_endpoints_in_S(self):
        with pytest.raises(ValueError):
            find_path(R3, {0}, 0, 2)

    def test_length_floor(self):
        with pytest.raises(ValueError):
            Path((0,))

    @given(relations(max_n=5), st.data())
    def test_paths_replay(self, R, data):
        x = data.draw(st.integers(0, R.n - 1))
        y = data.draw(st.integers(0, R.n - 1))
        p = find_path(R, range(R.n), x, y)
        if p is None:
            return
        assert p.nodes[0] == x and p.nodes[-1] == y and p.length >= 1
        assert all(comparative(R, a, b) for a, b in p.edges())
        # shortest: no path of smaller length
        if p.length > 1 and x != y:
            assert find_path(R, range(R.n), x, y, max_len=p.length - 1) is None


class TestDirectedComplete:
    def test_directed_universal(self):
        assert is_Rs_directed(FiniteRelation.universal(3), range(3))

    def test_directed_common_top(self):
        assert is_Rs_directed(rel(3, [(0, 2), (1, 2)]), {0, 1})

    def test_directed_fails(self):
        w = is_Rs_directed(rel(2, [(0, 0)]), {0, 1})
        assert not w and w.counterexample == (0, 1)

    def test_complete_singleton_loop(self):
        assert is_complete_on(rel(1, [(0, 0)]), {0})

    def test_complete_needs_diagonal(self):
        w = is_complete_on(rel(2, [(0, 1)]), {0, 1})
        assert not w and w.counterexample == (0, 0)

    def test_complete_incomparable(self):
        w = is_complete_on(rel(2, [(0, 0), (1, 1)]), {0, 1})
        assert not w and w.counterexample == (0, 1)

    def test_corollary_implications_exhaustive(self):
        for n in (1, 2, 3):
            for R in all_relations(n):
                for T in all_maps(n):
                    img = T.image_set()
                    conn = bool(is_Rs_connected(R, img))
                    if is_complete_on(R, img):
                        assert conn
                    if is_Rs_directed(R, img):
                        assert conn


class TestCertificate:
    def test_three_point(self):
        cert = certify_uniqueness(inst(R3, (0, 0, 0)))
        assert cert.unique and cert.fixed_points == (0,) and cert.connected
        assert cert.chain_tables == {} and PATH_POLICY in cert.notes

    def test_identity_rejected(self):
        with pytest.raises(PreconditionError) as exc:
            certify_uniqueness(inst(FiniteRelation.universal(3), (0, 1, 2)))
        assert exc.value.report.failed == ("e",)

    def test_two_fixed_points(self, fixtures_dir):
        doc = json.loads((fixtures_dir / "two_fixed_points.json").read_text())
        cert = certify_uniqueness(parse_instance(doc))
        assert not cert.unique and len(cert.fixed_points) == 2
        assert not cert.connected and cert.unreachable is not None
        assert not cert.alarms

    def test_chain_table_collapses(self):
        I = inst(FiniteRelation.universal(3), (0, 0, 1), RationalShrink())
        table, step = chain_table(I, Path((2, 1, 0)), 10)
        assert table == [[1.0, 1.0, 0.0], [1.0, 0.0, 0.0]] and step == 2

    def test_interval_rejected(self):
        line = ProblemInstance(NumericLine(0, 1), LineRelation("universal"), LineMap("x/(1+x)"), RationalShrink())
        with pytest.raises(ValueError):
            certify_uniqueness(line)

    @given(relation_and_map(min_n=2, max_n=4))
    def test_connected_gate_means_unique(self, rt):
        R, T = rt
        I = inst(R, T.image, RationalShrink())
        if not check_hypotheses(I).passed:
            return
        cert = certify_uniqueness(I)
        assert cert.fixed_points == T.fixed_points()
        assert not cert.alarms
        if cert.connected:
            assert cert.unique and cert.max_collapse <= 2 * R.n
