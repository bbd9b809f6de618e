from __future__ import annotations

import itertools

import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import all_maps, all_relations, relation_and_map, relations
from relfix.metric import IndexedSequence, is_R_preserving
from relfix.relations import (
    Carrier,
    FiniteRelation,
    PropertyKind,
    SelfMap,
    Witness,
    check_property,
    comparative,
    inverse,
    is_locally_T_transitive,
    is_locally_transitive,
    is_T_closed,
    is_T_transitive,
    realizing_sequence,
    restrict,
    symmetric_closure,
    walkable_ranges,
)


def rel(n, pairs):
    return FiniteRelation.from_pairs(n, pairs)


def walkable_oracle(R: FiniteRelation, S) -> set[frozenset[int]]:
    """Ranges of infinite walks, via strongly connected components.

    ``E`` is a range exactly when the components of ``R|E`` can be visited in
    one chain (each consecutive pair joined by an edge) ending in a component
    that carries a cycle.
    """
    out = set()
    S = sorted(S)
    for r in range(1, len(S) + 1):
        for E in itertools.combinations(S, r):
            g = nx.DiGraph()
            g.add_nodes_from(E)
            g.add_edges_from((a, b) for a, b in R.pairs if a in E and b in E)
            cond = nx.condensation(g)
            order = list(nx.topological_sort(cond))
            if any(not cond.has_edge(a, b) for a, b in zip(order, order[1:])):
                continue
            sink = cond.nodes[order[-1]]["members"]
            if len(sink) > 1 or any(g.has_edge(v, v) for v in sink):
                out.add(frozenset(E))
    return out


def transitive_oracle(pairs) -> bool:
    s = set(pairs)
    return all((a, c) in s for a, b in s for b2, c in s if b == b2)


class TestCarrierAndWitness:
    def test_labels_default(self):
        assert Carrier.of_size(3).labels == ("p0", "p1", "p2")

    def test_cap(self):
        with pytest.raises(ValueError):
            Carrier.of_size(17)

    def test_duplicate_labels(self):
        with pytest.raises(ValueError):
            Carrier(("a", "a"))

    def test_witness_consistency(self):
        with pytest.raises(ValueError):
            Witness(True, (0,))
        with pytest.raises(ValueError):
            Witness(False)
        assert not Witness.fail((1, 2))
        assert Witness.ok()

    def test_pair_out_of_range(self):
        with pytest.raises(IndexError):
            rel(2, [(0, 2)])


class TestAlgebra:
    def test_inverse_example(self):
        assert inverse(rel(2, [(0, 1)])) == rel(2, [(1, 0)])

    def test_inverse_symmetric(self):
        R = rel(3, [(0, 1), (1, 0), (2, 2)])
        assert inverse(R) == R

    def test_inverse_involution_exhaustive(self):
        for n in (1, 2, 3, 4):
            for R in all_relations(n) if n < 4 else all_relations(4)[::97]:
                assert inverse(inverse(R)) == R

    def test_closure_example(self):
        assert symmetric_closure(rel(2, [(0, 1)])) == rel(2, [(0, 1), (1, 0)])

    def test_closure_minimal_exhaustive(self):
        # least symmetric superset, against every symmetric relation on 3 points
        rels = all_relations(3)
        symmetric = [S for S in rels if inverse(S) == S]
        for R in rels:
            C = symmetric_closure(R)
            supersets = [S for S in symmetric if R.mask & ~S.mask == 0]
            assert C in supersets
            assert all(C.mask & ~S.mask == 0 for S in supersets)

    def test_restrict_examples(self):
        R = rel(3, [(0, 1), (1, 2)])
        assert restrict(R, {0, 1}).pairs == ((0, 1),)
        assert restrict(R, range(3)) == R
        assert restrict(R, set()).is_empty()

    def test_comparative_examples(self):
        R = rel(3, [(0, 1)])
        assert comparative(R, 1, 0)
        assert not comparative(R, 0, 2)

    @given(relations())
    def test_closure_matches_comparative(self, R):
        C = symmetric_closure(R)
        for x, y in itertools.product(range(R.n), repeat=2):
            assert ((x, y) in C) == comparative(R, x, y)


class TestProperties:
    def test_reflexive(self):
        assert check_property(rel(2, [(0, 0), (1, 1)]), PropertyKind.REFLEXIVE)

    def test_transitive_witness(self):
        w = check_property(rel(3, [(0, 1), (1, 2)]), PropertyKind.TRANSITIVE)
        assert not w and w.counterexample == (0, 1, 2)

    def test_partial_order_is_conjunction(self):
        for R in all_relations(3):
            parts = [check_property(R, k).verdict for k in
                     (PropertyKind.REFLEXIVE, PropertyKind.ANTISYMMETRIC, PropertyKind.TRANSITIVE)]
            assert check_property(R, PropertyKind.PARTIAL_ORDER).verdict == all(parts)

    @given(relations())
    def test_transitive_matches_oracle(self, R):
        assert check_property(R, PropertyKind.TRANSITIVE).verdict == transitive_oracle(R.pairs)

    def test_complete_includes_diagonal(self):
        assert not check_property(rel(2, [(0, 1)]), PropertyKind.COMPLETE)
        assert check_property(rel(2, [(0, 1), (0, 0), (1, 1)]), PropertyKind.COMPLETE)


class TestTClosure:
    def test_constant_map(self):
        R = rel(3, [(1, 0), (2, 1), (0, 0)])
        assert is_T_closed(R, SelfMap.from_list(3, (0, 0, 0)))

    @given(relations())
    def test_identity_always_closed(self, R):
        assert is_T_closed(R, SelfMap.identity(R.carrier))

    def test_swap_witness(self):
        w = is_T_closed(rel(2, [(0, 1)]), SelfMap.from_list(2, (1, 0)))
        assert not w and w.counterexample == (0, 1)

    @given(relation_and_map())
    def test_closed_matches_definition(self, rt):
        R, T = rt
        expected = all((T(x), T(y)) in R for x, y in R.pairs)
        assert is_T_closed(R, T).verdict == expected


class TestTTransitive:
    def test_identity_on_chain(self):
        assert not is_T_transitive(rel(3, [(0, 1), (1, 2)]), SelfMap.identity(3))

    @given(relation_and_map(max_n=3))
    def test_transitive_implies_T_transitive(self, rt):
        R, T = rt
        if check_property(R, PropertyKind.TRANSITIVE):
            assert is_T_transitive(R, T)

    @given(relation_and_map())
    def test_matches_definition(self, rt):
        R, T = rt
        n = R.n
        expected = all(
            (T(x), T(z)) in R
            for x, y, z in itertools.product(range(n), repeat=3)
            if (T(x), T(y)) in R and (T(y), T(z)) in R
        )
        assert is_T_transitive(R, T).verdict == expected

    def test_image_restriction_exhaustive(self):
        for n in (2, 3):
            for R in all_relations(n):
                for T in all_maps(n):
                    img_ok = check_property(restrict(R, T.image_set()), PropertyKind.TRANSITIVE).verdict
                    assert is_T_transitive(R, T).verdict == img_ok


class TestWalkableRanges:
    def test_self_loop(self):
        assert walkable_ranges(rel(1, [(0, 0)]), {0}) == {frozenset({0})}

    def test_dead_end(self):
        assert walkable_ranges(rel(2, [(0, 1)]), {0, 1}) == set()

    def test_two_cycle(self):
        assert walkable_ranges(rel(2, [(0, 1), (1, 0)]), {0, 1}) == {frozenset({0, 1})}

    def test_exhaustive_against_scc_oracle(self):
        for n in (1, 2, 3):
            for R in all_relations(n):
                for r in range(n + 1):
                    for S in itertools.combinations(range(n), r):
                        assert walkable_ranges(R, S) == walkable_oracle(R, S), (R, S)

    @settings(max_examples=60)
    @given(relations(max_n=4))
    def test_ranges_replay(self, R):
        for E in walkable_ranges(R, range(R.n)):
            prefix, cycle = realizing_sequence(R, E)
            seq = IndexedSequence(prefix, cycle)
            assert seq.range() == E
            assert is_R_preserving(seq, R)

    def test_not_walkable_rejected(self):
        with pytest.raises(ValueError):
            realizing_sequence(rel(2, [(0, 1)]), {0, 1})


class TestLocalTransitivity:
    def test_two_cycle(self):
        w = is_locally_transitive(rel(2, [(0, 1), (1, 0)]))
        assert not w and w.support == (0, 1)

    def test_vacuous(self):
        assert is_locally_transitive(rel(3, [(0, 1), (1, 2)]))

    def test_constant_map(self):
        for R in all_relations(3):
            T = SelfMap.from_list(3, (1, 1, 1))
            assert is_locally_T_transitive(R, T)

    @given(relation_and_map(max_n=4))
    def test_matches_oracle(self, rt):
        R, T = rt
        ranges = walkable_oracle(R, range(R.n))
        expected = all(transitive_oracle(restrict(R, E).pairs) for E in ranges)
        assert is_locally_transitive(R).verdict == expected
        img_ranges = walkable_oracle(R, T.image_set())
        expected_t = all(transitive_oracle(restrict(R, E).pairs) for E in img_ranges)
        assert is_locally_T_transitive(R, T).verdict == expected_t

    @given(relations(max_n=4))
    def test_witness_triple_replays(self, R):
        w = is_locally_transitive(R)
        if not w:
            x, y, z = w.counterexample
            E = set(w.support)
            assert {x, y, z} <= E
            assert (x, y) in R and (y, z) in R and (x, z) not in R


class TestSelfMap:
    def test_power(self):
        T = SelfMap.from_list(3, (1, 2, 0))
        assert T.power(3) == SelfMap.identity(3)
        assert T.power(0) == SelfMap.identity(3)

    def test_fixed_points(self):
        assert SelfMap.from_list(3, (0, 0, 2)).fixed_points() == (0, 2)

    def test_image_out_of_range(self):
        with pytest.raises(IndexError):
            SelfMap.from_list(2, (0, 2))
