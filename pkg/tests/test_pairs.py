import itertools

import pytest

from freesplit.errors import InvalidInput
from freesplit.factors import ffs_from_generators
from freesplit.graphs import (Graph, MarkedGraph, graph_map,
                              identity_graph_map, marked_rose)
from freesplit.pairs import (adjacent, elliptic_system, equivalent_one_edge,
                             faces, fs_distance_upper, one_edge_splitting,
                             pair_relation_check, remark_pair,
                             remark_splitting, sibling_splittings,
                             splitting_of_pair, validate_pair)
from freesplit.words import FWD


def dumbbell_marked():
    """Two loops joined by an arc, marked from the rank-2 rose."""
    g = Graph(["u", "v"],
              [("p", "u", "u"), ("q", "v", "v"), ("t", "u", "v")])
    p, q, t = (g.fwd_char(n) for n in ("p", "q", "t"))
    from freesplit.words import invert

    marking = [p, t + q + invert(t)]
    return MarkedGraph(g, "u", marking)


class TestValidatePair:
    def test_rose_coordinate(self):
        mg = marked_rose(3)
        pair = validate_pair(mg, ["x1"])
        assert pair.co_edge == 2

    def test_contractible_component_rejected(self):
        mg = dumbbell_marked()
        with pytest.raises(InvalidInput):
            validate_pair(mg, ["t"])

    def test_bdd_decomposition_pairs(self, bdd_spec):
        for key in ("K1", "J2", "J3"):
            pair = validate_pair(bdd_spec.mg, bdd_spec.decomposition[key])
            assert pair.co_edge >= 1

    def test_empty_subgraph_allowed(self):
        mg = marked_rose(2)
        pair = validate_pair(mg, [])
        assert pair.co_edge == 2

    def test_non_natural_rejected(self):
        mg = dumbbell_marked()
        # the arc and one loop form a natural subgraph; half a chain cannot
        g2 = Graph(["u", "w", "v"],
                   [("p", "u", "u"), ("q", "v", "v"),
                    ("t1", "u", "w"), ("t2", "w", "v")])
        from freesplit.words import invert

        t1, t2, p, q = (g2.fwd_char(n) for n in ("t1", "t2", "p", "q"))
        mg2 = MarkedGraph(g2, "u", [p, t1 + t2 + q + invert(t2) + invert(t1)])
        with pytest.raises(InvalidInput):
            validate_pair(mg2, ["t1", "p"])


class TestFaces:
    def test_two_faces_of_coedge_two(self):
        mg = marked_rose(3)
        pair = validate_pair(mg, ["x1"])
        got = faces(pair)
        assert len(got) == 2
        assert {frozenset(mg.graph.edge_names[s] for s in f.h_slots)
                for f in got} == {frozenset({"x1", "x2"}),
                                  frozenset({"x1", "x3"})}

    def test_coedge_one_rejected(self):
        mg = marked_rose(2)
        with pytest.raises(InvalidInput):
            faces(validate_pair(mg, ["x1"]))

    def test_bdd_faces_include_both_strata(self, bdd_spec):
        pair = validate_pair(bdd_spec.mg, bdd_spec.decomposition["J3"])
        names = {frozenset(bdd_spec.mg.graph.edge_names[s] for s in f.h_slots)
                 for f in faces(pair)}
        g1 = {"X", "Y", "Z"}
        assert frozenset(g1 | {"A", "B"}) in names
        assert frozenset(g1 | {"A2", "B2"}) in names

    def test_face_of_face(self, bdd_spec):
        pair = validate_pair(bdd_spec.mg, bdd_spec.decomposition["J3"])
        for face1 in faces(pair):
            if face1.co_edge >= 2:
                for face2 in faces(face1):
                    assert face2.h_slots > pair.h_slots


class TestEllipticSystem:
    def test_rose_coordinate(self):
        mg = marked_rose(2)
        s = one_edge_splitting(mg, ["x2"])
        assert s.elliptic == ffs_from_generators(2, [FWD[1]])

    def test_fixture_subrose(self, filling_spec):
        mg = filling_spec.mg
        s = one_edge_splitting(mg, ["X", "Y", "Z", "A"])
        gens = [mg.path_to_rose(mg.graph.parse_path(n))
                for n in ("X", "Y", "Z", "A")]
        assert s.elliptic == ffs_from_generators(5, gens)

    def test_bdd_lower_factor(self, bdd_spec):
        mg = bdd_spec.mg
        s = one_edge_splitting(mg, ["X", "Y", "Z", "A", "B", "A2"])
        assert s.elliptic.ranks == (6,)
        assert s.elliptic.is_proper

    def test_bdd_first_stratum_subgraph(self, bdd_spec):
        # collapsing the invariant rose plus the first pair of petals gives
        # a proper rank m+2 factor inside rank m+4
        pair = validate_pair(bdd_spec.mg, ["X", "Y", "Z", "A", "B"])
        ell = elliptic_system(pair)
        assert ell.ranks == (5,)
        assert ell.is_proper

    def test_dumbbell_matches_rose_presentation(self):
        rose2 = marked_rose(2)
        s_rose = one_edge_splitting(rose2, ["x1"])
        bell = dumbbell_marked()
        s_bell = one_edge_splitting(bell, ["p", "t"])
        assert equivalent_one_edge(s_rose, s_bell)


class TestEquivalence:
    def test_reflexive(self, filling_spec):
        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        assert equivalent_one_edge(s, s)

    def test_coordinate_splittings_differ(self):
        mg = marked_rose(2)
        assert not equivalent_one_edge(one_edge_splitting(mg, ["x1"]),
                                       one_edge_splitting(mg, ["x2"]))

    def test_small_battery_is_equivalence(self):
        mg = marked_rose(3)
        splittings = [one_edge_splitting(mg, [a, b])
                      for a, b in itertools.combinations(
                          ("x1", "x2", "x3"), 2)]
        for a in splittings:
            assert equivalent_one_edge(a, a)
            for b in splittings:
                assert equivalent_one_edge(a, b) == equivalent_one_edge(b, a)
                for c in splittings:
                    if equivalent_one_edge(a, b) and equivalent_one_edge(b, c):
                        assert equivalent_one_edge(a, c)


class TestPairRelation:
    def test_identity_holds(self, filling_spec):
        pair = validate_pair(filling_spec.mg, ["X", "Y", "Z", "A"])
        res = pair_relation_check(identity_graph_map(filling_spec.mg.graph),
                                  pair, pair)
        assert res.holds

    def test_bdd_core_equality(self, bdd_spec):
        from freesplit.classify import _power_map

        for k in (1, 2):
            f1k = _power_map(bdd_spec.maps["f1"], k)
            pair = validate_pair(bdd_spec.mg, bdd_spec.decomposition["K1"])
            res = pair_relation_check(f1k, pair, remark_pair(pair, f1k))
            assert res.holds

    def test_fixture_fails_clause_three(self, filling_spec):
        f = filling_spec.f
        pair = validate_pair(filling_spec.mg, ["X", "Y", "Z", "A"])
        res = pair_relation_check(f, pair, remark_pair(pair, f))
        assert res.status == "FailsClause" and res.clause == 3

    def test_witness_flanks_in_subgraph(self, bdd_spec):
        f1 = bdd_spec.maps["f1"]
        pair = validate_pair(bdd_spec.mg, bdd_spec.decomposition["K1"])
        res = pair_relation_check(f1, pair, remark_pair(pair, f1))
        assert res.holds
        for mu, cls, nu, flip in res.witness.edge_assignments.values():
            for ch in mu + nu:
                from freesplit.words import slot

                assert slot(ch) in pair.h_slots


class TestRemark:
    def test_identity_remark(self, filling_spec):
        pair = validate_pair(filling_spec.mg, ["X", "Y", "Z", "A"])
        same = remark_pair(pair, identity_graph_map(filling_spec.mg.graph))
        assert same.mg.marking == pair.mg.marking

    def test_remark_twice_matches_composite(self, filling_spec):
        from freesplit.graphs import compose

        f = filling_spec.f
        pair = validate_pair(filling_spec.mg, ["X", "Y", "Z", "A"])
        twice = remark_pair(remark_pair(pair, f), f)
        joint = remark_pair(pair, compose(f, f))
        assert twice.mg.marking == joint.mg.marking

    def test_elliptic_transforms_by_inverse(self, filling_spec):
        from freesplit.automorphisms import invert_map
        from freesplit.factors import apply_basis_map_to_ffs

        mg, f = filling_spec.mg, filling_spec.f
        s = one_edge_splitting(mg, ["X", "Y", "Z", "A"])
        moved = remark_splitting(s, f)
        bwd = invert_map(mg.induced_rose_map(f))
        assert moved.elliptic == apply_basis_map_to_ffs(bwd, s.elliptic)

    def test_right_action_with_distinct_maps(self, filling_spec):
        from freesplit.graphs import compose, rose_map

        mg, f = filling_spec.mg, filling_spec.f
        swap = rose_map(mg, {"X": "Y", "Y": "X", "Z": "Z",
                             "A": "A", "B": "B"})
        pair = validate_pair(mg, ["X", "Y", "Z", "A"])
        stepwise = remark_pair(remark_pair(pair, f), swap)
        joint = remark_pair(pair, compose(swap, f))
        assert stepwise.mg.marking == joint.mg.marking


class TestAdjacency:
    def test_coordinate_pair_in_rank2(self):
        mg = marked_rose(2)
        res = adjacent(one_edge_splitting(mg, ["x1"]),
                       one_edge_splitting(mg, ["x2"]))
        assert res.adjacent
        assert res.refinement.h_slots == frozenset()

    def test_equivalent_inputs_rejected(self, filling_spec):
        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        with pytest.raises(InvalidInput):
            adjacent(s, s)

    def test_siblings_adjacent(self, filling_spec):
        pair = validate_pair(filling_spec.mg, ["X", "Y", "Z"])
        s1, s2 = sibling_splittings(pair)
        res = adjacent(s1, s2)
        assert res.adjacent
        got = [splitting_of_pair(fp) for fp in faces(res.refinement)]
        assert (equivalent_one_edge(got[0], s1)
                and equivalent_one_edge(got[1], s2)) or \
               (equivalent_one_edge(got[0], s2)
                and equivalent_one_edge(got[1], s1))


class TestDistance:
    def test_zero(self, filling_spec):
        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        assert fs_distance_upper(s, s) == 0

    def test_siblings_at_two(self, filling_spec):
        pair = validate_pair(filling_spec.mg, ["X", "Y", "Z"])
        s1, s2 = sibling_splittings(pair)
        assert fs_distance_upper(s1, s2) == 2

    def test_bdd_chain_at_most_four(self, bdd_spec):
        from freesplit.classify import _power_map

        k = 1
        f = bdd_spec.maps["f"]
        f1k = _power_map(bdd_spec.maps["f1"], k)
        f2k = _power_map(bdd_spec.maps["f2"], k)
        fk = _power_map(f, k)
        p = validate_pair(bdd_spec.mg, bdd_spec.decomposition["J3"])
        d = fs_distance_upper(p, remark_pair(p, fk),
                              hint_maps=[f1k, f2k, fk])
        assert d is not None and d <= 4
