import pytest

from freesplit.errors import InvalidInput
from freesplit.factors import (carries, co_edge_number, enumerate_classes,
                               ffs_carried, ffs_from_generators, fold,
                               folds_to_rose, meet, subgroup_carried,
                               whole_group)
from freesplit.words import BWD, FWD, canonical_cyclic

x, y, z = FWD[0], FWD[1], FWD[2]
X, Y, Z = BWD[0], BWD[1], BWD[2]


class TestFold:
    def test_single_loop(self):
        core = fold(2, [x])
        assert (core.n_vertices, core.n_edges, core.graph_rank) == (1, 1, 1)

    def test_hand_folded_rank_two(self):
        # <x^2, x y x^-1>: two vertices, an x-cycle of length 2 and a y-loop
        core = fold(2, [x + x, x + y + X])
        assert (core.n_vertices, core.n_edges, core.graph_rank) == (2, 3, 2)
        assert core.carries_class(x + x)
        assert core.carries_class(y)  # conjugate of y lies in the subgroup
        assert not core.carries_class(x)

    def test_whole_rose(self):
        core = fold(2, [x, y])
        assert (core.n_vertices, core.n_edges, core.graph_rank) == (1, 2, 2)

    def test_empty_generator_rejected(self):
        with pytest.raises(InvalidInput):
            fold(2, [x, ""])

    def test_folds_to_rose_detects_generation(self):
        assert folds_to_rose((x + y, y), 2)
        assert not folds_to_rose((x + y + X, y), 2)
        assert not folds_to_rose((x, x + x), 2)


class TestCarries:
    def test_powers(self):
        ffs = ffs_from_generators(2, [x])
        assert carries(ffs, canonical_cyclic(x + x + x))
        assert not carries(ffs, canonical_cyclic(x + y))

    def test_rotation_and_conjugation_invariance(self):
        ffs = ffs_from_generators(3, [x, y])
        w = x + y + x
        for rot in range(3):
            d = (w + w)[rot : rot + 3]
            assert carries(ffs, canonical_cyclic(d))
        assert carries(ffs, canonical_cyclic(z + w + Z))

    def test_fixture_base_word(self, filling_spec):
        mg, g = filling_spec.mg, filling_spec.mg.graph
        ffs = ffs_from_generators(5, *[[mg.path_to_rose(g.parse_path(n))]
                                       for n in ("X", "Y", "Z")])
        sigma = mg.path_to_rose(g.parse_path(filling_spec.params["sigma"]))
        # single-component realization of the fixed rose carries the word
        big = ffs_from_generators(
            5, [mg.path_to_rose(g.parse_path(n)) for n in ("X", "Y", "Z")])
        assert carries(big, canonical_cyclic(sigma))
        assert not carries(ffs, canonical_cyclic(sigma))


class TestMeet:
    def test_idempotent(self):
        ffs = ffs_from_generators(3, [x, y])
        assert meet(ffs, ffs) == ffs

    def test_disjoint(self):
        a = ffs_from_generators(2, [x])
        b = ffs_from_generators(2, [y])
        assert meet(a, b).components == ()

    def test_pullback_example(self):
        a = ffs_from_generators(3, [x, y])
        b = ffs_from_generators(3, [y, z])
        assert meet(a, b) == ffs_from_generators(3, [y])

    def test_commutative(self):
        a = ffs_from_generators(3, [x, y])
        b = ffs_from_generators(3, [y, z])
        assert meet(a, b) == meet(b, a)

    def test_monotone(self):
        a = ffs_from_generators(3, [x, y])
        b = ffs_from_generators(3, [y, z])
        m = meet(a, b)
        assert ffs_carried(m, a) and ffs_carried(m, b)


class TestCoEdge:
    def test_rank3_in_rank5(self):
        assert co_edge_number(ffs_from_generators(5, [x, y, z])) == 2

    def test_three_lines_in_rank3(self):
        assert co_edge_number(ffs_from_generators(3, [x], [y], [z])) == 2

    def test_line_in_rank2(self):
        assert co_edge_number(ffs_from_generators(2, [x])) == 1

    def test_improper_rejected(self):
        with pytest.raises(InvalidInput):
            co_edge_number(whole_group(2))

    def test_monotone_under_carrying(self):
        # nested systems have non-increasing co-edge numbers
        pairs = [
            (ffs_from_generators(3, [x]), ffs_from_generators(3, [x, y])),
            (ffs_from_generators(3, [x], [y]), ffs_from_generators(3, [x, y])),
            (ffs_from_generators(3, [x + y]), ffs_from_generators(3, [x, y])),
        ]
        for small, big in pairs:
            assert ffs_carried(small, big)
            assert co_edge_number(big) <= co_edge_number(small)


class TestSubgroupCarried:
    def test_conjugate_inclusion(self):
        inner = fold(2, [x + y + X])  # <x y x^-1>, conjugate of <y>
        outer = fold(2, [y])
        assert subgroup_carried(inner, outer)

    def test_non_inclusion(self):
        assert not subgroup_carried(fold(2, [x]), fold(2, [y]))


class TestEnumerateClasses:
    def test_cyclic_factor(self):
        got = enumerate_classes(ffs_from_generators(2, [x]), 3)
        assert got == [x, x + x, x + x + x]

    def test_rank_two_in_three(self):
        got = enumerate_classes(ffs_from_generators(3, [x, y]), 2)
        expected = {canonical_cyclic(w)
                    for w in (x, y, x + x, x + y, x + Y, y + y)}
        assert set(got) == expected and len(got) == 6

    def test_zero_length(self):
        assert enumerate_classes(ffs_from_generators(2, [x]), 0) == []

    def test_translated_core_exposes_long_generator(self):
        # a stretched realization must still offer its generator loop
        long_word = x + y + x + y + y + x + Y + X
        ffs = ffs_from_generators(2, [long_word])
        got = enumerate_classes(ffs, 2)
        assert canonical_cyclic(long_word) in got


class TestCanonicalForm:
    def test_conjugate_generators_same_core(self):
        a = fold(2, [x + y])
        b = fold(2, [y + x])
        assert a.canonical_key == b.canonical_key

    def test_distinct_subgroups_differ(self):
        assert fold(2, [x]).canonical_key != fold(2, [y]).canonical_key
