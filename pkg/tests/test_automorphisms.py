import pytest

from freesplit.automorphisms import (DISTINCT, EQUAL, abelianization,
                                     apply_map, compose_maps, identity_map,
                                     invert_map, outer_equal)
from freesplit.errors import InvalidInput
from freesplit.words import BWD, FWD, invert, reduce_word

x, y, z = FWD[0], FWD[1], FWD[2]
X, Y, Z = BWD[0], BWD[1], BWD[2]


class TestInvert:
    def test_identity(self):
        assert invert_map(identity_map(3)) == identity_map(3)

    def test_elementary(self):
        assert invert_map((x + y, y)) == (x + Y, y)

    def test_round_trip_random_compositions(self):
        elementary = [(x + y, y), (x, y + x), (x + Y, y), (y, x), (X, y)]
        f = identity_map(2)
        for e in elementary:
            f = compose_maps(e, f)
        g = invert_map(f)
        assert compose_maps(f, g) == identity_map(2)
        assert compose_maps(g, f) == identity_map(2)

    def test_not_an_automorphism(self):
        with pytest.raises(InvalidInput):
            invert_map((x + y + X, y))  # <xyx^-1, y> is a proper subgroup

    def test_trivial_image_rejected(self):
        with pytest.raises(InvalidInput):
            invert_map(("", y))


class TestOuterEqual:
    def test_reflexive(self):
        f = (x + y, y)
        assert outer_equal(f, f)[0] == EQUAL

    def test_inner_conjugate(self):
        f = (x + y + x, x + y)
        g = tuple(reduce_word(y + w + Y) for w in f)
        verdict, u = outer_equal(f, g)
        assert verdict == EQUAL
        assert all(reduce_word(u + g[i] + invert(u)) == f[i] for i in range(2))

    def test_abelianization_distinct(self):
        assert outer_equal((x + y, y), identity_map(2))[0] == DISTINCT

    def test_same_abelianization_distinct(self):
        # conjugation-like on one letter only is not inner
        f = (x, y, z)
        g = (x, x + y + X, z)
        assert abelianization(f) == abelianization(g)
        assert outer_equal(f, g)[0] == DISTINCT

    def test_apply_map(self):
        f = (x + y, y)
        assert apply_map(f, x + Y) == x  # (xy) y^-1 reduces
