import math

import pytest

from freesplit.config import Config
from freesplit.errors import InvalidInput
from freesplit.graphs import compose, identity_graph_map, strata
from freesplit.laminations import (AttractionParams, growth_certified,
                                   lamination_approx, lamination_fills,
                                   laminations_jointly_fill, leaf_segment,
                                   pf_estimate, weakly_attracted)
from freesplit.whitehead import FILLS, PROPER, UNKNOWN


@pytest.fixture(scope="module")
def lam(filling_spec):
    filt = strata(filling_spec.f)
    return lamination_approx(filling_spec.mg, filling_spec.f,
                             filt.eg_strata()[0], filtration=filt)


class TestLeafSegments:
    def test_first_image(self, filling_spec):
        g = filling_spec.mg.graph
        sigma = filling_spec.params["sigma"]
        got = leaf_segment(filling_spec.f, "B", 1)
        assert got == g.parse_path(f"B {sigma} A {sigma} B' {sigma} B")

    def test_depth_zero(self, filling_spec):
        g = filling_spec.mg.graph
        assert leaf_segment(filling_spec.f, "B", 0) == g.parse_path("B")

    def test_nested(self, filling_spec):
        s1 = leaf_segment(filling_spec.f, "B", 1)
        s2 = leaf_segment(filling_spec.f, "B", 2)
        assert s2.startswith(s1)


class TestApprox:
    def test_seed_is_least_edge(self, lam, filling_spec):
        g = filling_spec.mg.graph
        assert lam.seed == g.slot_of["A"]

    def test_lengths_strictly_increase(self, lam):
        lens = [len(s) for s in lam.segments]
        assert all(a < b for a, b in zip(lens, lens[1:]))

    def test_nested_at_seed(self, lam):
        # f(A) begins with A, so iterates nest as initial subpaths
        for a, b in zip(lam.segments[1:], lam.segments[2:]):
            assert b.startswith(a)

    def test_growth_matches_perron_root(self, filling_spec):
        cfg = Config(lam_len_target=15_000, lam_depth_cap=12)
        filt = strata(filling_spec.f, cfg)
        deep = lamination_approx(filling_spec.mg, filling_spec.f,
                                 filt.eg_strata()[0], cfg, filt)
        assert len(deep.deepest()) >= 10_000
        rho = 2 + math.sqrt(3)
        assert abs(deep.growth_ratio() - rho) <= 0.01 * rho
        assert growth_certified(deep, cfg)

    def test_non_eg_stratum_rejected(self, filling_spec):
        filt = strata(filling_spec.f)
        fixed = [i for i, st in enumerate(filt.strata) if st.label == "FIXED"]
        with pytest.raises(InvalidInput):
            lamination_approx(filling_spec.mg, filling_spec.f, fixed[0],
                              filtration=filt)

    def test_two_laminations_for_bdd(self, bdd_spec):
        filt = strata(bdd_spec.f)
        assert len(filt.eg_strata()) == 2
        lams = [lamination_approx(bdd_spec.mg, bdd_spec.f, i, filtration=filt)
                for i in filt.eg_strata()]
        assert lams[0].stratum != lams[1].stratum


class TestWeakAttraction:
    def test_growing_class_attracted(self, lam, filling_spec):
        g = filling_spec.mg.graph
        res = weakly_attracted(filling_spec.f, g.parse_path("A"), lam,
                               AttractionParams())
        assert res.attracted

    def test_fixed_class_not_attracted(self, lam, filling_spec):
        g = filling_spec.mg.graph
        res = weakly_attracted(filling_spec.f,
                               g.parse_path(filling_spec.params["sigma"]),
                               lam, AttractionParams())
        assert not res.attracted
        assert res.kind == "NotWithinHorizon"

    def test_deep_segment_attracted_at_zero(self, lam, filling_spec):
        from freesplit.graphs import close_path

        loop = close_path(filling_spec.mg, lam.deepest())
        res = weakly_attracted(filling_spec.f, loop, lam, AttractionParams())
        assert res.attracted and res.index == 0

    def test_monotone_in_horizon(self, lam, filling_spec):
        g = filling_spec.mg.graph
        small = AttractionParams(horizon_fwd=10, horizon_bwd=10)
        big = AttractionParams(horizon_fwd=20, horizon_bwd=20)
        r1 = weakly_attracted(filling_spec.f, g.parse_path("A"), lam, small)
        r2 = weakly_attracted(filling_spec.f, g.parse_path("A"), lam, big)
        assert r1.attracted and r2.attracted and r1.index == r2.index


class TestLaminationFills:
    def test_filling_reducible(self, lam):
        assert lamination_fills(lam).kind == FILLS

    def test_filling_reducible_rank4(self):
        from freesplit.fixtures import fixture
        from freesplit.graphs import strata as strata_fn

        spec = fixture("filling_reducible", m=4)
        filt = strata_fn(spec.f)
        lam4 = lamination_approx(spec.mg, spec.f, filt.eg_strata()[0],
                                 filtration=filt)
        assert lamination_fills(lam4).kind == FILLS

    def test_bdd_laminations_proper(self, bdd_spec):
        filt = strata(bdd_spec.f)
        for idx in filt.eg_strata():
            lamI = lamination_approx(bdd_spec.mg, bdd_spec.f, idx,
                                     filtration=filt)
            v = lamination_fills(lamI)
            assert v.kind == PROPER
            assert v.witness.is_proper

    def test_single_depth_unknown(self, lam):
        import dataclasses

        shallow = dataclasses.replace(lam, segments=lam.segments[:2], depth=1)
        assert lamination_fills(shallow).kind == UNKNOWN


class TestJointlyFill:
    def test_bdd_jointly_fills(self, bdd_spec):
        filt = strata(bdd_spec.f)
        lams = [lamination_approx(bdd_spec.mg, bdd_spec.f, i, filtration=filt)
                for i in filt.eg_strata()]
        assert laminations_jointly_fill(lams).kind == FILLS

    def test_single_filling(self, lam):
        assert laminations_jointly_fill([lam]).kind == FILLS

    def test_duplicate_is_idempotent(self, bdd_spec):
        filt = strata(bdd_spec.f)
        idx = filt.eg_strata()[0]
        lamI = lamination_approx(bdd_spec.mg, bdd_spec.f, idx, filtration=filt)
        one = laminations_jointly_fill([lamI])
        two = laminations_jointly_fill([lamI, lamI])
        assert one.kind == two.kind == PROPER

    def test_empty_rejected(self):
        with pytest.raises(InvalidInput):
            laminations_jointly_fill([])


class TestPFEstimate:
    def test_identity_is_zero(self, lam, filling_spec):
        ident = identity_graph_map(filling_spec.mg.graph)
        assert pf_estimate(ident, lam) == 0.0

    def test_defining_map_estimates_log_perron(self, filling_spec):
        cfg = Config(lam_len_target=15_000, lam_depth_cap=12)
        filt = strata(filling_spec.f, cfg)
        deep = lamination_approx(filling_spec.mg, filling_spec.f,
                                 filt.eg_strata()[0], cfg, filt)
        target = math.log(2 + math.sqrt(3))
        assert abs(pf_estimate(filling_spec.f, deep) - target) \
            <= 0.01 * target

    def test_square_doubles(self, filling_spec):
        cfg = Config(lam_len_target=15_000, lam_depth_cap=12)
        filt = strata(filling_spec.f, cfg)
        deep = lamination_approx(filling_spec.mg, filling_spec.f,
                                 filt.eg_strata()[0], cfg, filt)
        one = pf_estimate(filling_spec.f, deep)
        two = pf_estimate(compose(filling_spec.f, filling_spec.f), deep)
        assert abs(two - 2 * one) <= 0.02 * abs(two)
