import pytest

from freesplit.errors import InvalidInput, NotApplicable
from freesplit.factors import ffs_from_generators
from freesplit.fixtures import fixture
from freesplit.graphs import close_path, marked_rose, rose_map
from freesplit.pairs import one_edge_splitting, sibling_splittings, validate_pair
from freesplit.wproj import (W_of_ffs, W_of_splitting, build_context,
                             candidate_classes, default_m_samples,
                             displacement_table, divergence_check, estimate_M,
                             in_U, lipschitz_check, translate_class, w_of)
from freesplit.words import FWD, canonical_cyclic


def rose_class(spec, tokens):
    g = spec.mg.graph
    return spec.mg.circuit_to_rose_class(g.parse_path(tokens))


class TestBuildContext:
    def test_filling_fixture(self, filling_ctx):
        assert len(filling_ctx.seg_plus) == filling_ctx.params.seg_len
        assert len(filling_ctx.seg_minus) == filling_ctx.params.seg_len
        assert filling_ctx.seg_plus != filling_ctx.seg_minus

    def test_no_eg_stratum_rejected(self):
        mg = marked_rose(2)
        f = rose_map(mg, {"x1": "x1", "x2": "x2 x1"})
        with pytest.raises(InvalidInput):
            build_context(mg, f)

    def test_supplied_inverse_matches_computed(self, filling_spec):
        from freesplit.automorphisms import invert_map
        from freesplit.graphs import realize_rose_endo

        mg, f = filling_spec.mg, filling_spec.f
        bwd = invert_map(mg.induced_rose_map(f))
        f_inv = realize_rose_endo(mg, bwd)
        ctx2 = build_context(mg, f, f_inv)
        assert ctx2.seg_plus and ctx2.seg_minus

    def test_bad_inverse_rejected(self, filling_spec):
        mg, f = filling_spec.mg, filling_spec.f
        with pytest.raises(InvalidInput):
            build_context(mg, f, f)  # f is not its own inverse


class TestInU:
    def test_deep_segment_in_plus(self, filling_ctx, filling_spec):
        loop = close_path(filling_spec.mg, filling_ctx.lam_plus.deepest())
        cls = canonical_cyclic(filling_spec.mg.path_to_rose(loop))
        assert in_U(filling_ctx, cls, "+")

    def test_fixed_class_in_neither(self, filling_ctx, filling_spec):
        c = rose_class(filling_spec, filling_spec.params["sigma"])
        assert not in_U(filling_ctx, c, "+")
        assert not in_U(filling_ctx, c, "-")

    def test_short_class_not_contained(self, filling_ctx, filling_spec):
        assert not in_U(filling_ctx, rose_class(filling_spec, "A"), "+")

    def test_bad_side(self, filling_ctx):
        with pytest.raises(InvalidInput):
            in_U(filling_ctx, "", "?")


class TestWOf:
    def test_fixed_class_not_defined(self, filling_ctx, filling_spec):
        res = w_of(filling_ctx, rose_class(filling_spec, filling_spec.params["sigma"]))
        assert res.status == "NotDefined"

    def test_growing_class_defined(self, filling_ctx, filling_spec):
        res = w_of(filling_ctx, rose_class(filling_spec, "A"))
        assert res.defined
        assert res.fwd_entry is not None

    def test_translation_law_raw(self, filling_ctx, filling_spec):
        c = rose_class(filling_spec, "A")
        base = w_of(filling_ctx, c).value
        for m in range(-3, 4):
            moved = translate_class(filling_ctx, c, m)
            assert w_of(filling_ctx, moved).value == base + m

    def test_stable_under_horizon_doubling(self, filling_ctx, filling_spec):
        import dataclasses

        from freesplit.laminations import AttractionParams

        c = rose_class(filling_spec, "A")
        v1 = w_of(filling_ctx, c).value
        p = filling_ctx.params
        doubled = dataclasses.replace(
            filling_ctx,
            params=AttractionParams(p.seg_len, p.horizon_fwd * 2,
                                    p.horizon_bwd * 2, p.stability))
        assert w_of(doubled, c).value == v1


class TestCandidates:
    def test_cyclic_factor(self):
        got = candidate_classes(ffs_from_generators(2, [FWD[0]]), 3)
        x = FWD[0]
        assert got == [x, x + x, x + x + x]

    def test_zero_length_empty(self):
        assert candidate_classes(ffs_from_generators(2, [FWD[0]]), 0) == []

    def test_improper_rejected(self):
        from freesplit.factors import whole_group

        with pytest.raises(InvalidInput):
            candidate_classes(whole_group(2), 3)


class TestWOfSystems:
    def test_splitting_value(self, filling_ctx, filling_spec):
        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        val = W_of_splitting(filling_ctx, s)
        assert val.n_defined >= 1
        # the witness crosses the growing petal (either orientation)
        from freesplit.words import invert

        mg = filling_spec.mg
        a = mg.path_to_rose(mg.graph.parse_path("A"))
        assert a in val.witness or invert(a) in val.witness

    def test_singleton_candidates(self, filling_ctx, filling_spec):
        c = rose_class(filling_spec, "A")
        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        val = W_of_ffs(filling_ctx, s.elliptic, candidates=[c])
        assert val.value == w_of(filling_ctx, c).value

    def test_not_applicable_when_all_fixed(self, filling_ctx, filling_spec):
        mg = filling_spec.mg
        gens = [mg.path_to_rose(mg.graph.parse_path(n)) for n in ("X", "Y")]
        ffs = ffs_from_generators(5, gens)
        with pytest.raises(NotApplicable):
            W_of_ffs(filling_ctx, ffs)

    def test_translated_system_shifts(self, filling_ctx, filling_spec):
        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        base = W_of_splitting(filling_ctx, s).value
        cands = candidate_classes(s.elliptic, filling_ctx.cand_len,
                                  filling_ctx.cfg.cand_cap)
        for m in (1, 2):
            moved = [translate_class(filling_ctx, c, -m) for c in cands]
            val = W_of_ffs(filling_ctx, s.elliptic, candidates=moved)
            assert val.value == base - m

    def test_remark_equivariance(self, filling_ctx, filling_spec):
        # the remarked splitting's system is the inverse translate, so its
        # value under transported candidates drops by exactly one
        from freesplit.pairs import remark_splitting

        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        base = W_of_splitting(filling_ctx, s).value
        moved = remark_splitting(s, filling_spec.f)
        cands = candidate_classes(s.elliptic, filling_ctx.cand_len,
                                  filling_ctx.cfg.cand_cap)
        transported = [translate_class(filling_ctx, c, -1) for c in cands]
        val = W_of_ffs(filling_ctx, moved.elliptic, candidates=transported)
        assert val.value == base - 1


class TestEstimateM:
    def test_translate_pair_contributes(self, filling_spec):
        mg, f = filling_spec.mg, filling_spec.f
        ctx = build_context(mg, f)
        c = rose_class(filling_spec, "A")
        c1 = translate_class(ctx, c, 1)
        m = estimate_M(ctx, [[c, c1]])
        assert m >= 1

    def test_stable_under_sample_doubling(self, filling_spec):
        mg, f = filling_spec.mg, filling_spec.f
        s1 = one_edge_splitting(mg, ["X", "Y", "Z", "A"])
        s2 = one_edge_splitting(mg, ["X", "Y", "Z", "B"])
        ctx1 = build_context(mg, f)
        estimate_M(ctx1, default_m_samples(ctx1, [s1]))
        ctx2 = build_context(mg, f)
        estimate_M(ctx2, default_m_samples(ctx2, [s1, s2, s1, s2]))
        assert ctx1.m_hat == ctx2.m_hat

    def test_requires_sample(self, filling_spec):
        ctx = build_context(filling_spec.mg, filling_spec.f)
        with pytest.raises(NotApplicable):
            estimate_M(ctx, [])


class TestDisplacement:
    def test_exact_slope(self, filling_ctx, filling_spec):
        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        rep = displacement_table(filling_ctx, s, 3)
        assert rep["slope_exact"]
        t = rep["table"]
        assert all(t[m] == t[0] - m for m in t)

    def test_raw_spot_checks_within_constant(self, filling_ctx, filling_spec):
        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        rep = displacement_table(filling_ctx, s, 2)
        assert rep["raw_within_m_hat"]
        assert all(v is not None for v in rep["raw_spot_checks"].values())


class TestWitnessSoundness:
    def test_rate_lower_bound_reported(self, filling_ctx, filling_spec):
        from freesplit.pairs import fs_distance_upper

        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        rep = displacement_table(filling_ctx, s, 2)
        assert rep["distance_rate_lower_bound"] == \
            1.0 / (8 * filling_ctx.m_hat)
        # at translation zero both bounds exist and agree trivially
        assert fs_distance_upper(s, s) == 0


class TestLipschitz:
    def test_identical_splittings_zero(self, filling_ctx, filling_spec):
        s = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        rep = lipschitz_check(filling_ctx, [(s, s)])
        assert rep["pairs"][0]["delta"] == 0

    def test_sibling_pair_small(self, filling_ctx, filling_spec):
        pair = validate_pair(filling_spec.mg, ["X", "Y", "A"])
        s1, s2 = sibling_splittings(pair)
        rep = lipschitz_check(filling_ctx, [(s1, s2)])
        assert rep["violations"] == 0
        # the collapsed graph carries a defined class, so the sharper
        # two-constant branch applies
        assert rep["pairs"][0]["delta"] <= 2 * filling_ctx.m_hat


class TestDivergence:
    def test_identity_constant(self, filling_ctx, filling_spec):
        from freesplit.automorphisms import identity_map

        t = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        rep = divergence_check(filling_ctx, identity_map(5), t,
                               l_max=5, band_search=2, phi_range=2)
        vals = set(rep["psi_table"].values())
        assert len(vals) == 1 and rep["verdict"] == "Bounded"

    def test_self_is_unbounded(self, filling_ctx, filling_spec):
        t = one_edge_splitting(filling_spec.mg, ["X", "Y", "Z", "A"])
        rep = divergence_check(filling_ctx, filling_ctx.fwd, t,
                               l_max=8, band_search=4, phi_range=4)
        assert rep["verdict"] == "Unbounded"
