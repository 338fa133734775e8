"""The integer projection certifying linear displacement.

For an automorphism with a filling lamination pair, each conjugacy class
not trapped by the nonattracting system has an orbit phase w(c): the
smallest integer w with all backward iterates from w on inside the
repelling neighborhood.  Minimizing over classes carried by a splitting's
elliptic system gives W(S); exact translation laws and an empirical
Lipschitz constant turn W into a machine-checkable loxodromicity witness.

Neighborhoods are concretized as "contains the defining leaf segment";
the constant here is empirical, estimated from samples, not the
theoretical one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automorphisms import (BasisMap, apply_map, compose_maps, identity_map,
                            invert_map, outer_equal)
from .config import DEFAULT, Config
from .errors import BudgetExhausted, InvalidInput, NotApplicable
from .factors import (FreeFactorSystem, apply_basis_map_to_ffs,
                      enumerate_classes)
from .graphs import GraphMap, MarkedGraph, realize_rose_endo, strata
from .laminations import (AttractionParams, LaminationApprox,
                          defining_segment, lamination_approx,
                          lamination_fills)
from .pairs import OneEdgeSplitting
from .whitehead import FILLS
from .words import (canonical_cyclic, cyclic_contains, cyclic_reduce,
                    path_contains, sort_key)

NOT_DEFINED = "NotDefined"
DEFINED = "Defined"
BUDGET = "BudgetExhausted"


@dataclass
class WContext:
    """Everything needed to evaluate the projection.

    Mutable only in ``m_hat``, which is set once by :func:`estimate_M`.
    """

    mg: MarkedGraph
    f: GraphMap
    f_inv: GraphMap
    fwd: BasisMap  # outer automorphism on the abstract basis
    bwd: BasisMap  # its inverse
    lam_plus: LaminationApprox
    lam_minus: LaminationApprox
    seg_plus: str  # defining segment of the attracting side, basis letters
    seg_minus: str
    params: AttractionParams
    cand_len: int
    cfg: Config
    m_hat: int | None = None
    forward_checks: bool = True  # compute the forward-entry cross-check
    notes: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.mg.rank

    def require_m(self) -> int:
        if self.m_hat is None:
            raise NotApplicable("estimate_M has not been run on this context")
        return self.m_hat


def build_context(mg: MarkedGraph, f: GraphMap, f_inv: GraphMap | None = None,
                  cfg: Config = DEFAULT,
                  params: AttractionParams | None = None) -> WContext:
    """Assemble the projection context for a map with a filling lamination."""
    params = params or AttractionParams(
        seg_len=cfg.seg_len, horizon_fwd=cfg.horizon_fwd,
        horizon_bwd=cfg.horizon_bwd, stability=cfg.stability)
    filt = strata(f, cfg)
    lam_plus = None
    for idx in filt.eg_strata():
        lam = lamination_approx(mg, f, idx, cfg, filt)
        if lamination_fills(lam, cfg).kind == FILLS:
            lam_plus = lam
            break
    if lam_plus is None:
        raise InvalidInput("no certified filling lamination for this map")

    fwd = mg.induced_rose_map(f)
    if f_inv is None:
        bwd = invert_map(fwd, cfg.outer_budget)
        f_inv = realize_rose_endo(mg, bwd)
    else:
        bwd = mg.induced_rose_map(f_inv)
    verdict, _ = outer_equal(compose_maps(fwd, bwd), identity_map(mg.rank),
                             cfg.outer_budget)
    if verdict != "Equal":
        raise InvalidInput("supplied inverse does not invert the map")

    filt_inv = strata(f_inv, cfg)
    lam_minus = None
    for idx in filt_inv.eg_strata():
        lam = lamination_approx(mg, f_inv, idx, cfg, filt_inv)
        if lamination_fills(lam, cfg).kind == FILLS:
            lam_minus = lam
            break
    if lam_minus is None:
        raise InvalidInput("no certified filling lamination for the inverse")

    seg_plus = _rose_segment(mg, lam_plus, params.seg_len)
    seg_minus = _rose_segment(mg, lam_minus, params.seg_len)
    for seg, lam in ((seg_plus, lam_plus), (seg_minus, lam_minus)):
        deep = mg.path_to_rose(lam.deepest())
        if not path_contains(deep, seg):
            raise InvalidInput("defining segment lost in transport")
    return WContext(mg, f, f_inv, fwd, bwd, lam_plus, lam_minus,
                    seg_plus, seg_minus, params, cfg.cand_len, cfg)


def _rose_segment(mg: MarkedGraph, lam: LaminationApprox, seg_len: int) -> str:
    graph_seg = defining_segment(lam, min(seg_len, len(lam.deepest())))
    word = mg.path_to_rose(graph_seg)
    if len(word) < seg_len:
        word = mg.path_to_rose(lam.deepest())
    if len(word) < seg_len:
        raise InvalidInput("leaf too short for the requested segment length")
    mid = (len(word) - seg_len) // 2
    return word[mid : mid + seg_len]


def in_U(ctx: WContext, cyclic: str, side: str) -> bool:
    """Membership proxy for the attracting (+) / repelling (-) neighborhood."""
    if side not in "+-":
        raise InvalidInput("side must be '+' or '-'")
    seg = ctx.seg_plus if side == "+" else ctx.seg_minus
    return cyclic_contains(cyclic, seg)


# ---------------------------------------------------------------------------
# The orbit phase w


@dataclass(frozen=True)
class WResult:
    status: str  # Defined | NotDefined | BudgetExhausted
    value: int | None = None
    fwd_entry: int | None = None
    forward_ok: bool | None = None
    horizon_bwd_reached: int = 0
    horizon_fwd_reached: int = 0

    @property
    def defined(self) -> bool:
        return self.status == DEFINED


class _LazyOrbit:
    """Iterates of a class under one basis map, grown on demand."""

    def __init__(self, start: str, bm: BasisMap, horizon: int, cap: int):
        self.words = [start]
        self.bm = bm
        self.horizon = horizon
        self.cap = cap
        self.dead = False

    def get(self, t: int) -> str | None:
        """Word at step t, or None past the horizon or the length cap.

        Iterates are only cyclically reduced, not rotated to canonical
        form: membership tests read the doubled word, so the rotation is
        irrelevant and canonicalization would dominate the cost.
        """
        if t > self.horizon:
            return None
        while len(self.words) <= t and not self.dead:
            nxt = cyclic_reduce(apply_map(self.bm, self.words[-1]))
            if len(nxt) > self.cap:
                self.dead = True
                break
            self.words.append(nxt)
        return self.words[t] if t < len(self.words) else None


def w_of(ctx: WContext, cyclic: str) -> WResult:
    """Smallest w with the backward iterates on [w, w+s] inside the
    repelling neighborhood (s the stability margin).

    NotDefined (the nonattraction proxy) when the full backward horizon is
    scanned without such a window; BudgetExhausted when the length cap cut
    a scan short instead.
    """
    c = cyclic_reduce(cyclic)
    p = ctx.params
    back = _LazyOrbit(c, ctx.bwd, p.horizon_bwd, ctx.cfg.iterate_cap)
    fore = _LazyOrbit(c, ctx.fwd, p.horizon_fwd, ctx.cfg.iterate_cap)

    def word_at(t: int) -> str | None:
        return back.get(t) if t >= 0 else fore.get(-t)

    mems: list[bool] = []
    for t in range(p.horizon_bwd + 1):
        word = word_at(t)
        if word is None:
            return WResult(BUDGET, horizon_bwd_reached=t - 1)
        mems.append(in_U(ctx, word, "-"))
        start = t - p.stability
        if start < 0 or not all(mems[start:]):
            continue
        # a window holds; push its start as low as the memberships stay true
        t2 = start - 1
        while True:
            if t2 < -p.horizon_fwd:
                return WResult(BUDGET, horizon_bwd_reached=t)
            w2 = word_at(t2)
            if w2 is None:
                return WResult(BUDGET, horizon_bwd_reached=t)
            if not in_U(ctx, w2, "-"):
                w = t2 + 1
                break
            t2 -= 1
        entry = _forward_entry(ctx, word_at) if ctx.forward_checks else None
        ok = None
        if entry is not None and ctx.m_hat is not None:
            ok = entry <= -w + ctx.m_hat
        return WResult(DEFINED, w, entry, ok, t, len(fore.words) - 1)
    return WResult(NOT_DEFINED, horizon_bwd_reached=p.horizon_bwd,
                   horizon_fwd_reached=len(fore.words) - 1)


def _forward_entry(ctx: WContext, word_at) -> int | None:
    """Smallest entry index with a stability window inside the attracting
    neighborhood along forward iterates; None when not found in budget.

    ``word_at(t)`` returns the class at backward time t, so the class at
    forward time i is ``word_at(-i)``.
    """
    p = ctx.params
    mems: list[bool] = []
    for i in range(p.horizon_fwd + 1):
        word = word_at(-i)
        if word is None:
            return None
        mems.append(in_U(ctx, word, "+"))
        start = i - p.stability
        if start < 0 or not all(mems[start:]):
            continue
        i2 = start - 1
        while True:
            if i2 < -p.horizon_bwd:
                return None
            w2 = word_at(-i2)
            if w2 is None:
                return None
            if not in_U(ctx, w2, "+"):
                return i2 + 1
            i2 -= 1
    return None


def translate_class(ctx: WContext, cyclic: str, m: int) -> str:
    bm = ctx.fwd if m >= 0 else ctx.bwd
    cur = cyclic_reduce(cyclic)
    for _ in range(abs(m)):
        cur = cyclic_reduce(apply_map(bm, cur))
        if len(cur) > ctx.cfg.iterate_cap:
            raise BudgetExhausted("translated class exceeded the length cap")
    return canonical_cyclic(cur) if len(cur) < 10_000 else cur


def candidate_classes(ffs: FreeFactorSystem, max_len: int,
                      cap: int | None = None) -> list[str]:
    """Canonical cyclic words up to max_len carried by a proper system."""
    if not ffs.is_proper:
        raise InvalidInput("candidates are enumerated for proper systems only")
    return enumerate_classes(ffs, max_len, cap)


# ---------------------------------------------------------------------------
# W of factor systems and splittings


@dataclass(frozen=True)
class WValue:
    value: int
    witness: str
    n_candidates: int
    n_defined: int
    n_budget: int
    forward_ok: bool | None = None
    note: str = "sample minimum; true minimum within the empirical constant"


def W_of_ffs(ctx: WContext, ffs: FreeFactorSystem,
             candidates=None) -> WValue:
    """Minimum orbit phase over candidate classes carried by the system."""
    if candidates is None:
        candidates = candidate_classes(ffs, ctx.cand_len, ctx.cfg.cand_cap)
    best = None
    n_def = n_budget = 0
    fwd_ok = True
    for c in candidates:
        res = w_of(ctx, c)
        if res.status == BUDGET:
            n_budget += 1
            continue
        if not res.defined:
            continue
        n_def += 1
        if res.forward_ok is False:
            fwd_ok = False
        if best is None or (res.value, sort_key(c)) < (best[0], sort_key(best[1])):
            best = (res.value, c)
    if best is None:
        raise NotApplicable("no candidate class has a defined orbit phase")
    return WValue(best[0], best[1], len(candidates), n_def, n_budget,
                  None if ctx.m_hat is None else fwd_ok)


def W_of_splitting(ctx: WContext, s: OneEdgeSplitting,
                   candidates=None) -> WValue:
    return W_of_ffs(ctx, s.elliptic, candidates)


def estimate_M(ctx: WContext, samples) -> int:
    """Empirical constant: max in-sample phase spread and forward-entry lag.

    ``samples`` is a list of class lists; a list should either share a
    proper factor system or be a translation batch.  Sets the constant on
    the context and returns it (always at least 1).
    """
    spreads = []
    lags = []
    for group in samples:
        values = []
        for c in group:
            res = w_of(ctx, c)
            if res.defined:
                values.append(res.value)
                if res.fwd_entry is not None:
                    lags.append(res.fwd_entry + res.value)
        if len(values) >= 2:
            spreads.append(max(values) - min(values))
    if not spreads and not lags:
        raise NotApplicable("no sample group produced two defined phases")
    m_hat = max([1] + spreads + lags)
    ctx.m_hat = int(m_hat)
    ctx.notes["m_hat_samples"] = len(samples)
    return ctx.m_hat


def default_m_samples(ctx: WContext, splittings) -> list[list[str]]:
    """Sample groups: each splitting's candidates plus their translates."""
    groups = []
    for s in splittings:
        cands = candidate_classes(s.elliptic, ctx.cand_len, ctx.cfg.cand_cap)
        groups.append(list(cands))
        shifted = []
        for c in cands[: max(2, len(cands) // 4)]:
            try:
                shifted.append(translate_class(ctx, c, 1))
            except BudgetExhausted:
                continue
        if shifted:
            groups.append(list(cands[: len(shifted)]) + shifted)
    return groups


# ---------------------------------------------------------------------------
# Displacement, Lipschitz, divergence reports


def displacement_table(ctx: WContext, s: OneEdgeSplitting, radius: int,
                       raw_checks=(2, -2)) -> dict:
    """W of the splitting translated through [-radius, radius].

    Candidates are transported with the translation, making the slope an
    exact integer law; raw re-enumeration at spot translations cross-checks
    the sample minimum within the empirical constant.
    """
    import dataclasses

    ctx = dataclasses.replace(ctx, forward_checks=False)
    base = candidate_classes(s.elliptic, ctx.cand_len, ctx.cfg.cand_cap)
    if not base:
        raise NotApplicable("no candidates for the elliptic system")
    table = {}
    witnesses = {}
    for m in range(-radius, radius + 1):
        moved = []
        for c in base:
            try:
                moved.append(translate_class(ctx, c, -m))
            except BudgetExhausted:
                continue
        val = W_of_ffs(ctx, s.elliptic, candidates=moved)
        table[m] = val.value
        witnesses[m] = val.witness
    slope_exact = all(table[m] == table[0] - m for m in table)
    raw = {}
    for m in raw_checks:
        if abs(m) > radius:
            continue
        bm = ctx.bwd if m > 0 else ctx.fwd
        ffs_m = s.elliptic
        for _ in range(abs(m)):
            ffs_m = apply_basis_map_to_ffs(bm, ffs_m)
        try:
            raw_val = W_of_ffs(ctx, ffs_m)
            raw[m] = raw_val.value
        except NotApplicable:
            raw[m] = None
    m_hat = ctx.m_hat
    raw_ok = all(v is None or m_hat is None or abs(v - table[m]) <= m_hat
                 for m, v in raw.items())
    return {
        "radius": radius,
        "table": table,
        "witnesses": witnesses,
        "slope_exact": slope_exact,
        "raw_spot_checks": raw,
        "raw_within_m_hat": raw_ok,
        "m_hat": m_hat,
        "distance_rate_lower_bound": (
            None if not m_hat else 1.0 / (8.0 * m_hat)),
    }


def lipschitz_check(ctx: WContext, splitting_pairs) -> dict:
    """|W(S1) - W(S2)| against 8 * M-hat over verified adjacent pairs."""
    import dataclasses

    m_hat = ctx.require_m()
    ctx = dataclasses.replace(ctx, forward_checks=False)
    rows = []
    violations = 0
    max_ratio = 0.0
    skipped = 0
    for s1, s2 in splitting_pairs:
        try:
            w1 = W_of_splitting(ctx, s1)
            w2 = W_of_splitting(ctx, s2)
        except NotApplicable:
            skipped += 1
            continue
        delta = abs(w1.value - w2.value)
        ok = delta <= 8 * m_hat
        if not ok:
            violations += 1
        max_ratio = max(max_ratio, delta / m_hat)
        rows.append({"w1": w1.value, "w2": w2.value, "delta": delta, "ok": ok})
    return {
        "m_hat": m_hat,
        "bound": 8 * m_hat,
        "pairs": rows,
        "n_pairs": len(rows),
        "skipped": skipped,
        "violations": violations,
        "max_ratio_to_m_hat": max_ratio,
    }


def divergence_check(ctx: WContext, psi: BasisMap, t: OneEdgeSplitting,
                     l_max: int = 20, band_search: int = 10,
                     phi_range: int = 6, transport_cap: int = 20_000,
                     eval_cap: int = 2_000, orbit_cap: int = 200_000) -> dict:
    """Orbit of a splitting's system under a second automorphism.

    The table of W along psi-iterates is Unbounded on a constant unit
    drift, Bounded when some window of length band_search+1 stays within
    a band of twice the constant; the table along the context's own
    automorphism should move with exact unit slope.  Candidates whose
    transports outgrow the caps are dropped (recorded).
    """
    import dataclasses

    m_hat = ctx.require_m()
    ctx = dataclasses.replace(
        ctx, cfg=ctx.cfg.with_overrides(iterate_cap=orbit_cap),
        forward_checks=False)
    base = candidate_classes(t.elliptic, ctx.cand_len, ctx.cfg.cand_cap)
    psi_table: dict[int, int | None] = {}
    dropped: dict[int, int] = {}
    alive = {c: c for c in base}
    for l in range(l_max + 1):
        cands = [w for w in alive.values() if len(w) <= eval_cap]
        dropped[l] = len(base) - len(cands)
        try:
            psi_table[l] = W_of_ffs(ctx, t.elliptic, candidates=cands).value \
                if cands else None
        except NotApplicable:
            psi_table[l] = None
        nxt = {}
        for c, w in alive.items():
            moved = apply_map(psi, w)
            if len(moved) <= transport_cap:
                nxt[c] = cyclic_reduce(moved)
        alive = nxt
    phi_table = {}
    for k in range(phi_range + 1):
        moved = []
        for c in base:
            try:
                mc = translate_class(ctx, c, k)
            except BudgetExhausted:
                continue
            if len(mc) <= transport_cap:
                moved.append(mc)
        try:
            phi_table[k] = W_of_ffs(ctx, t.elliptic, candidates=moved).value \
                if moved else None
        except NotApplicable:
            phi_table[k] = None
    phi_slope = all(
        phi_table[k] is not None and phi_table[k] == phi_table[0] + k
        for k in phi_table)
    verdict = "Unknown"
    band_start = None
    defined = sorted(l for l, v in psi_table.items() if v is not None)
    diffs = [psi_table[defined[i + 1]] - psi_table[defined[i]]
             for i in range(len(defined) - 1)
             if defined[i + 1] == defined[i] + 1]
    if len(diffs) >= 3 and (all(d == 1 for d in diffs)
                            or all(d == -1 for d in diffs)):
        verdict = "Unbounded"
    else:
        for n0 in range(0, band_search + 1):
            window = [psi_table.get(l) for l in range(n0, n0 + band_search + 1)]
            if all(v is not None for v in window):
                if max(window) - min(window) <= 2 * m_hat:
                    verdict = "Bounded"
                    band_start = n0
                    break
    return {
        "psi_table": psi_table,
        "phi_table": phi_table,
        "phi_slope_exact": phi_slope,
        "verdict": verdict,
        "band_start": band_start,
        "band_width_bound": 2 * m_hat,
        "m_hat": m_hat,
        "dropped_candidates": dropped,
    }
