"""The classifier: verdicts with machine-checkable witnesses.

A map is Loxodromic when a lamination certifiably fills and the splitting
displacement table has exact unit slope; PeriodicVertex when an invariant
one-edge splitting is exhibited through the pair relation; BoundedOrbits
when the full lamination set jointly fills, with the explicit length-four
chain when decomposition data is supplied.  Unknown is always a legal
outcome and carries the failing stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automorphisms import compose_maps, identity_map, outer_equal
from .config import DEFAULT, Config
from .errors import InvalidInput, NotApplicable
from .fixtures import ExampleSpec
from .graphs import (GraphMap, MarkedGraph, compose, identity_graph_map,
                     is_invariant_subgraph, strata)
from .laminations import (lamination_approx, lamination_fills,
                          laminations_jointly_fill)
from .pairs import (MarkedGraphPair, pair_relation_check, remark_pair,
                    splitting_of_pair, validate_pair)
from .whitehead import FILLS, UNKNOWN
from .wproj import (build_context, default_m_samples, displacement_table,
                    estimate_M)
from .words import FWD, canonical_cyclic, slot


@dataclass(frozen=True)
class Classification:
    verdict: str  # Loxodromic | BoundedOrbits | PeriodicVertex | Unknown
    witness_kind: str | None = None
    witness: dict = field(default_factory=dict)
    stage: str | None = None  # failing stage when Unknown
    power: int = 1
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness_kind": self.witness_kind,
            "witness": self.witness,
            "stage": self.stage,
            "power": self.power,
            "notes": self.notes,
        }


def rank2_classify(matrix) -> str:
    """Trace test for rank two: loxodromic iff |trace| exceeds 2."""
    if (len(matrix) != 2 or any(len(r) != 2 for r in matrix)
            or any(not isinstance(v, int) for r in matrix for v in r)):
        raise InvalidInput("a 2x2 integer matrix is required")
    det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    if det not in (1, -1):
        raise InvalidInput("determinant must be +1 or -1")
    trace = matrix[0][0] + matrix[1][1]
    return "Loxodromic" if abs(trace) > 2 else "NotLoxodromic"


def _power_map(f: GraphMap, p: int) -> GraphMap:
    out = identity_graph_map(f.source)
    for _ in range(p):
        out = compose(f, out)
    return out


def _inner_power(mg: MarkedGraph, f: GraphMap, cfg: Config):
    """Least p with the p-th power inner, or None; cheap cyclic screen first."""
    basis = identity_map(mg.rank)
    step = mg.induced_rose_map(f)
    cur = basis
    for p in range(1, cfg.power_cap + 1):
        cur = compose_maps(step, cur)
        if max(len(w) for w in cur) > 10_000:
            return None
        if all(canonical_cyclic(cur[i]) == canonical_cyclic(FWD[i])
               for i in range(mg.rank)):
            verdict, _ = outer_equal(cur, basis, cfg.outer_budget)
            if verdict == "Equal":
                return p
    return None


def _rotationless_power(f: GraphMap, cfg: Config) -> int:
    """Least power killing the finite permutation actions of the map."""
    import math

    periods = [1]
    g = f.source
    for v in g.vertices:
        seen = {v: 0}
        cur = v
        for step in range(1, len(g.vertices) + 1):
            cur = f.vertex_map[cur]
            if cur in seen:
                if cur == v:
                    periods.append(step)
                break
            seen[cur] = step
    single = {s: f.edge_images[s] for s in range(g.n_edges)
              if len(f.edge_images[s]) == 1}
    for s in single:
        # walk oriented letters so a reversal counts as period two
        seen = {FWD[s]: 0}
        cur = FWD[s]
        for step in range(1, 2 * len(single) + 1):
            nxt = single.get(slot(cur))
            if nxt is None:
                break
            from .words import invert as _inv, is_fwd as _is_fwd

            cur = nxt if _is_fwd(cur) else _inv(nxt)
            if cur in seen:
                if cur == FWD[s]:
                    periods.append(step)
                break
            seen[cur] = step
    p = 1
    for q in periods:
        p = p * q // math.gcd(p, q)
    return p if p <= cfg.power_cap else 1


def periodic_vertex_witness(mg: MarkedGraph, f: GraphMap,
                            cfg: Config = DEFAULT):
    """An invariant one-edge splitting with a verified relation map.

    Inner maps fix every splitting (witnessed by the identity relation
    map); otherwise the coordinate one-edge pairs are searched with the
    map itself.  NotApplicable when nothing is exhibited.
    """
    induced = mg.induced_rose_map(f)
    verdict, _ = outer_equal(induced, identity_map(mg.rank), cfg.outer_budget)
    candidates = []
    g = mg.graph
    for cls in g.natural_classes:
        h = frozenset(range(g.n_edges)) - cls
        try:
            candidates.append(validate_pair(mg, h))
        except InvalidInput:
            continue
    if verdict == "Equal":
        for pair in candidates:
            target = remark_pair(pair, f)
            rel = pair_relation_check(identity_graph_map(g), pair, target,
                                      cfg.outer_budget)
            if rel.holds:
                return splitting_of_pair(pair), rel
        raise NotApplicable("inner map but no coordinate pair verified")
    for pair in candidates:
        target = remark_pair(pair, f)
        rel = pair_relation_check(f, pair, target, cfg.outer_budget)
        if rel.holds:
            return splitting_of_pair(pair), rel
    raise NotApplicable("no invariant one-edge splitting was exhibited")


@dataclass(frozen=True)
class BoundedChain:
    vertices: tuple[str, ...]  # five pair serializations
    arrows: tuple[dict, ...]
    k: int

    def to_json(self) -> dict:
        return {"k": self.k, "vertices": list(self.vertices),
                "arrows": [dict(a) for a in self.arrows]}


def bounded_path_witness(spec: ExampleSpec, k: int,
                         cfg: Config = DEFAULT) -> BoundedChain:
    """The verified length-four chain between a splitting and its image.

    Re-verifies the decomposition clauses, builds the two restricted maps,
    checks the composition law edgewise, and certifies every arrow of the
    five-vertex chain as a face relation or a verified equality.
    """
    if not spec.decomposition:
        raise InvalidInput("fixture carries no decomposition data")
    if k < 0:
        raise InvalidInput("k must be nonnegative")
    mg, f = spec.mg, spec.f
    g = mg.graph
    dec = spec.decomposition
    k1, k2 = frozenset(dec["K1"]), frozenset(dec["K2"])
    j2, j3 = frozenset(dec["J2"]), frozenset(dec["J3"])

    if k1 | k2 != frozenset(range(g.n_edges)):
        raise InvalidInput("decomposition clause 1: subgraphs do not cover")
    frontier = {v for s in k1 for v in (g._init[s], g._term[s])} & \
               {v for s in set(range(g.n_edges)) - k1
                for v in (g._init[s], g._term[s])}
    for comp in g.subgraph_components(k1):
        if not g.component_has_cycle(comp):
            raise InvalidInput("decomposition clause 2: first subgraph not core")
    if any(f.vertex_map[v] != v for v in frontier):
        raise InvalidInput("decomposition clause 2: frontier vertex moves")
    for comp in g.subgraph_components(k2):
        if not g.component_has_cycle(comp):
            raise InvalidInput(
                "decomposition clause 3: contractible component")
    if not (is_invariant_subgraph(f, j2) and j2 <= k2):
        raise InvalidInput("decomposition clause 4: inner core not invariant")
    for s in k2 - j2:
        img = f.edge_images[s]
        if img == FWD[s]:
            continue
        if not (img.startswith(FWD[s])
                and img[1:] and all(slot(ch) in j2 for ch in img[1:])):
            raise InvalidInput(
                "decomposition clause 4: edge is not a twist into the core")
    if not j3 <= (k1 & j2):
        raise InvalidInput("inner subgraph must sit inside the intersection")

    f1 = GraphMap(g, g, dict(f.vertex_map), tuple(
        f.edge_images[s] if s in k1 else FWD[s] for s in range(g.n_edges)))
    f2 = GraphMap(g, g, dict(f.vertex_map), tuple(
        f.edge_images[s] if s not in k1 else FWD[s] for s in range(g.n_edges)))
    if compose(f2, f1).edge_images != f.edge_images:
        raise InvalidInput("restricted maps do not compose to the map")
    f1k, f2k, fk = (_power_map(m, k) for m in (f1, f2, f))
    if compose(f2k, f1k).edge_images != fk.edge_images:
        raise InvalidInput("restricted powers do not compose to the power")

    p_j3 = validate_pair(mg, j3)
    p_k1 = validate_pair(mg, k1)
    p_j2 = validate_pair(mg, j2)
    v1 = p_j3
    v2 = p_k1
    v2b = remark_pair(p_k1, f1k)
    v3 = remark_pair(p_j3, f1k)
    v4 = remark_pair(p_j2, f1k)
    v4b = remark_pair(p_j2, fk)
    v5 = remark_pair(p_j3, fk)

    rel_k1 = pair_relation_check(f1k, v2, v2b, cfg.outer_budget)
    if not rel_k1.holds:
        raise InvalidInput(f"chain equality at the core pair fails: {rel_k1.detail}")
    rel_j2 = pair_relation_check(f2k, v4, v4b, cfg.outer_budget)
    if not rel_j2.holds:
        raise InvalidInput(f"chain equality at the inner pair fails: {rel_j2.detail}")

    def face(a: MarkedGraphPair, b: MarkedGraphPair) -> bool:
        return (a.mg.marking == b.mg.marking and a.h_slots < b.h_slots)

    arrows = (
        {"move": "collapse", "from": 0, "to": 1, "ok": face(v1, v2)},
        {"move": "equality-witness", "at": 1, "via": f"f1^{k}",
         "ok": rel_k1.holds},
        {"move": "collapse", "from": 2, "to": 1, "ok": face(v3, v2b)},
        {"move": "collapse", "from": 2, "to": 3, "ok": face(v3, v4)},
        {"move": "equality-witness", "at": 3, "via": f"f2^{k}",
         "ok": rel_j2.holds},
        {"move": "collapse", "from": 4, "to": 3, "ok": face(v5, v4b)},
    )
    if not all(a["ok"] for a in arrows):
        raise InvalidInput("a chain arrow failed verification")
    return BoundedChain(
        vertices=(v1.serialize(), v2.serialize(), v3.serialize(),
                  v4.serialize(), v5.serialize()),
        arrows=arrows, k=k)


def classify(spec: ExampleSpec, cfg: Config = DEFAULT, power: int | None = None,
             radius: int = 4, chain_k: int = 1) -> Classification:
    """Run the full pipeline on a loaded example."""
    if spec.stub:
        raise InvalidInput("stub fixtures cannot be classified")
    mg, f = spec.mg, spec.f
    notes: dict = {"budgets": {"iterate_cap": cfg.iterate_cap,
                               "outer_budget": cfg.outer_budget,
                               "whitehead_max_moves": cfg.whitehead_max_moves}}

    p_inner = _inner_power(mg, f, cfg)
    if p_inner is not None:
        fp = _power_map(f, p_inner)
        try:
            s, rel = periodic_vertex_witness(mg, fp, cfg)
        except NotApplicable:
            return Classification("Unknown", stage="periodic_vertex_witness",
                                  power=p_inner, notes=notes)
        return Classification(
            "PeriodicVertex", "invariant-splitting",
            {"splitting": s.serialize(), "relation": rel.status,
             "inner_power": p_inner},
            power=p_inner, notes=notes)

    p = power if power is not None else _rotationless_power(f, cfg)
    fp = _power_map(f, p) if p > 1 else f
    notes["power"] = p

    filt = strata(fp, cfg)
    eg = filt.eg_strata()
    lams = []
    verdicts = []
    for idx in eg:
        lam = lamination_approx(mg, fp, idx, cfg, filt)
        lams.append(lam)
        verdicts.append(lamination_fills(lam, cfg))
    notes["eg_strata"] = len(eg)
    notes["lamination_verdicts"] = [v.kind for v in verdicts]

    if any(v.kind == FILLS for v in verdicts):
        return _loxodromic_witness(spec, mg, fp, cfg, radius, p, notes)

    if any(v.kind == UNKNOWN for v in verdicts):
        return Classification("Unknown", stage="lamination_fills",
                              power=p, notes=notes)

    if lams:
        joint = laminations_jointly_fill(lams, cfg)
        notes["joint_verdict"] = joint.kind
    else:
        joint = None  # no exponential strata: nothing to fill

    if joint is not None and joint.kind == UNKNOWN:
        return Classification("Unknown", stage="laminations_jointly_fill",
                              power=p, notes=notes)

    if joint is not None and joint.kind == FILLS:
        witness: dict = {"kind": "by-theorem"}
        kind = "by-theorem"
        if spec.decomposition:
            chain = bounded_path_witness(spec, chain_k, cfg)
            witness = chain.to_json()
            kind = "length-4-chain"
        return Classification("BoundedOrbits", kind, witness, power=p,
                              notes=notes)

    try:
        s, rel = periodic_vertex_witness(mg, fp, cfg)
    except NotApplicable:
        return Classification("Unknown", stage="periodic_vertex_witness",
                              power=p, notes=notes)
    return Classification(
        "PeriodicVertex", "invariant-splitting",
        {"splitting": s.serialize(), "relation": rel.status},
        power=p, notes=notes)


def _coordinate_splittings(mg: MarkedGraph):
    g = mg.graph
    out = []
    for cls in g.natural_classes:
        h = frozenset(range(g.n_edges)) - cls
        try:
            out.append(splitting_of_pair(validate_pair(mg, h)))
        except InvalidInput:
            continue
    return out


def _loxodromic_witness(spec, mg, fp, cfg, radius, p, notes) -> Classification:
    try:
        ctx = build_context(mg, fp, spec.maps.get("f_inv"), cfg)
    except InvalidInput as exc:
        return Classification("Unknown", stage=f"build_context: {exc}",
                              power=p, notes=notes)
    splittings = _coordinate_splittings(mg)
    if not splittings:
        return Classification("Unknown", stage="no coordinate splitting",
                              power=p, notes=notes)
    estimate_M(ctx, default_m_samples(ctx, splittings[:2]))
    for s in splittings:
        try:
            table = displacement_table(ctx, s, radius)
        except NotApplicable:
            continue
        if table["slope_exact"] and table["raw_within_m_hat"]:
            return Classification(
                "Loxodromic", "displacement-table",
                {"splitting": s.serialize(), "table": table["table"],
                 "m_hat": ctx.m_hat, "slope_exact": True,
                 "raw_spot_checks": table["raw_spot_checks"],
                 "distance_rate_lower_bound":
                     table["distance_rate_lower_bound"]},
                power=p, notes=notes)
    return Classification("Unknown", stage="displacement witness",
                          power=p, notes=notes)
