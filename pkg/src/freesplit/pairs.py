"""Marked graph pairs, one-edge splittings, faces, and distance bounds.

A pair (G, H) is a marked graph with a natural subgraph whose components
are noncontractible (H may be empty); collapsing H gives a free splitting
with as many orbits of edges as the pair's co-edge number.  One-edge
splittings are compared through their elliptic free factor systems; pairs
of higher co-edge are compared only through explicit relation maps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .automorphisms import identity_map, outer_equal
from .config import DEFAULT, Config
from .errors import InvalidInput
from .factors import FreeFactorSystem
from .graphs import (GraphMap, MarkedGraph, map_path, print_marked_graph,
                     subgraph_factor_system)
from .words import BWD, FWD, invert, slot


@dataclass(frozen=True)
class MarkedGraphPair:
    mg: MarkedGraph
    h_slots: frozenset[int]

    @property
    def graph(self):
        return self.mg.graph

    @property
    def co_edge(self) -> int:
        h = self.h_slots
        return sum(1 for cls in self.graph.natural_classes if not cls <= h)

    def complement_classes(self):
        return [cls for cls in self.graph.natural_classes
                if not cls <= self.h_slots]

    def serialize(self) -> str:
        return print_marked_graph(self.mg, None, self.h_slots)


def validate_pair(mg: MarkedGraph, h_edges) -> MarkedGraphPair:
    """Check naturality, noncontractibility and a positive co-edge number."""
    g = mg.graph
    h = frozenset(
        s if isinstance(s, int) else g.slot_of[s] for s in h_edges
    )
    for s in h:
        if not 0 <= s < g.n_edges:
            raise InvalidInput("H contains an unknown edge")
    for cls in g.natural_classes:
        if (cls & h) and not cls <= h:
            raise InvalidInput("H is not a union of natural edges")
    for comp in g.subgraph_components(h):
        if not g.component_has_cycle(comp):
            raise InvalidInput("H has a contractible component")
    pair = MarkedGraphPair(mg, h)
    if pair.co_edge < 1:
        raise InvalidInput("co-edge number must be at least 1")
    return pair


def faces(pair: MarkedGraphPair) -> list[MarkedGraphPair]:
    """All pairs (G, H') with H strictly between H and G, valid components."""
    if pair.co_edge < 2:
        raise InvalidInput("faces require co-edge at least 2")
    out = []
    complement = pair.complement_classes()
    for r in range(1, len(complement)):
        for chosen in itertools.combinations(complement, r):
            h2 = set(pair.h_slots)
            for cls in chosen:
                h2 |= cls
            try:
                out.append(validate_pair(pair.mg, h2))
            except InvalidInput:
                continue
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OneEdgeSplitting:
    pair: MarkedGraphPair
    elliptic: FreeFactorSystem = field(compare=False)

    @property
    def mg(self):
        return self.pair.mg

    def serialize(self) -> str:
        return self.pair.serialize()


def one_edge_splitting(mg: MarkedGraph, h_edges) -> OneEdgeSplitting:
    pair = validate_pair(mg, h_edges)
    return splitting_of_pair(pair)


def splitting_of_pair(pair: MarkedGraphPair) -> OneEdgeSplitting:
    if pair.co_edge != 1:
        raise InvalidInput("one-edge splittings have co-edge exactly 1")
    ell = elliptic_system(pair)
    if not ell.is_proper:
        raise InvalidInput("elliptic system of a splitting must be proper")
    return OneEdgeSplitting(pair, ell)


def elliptic_system(pair: MarkedGraphPair) -> FreeFactorSystem:
    """Factor system of the collapsed subgraph, through the marking."""
    return subgraph_factor_system(pair.mg, pair.h_slots)


def equivalent_one_edge(s1: OneEdgeSplitting, s2: OneEdgeSplitting) -> bool:
    """Equality of one-edge splittings via their elliptic systems."""
    return (s1.elliptic.ambient_rank == s2.elliptic.ambient_rank
            and s1.elliptic == s2.elliptic)


def remark_pair(pair: MarkedGraphPair, f: GraphMap) -> MarkedGraphPair:
    """The pair with marking precomposed by ``f``; same graph and subgraph."""
    return MarkedGraphPair(pair.mg.remark(f), pair.h_slots)


def remark_splitting(s: OneEdgeSplitting, f: GraphMap) -> OneEdgeSplitting:
    return splitting_of_pair(remark_pair(s.pair, f))


# ---------------------------------------------------------------------------
# The relation between pairs, verified by a map


HOLDS = "Holds"
FAILS = "FailsClause"
REL_UNKNOWN = "Unknown"


@dataclass(frozen=True)
class PairRelationWitness:
    map: GraphMap
    vertex_bijection: dict
    edge_assignments: dict  # natural class of source -> (mu, class, nu, flip)


@dataclass(frozen=True)
class RelationResult:
    status: str
    clause: int | None = None
    detail: str = ""
    witness: PairRelationWitness | None = None

    @property
    def holds(self) -> bool:
        return self.status == HOLDS


def _natural_class_path(graph, cls) -> str:
    """Edge word of a natural class: a single edge or a chain through
    valence-2 vertices, oriented from its least slot."""
    cls = sorted(cls)
    if len(cls) == 1:
        return FWD[cls[0]]
    ends = [v for v in {graph._init[s] for s in cls}
            | {graph._term[s] for s in cls} if graph.valence(v) != 2]
    if not ends:
        raise InvalidInput("circle natural class has no canonical path")
    start = min(ends)
    used = set()
    word = ""
    v = start
    while len(used) < len(cls):
        step = None
        for s in cls:
            if s in used:
                continue
            if graph._init[s] == v:
                step = (FWD[s], graph._term[s])
            elif graph._term[s] == v:
                step = (BWD[s], graph._init[s])
            if step:
                used.add(s)
                word += step[0]
                v = step[1]
                break
        if step is None:
            raise InvalidInput("natural class is not a chain")
    return word


def pair_relation_check(h: GraphMap, p1: MarkedGraphPair, p2: MarkedGraphPair,
                        budget: int = DEFAULT.outer_budget) -> RelationResult:
    """Check the defining relation between pairs along the map ``h``.

    Clause 1: h preserves markings (outer equality through the markings).
    Clause 2: h gives a bijection of natural vertices off the subgraphs.
    Clause 3: h carries H into H', and each complement natural edge maps
    to flank * edge * flank with flanks trivial or in H'.
    """
    if h.source is not p1.graph or h.target is not p2.graph:
        raise InvalidInput("map endpoints do not match the pairs")
    # The structural clauses (2) and (3) are cheap; the marking clause (1)
    # needs a conjugacy search, so it runs last.
    h1_verts = {v for s in p1.h_slots
                for v in (p1.graph._init[s], p1.graph._term[s])}
    h2_verts = {v for s in p2.h_slots
                for v in (p2.graph._init[s], p2.graph._term[s])}
    nv1 = [v for v in p1.graph.natural_vertices() if v not in h1_verts]
    nv2 = {v for v in p2.graph.natural_vertices() if v not in h2_verts}
    images = [h.vertex_map[v] for v in nv1]
    if len(set(images)) != len(images) or set(images) != nv2:
        return RelationResult(FAILS, 2, "no bijection on complement vertices")
    vertex_bij = dict(zip(nv1, images))

    h2 = p2.h_slots
    for s in p1.h_slots:
        if any(slot(ch) not in h2 for ch in h.edge_images[s]):
            return RelationResult(
                FAILS, 3, f"image of collapsed edge "
                f"{p1.graph.edge_names[s]} leaves the target subgraph")
    complement2 = {frozenset(c) for c in p2.complement_classes()}
    assignments = {}
    seen_targets = set()
    for cls in p1.complement_classes():
        word = map_path(h, _natural_class_path(p1.graph, cls))
        i, j = 0, len(word)
        while i < j and slot(word[i]) in h2:
            i += 1
        while j > i and slot(word[j - 1]) in h2:
            j -= 1
        core = word[i:j]
        if not core:
            return RelationResult(
                FAILS, 3, "complement edge image collapses into the subgraph")
        target = frozenset(slot(ch) for ch in core)
        if target not in complement2:
            return RelationResult(
                FAILS, 3, "complement edge image is not flank-edge-flank")
        expected = _natural_class_path(p2.graph, target)
        if core == expected:
            flip = False
        elif core == invert(expected):
            flip = True
        else:
            return RelationResult(
                FAILS, 3, "complement edge crossed more than once")
        if target in seen_targets:
            return RelationResult(FAILS, 3, "complement edges not bijective")
        seen_targets.add(target)
        assignments[frozenset(cls)] = (word[:i], target, word[j:], flip)
    if seen_targets != complement2:
        return RelationResult(FAILS, 3, "complement edges not bijective")

    induced = tuple(p2.mg.path_to_rose(map_path(h, w)) for w in p1.mg.marking)
    verdict, _ = outer_equal(induced, identity_map(p1.mg.rank), budget)
    if verdict == "Unknown":
        return RelationResult(REL_UNKNOWN, detail="marking check hit budget")
    if verdict != "Equal":
        return RelationResult(FAILS, 1, "marking not preserved")
    return RelationResult(
        HOLDS, witness=PairRelationWitness(h, vertex_bij, assignments))


# ---------------------------------------------------------------------------
# Adjacency by common co-edge-2 refinement, and distance bounds


@dataclass(frozen=True)
class AdjacencyResult:
    adjacent: bool
    refinement: MarkedGraphPair | None = None
    detail: str = ""


def adjacent(s1: OneEdgeSplitting, s2: OneEdgeSplitting,
             cfg: Config = DEFAULT) -> AdjacencyResult:
    """Search co-edge-2 pairs on either underlying graph whose two one-edge
    collapses are the given splittings."""
    if equivalent_one_edge(s1, s2):
        raise InvalidInput("adjacency is between inequivalent splittings")
    for host in (s1, s2):
        g = host.mg.graph
        classes = list(g.natural_classes)
        for drop in itertools.combinations(range(len(classes)), 2):
            h2 = set(range(g.n_edges))
            for idx in drop:
                h2 -= classes[idx]
            try:
                pair = validate_pair(host.mg, h2)
            except InvalidInput:
                continue
            if pair.co_edge != 2:
                continue
            try:
                fs = [splitting_of_pair(fp) for fp in faces(pair)]
            except InvalidInput:
                continue
            if len(fs) != 2:
                continue
            found = (
                (equivalent_one_edge(fs[0], s1) and equivalent_one_edge(fs[1], s2))
                or (equivalent_one_edge(fs[0], s2) and equivalent_one_edge(fs[1], s1))
            )
            if found:
                return AdjacencyResult(True, pair)
    return AdjacencyResult(False, detail="NotFoundWithinBudget")


def sibling_splittings(pair: MarkedGraphPair):
    """The one-edge collapses of a co-edge-2 pair."""
    if pair.co_edge != 2:
        raise InvalidInput("co-edge 2 required")
    return [splitting_of_pair(fp) for fp in faces(pair)]


def fs_distance_upper(start, goal, cfg: Config = DEFAULT,
                      hint_maps=(), node_cap: int = 2000):
    """BFS upper bound on the distance in the subdivided splitting complex.

    Moves are face relations (H shrinks or grows within one marked graph);
    hint maps merge vertices when the relation check holds along them.
    Returns the path length, or None when nothing is found within budget.
    """
    start_pair = start.pair if isinstance(start, OneEdgeSplitting) else start
    goal_pair = goal.pair if isinstance(goal, OneEdgeSplitting) else goal

    parent: dict[str, str] = {}

    def find(k: str) -> str:
        while parent.get(k, k) != k:
            parent[k] = parent.get(parent[k], parent[k])
            k = parent[k]
        return k

    def union(a: str, b: str):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    pairs_by_key: dict[str, MarkedGraphPair] = {}

    def register(pair: MarkedGraphPair) -> str:
        key = pair.serialize()
        if key in pairs_by_key:
            return find(key)
        pairs_by_key[key] = pair
        for h in hint_maps:
            if h.source is pair.graph:
                try:
                    other = remark_pair(pair, h)
                except InvalidInput:
                    continue
                ok = pair_relation_check(h, pair, other)
                if ok.holds:
                    okey = other.serialize()
                    pairs_by_key.setdefault(okey, other)
                    union(key, okey)
        return find(key)

    def neighbors(pair: MarkedGraphPair):
        g = pair.graph
        h_classes = [cls for cls in g.natural_classes if cls <= pair.h_slots]
        out = []
        if pair.co_edge >= 2:
            out.extend(faces(pair))
        for r in range(len(h_classes)):
            for combo in itertools.combinations(h_classes, r):
                h2 = frozenset().union(*combo) if combo else frozenset()
                try:
                    out.append(validate_pair(pair.mg, h2))
                except InvalidInput:
                    continue
        return out

    src = register(start_pair)
    dst = register(goal_pair)
    if find(src) == find(dst):
        return 0
    dist = {find(src): 0}
    frontier = [find(src)]
    while frontier and len(pairs_by_key) < node_cap:
        nxt = []
        for key in frontier:
            d = dist[key]
            if d >= cfg.bfs_depth_cap:
                continue
            reps = [p for k, p in list(pairs_by_key.items()) if find(k) == key]
            for rep in reps:
                for nb in neighbors(rep):
                    nkey = register(nb)
                    if nkey not in dist:
                        dist[nkey] = d + 1
                        nxt.append(nkey)
                    if nkey == find(dst):
                        return dist[nkey]
        frontier = nxt
    return None
