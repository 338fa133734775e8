"""Marked graphs, graph maps, iteration, strata, transition matrices.

Edges of a graph are totally ordered by name; oriented edges are single
characters of the internal alphabet (slot = rank of the edge name), so
edge paths are strings and the word machinery of :mod:`words` applies
directly.  A marking is a homotopy equivalence from the rank-n rose,
stored as basis-letter loops together with a homotopy-inverse edge
assignment over the abstract basis alphabet.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from . import words
from .automorphisms import BasisMap, apply_map, identity_map, invert_map, outer_equal
from .config import DEFAULT, Config
from .errors import BudgetExhausted, InvalidInput, NumericalTolerance
from .words import BWD, FWD, invert, is_fwd, reduce_word, slot


class Graph:
    """Finite graph with named, totally ordered edges."""

    def __init__(self, vertices, edges):
        self.vertices = tuple(sorted(vertices))
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidInput("duplicate vertex names")
        edges = sorted(edges)
        names = [e[0] for e in edges]
        if len(set(names)) != len(names):
            raise InvalidInput("duplicate edge names")
        if len(names) > words.MAX_SLOTS:
            raise InvalidInput(f"too many edges (max {words.MAX_SLOTS})")
        vset = set(self.vertices)
        for name, a, b in edges:
            if a not in vset or b not in vset:
                raise InvalidInput(f"edge {name} has unknown endpoint")
            if "'" in name or any(c.isspace() for c in name):
                raise InvalidInput(f"bad edge name {name!r}")
        self.edge_names = tuple(names)
        self._init = tuple(e[1] for e in edges)
        self._term = tuple(e[2] for e in edges)
        self.slot_of = {n: i for i, n in enumerate(names)}

    @property
    def n_edges(self) -> int:
        return len(self.edge_names)

    def fwd_char(self, name: str) -> str:
        return FWD[self.slot_of[name]]

    def init_of(self, ch: str) -> str:
        s = slot(ch)
        return self._init[s] if is_fwd(ch) else self._term[s]

    def term_of(self, ch: str) -> str:
        s = slot(ch)
        return self._term[s] if is_fwd(ch) else self._init[s]

    def path_valid(self, word: str) -> bool:
        return all(
            self.term_of(word[i]) == self.init_of(word[i + 1])
            for i in range(len(word) - 1)
        )

    def check_path(self, word: str) -> str:
        if not self.path_valid(word):
            raise InvalidInput("edge sequence is not endpoint-compatible")
        return word

    def is_closed(self, word: str) -> bool:
        return not word or self.init_of(word[0]) == self.term_of(word[-1])

    def valence(self, v: str) -> int:
        return sum((a == v) + (b == v) for a, b in zip(self._init, self._term))

    def parse_path(self, tokens) -> str:
        if isinstance(tokens, str):
            tokens = tokens.split()
        return self.check_path(words.parse_word(tokens, self.slot_of))

    def print_path(self, word: str) -> str:
        return words.print_word(word, list(self.edge_names))

    @cached_property
    def natural_classes(self) -> tuple[frozenset[int], ...]:
        """Partition of edge slots into natural edges (chains through
        valence-2 vertices).  A circle component forms one class."""
        parent = list(range(self.n_edges))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for v in self.vertices:
            if self.valence(v) != 2:
                continue
            incident = [s for s in range(self.n_edges)
                        if self._init[s] == v or self._term[s] == v]
            for s in incident[1:]:
                parent[find(incident[0])] = find(s)
        groups: dict[int, set[int]] = {}
        for s in range(self.n_edges):
            groups.setdefault(find(s), set()).add(s)
        return tuple(sorted((frozenset(g) for g in groups.values()), key=min))

    def natural_vertices(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if self.valence(v) != 2)

    def subgraph_components(self, slots) -> list[set[int]]:
        """Connected components of the subgraph spanned by ``slots``."""
        slots = set(slots)
        comp: list[set[int]] = []
        remaining = set(slots)
        while remaining:
            seed = min(remaining)
            stack = [seed]
            cur = set()
            verts: set[str] = set()
            while stack:
                s = stack.pop()
                if s in cur:
                    continue
                cur.add(s)
                verts.update((self._init[s], self._term[s]))
                stack.extend(
                    t for t in remaining - cur
                    if self._init[t] in verts or self._term[t] in verts
                )
            # grow until vertex-stable
            changed = True
            while changed:
                changed = False
                for t in list(remaining - cur):
                    if self._init[t] in verts or self._term[t] in verts:
                        cur.add(t)
                        verts.update((self._init[t], self._term[t]))
                        changed = True
            comp.append(cur)
            remaining -= cur
        return comp

    def component_has_cycle(self, comp_slots) -> bool:
        verts = set()
        for s in comp_slots:
            verts.add(self._init[s])
            verts.add(self._term[s])
        return len(comp_slots) >= len(verts)  # E >= V means a cycle

    def spanning_tree(self, base: str) -> dict[str, str]:
        """BFS tree: vertex -> reduced edge path from ``base``."""
        paths = {base: ""}
        frontier = [base]
        while frontier:
            nxt = []
            for v in frontier:
                for s in range(self.n_edges):
                    for ch in (FWD[s], BWD[s]):
                        if self.init_of(ch) == v:
                            w = self.term_of(ch)
                            if w not in paths:
                                paths[w] = paths[v] + ch
                                nxt.append(w)
            frontier = nxt
        if len(paths) != len(self.vertices):
            raise InvalidInput("graph is not connected")
        return paths


def rose(rank: int, names=None) -> Graph:
    if names is None:
        names = [f"x{i + 1}" for i in range(rank)]
    return Graph(["v"], [(n, "v", "v") for n in names])


# ---------------------------------------------------------------------------


class MarkedGraph:
    """Graph plus a marking from the rank-n rose.

    ``marking[i]`` is the image loop (at ``base``) of basis letter i;
    ``marking_inv[s]`` is an abstract basis word for edge slot s, chosen so
    that marking_inv after marking induces an inner automorphism.
    """

    def __init__(self, graph: Graph, base: str, marking, marking_inv=None,
                 budget: int = DEFAULT.outer_budget, inv_factory=None):
        self.graph = graph
        self.base = base
        self.marking = tuple(reduce_word(w) for w in marking)
        self.rank = len(self.marking)
        for v in graph.vertices:
            if graph.valence(v) < 2:
                raise InvalidInput(f"vertex {v} has valence < 2")
        for w in self.marking:
            graph.check_path(w)
            if w and not (graph.init_of(w[0]) == base == graph.term_of(w[-1])):
                raise InvalidInput("marking images must be loops at the base")
        euler_rank = graph.n_edges - len(graph.vertices) + 1
        if euler_rank != self.rank:
            raise InvalidInput("marking rank does not match graph rank")
        self._budget = budget
        self._inv_factory = inv_factory
        self._marking_inv = tuple(marking_inv) if marking_inv is not None else None

    @property
    def marking_inv(self):
        """Edge words over the abstract basis; computed on first use."""
        if self._marking_inv is None:
            if self._inv_factory is not None:
                self._marking_inv = tuple(self._inv_factory())
            else:
                self._marking_inv = tuple(
                    self._compute_marking_inverse(self._budget))
        return self._marking_inv

    def _compute_marking_inverse(self, budget: int):
        g = self.graph
        tree = g.spanning_tree(self.base)
        tree_chars = {w[-1] for w in tree.values() if w}
        tree_slots = {slot(ch) for ch in tree_chars}
        cotree = [s for s in range(g.n_edges) if s not in tree_slots]
        if len(cotree) != self.rank:
            raise InvalidInput("graph rank does not match marking rank")
        loop_index = {s: i for i, s in enumerate(cotree)}

        def to_loops(path: str) -> str:
            # rewrite a loop at base as an abstract word in the cotree loops
            out = []
            for ch in path:
                s = slot(ch)
                if s in tree_slots:
                    continue
                out.append(FWD[loop_index[s]] if is_fwd(ch) else BWD[loop_index[s]])
            return reduce_word("".join(out))

        rho_hat: BasisMap = tuple(to_loops(w) for w in self.marking)
        rho_hat_inv = invert_map(rho_hat, budget)
        inv = [""] * g.n_edges
        for s in cotree:
            inv[s] = rho_hat_inv[loop_index[s]]
        return inv

    def path_to_rose(self, path: str) -> str:
        """Abstract basis word of a path, via the stored marking inverse."""
        return reduce_word("".join(
            self.marking_inv[slot(ch)] if is_fwd(ch)
            else invert(self.marking_inv[slot(ch)])
            for ch in path
        ))

    def rose_to_path(self, word: str) -> str:
        return reduce_word("".join(
            self.marking[slot(ch)] if is_fwd(ch) else invert(self.marking[slot(ch)])
            for ch in word
        ))

    def circuit_to_rose_class(self, circuit: str) -> str:
        return words.canonical_cyclic(self.path_to_rose(circuit))

    def validate_marking(self, budget: int = DEFAULT.outer_budget) -> bool:
        comp = tuple(self.path_to_rose(w) for w in self.marking)
        verdict, _ = outer_equal(comp, identity_map(self.rank), budget)
        return verdict == "Equal"

    def remark(self, f: "GraphMap") -> "MarkedGraph":
        """New marked graph with marking precomposed with ``f``.

        The homotopy-inverse edge words are set up lazily: they need a
        Nielsen inversion of the induced automorphism, which most remarked
        graphs (e.g. search nodes compared only structurally) never use.
        """
        if f.source is not self.graph or f.target is not self.graph:
            raise InvalidInput("remarking requires an endomorphism of the graph")
        new_marking = tuple(map_path(f, w) for w in self.marking)

        def factory():
            induced = self.induced_rose_map(f)
            inv = invert_map(induced)
            return tuple(apply_map(inv, w) for w in self.marking_inv)

        return MarkedGraph(self.graph, f.vertex_map[self.base], new_marking,
                           inv_factory=factory)

    def induced_rose_map(self, f: "GraphMap") -> BasisMap:
        """Basis map of the outer automorphism represented by ``f``."""
        if f.source is not self.graph or f.target is not self.graph:
            raise InvalidInput("induced map requires an endomorphism")
        return tuple(self.path_to_rose(map_path(f, w)) for w in self.marking)


def subgraph_factor_system(mg: MarkedGraph, edge_slots):
    """Free factor system of the noncontractible components of a subgraph,
    transported to the abstract basis through the marking."""
    from .factors import FreeFactorSystem, _dedupe, fold

    g = mg.graph
    comps = []
    for comp in g.subgraph_components(edge_slots):
        if not g.component_has_cycle(comp):
            continue
        loops = _component_loops(g, comp)
        gens = [mg.path_to_rose(w) for w in loops]
        gens = [w for w in gens if w]
        if gens:
            comps.append(fold(mg.rank, gens))
    return FreeFactorSystem(mg.rank, _dedupe(tuple(comps)))


def _component_loops(g: Graph, comp_slots) -> list[str]:
    """Free basis loops of a subgraph component via a spanning tree."""
    comp_slots = sorted(comp_slots)
    verts = set()
    for s in comp_slots:
        verts.add(g._init[s])
        verts.add(g._term[s])
    root = min(verts)
    tree = {root: ""}
    queue = [root]
    tree_slots = set()
    while queue:
        v = queue.pop(0)
        for s in comp_slots:
            for ch in (FWD[s], BWD[s]):
                if g.init_of(ch) == v and g.term_of(ch) not in tree:
                    tree[g.term_of(ch)] = tree[v] + ch
                    tree_slots.add(s)
                    queue.append(g.term_of(ch))
    loops = []
    for s in comp_slots:
        if s in tree_slots:
            continue
        loops.append(reduce_word(
            tree[g._init[s]] + FWD[s] + invert(tree[g._term[s]])))
    return loops


def close_path(mg: MarkedGraph, path: str) -> str:
    """Close a path into a circuit along spanning-tree arcs."""
    g = mg.graph
    if g.is_closed(path):
        return path
    tree = g.spanning_tree(mg.base)
    back = invert(tree[g.term_of(path[-1])]) + tree[g.init_of(path[0])]
    return reduce_word(path + back)


def outer_equal_maps(mg: MarkedGraph, f: GraphMap, g: GraphMap,
                     budget: int = DEFAULT.outer_budget):
    """Decide whether two endomorphisms represent the same outer class."""
    return outer_equal(mg.induced_rose_map(f), mg.induced_rose_map(g), budget)


def invert_rose_map(mg: MarkedGraph, f: GraphMap,
                    budget: int = DEFAULT.outer_budget) -> GraphMap:
    """A graph map representing the inverse outer automorphism."""
    bm = invert_map(mg.induced_rose_map(f), budget)
    return realize_rose_endo(mg, bm)


def realize_rose_endo(mg: MarkedGraph, bm: BasisMap) -> GraphMap:
    """Graph self-map inducing the given outer automorphism.

    All vertices go to the marking base; edges map to marking realizations
    of their basis expressions.
    """
    g = mg.graph
    images = []
    for s in range(g.n_edges):
        word = mg.marking_inv[s]
        images.append(mg.rose_to_path(apply_map(bm, word)))
    vmap = {v: mg.base for v in g.vertices}
    return GraphMap(g, g, vmap, tuple(images))


def marked_rose(rank: int, names=None) -> MarkedGraph:
    names = list(names) if names else [f"x{i + 1}" for i in range(rank)]
    g = rose(rank, names)
    marking = [FWD[g.slot_of[n]] for n in names]
    inv = [""] * rank
    for i, n in enumerate(names):
        inv[g.slot_of[n]] = FWD[i]
    return MarkedGraph(g, "v", marking, marking_inv=inv)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphMap:
    """Homotopy equivalence given by vertex images and edge-path images."""

    source: Graph
    target: Graph
    vertex_map: dict
    edge_images: tuple[str, ...]  # image of each forward slot, reduced

    def __post_init__(self):
        if len(self.edge_images) != self.source.n_edges:
            raise InvalidInput("one image per edge required")
        for v in self.source.vertices:
            if self.vertex_map.get(v) not in self.target.vertices:
                raise InvalidInput(f"vertex {v} has no valid image")
        for s, img in enumerate(self.edge_images):
            if img != reduce_word(img):
                raise InvalidInput("edge images must be reduced")
            self.target.check_path(img)
            a = self.vertex_map[self.source._init[s]]
            b = self.vertex_map[self.source._term[s]]
            if img:
                if self.target.init_of(img[0]) != a or self.target.term_of(img[-1]) != b:
                    raise InvalidInput(
                        f"image of edge {self.source.edge_names[s]} has wrong endpoints")
            elif a != b:
                raise InvalidInput(
                    f"trivial image of edge {self.source.edge_names[s]} "
                    "needs equal vertex images")
        object.__setattr__(self, "img", self._image_table())

    def _image_table(self):
        table = {}
        for s, w in enumerate(self.edge_images):
            table[FWD[s]] = w
            table[BWD[s]] = invert(w)
        return table

    def is_endo(self) -> bool:
        return self.source is self.target

    def image_of(self, name_or_char: str) -> str:
        ch = name_or_char if len(name_or_char) == 1 and name_or_char in self.img \
            else FWD[self.source.slot_of[name_or_char]]
        return self.img[ch]


def identity_graph_map(g: Graph) -> GraphMap:
    return GraphMap(g, g, {v: v for v in g.vertices},
                    tuple(FWD[s] for s in range(g.n_edges)))


def graph_map(source: Graph, target: Graph, vertex_map, images_by_name) -> GraphMap:
    imgs = []
    for name in source.edge_names:
        spec = images_by_name[name]
        word = target.parse_path(spec) if isinstance(spec, (str, list)) else spec
        imgs.append(reduce_word(word))
    return GraphMap(source, target, dict(vertex_map), tuple(imgs))


def rose_map(mg: MarkedGraph, images_by_name) -> GraphMap:
    """Endomorphism of a rose-like graph, images given as token strings."""
    g = mg.graph
    return graph_map(g, g, {v: v for v in g.vertices}, images_by_name)


def basis_map_on_rose(mg: MarkedGraph, bm: BasisMap) -> GraphMap:
    """Realize an abstract basis map as a graph map on a marked rose."""
    g = mg.graph
    images = tuple(mg.rose_to_path(w) for w in bm)
    return GraphMap(g, g, {v: v for v in g.vertices}, images)


# ---------------------------------------------------------------------------
# Path calculus


def tighten(graph: Graph, path: str) -> str:
    """Reduced form of an endpoint-compatible edge path."""
    graph.check_path(path)
    return reduce_word(path)


def map_path(f: GraphMap, path: str) -> str:
    """Tightened image of a path (the # operation)."""
    f.source.check_path(path)
    img = f.img
    return reduce_word("".join(img[ch] for ch in path))


def canonical_circuit(graph: Graph, path: str) -> str:
    if not graph.is_closed(path):
        raise InvalidInput("not a closed path")
    graph.check_path(path)
    return words.canonical_cyclic(path)


def map_circuit(f: GraphMap, circuit: str) -> str:
    """Image of a cyclic class, cyclically reduced and canonicalized."""
    if not f.source.is_closed(circuit):
        raise InvalidInput("not a closed path")
    f.source.check_path(circuit)
    img = f.img
    return words.canonical_cyclic("".join(img[ch] for ch in circuit))


def iterate(f: GraphMap, path: str, k: int, cap: int = DEFAULT.iterate_cap,
            cyclic: bool = False) -> str:
    """k-fold tightened image, with a letter cap against exponential growth."""
    if k < 0:
        raise InvalidInput("nonnegative iteration count required")
    if not f.is_endo():
        raise InvalidInput("iteration requires an endomorphism")
    cur = words.canonical_cyclic(path) if cyclic else reduce_word(path)
    for _ in range(k):
        cur = map_circuit(f, cur) if cyclic else map_path(f, cur)
        if len(cur) > cap:
            raise BudgetExhausted(f"iterate exceeded {cap} letters")
    return cur


def compose(f: GraphMap, g: GraphMap) -> GraphMap:
    """Composition f after g."""
    if g.target is not f.source:
        raise InvalidInput("target of inner map must be source of outer map")
    vmap = {v: f.vertex_map[g.vertex_map[v]] for v in g.source.vertices}
    images = tuple(map_path(f, w) for w in g.edge_images)
    return GraphMap(g.source, f.target, vmap, images)


def is_nielsen(f: GraphMap, path: str) -> bool:
    """True when the tightened image of ``path`` equals ``path``."""
    if not f.is_endo():
        raise InvalidInput("Nielsen check requires an endomorphism")
    path = reduce_word(path)
    f.source.check_path(path)
    if path:
        a, b = f.source.init_of(path[0]), f.source.term_of(path[-1])
        if f.vertex_map[a] != a or f.vertex_map[b] != b:
            raise InvalidInput("endpoints of the path are not fixed")
    return map_path(f, path) == path


def is_invariant_subgraph(f: GraphMap, edge_slots) -> bool:
    keep = set(edge_slots)
    for s in keep:
        if any(slot(ch) not in keep for ch in f.edge_images[s]):
            return False
    return True


# ---------------------------------------------------------------------------
# Transition matrices, strata


@dataclass(frozen=True)
class TransitionMatrix:
    edge_names: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]  # [e][e'] = crossings of e by image of e'

    def block(self, slots) -> "TransitionMatrix":
        slots = sorted(slots)
        names = tuple(self.edge_names[s] for s in slots)
        m = tuple(tuple(self.matrix[i][j] for j in slots) for i in slots)
        return TransitionMatrix(names, m)


def transition_matrix(f: GraphMap) -> TransitionMatrix:
    if not f.is_endo():
        raise InvalidInput("transition matrix requires an endomorphism")
    n = f.source.n_edges
    cols = [[words.count_crossings(f.edge_images[j], i) for i in range(n)]
            for j in range(n)]
    return TransitionMatrix(
        f.source.edge_names,
        tuple(tuple(cols[j][i] for j in range(n)) for i in range(n)),
    )


def pf_eigenvalue(tm: TransitionMatrix, cfg: Config = DEFAULT) -> float:
    """Perron root of an irreducible nonnegative integer block.

    Power iteration on M + I with Collatz-Wielandt bounds; the shift makes
    the iteration primitive so permutation blocks converge too.
    """
    m = tm.matrix
    n = len(m)
    if n == 0:
        raise InvalidInput("empty block")
    if n == 1:
        return float(m[0][0])
    v = [1.0] * n
    for _ in range(cfg.pf_iter_cap):
        w = [sum(m[i][j] * v[j] for j in range(n)) + v[i] for i in range(n)]
        ratios = [w[i] / v[i] for i in range(n)]
        lo, hi = min(ratios), max(ratios)
        scale = max(w)
        v = [x / scale for x in w]
        if hi - lo <= cfg.pf_tol * 1e-2:
            return (lo + hi) / 2.0 - 1.0
    raise NumericalTolerance("power iteration did not converge")


@dataclass(frozen=True)
class Stratum:
    slots: frozenset[int]
    label: str  # EG | NEG | FIXED | ZERO


@dataclass(frozen=True)
class Filtration:
    graph: Graph
    strata: tuple[Stratum, ...]

    def subgraph_upto(self, i: int) -> frozenset[int]:
        got: set[int] = set()
        for st in self.strata[: i + 1]:
            got |= st.slots
        return frozenset(got)

    def eg_strata(self):
        return [i for i, st in enumerate(self.strata) if st.label == "EG"]


def strata(f: GraphMap, cfg: Config = DEFAULT) -> Filtration:
    """Invariant filtration from the condensation of the edge-transition
    digraph, with growth labels read off the diagonal blocks."""
    if not f.is_endo():
        raise InvalidInput("strata requires an endomorphism")
    tm = transition_matrix(f)
    n = f.source.n_edges
    succ = [set() for _ in range(n)]  # e maps over e'
    for e in range(n):
        for ep in range(n):
            if tm.matrix[ep][e]:
                succ[e].add(ep)
    comps = _scc(succ)
    comp_of = {}
    for idx, comp in enumerate(comps):
        for s in comp:
            comp_of[s] = idx
    deps = [set() for _ in comps]  # component -> components it maps over
    for e in range(n):
        for ep in succ[e]:
            if comp_of[e] != comp_of[ep]:
                deps[comp_of[e]].add(comp_of[ep])
    order = []
    placed = set()
    while len(order) < len(comps):
        ready = [i for i in range(len(comps))
                 if i not in placed and deps[i] <= placed]
        nxt = min(ready, key=lambda i: min(comps[i]))
        order.append(nxt)
        placed.add(nxt)
    out = []
    for idx in order:
        slots_ = frozenset(comps[idx])
        block = tm.block(slots_)
        if len(slots_) == 1:
            (s,) = slots_
            if block.matrix[0][0] == 0:
                out.append(Stratum(slots_, "ZERO"))
                continue
        rho = pf_eigenvalue(block, cfg)
        if rho > cfg.eg_threshold:
            label = "EG"
        elif all(f.edge_images[s] == FWD[s] for s in slots_):
            label = "FIXED"
        else:
            label = "NEG"
        out.append(Stratum(slots_, label))
    # Pointwise-fixed components of the transition digraph commute with the
    # filtration, so runs of FIXED strata are lumped into one.
    merged: list[Stratum] = []
    for st in out:
        if merged and st.label == "FIXED" and merged[-1].label == "FIXED":
            merged[-1] = Stratum(merged[-1].slots | st.slots, "FIXED")
        else:
            merged.append(st)
    return Filtration(f.source, tuple(merged))


def _scc(succ) -> list[set[int]]:
    """Tarjan strongly connected components, iterative, deterministic."""
    n = len(succ)
    index = [0] * n
    low = [0] * n
    on_stack = [False] * n
    visited = [False] * n
    stack: list[int] = []
    comps: list[set[int]] = []
    counter = [1]
    for root in range(n):
        if visited[root]:
            continue
        work = [(root, iter(sorted(succ[root])))]
        visited[root] = True
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if not visited[w]:
                    visited[w] = True
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(sorted(succ[w]))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def minimal_invariant_superset(f: GraphMap, edge_slots) -> frozenset[int]:
    """Smallest f-invariant edge set containing ``edge_slots``."""
    got = set(edge_slots)
    frontier = list(got)
    while frontier:
        s = frontier.pop()
        for ch in f.edge_images[s]:
            t = slot(ch)
            if t not in got:
                got.add(t)
                frontier.append(t)
    return frozenset(got)


# ---------------------------------------------------------------------------
# Text serialization


def print_marked_graph(mg: MarkedGraph, endo: GraphMap | None = None,
                       h_slots=None) -> str:
    g = mg.graph
    lines = ["VERTICES"]
    lines.extend(g.vertices)
    lines.append("EDGES")
    for s, name in enumerate(g.edge_names):
        lines.append(f"{name} {g._init[s]} {g._term[s]}")
    lines.append("MARKING")
    for i, w in enumerate(mg.marking):
        tok = g.print_path(w)
        lines.append(f"x{i + 1} {tok}".rstrip())
    if endo is not None:
        lines.append("MAP")
        for s, name in enumerate(g.edge_names):
            tok = g.print_path(endo.edge_images[s])
            lines.append(f"{name} {tok}".rstrip())
    if h_slots is not None:
        lines.append("H")
        for s in sorted(h_slots):
            lines.append(g.edge_names[s])
    return "\n".join(lines) + "\n"


_SECTIONS = ("VERTICES", "EDGES", "MARKING", "MAP", "H")


def parse_marked_graph(text: str):
    """Parse the text format; returns (MarkedGraph, GraphMap|None, h_slots|None)."""
    section = None
    vertices: list[str] = []
    edges: list[tuple[str, str, str]] = []
    marking_rows: list[tuple[str, list[str]]] = []
    map_rows: list[tuple[str, list[str]]] = []
    h_names: list[str] = []
    saw = set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in _SECTIONS:
            section = line
            saw.add(line)
            continue
        toks = line.split()
        if section == "VERTICES":
            vertices.append(toks[0])
        elif section == "EDGES":
            if len(toks) != 3:
                raise InvalidInput(f"bad edge line: {line!r}")
            edges.append((toks[0], toks[1], toks[2]))
        elif section == "MARKING":
            marking_rows.append((toks[0], toks[1:]))
        elif section == "MAP":
            map_rows.append((toks[0], toks[1:]))
        elif section == "H":
            h_names.append(toks[0])
        else:
            raise InvalidInput(f"content before any section: {line!r}")
    if "VERTICES" not in saw or "EDGES" not in saw or "MARKING" not in saw:
        raise InvalidInput("missing required section")
    graph = Graph(vertices, edges)
    marking = [""] * len(marking_rows)
    for key, toks in marking_rows:
        if not key.startswith("x"):
            raise InvalidInput(f"bad basis letter {key!r}")
        idx = int(key[1:]) - 1
        if not toks:
            raise InvalidInput("marking images must be nonempty")
        marking[idx] = graph.parse_path(toks)
    base = graph.init_of(marking[0][0])
    mg = MarkedGraph(graph, base, marking)
    endo = None
    if "MAP" in saw:
        images = {}
        for key, toks in map_rows:
            images[key] = graph.parse_path(toks) if toks else ""
        for name in graph.edge_names:
            if name not in images:
                raise InvalidInput(f"MAP section missing edge {name}")
        vmap = {}
        for s, name in enumerate(graph.edge_names):
            img = images[name]
            a, b = graph._init[s], graph._term[s]
            if img:
                vmap.setdefault(a, graph.init_of(img[0]))
                vmap.setdefault(b, graph.term_of(img[-1]))
        for v in graph.vertices:
            vmap.setdefault(v, v)
        endo = GraphMap(graph, graph, vmap,
                        tuple(images[n] for n in graph.edge_names))
    h_slots = None
    if "H" in saw:
        h_slots = frozenset(graph.slot_of[n] for n in h_names)
    return mg, endo, h_slots
