"""Portal Steiner trees, the spanner, and the contraction step."""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from operator import add
from typing import Sequence

from .cutgraph import baseline_cut_graph, is_cut_graph, prune_leaves
from .errors import DisconnectedTerminals, SpannerNotCutting
from .mortar_brick import Brick, MortarGraph, PortalSet
from .surface_map import EdgeSubset, EmbeddedGraph, _UnionFind, contract_edges, cut_open, restrict


# -- Steiner trees -------------------------------------------------------

def _int_weights(g: EmbeddedGraph) -> tuple[dict[int, int], int]:
    scale = 1
    for e in g.edges:
        den = g.weight(e).denominator
        scale = scale * den // math.gcd(scale, den)
    return {e: int(g.weight(e) * scale) for e in g.edges}, scale


class SteinerTable:
    """Dreyfus-Wagner table over all subsets of a terminal list.

    ``cost[mask][v]`` is the length of a shortest tree spanning the terminals
    in ``mask`` plus vertex ``v``.
    """

    def __init__(self, g: EmbeddedGraph, terminals: Sequence[int]):
        self.g = g
        self.terminals = list(dict.fromkeys(terminals))
        self.w, self.scale = _int_weights(g)
        n = g.n
        t = len(self.terminals)
        inf = float("inf")
        self.cost = [None] * (1 << t)
        self.pred = [None] * (1 << t)
        for mask in range(1, 1 << t):
            low = mask & -mask
            if mask == low:
                cur = [inf] * n
                cur[self.terminals[low.bit_length() - 1]] = 0
            else:
                cur = [inf] * n
                rest = mask ^ low
                sub = rest
                # submasks containing the lowest bit, each unordered split once
                while True:
                    a = sub | low
                    if a != mask:
                        cur = list(map(min, cur, map(add, self.cost[a], self.cost[mask ^ a])))
                    if sub == 0:
                        break
                    sub = (sub - 1) & rest
            self.cost[mask], self.pred[mask] = self._relax(cur)

    def _relax(self, cur):
        g = self.g
        inf = float("inf")
        dist = list(cur)
        pred = {}
        heap = [(d, v) for v, d in enumerate(dist) if d != inf]
        heapq.heapify(heap)
        done = set()
        while heap:
            du, u = heapq.heappop(heap)
            if u in done or du > dist[u]:
                continue
            done.add(u)
            for x in g.vertices[u]:
                v = g.vertex_of[g.twin[x]]
                nd = du + self.w[g.edge_of(x)]
                if nd < dist[v]:
                    dist[v] = nd
                    pred[v] = x
                    heapq.heappush(heap, (nd, v))
        return dist, pred

    def length(self, mask: int) -> Fraction:
        root = self.terminals[(mask & -mask).bit_length() - 1]
        c = self.cost[mask][root]
        if c == float("inf"):
            raise DisconnectedTerminals("terminals are not connected")
        return Fraction(c, self.scale)

    def tree(self, mask: int) -> set[int]:
        """Edges of an optimal tree for the terminals in ``mask``."""
        root = self.terminals[(mask & -mask).bit_length() - 1]
        if self.cost[mask][root] == float("inf"):
            raise DisconnectedTerminals("terminals are not connected")
        out = set()
        stack = [(mask, root)]
        g = self.g
        while stack:
            m, v = stack.pop()
            x = self.pred[m].get(v)
            if x is not None:
                out.add(g.edge_of(x))
                stack.append((m, g.vertex_of[x]))
                continue
            low = m & -m
            if m == low:
                continue
            target = self.cost[m][v]
            rest = m ^ low
            sub = rest
            while True:
                a = sub | low
                if a != m and self.cost[a][v] + self.cost[m ^ a][v] == target:
                    stack.append((a, v))
                    stack.append((m ^ a, v))
                    break
                if sub == 0:
                    raise AssertionError("Steiner table has no witness split")
                sub = (sub - 1) & rest
        return out


def brick_steiner_tree(br: Brick | EmbeddedGraph, terminals: Sequence[int]) -> EdgeSubset:
    """Shortest tree in the brick spanning the given brick vertices."""
    g = br.map if isinstance(br, Brick) else br
    terms = list(dict.fromkeys(terminals))
    if not terms:
        raise ValueError("no terminals")
    if len(terms) == 1:
        return EdgeSubset.of(g, (), terms)
    table = SteinerTable(g, terms)
    return EdgeSubset.of(g, table.tree((1 << len(terms)) - 1), terms)


# -- spanner -------------------------------------------------------------

@dataclass
class SpannerResult:
    graph: EmbeddedGraph
    edges: frozenset          # edges of G
    to_source: dict           # spanner edge -> G edge
    length: Fraction
    factor_witness: Fraction
    heuristic: bool
    subsets: int


def _brick_trees(br: Brick, portals: PortalSet, theta_cap: int) -> tuple[set[int], int, bool]:
    terms = list(dict.fromkeys(portals.vertices))
    t = len(terms)
    if t <= 1:
        return set(), 0, False
    out = set()
    if t <= theta_cap:
        table = SteinerTable(br.map, terms)
        for mask in range(1, 1 << t):
            if mask & (mask - 1):
                out |= table.tree(mask)
        return out, (1 << t) - 1 - t, False
    count = 0
    for size in range(2, 5):
        for start in range(t):
            window = [terms[(start + i) % t] for i in range(size)]
            table = SteinerTable(br.map, window)
            out |= table.tree((1 << size) - 1)
            count += 1
    return out, count, True


def build_spanner(g: EmbeddedGraph, mg: MortarGraph, bricks: Sequence[Brick],
                  portals: Sequence[PortalSet], *, theta_cap: int = 12,
                  spanner_factor=None, threads: int = 1) -> SpannerResult:
    """Mortar edges plus optimal Steiner trees for the portal subsets of every brick.

    Bricks with more than ``theta_cap`` portals only get trees for runs of
    2 to 4 consecutive portals; the result is then flagged ``heuristic``.
    """
    origin = mg.disk.dart_origin
    edges = set(mg.subgraph.edges)
    heuristic = False
    subsets = 0
    jobs = list(zip(bricks, portals))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda j: _brick_trees(j[0], j[1], theta_cap), jobs))
    else:
        results = [_brick_trees(br, ps, theta_cap) for br, ps in jobs]
    for (br, _), (tree, count, heur) in zip(jobs, results):
        subsets += count
        heuristic |= heur
        for e in tree:
            edges.add(g.edge_of(origin[br.disk_dart[e]]))
    base = mg.baseline
    if not base.edges <= edges or not is_cut_graph(g, base).valid:
        raise SpannerNotCutting("spanner does not contain the baseline cut graph")
    if g.genus == 0 and not edges:
        span, to_source = g, {}
        edges = set()
    else:
        span, ids = restrict(g, edges)
        to_source = {}
        for old, new in ids.items():
            if old < g.twin[old]:
                to_source[span.edge_of(new)] = old
    if span.genus != g.genus:
        raise SpannerNotCutting("spanner genus %d differs from %d" % (span.genus, g.genus))
    length = sum((g.weight(e) for e in edges), Fraction(0))
    bl = base.length
    factor = length / bl if bl else Fraction(1)
    if spanner_factor is not None and bl and length > spanner_factor * bl:
        raise SpannerNotCutting("spanner length %s exceeds factor %s of the baseline" % (length, spanner_factor))
    return SpannerResult(span, frozenset(edges), to_source, length, factor, heuristic, subsets)


# -- contraction ---------------------------------------------------------

@dataclass
class ContractionPartition:
    sets: list               # k frozensets of edges of the spanner map
    chosen: int
    weights: list

    @property
    def chosen_weight(self) -> Fraction:
        return self.weights[self.chosen]


def radial_levels(g: EmbeddedGraph) -> dict[int, int]:
    """Edge -> radial level on the disk cut open along the baseline cut graph."""
    if g.m == 0:
        return {}
    base = baseline_cut_graph(g)
    if base.edges:
        piece = cut_open(g, base.edges)[0]
        d = piece.map
        start = set()
        for f in piece.boundary_faces:
            for x in d.faces[f]:
                start.add(d.vertex_of[x])
        origin = piece.dart_origin
    else:
        d = g
        start = {0}
        origin = list(range(g.n_darts))
    level = {v: 0 for v in start}
    frontier = sorted(start)
    seen_faces = set()
    k = 0
    while frontier:
        nxt = []
        for v in frontier:
            for x in d.vertices[v]:
                f = d.face_of[x]
                if f in seen_faces:
                    continue
                seen_faces.add(f)
                for y in d.faces[f]:
                    u = d.vertex_of[y]
                    if u not in level:
                        level[u] = k + 1
                        nxt.append(u)
        frontier = sorted(nxt)
        k += 1
    out = {}
    for e in d.edges:
        ge = g.edge_of(origin[e])
        lv = min(level[d.vertex_of[e]], level[d.vertex_of[d.twin[e]]])
        out[ge] = min(out.get(ge, lv), lv)
    return out


def contraction_partition(span: EmbeddedGraph, k: int) -> ContractionPartition:
    """Split the edges by radial level modulo ``k``; the lightest class is chosen."""
    if k < 2:
        raise ValueError("k must be at least 2")
    levels = radial_levels(span)
    sets = [set() for _ in range(k)]
    for e in span.edges:
        sets[levels[e] % k].add(e)
    weights = [sum((span.weight(e) for e in s), Fraction(0)) for s in sets]
    chosen = min(range(k), key=lambda i: (weights[i], i))
    return ContractionPartition([frozenset(s) for s in sets], chosen, weights)


@dataclass
class Lift:
    """Undo a contraction: ``edge_back`` maps contracted-map edges to spanner edges."""

    span: EmbeddedGraph
    forest: frozenset
    component: dict          # spanner vertex -> contracted vertex
    edge_back: dict

    def __call__(self, edges, vertices=()) -> EdgeSubset:
        back = {self.edge_back[e] for e in edges}
        touched = set(vertices)
        g = self.span
        for e in back:
            touched.add(self.component[g.vertex_of[e]])
            touched.add(self.component[g.vertex_of[g.twin[e]]])
        extra = {e for e in self.forest if self.component[g.vertex_of[e]] in touched}
        keep = set()
        for e in back:
            keep.add(g.vertex_of[e])
            keep.add(g.vertex_of[g.twin[e]])
        full = back | extra
        pruned = prune_leaves(g, full, keep)
        if not pruned and not back:
            inv = {}
            for v, c in self.component.items():
                inv.setdefault(c, v)
            verts = [inv[c] for c in sorted(touched)] or [0]
            return EdgeSubset.of(g, (), verts[:1])
        return EdgeSubset.of(g, pruned)


def contract_lightest(span: EmbeddedGraph, part: ContractionPartition) -> tuple[EmbeddedGraph, Lift]:
    """Contract a spanning forest of the chosen class; other class edges stay."""
    chosen = part.sets[part.chosen]
    uf = _UnionFind(span.n)
    forest = []
    for e in sorted(chosen):
        if uf.union(span.vertex_of[e], span.vertex_of[span.twin[e]]):
            forest.append(e)
    con = contract_edges(span, forest)
    edge_back = {}
    for old, new in con.dart_map.items():
        if old < span.twin[old]:
            edge_back[con.map.edge_of(new)] = old
    component = {v: con.vertex_map[v] for v in range(span.n)}
    return con.map, Lift(span, frozenset(forest), component, edge_back)
