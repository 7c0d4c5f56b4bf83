"""Cut graphs: certification, reduction, a greedy baseline, an exhaustive oracle and pruning.

A subgraph ``H`` of a map ``G`` on a surface of Euler genus ``g`` is a cut
graph when its complement is a single open disk. With the face structure of
``H`` read off the restricted rotation, this is equivalent to ``H`` having a
single face and ``v - e + 1 = 2 - g``.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable

from .errors import BudgetExceeded, EmptySubgraph, NotACutGraph, NotADiskDecomposition
from .surface_map import (
    ZERO,
    EdgeSubset,
    EmbeddedGraph,
    _UnionFind,
    cut_along,
    from_rotations,
    point_map,
    sub_face_orbits,
)


@dataclass(frozen=True)
class CutCertificate:
    face_count: int
    euler_lhs: int
    euler_rhs: int
    valid: bool

    def lines(self) -> list[str]:
        return [
            "face_count %d" % self.face_count,
            "euler_lhs %d" % self.euler_lhs,
            "euler_rhs %d" % self.euler_rhs,
            "valid %s" % ("yes" if self.valid else "no"),
        ]


def complement_regions(g: EmbeddedGraph, edges: Iterable[int]) -> int:
    """Number of components of the surface minus ``edges``: faces glued across the other edges."""
    edges = {g.edge_of(e) for e in edges}
    uf = _UnionFind(max(len(g.faces), 1))
    for e in g.edges:
        if e not in edges:
            uf.union(g.face_of[e], g.face_of[g.twin[e]])
    return len({uf.find(i) for i in range(max(len(g.faces), 1))})


def is_cut_graph(g: EmbeddedGraph, h: EdgeSubset) -> CutCertificate:
    vs = h.vertex_set(g)
    if not vs:
        raise EmptySubgraph("a cut graph needs at least one vertex")
    edges = {g.edge_of(e) for e in h.edges}
    faces = complement_regions(g, edges)
    lhs = len(vs) - len(edges) + faces
    rhs = 2 - g.genus
    return CutCertificate(faces, lhs, rhs, faces == 1 and lhs == rhs)


# -- reduction -----------------------------------------------------------

@dataclass
class ReducedGraph:
    """Reduced subgraph: no unmarked vertices of degree 1 or 2.

    ``contraction_log`` lists ``(reduced edge id, host edges)``: the maximal
    path of host edges each reduced edge replaces. ``vertex_origin`` gives the
    host vertex of each reduced vertex.
    """

    map: EmbeddedGraph
    contraction_log: list
    vertex_origin: list
    boundary: frozenset = field(default_factory=frozenset)

    def host_edges(self, edges: Iterable[int]) -> set[int]:
        lookup = dict(self.contraction_log)
        out = set()
        for e in edges:
            out.update(lookup[self.map.edge_of(e)])
        return out

    @property
    def length(self) -> Fraction:
        return self.map.total_weight()


def _reduce(g: EmbeddedGraph, darts: set[int], boundary: frozenset, *, prune_leaves=True) -> ReducedGraph:
    tw = dict((d, g.twin[d]) for d in darts)
    rot = {}
    owner = {}
    for v, orb in enumerate(g.vertices):
        lst = [d for d in orb if d in darts]
        if lst:
            rot[v] = lst
            for d in lst:
                owner[d] = v
    rec = {}
    for d in darts:
        if d < tw[d]:
            r = [g.weight(d), [d]]
            rec[d] = rec[tw[d]] = r
    queue = sorted(rot)
    queued = set(queue)
    while queue:
        v = heapq.heappop(queue)
        queued.discard(v)
        if v not in rot or v in boundary:
            continue
        lst = rot[v]
        if len(lst) == 1 and prune_leaves:
            a = lst[0]
            ta = tw[a]
            u = owner[ta]
            del rot[v]
            rot[u].remove(ta)
            for x in (a, ta):
                del tw[x], owner[x], rec[x]
            if rot[u] and u not in queued:
                heapq.heappush(queue, u)
                queued.add(u)
        elif len(lst) == 2:
            a, b = lst
            if tw[a] == b:
                continue
            ta, tb = tw[a], tw[b]
            ra, rb = rec[a], rec[b]
            merged = [ra[0] + rb[0], ra[1] + rb[1]]
            tw[ta], tw[tb] = tb, ta
            for x in (a, b):
                del tw[x], owner[x], rec[x]
            rec[ta] = rec[tb] = merged
            del rot[v]
    alive = sorted(rot)
    rotations = [rot[v] for v in alive]
    pairs = []
    for d in sorted(tw):
        if d < tw[d]:
            pairs.append((d, tw[d], rec[d][0]))
    if not pairs:
        keep = alive[:1] if alive else sorted(boundary)[:1]
        pm = point_map()
        return ReducedGraph(pm, [], keep, boundary)
    rotations = [r for r in rotations if r]
    m, ids = from_rotations(rotations, pairs, validate=False)
    log = []
    for d in sorted(tw):
        if d < tw[d]:
            log.append((m.edge_of(ids[d]), tuple(sorted(g.edge_of(x) for x in rec[d][1]))))
    inv = {i: k for k, i in ids.items()}
    vertex_origin = [owner[inv[orb[0]]] for orb in m.vertices]
    return ReducedGraph(m, log, vertex_origin, boundary)


def reduce(g: EmbeddedGraph, h: EdgeSubset | Iterable[int] | None = None,
           boundary: Iterable[int] = ()) -> ReducedGraph:
    """Prune unmarked degree-1 vertices and contract unmarked degree-2 chains, to a fixpoint."""
    if h is None:
        edges = set(g.edges)
    elif isinstance(h, EdgeSubset):
        edges = set(h.edges)
    else:
        edges = {g.edge_of(e) for e in h}
    darts = set()
    for e in edges:
        darts.add(e)
        darts.add(g.twin[e])
    return _reduce(g, darts, frozenset(boundary))


def check_reduced_bounds(r: ReducedGraph, g: int) -> bool:
    """Vertex and edge counts of a reduced cut graph against ``4g`` and ``6g``."""
    m = r.map
    if m.n_darts == 0:
        if g != 0:
            raise NotACutGraph("a single point does not cut a surface of genus %d" % g)
        return True
    for orb in m.vertices:
        if len(orb) <= 2 and not (len(orb) == 2 and m.twin[orb[0]] == orb[1]):
            raise NotACutGraph("graph is not reduced (vertex of degree %d)" % len(orb))
    faces = len(m.faces)
    if faces != 1 or m.n - m.m + 1 != 2 - g:
        raise NotACutGraph("reduced graph is not a cut graph of a genus %d surface" % g)
    return m.n < 4 * g and m.m < 6 * g


def simplify_exact(g: EmbeddedGraph) -> tuple[EmbeddedGraph, dict]:
    """Shrink ``g`` without changing the length of a shortest cut graph.

    Alternates :func:`reduce` with deleting loops that bound a face of degree
    one and the heavier edge of every face of degree two. A cut graph never
    uses a loop around a monogon, and the two sides of a digon are
    interchangeable in any cut graph. Returns the new map and, per new edge,
    the tuple of ``g``'s edges it stands for.
    """
    from .surface_map import restrict

    paths = {e: (e,) for e in g.edges}
    cur = g
    while True:
        red = reduce(cur)
        paths = {e: tuple(x for p in path for x in paths[p]) for e, path in red.contraction_log}
        cur = red.map
        drop = set()
        for orb in cur.faces:
            if len(orb) == 1:
                drop.add(cur.edge_of(orb[0]))
            elif len(orb) == 2:
                a, b = (cur.edge_of(d) for d in orb)
                if a != b:
                    drop.add(max((a, b), key=lambda e: (cur.weight(e), e)))
        if not drop:
            return cur, paths
        keep = [e for e in cur.edges if e not in drop]
        h, ids = restrict(cur, keep)
        paths = {h.edge_of(ids[e]): paths[e] for e in keep}
        cur = h


# -- baseline ------------------------------------------------------------

def shortest_path_tree(g: EmbeddedGraph, root: int = 0):
    """Dijkstra from ``root``; returns (dist, parent dart into each vertex). Ties go to the smaller edge id."""
    dist = {}
    parent = {}
    heap = [(ZERO, -1, root, None)]
    while heap:
        du, _, u, d = heapq.heappop(heap)
        if u in dist:
            continue
        dist[u] = du
        parent[u] = d
        for x in g.vertices[u]:
            v = g.head(x)
            if v not in dist:
                heapq.heappush(heap, (du + g.weight(x), g.edge_of(x), v, x))
    return dist, parent


def prune_leaves(g: EmbeddedGraph, edges: Iterable[int], keep: Iterable[int] = ()) -> set[int]:
    """Repeatedly drop edges with an endpoint of degree one (outside ``keep``)."""
    edges = {g.edge_of(e) for e in edges}
    keep = set(keep)
    deg = {}
    inc = {}
    for e in edges:
        for v in g.endpoints(e):
            deg[v] = deg.get(v, 0) + 1
            inc.setdefault(v, set()).add(e)
    stack = sorted(v for v, k in deg.items() if k == 1 and v not in keep)
    while stack:
        v = stack.pop()
        if deg.get(v) != 1 or v in keep:
            continue
        (e,) = inc[v]
        edges.discard(e)
        for x in g.endpoints(e):
            deg[x] -= 1
            inc[x].discard(e)
            if deg[x] == 1 and x not in keep:
                stack.append(x)
    return edges


def baseline_cut_graph(g: EmbeddedGraph) -> EdgeSubset:
    """Greedy tree-cotree cut graph: shortest-path tree plus the shortest loops that keep one face."""
    if g.genus == 0:
        return EdgeSubset.of(g, (), (0,))
    dist, parent = shortest_path_tree(g, 0)
    tree = {g.edge_of(d) for d in parent.values() if d is not None}
    others = [e for e in g.edges if e not in tree]

    def key(e):
        u, v = g.endpoints(e)
        return (g.weight(e) + dist[u] + dist[v], e)

    # keep the longest loops in the dual spanning tree; the rest joins the cut graph
    uf = _UnionFind(len(g.faces))
    loops = []
    for e in sorted(others, key=key, reverse=True):
        if not uf.union(g.face_of[e], g.face_of[g.twin[e]]):
            loops.append(e)
    edges = prune_leaves(g, tree | set(loops))
    return EdgeSubset.of(g, edges)


# -- exact oracle --------------------------------------------------------

def _enumerate_exact(g: EmbeddedGraph, edges: list[int], target: int):
    """Lightest subset of ``edges`` that is a cut graph of genus ``target``."""
    m = len(edges)
    vindex = {}
    emask = []
    for e in edges:
        mask = 0
        for v in g.endpoints(e):
            mask |= 1 << vindex.setdefault(v, len(vindex))
        emask.append(mask)
    den = 1
    for e in edges:
        den = lcm(den, g.weight(e).denominator)
    iw = [int(g.weight(e) * den) for e in edges]
    size = 1 << m
    vmask = [0] * size
    length = [0] * size
    cands = []
    for s in range(1, size):
        low = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        vmask[s] = vmask[rest] | emask[low]
        length[s] = length[rest] + iw[low]
        if s.bit_count() - vmask[s].bit_count() == target - 1:
            cands.append(s)

    def subset(s):
        return tuple(edges[i] for i in range(m) if s >> i & 1)

    cands.sort(key=lambda s: (length[s], subset(s)))
    for s in cands:
        sub = subset(s)
        if len(sub_face_orbits(g, sub)) == 1:
            return sub
    return None


def exact_cut_graph(g: EmbeddedGraph, edge_budget: int = 16, allowed: Iterable[int] | None = None) -> EdgeSubset:
    """Shortest cut graph by exhaustive search over edge subsets.

    With ``allowed`` the search is restricted to those edges. When there are
    more than ``edge_budget`` candidate edges, degree-1 and degree-2 vertices
    are first reduced away (exact for nonnegative weights); the budget then
    applies to the reduced graph.
    """
    if g.genus == 0:
        return EdgeSubset.of(g, (), (0,))
    edges = sorted({g.edge_of(e) for e in (allowed if allowed is not None else g.edges)})
    if len(edges) <= edge_budget:
        best = _enumerate_exact(g, edges, g.genus)
        if best is None:
            raise NotACutGraph("no cut graph among the allowed edges")
        return EdgeSubset.of(g, best)
    red = reduce(g, edges)
    if red.map.m > edge_budget:
        raise BudgetExceeded("%d edges after reduction exceed the oracle budget %d" % (red.map.m, edge_budget))
    if red.map.n_darts == 0:
        raise NotACutGraph("no cut graph among the allowed edges")
    # the reduced map may be disconnected; enumeration only needs the rotation
    best = _enumerate_exact(red.map, list(red.map.edges), g.genus)
    if best is None:
        raise NotACutGraph("no cut graph among the allowed edges")
    return EdgeSubset.of(g, red.host_edges(best))


# -- pruning -------------------------------------------------------------

def prune_to_single_face(g: EmbeddedGraph, h: EdgeSubset) -> EdgeSubset:
    """Merge the disks cut out by ``h`` until one remains, then drop dangling trees."""
    pieces = cut_along(g, h)
    if not all(p.is_disk for p in pieces):
        raise NotADiskDecomposition("cutting along the subgraph leaves non-disk pieces: %s" % pieces)
    edges = {g.edge_of(e) for e in h.edges}
    while True:
        orbs = sub_face_orbits(g, edges)
        if len(orbs) <= 1:
            break
        face = {}
        for i, orb in enumerate(orbs):
            for d in orb:
                face[d] = i
        borders = [e for e in edges if face[e] != face[g.twin[e]]]
        e = max(borders, key=lambda x: (g.weight(x), -x))
        edges.discard(e)
    vs = h.vertex_set(g)
    edges = prune_leaves(g, edges)
    if edges:
        return EdgeSubset.of(g, edges)
    return EdgeSubset.of(g, (), (min(vs),))


# -- solution files ------------------------------------------------------

def format_solution(h: EdgeSubset) -> str:
    edges = h.sorted_edges()
    lines = ["cutgraph %d" % len(edges)]
    lines += [str(e) for e in edges]
    if not edges and h.vertices:
        lines.append("vertex %d" % min(h.vertices))
    ln = h.length
    lines.append("length %d/%d" % (ln.numerator, ln.denominator))
    return "\n".join(lines) + "\n"


def parse_solution(text: str, g: EmbeddedGraph | None = None) -> EdgeSubset:
    from .errors import ParseError

    toks = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    toks = [t for t in toks if t]
    if not toks or not toks[0].startswith("cutgraph"):
        raise ParseError("solution must start with 'cutgraph <k>'")
    try:
        k = int(toks[0].split()[1])
        edges = [int(t) for t in toks[1:1 + k]]
        rest = toks[1 + k:]
        vertices = [int(t.split()[1]) for t in rest if t.startswith("vertex")]
        lens = [t for t in rest if t.startswith("length")]
        declared = Fraction(lens[0].split()[1]) if lens else None
    except (IndexError, ValueError) as exc:
        raise ParseError("malformed solution file: %s" % exc) from None
    if g is None:
        return EdgeSubset(frozenset(edges), declared if declared is not None else ZERO, frozenset(vertices))
    for e in edges:
        if not 0 <= e < g.n_darts or g.edge_of(e) != e:
            raise ParseError("edge id %d is not a minimal dart id of the map" % e)
    if not edges and not vertices:
        vertices = [0]
    return EdgeSubset.of(g, edges, vertices)
