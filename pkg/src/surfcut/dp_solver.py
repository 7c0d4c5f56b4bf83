"""Dynamic program for a shortest cut graph over a surface-cut decomposition.

Every node ``x`` of the decomposition tree owns the edges below it. The
partial solution ``H_x`` is summarised by how the face walk of the final cut
graph crosses the boundary of the region of ``x``:

* At a boundary vertex the allowed darts split into *arcs*: maximal runs of
  consecutive darts owned by ``x``. An arc is active when it holds a dart of
  ``H_x``; the walk enters the region there and leaves through some arc.
  ``perm[i]`` is the arc through which the walk entering at arc ``i`` leaves
  (``-1`` for inactive arcs).
* ``closed`` counts face walks already closed inside the region.
* ``delta`` is ``|E(H_x)|`` minus the number of vertices of ``H_x`` that no
  longer touch the boundary.

A cut graph of a surface of Euler genus ``g`` is exactly a subgraph with one
face walk and ``|E| - |V| = g - 1``; at the root this reads
``closed == 1`` and ``delta == g - 1``.

The region map of an entry (the reduced subgraph with its boundary vertices
and their positions) is recovered from the entry's witness.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable

from .cutgraph import ReducedGraph, is_cut_graph, reduce
from .errors import BoundaryTooLarge, NoCutGraphMap, WidthCapExceeded
from .surface_map import EdgeSubset, EmbeddedGraph

EXCLUDE, INCLUDE = 0, 1


@dataclass(frozen=True)
class RegionMap:
    abstract_map: object            # ReducedGraph from a witness, SmallMap from enumeration, or None
    internal_high_degree_count: int
    boundary_vertices: tuple


@dataclass(frozen=True)
class BoundaryPosition:
    assignment: tuple         # (boundary vertex of the map, (host vertex, arc index)) pairs


@dataclass
class DPTable:
    """Entries of one node: signature -> (integer length, back pointer)."""

    region: int
    entries: dict
    arcs: list
    scale: int

    def length(self, key) -> Fraction:
        return Fraction(self.entries[key][0], self.scale)

    def __len__(self):
        return len(self.entries)


@dataclass
class DPStats:
    table_sizes: dict = field(default_factory=dict)
    pairs_tried: int = 0
    peak_entries: int = 0
    spot_checks: int = 0


def _by_perm(table: dict) -> dict:
    groups: dict = {}
    for key, (w, _) in table.items():
        perm, closed, delta = key
        groups.setdefault(perm, []).append((closed, delta, w, key))
    return groups


class _Node:
    """Per-node boundary structure: arcs and dart ownership."""

    __slots__ = ("arcs", "arc_of", "boundary", "internal", "inside")

    def __init__(self, arcs, arc_of, boundary, internal, inside):
        self.arcs = arcs            # list of (vertex, tuple of darts)
        self.arc_of = arc_of        # dart -> arc index (boundary vertices only)
        self.boundary = boundary    # vertices with allowed darts inside and outside
        self.internal = internal    # vertices whose allowed darts are all inside
        self.inside = inside        # frozenset of edges below the node


class CutGraphDP:
    """Tables for one map, decomposition tree and set of usable edges."""

    def __init__(self, g: EmbeddedGraph, branch, allowed: Iterable[int] | None = None, *,
                 state_cap: int = 200_000):
        self.g = g
        self.branch = branch
        self.allowed = frozenset(g.edges) if allowed is None else frozenset(g.edge_of(e) for e in allowed)
        self.state_cap = state_cap
        self.genus = g.genus
        den = 1
        for e in self.allowed:
            den = lcm(den, g.weight(e).denominator)
        self.scale = den
        self.iw = {e: int(g.weight(e) * den) for e in self.allowed}
        self.arot = [tuple(d for d in orb if g.edge_of(d) in self.allowed) for orb in g.vertices]
        self.pos = {}
        for orb in self.arot:
            for i, d in enumerate(orb):
                self.pos[d] = i
        self.below = branch.leaves_below()
        self.nodes = [None] * len(branch.children)
        self.tables: list = [None] * len(branch.children)
        self.stats = DPStats()

    # -- structure ---------------------------------------------------------

    def node(self, x) -> _Node:
        if self.nodes[x] is not None:
            return self.nodes[x]
        g = self.g
        inside = self.below[x]
        verts = set()
        for e in inside:
            if e in self.allowed:
                verts.update(g.endpoints(e))
        arcs, arc_of, boundary, internal = [], {}, [], set()
        for v in sorted(verts):
            rot = self.arot[v]
            flags = [g.edge_of(d) in inside for d in rot]
            if all(flags):
                internal.add(v)
                continue
            boundary.append(v)
            k = len(rot)
            for i in range(k):
                if flags[i] and not flags[i - 1]:
                    run = []
                    j = i
                    while flags[j % k]:
                        run.append(rot[j % k])
                        j += 1
                    for d in run:
                        arc_of[d] = len(arcs)
                    arcs.append((v, tuple(run)))
        nd = _Node(arcs, arc_of, tuple(boundary), frozenset(internal), inside)
        self.nodes[x] = nd
        return nd

    # -- states from explicit subgraphs ------------------------------------

    def state_of(self, x, h_edges) -> tuple:
        """Signature of ``h_edges`` (allowed edges below ``x``) computed by walking it."""
        g = self.g
        nd = self.node(x)
        hd = set()
        for e in h_edges:
            hd.add(e)
            hd.add(g.twin[e])
        perm = [-1] * len(nd.arcs)
        seen = set()

        def step(d):
            # next dart of the walk after d, or ("exit", arc)
            y = g.twin[d]
            w = g.vertex_of[y]
            if w in nd.internal:
                rot = self.arot[w]
                k = len(rot)
                i = self.pos[y]
                for t in range(1, k + 1):
                    z = rot[(i + t) % k]
                    if z in hd:
                        return z
            a = nd.arc_of[y]
            run = nd.arcs[a][1]
            i = run.index(y)
            for z in run[i + 1:]:
                if z in hd:
                    return z
            return ("exit", a)

        for a, (v, run) in enumerate(nd.arcs):
            first = next((d for d in run if d in hd), None)
            if first is None:
                continue
            d = first
            while True:
                seen.add(d)
                nxt = step(d)
                if isinstance(nxt, tuple):
                    perm[a] = nxt[1]
                    break
                d = nxt
        closed = 0
        for d in sorted(hd):
            if d in seen:
                continue
            closed += 1
            while d not in seen:
                seen.add(d)
                d = step(d)
                if isinstance(d, tuple):
                    raise AssertionError("walk left the region from a closed cycle")
        used = set()
        for e in h_edges:
            used.update(g.endpoints(e))
        delta = len(h_edges) - len(used & nd.internal)
        return (tuple(perm), closed, delta)

    # -- pruning -------------------------------------------------------------

    def _viable(self, nd: _Node, key) -> bool:
        perm, closed, delta = key
        if closed >= 2:
            return False
        active_v = {nd.arcs[i][0] for i, p in enumerate(perm) if p >= 0}
        if closed == 1 and active_v:
            return False
        return delta <= self.genus - 1 + len(active_v)

    # -- tables --------------------------------------------------------------

    def leaf_table(self, x) -> dict:
        e = self.branch.leaf[x]
        nd = self.node(x)
        table = {}
        empty = (tuple([-1] * len(nd.arcs)), 0, 0)
        table[empty] = (0, EXCLUDE)
        if e in self.allowed:
            key = self.state_of(x, [e])
            if self._viable(nd, key):
                w = self.iw[e]
                if key not in table or w < table[key][0]:
                    table[key] = (w, INCLUDE)
        return table

    def _merge_plan(self, x):
        a, b = self.branch.children[x]
        na_, nb_, nx = self.node(a), self.node(b), self.node(x)
        g = self.g
        off = len(na_.arcs)
        vertex_arcs = {}
        for i, (v, run) in enumerate(na_.arcs):
            vertex_arcs.setdefault(v, []).append((self.pos[run[0]], i))
        for j, (v, run) in enumerate(nb_.arcs):
            vertex_arcs.setdefault(v, []).append((self.pos[run[0]], off + j))
        follow = {}      # combined arc -> (candidates in order, parent exit or None)
        parent_lists = [[] for _ in nx.arcs]
        newly_internal = []
        for v, lst in vertex_arcs.items():
            lst.sort()
            order = [c for _, c in lst]
            if v in nx.internal:
                newly_internal.append(order)
                k = len(order)
                for t, c in enumerate(order):
                    follow[c] = ([order[(t + s) % k] for s in range(1, k + 1)], None)
                continue
            # group child arcs by the parent arc holding their first dart
            by_parent = {}
            for _, c in lst:
                run = na_.arcs[c][1] if c < off else nb_.arcs[c - off][1]
                p = nx.arc_of[run[0]]
                by_parent.setdefault(p, []).append(c)
            for p, cs in by_parent.items():
                run = nx.arcs[p][1]
                start = {d: i for i, d in enumerate(run)}

                def key(c, run=run, start=start):
                    r = na_.arcs[c][1] if c < off else nb_.arcs[c - off][1]
                    return start[r[0]]

                cs.sort(key=key)
                parent_lists[p] = cs
                for t, c in enumerate(cs):
                    follow[c] = (cs[t + 1:], p)
        del g
        return off, follow, parent_lists, newly_internal

    def merge_tables(self, x, ta: dict, tb: dict) -> dict:
        off, follow, parent_lists, newly_internal = self._merge_plan(x)
        nx = self.node(x)
        n_parent = len(nx.arcs)
        cap = self.state_cap
        out: dict = {}
        g1 = self.genus - 1
        parent_vertex = [v for v, _ in nx.arcs]
        # the walk only depends on the two permutations
        ga, gb = _by_perm(ta), _by_perm(tb)
        for pa, rows_a in ga.items():
            for pb, rows_b in gb.items():
                self.stats.pairs_tried += len(rows_a) * len(rows_b)
                perm = list(pa)
                perm.extend(p + off if p >= 0 else -1 for p in pb)
                newperm = [-1] * n_parent
                entered = set()

                def nxt(c):
                    cands, p = follow[c]
                    for y in cands:
                        if perm[y] >= 0:
                            return y
                    return ~p

                for p, cs in enumerate(parent_lists):
                    cur = next((c for c in cs if perm[c] >= 0), None)
                    if cur is None:
                        continue
                    while True:
                        entered.add(cur)
                        y = nxt(perm[cur])
                        if y < 0:
                            newperm[p] = ~y
                            break
                        cur = y
                made = 0
                for c, p in enumerate(perm):
                    if p < 0 or c in entered:
                        continue
                    made += 1
                    cur = c
                    while cur not in entered:
                        entered.add(cur)
                        cur = nxt(perm[cur])
                if made >= 2:
                    continue
                gone = 0
                for order in newly_internal:
                    for c in order:
                        if perm[c] >= 0:
                            gone += 1
                            break
                n_active = len({parent_vertex[p] for p, q in enumerate(newperm) if q >= 0})
                if made and n_active:
                    continue
                limit = g1 + n_active + gone
                newperm = tuple(newperm)
                for ca, da, wa, ka in rows_a:
                    if ca + made >= 2:
                        continue
                    for cb, db, wb, kb in rows_b:
                        closed = ca + cb + made
                        if closed >= 2 or (closed and n_active) or da + db > limit:
                            continue
                        key = (newperm, closed, da + db - gone)
                        w = wa + wb
                        old = out.get(key)
                        if old is None or w < old[0]:
                            out[key] = (w, (ka, kb))
                            if len(out) > cap:
                                raise WidthCapExceeded("more than %d states at node %d" % (cap, x))
        return out

    def run(self) -> None:
        for x in self.branch.postorder():
            if self.branch.children[x]:
                a, b = self.branch.children[x]
                t = self.merge_tables(x, self.tables[a], self.tables[b])
            else:
                t = self.leaf_table(x)
            self.tables[x] = t
            self.stats.table_sizes[x] = len(t)
            self.stats.peak_entries = max(self.stats.peak_entries, len(t))

    # -- read-out -------------------------------------------------------------

    def witness(self, x, key) -> set[int]:
        out = set()
        stack = [(x, key)]
        while stack:
            y, k = stack.pop()
            back = self.tables[y][k][1]
            if self.branch.children[y]:
                a, b = self.branch.children[y]
                stack.append((a, back[0]))
                stack.append((b, back[1]))
            elif back == INCLUDE:
                out.add(self.branch.leaf[y])
        return out

    def root_key(self):
        root = self.branch.root
        want = self.genus - 1
        best = None
        for key, (w, _) in self.tables[root].items():
            perm, closed, delta = key
            if closed == 1 and delta == want and all(p < 0 for p in perm):
                if best is None or w < best[0]:
                    best = (w, key)
        return best

    def table(self, x) -> DPTable:
        return DPTable(x, self.tables[x], self.node(x).arcs, self.scale)

    def region_map(self, x, key) -> tuple[RegionMap, BoundaryPosition]:
        """Reduced map of the entry's witness with its boundary positions."""
        h = self.witness(x, key)
        nd = self.node(x)
        if not h:
            return RegionMap(None, 0, ()), BoundaryPosition(())
        red = reduce(self.g, h, boundary=nd.boundary)
        bverts = tuple(i for i, v in enumerate(red.vertex_origin) if v in nd.boundary)
        high = sum(1 for i, orb in enumerate(red.map.vertices)
                   if len(orb) >= 3 and red.vertex_origin[i] not in nd.boundary)
        hd = set()
        for e in h:
            hd.update((e, self.g.twin[e]))
        assignment = []
        for i in bverts:
            v = red.vertex_origin[i]
            arcs = tuple(a for a, (u, run) in enumerate(nd.arcs) if u == v and any(d in hd for d in run))
            assignment.append((i, (v, arcs)))
        return RegionMap(red, high, bverts), BoundaryPosition(tuple(assignment))

    def spot_check(self, fraction: float = 0.1, seed: int = 0) -> int:
        """Recompute the signature of sampled witnesses; raises on mismatch."""
        rng = random.Random(seed)
        checked = 0
        for x, table in enumerate(self.tables):
            if table is None:
                continue
            for key, (w, _) in table.items():
                if rng.random() >= fraction:
                    continue
                h = self.witness(x, key)
                if self.state_of(x, h) != key or sum(self.iw[e] for e in h) != w:
                    raise AssertionError("witness of node %d does not realise its entry" % x)
                checked += 1
        self.stats.spot_checks += checked
        return checked


def solve(g: EmbeddedGraph, scd=None, *, route: str = "a", allowed=None, state_cap: int = 200_000,
          spot_check: float = 0.0, return_dp: bool = False):
    """Shortest cut graph of ``g`` by dynamic programming.

    ``scd`` may be a :class:`scdecomp.DecompositionBundle` (as returned by
    ``build_scd``); otherwise one is built with the given ``route``.
    """
    from .scdecomp import build_scd

    if g.genus == 0:
        h = EdgeSubset.of(g, (), (0,))
        return (h, None) if return_dp else h
    bundle = scd if scd is not None else build_scd(g, route)
    usable = bundle.allowed if allowed is None else bundle.allowed & frozenset(allowed)
    dp = CutGraphDP(bundle.map, bundle.scd.branch, usable, state_cap=state_cap)
    dp.run()
    best = dp.root_key()
    if best is None:
        raise NoCutGraphMap("no cut graph among the usable edges")
    edges = dp.witness(dp.branch.root, best[1])
    if spot_check:
        dp.spot_check(spot_check)
    sub = EdgeSubset.of(bundle.map, edges)
    if not is_cut_graph(bundle.map, sub).valid:
        raise NoCutGraphMap("witness failed certification")
    h = EdgeSubset.of(g, bundle.to_source(edges))
    if not is_cut_graph(g, h).valid:
        raise NoCutGraphMap("mapped witness failed certification")
    return (h, dp) if return_dp else h


# -- enumeration of abstract region maps ---------------------------------

@dataclass(frozen=True)
class SmallMap:
    """Canonical connected map: twin pairs (2i, 2i+1), rotation, and one flag per vertex."""

    rotation: tuple
    boundary: tuple          # per vertex in canonical order: True when on the region boundary
    isolated: tuple = ()     # flags of the vertex of a dart-free map

    @property
    def n_darts(self) -> int:
        return len(self.rotation)


def _cycles(perm) -> list[tuple[int, ...]]:
    seen, out = set(), []
    for s in range(len(perm)):
        if s in seen:
            continue
        cyc, d = [], s
        while d not in seen:
            seen.add(d)
            cyc.append(d)
            d = perm[d]
        out.append(tuple(cyc))
    return out


def _canonical(rotation, twin, flag_of_dart) -> tuple:
    """Smallest relabelling of a connected map, searching from every start dart."""
    n = len(rotation)
    best = None
    for s in range(n):
        label = {s: 0}
        order = [s]
        i = 0
        while i < len(order):
            d = order[i]
            i += 1
            for y in (rotation[d], twin[d]):
                if y not in label:
                    label[y] = len(order)
                    order.append(y)
        if len(order) != n:
            return None
        code = (tuple(label[rotation[d]] for d in order),
                tuple(label[twin[d]] for d in order),
                tuple(flag_of_dart[d] for d in order))
        if best is None or code < best:
            best = code
    return best


def enumerate_region_maps(b: int, g: int, *, dart_cap: int = 8, boundary_cap: int = 8) -> list[RegionMap]:
    """Reduced connected maps a region can carry, up to isomorphism.

    Vertices of degree at least three are internal (at most ``4g`` of them)
    or on the boundary; degree-one vertices and isolated vertices sit on the
    boundary except for the lone-vertex map; no vertex has degree two. At most
    ``b`` boundary vertices, at most ``6g + b - 1`` edges, Euler genus at most
    ``g``, and at most ``dart_cap`` darts (the enumeration is exhaustive
    below that size).
    """
    if b > boundary_cap:
        raise BoundaryTooLarge("region boundary of %d vertices exceeds cap %d" % (b, boundary_cap))
    found = [SmallMap((), (), ()), SmallMap((), (), (False,))]
    if b >= 1:
        found.append(SmallMap((), (), (True,)))
    max_edges = min(dart_cap // 2, 6 * g + b - 1)
    seen = set()
    for m in range(1, max_edges + 1):
        n = 2 * m
        twin = [d ^ 1 for d in range(n)]
        for rotation in itertools.permutations(range(n)):
            verts = _cycles(rotation)
            faces = _cycles([rotation[twin[d]] for d in range(n)])
            if 2 - len(verts) + m - len(faces) > g:
                continue
            degs = [len(c) for c in verts]
            if 2 in degs:
                continue
            free = [i for i, k in enumerate(degs) if k >= 3]
            forced = [i for i, k in enumerate(degs) if k == 1]
            if len(forced) > b:
                continue
            vid = {}
            for i, c in enumerate(verts):
                for d in c:
                    vid[d] = i
            for extra in range(len(free) + 1):
                for chosen in itertools.combinations(free, extra):
                    bset = set(forced) | set(chosen)
                    if len(bset) > b or len(verts) - len(bset) > 4 * g:
                        continue
                    flags = [vid[d] in bset for d in range(n)]
                    code = _canonical(rotation, twin, flags)
                    if code is None or code in seen:
                        continue
                    seen.add(code)
                    rot, _, dflags = code
                    vflags = tuple(dflags[c[0]] for c in _cycles(rot))
                    found.append(SmallMap(rot, vflags))
    out = []
    for sm in found:
        bverts = tuple(i for i, f in enumerate(sm.boundary or sm.isolated) if f)
        high = sum(1 for c, f in zip(_cycles(sm.rotation), sm.boundary) if len(c) >= 3 and not f)
        out.append(RegionMap(None if not sm.rotation and not sm.isolated else sm, high, bverts))
    return out
