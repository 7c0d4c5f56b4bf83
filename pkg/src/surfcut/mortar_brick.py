"""Mortar graph, bricks, portals and the brick-copy graph.

Everything geometric happens on the disk ``D`` obtained by cutting the
surface open along the baseline cut graph. Regions of ``D`` are sets of
``D`` faces glued across non-mortar edges; each final region becomes a brick
whose boundary walk is labelled N, E, S, W.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cutgraph import baseline_cut_graph
from .errors import NonPlanarBrick, NonPositiveEpsilon
from .surface_map import (
    EdgeSubset,
    EmbeddedGraph,
    _UnionFind,
    as_fraction,
    contract_edges,
    cut_open,
    from_rotations,
)


# -- parameters ----------------------------------------------------------

@dataclass(frozen=True)
class ApproxParams:
    epsilon: Fraction
    alpha: Fraction
    kappa: int
    gamma: int
    theta: int
    k_contraction: int
    spanner_factor: Fraction


def derive_params(g: int, epsilon, measured_alpha, *, c_kappa=1, c_gamma=1,
                  kappa_cap: int = 64, gamma_cap: int = 100_000, theta_cap: int = 4096,
                  measured_f=None) -> ApproxParams:
    """Instantiate the parameter formulas; ``log`` is base 2.

    ``k_contraction`` is ``ceil(f / epsilon)`` (at least 2) where ``f`` is the
    measured spanner factor when given, else 1.
    """
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise NonPositiveEpsilon("epsilon must be positive, got %s" % eps)
    alpha = as_fraction(measured_alpha)
    inv = 1 / float(eps)
    kappa = math.ceil(c_kappa * (1 + math.log2(g + 2) ** 2) * inv ** 3)
    kappa = max(1, min(kappa_cap, kappa))
    gamma = max(1, min(gamma_cap, math.ceil(c_gamma * inv ** 2.5 * kappa)))
    theta = max(1, min(theta_cap, math.ceil(gamma * alpha / eps)))
    f = as_fraction(measured_f) if measured_f is not None else Fraction(1)
    k = max(2, math.ceil(f / eps))
    return ApproxParams(eps, alpha, kappa, gamma, theta, k, Fraction(2) ** min(theta, 64))


# -- the cut-open disk ---------------------------------------------------

class _Disk:
    """The disk ``D`` with integer and perturbed integer weights.

    Perturbed weights make every shortest path unique, so shortest paths
    chosen independently never cross.
    """

    def __init__(self, g: EmbeddedGraph, cut: EdgeSubset):
        if cut.edges:
            piece = cut_open(g, cut.edges)[0]
            self.map = piece.map
            self.dart_origin = piece.dart_origin
            self.vertex_origin = piece.vertex_origin
            self.outer = piece.boundary_faces[0]
        else:
            self.map = g
            self.dart_origin = list(range(g.n_darts))
            self.vertex_origin = list(range(g.n))
            self.outer = None
        d = self.map
        scale = 1
        for e in d.edges:
            scale = scale * d.weight(e).denominator // math.gcd(scale, d.weight(e).denominator)
        self.scale = scale
        self.w = {}
        self.pw = {}
        bits = len(d.edges) + 1
        for rank, e in enumerate(d.edges):
            wi = int(d.weight(e) * scale)
            self.w[e] = wi
            self.pw[e] = (wi << bits) | (1 << rank)
        self.adj = [[] for _ in range(d.n)]
        for x in range(d.n_darts):
            self.adj[d.vertex_of[x]].append((x, d.vertex_of[d.twin[x]], min(x, d.twin[x])))

    def edge(self, x: int) -> int:
        return min(x, self.map.twin[x])

    def tail(self, x: int) -> int:
        return self.map.vertex_of[x]

    def head(self, x: int) -> int:
        return self.map.vertex_of[self.map.twin[x]]

    def dijkstra(self, sources, allowed, perturbed: bool = False):
        wt = self.pw if perturbed else self.w
        dist = {s: 0 for s in sources}
        pred = {}
        heap = [(0, s) for s in sorted(set(sources))]
        heapq.heapify(heap)
        done = set()
        while heap:
            du, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for x, v, e in self.adj[u]:
                if e not in allowed:
                    continue
                nd = du + wt[e]
                if v not in dist or nd < dist[v]:
                    dist[v] = nd
                    pred[v] = x
                    heapq.heappush(heap, (nd, v))
        return dist, pred

    def path_to(self, pred, v) -> list[int]:
        """Darts from the search source(s) to ``v``."""
        out = []
        while v in pred:
            x = pred[v]
            out.append(x)
            v = self.tail(x)
        out.reverse()
        return out


@dataclass
class _Plan:
    """A final region with its boundary walk labelled N, E, S, W (walk order)."""

    faces: frozenset
    walk: list              # D darts, region on their side, starting with N
    cuts: tuple             # (a, b, c): N = walk[:a], E = walk[a:b], S = walk[b:c], W = walk[c:]
    kind: str               # "strip", "column", "stuck" or "fallback"


@dataclass
class MortarGraph:
    subgraph: EdgeSubset
    disk: _Disk
    supercolumns: list
    length: Fraction
    supercolumn_length: Fraction
    plans: list = field(default_factory=list)
    mortar_disk_edges: frozenset = frozenset()
    epsilon: Fraction = Fraction(1)
    kappa: int = 1
    source: EmbeddedGraph | None = None
    baseline: EdgeSubset | None = None
    stats: dict = field(default_factory=dict)


class _Builder:
    def __init__(self, disk: _Disk, epsilon: Fraction, kappa: int):
        self.disk = disk
        self.eps = epsilon
        self.kappa = kappa
        d = disk.map
        self.mortar = set()
        if disk.outer is not None:
            for x in d.faces[disk.outer]:
                self.mortar.add(disk.edge(x))
        else:
            for x in d.faces[0]:
                self.mortar.add(disk.edge(x))
        self.plans: list[_Plan] = []
        self.columns: list[frozenset] = []
        self.stats = {"stuck": 0, "fallback": 0, "columns": 0, "strips": 0, "truncated": 0}

    # -- region helpers ------------------------------------------------
    def region_edges(self, faces) -> set:
        d = self.disk.map
        out = set()
        for f in faces:
            for x in d.faces[f]:
                out.add(self.disk.edge(x))
        return out

    def next_on_boundary(self, x: int) -> int:
        d = self.disk.map
        y = d.rotation[d.twin[x]]
        while self.disk.edge(y) not in self.mortar:
            y = d.rotation[y]
        return y

    def walk_of(self, faces) -> list[int]:
        d = self.disk.map
        start = min(x for f in faces for x in d.faces[f] if self.disk.edge(x) in self.mortar)
        out = [start]
        x = self.next_on_boundary(start)
        while x != start:
            out.append(x)
            x = self.next_on_boundary(x)
        return out

    def split(self, faces) -> list[frozenset]:
        d = self.disk.map
        fs = sorted(faces)
        index = {f: i for i, f in enumerate(fs)}
        uf = _UnionFind(len(fs))
        for f in fs:
            for x in d.faces[f]:
                if self.disk.edge(x) in self.mortar:
                    continue
                other = d.face_of[d.twin[x]]
                if other in index:
                    uf.union(index[f], index[other])
        groups = {}
        for f in fs:
            groups.setdefault(uf.find(index[f]), []).append(f)
        return sorted((frozenset(v) for v in groups.values()), key=min)

    def vertices_of(self, walk) -> list[int]:
        return [self.disk.tail(x) for x in walk]

    # -- main ----------------------------------------------------------
    def run(self):
        d = self.disk.map
        all_faces = frozenset(f for f in range(len(d.faces)) if f != self.disk.outer)
        for region in self.split(all_faces):
            self.process(region)

    def eps_le(self, along: int, direct: int) -> bool:
        # along <= (1 + eps) * direct, in exact integers
        return along * self.eps.denominator <= (self.eps.denominator + self.eps.numerator) * direct

    def segments(self, walk, allowed) -> list[tuple[int, int]]:
        """Greedy maximal pieces of the closed walk whose proper subpaths are eps-short."""
        L = len(walk)
        verts = self.vertices_of(walk) + [self.disk.tail(walk[0])]
        pre = [0]
        for x in walk:
            pre.append(pre[-1] + self.disk.w[self.disk.edge(x)])
        cache = {}

        def dist(u):
            if u not in cache:
                cache[u] = self.disk.dijkstra([u], allowed)[0]
            return cache[u]

        out = []
        i = 0
        while i < L:
            j = i + 1
            limit = L if i > 0 else L - 1
            while j < limit:
                nj = j + 1
                dn = dist(verts[nj])
                ok = all(self.eps_le(pre[nj] - pre[x], dn[verts[x]]) for x in range(i + 1, j + 1))
                if ok:
                    ok = self.eps_le(pre[j] - pre[i], dist(verts[i])[verts[j]])
                if not ok:
                    break
                j = nj
            out.append((i, j))
            i = j
        return out

    def process(self, faces):
        walk = self.walk_of(faces)
        allowed = self.region_edges(faces)
        segs = self.segments(walk, allowed)
        if len(segs) < 2:
            self.fallback(faces, walk)
            return
        verts = self.vertices_of(walk) + [self.disk.tail(walk[0])]
        paths = []
        for i, j in segs:
            _, pred = self.disk.dijkstra([verts[i]], allowed, perturbed=True)
            paths.append(self.disk.path_to(pred, verts[j]))
        new = set()
        for p in paths:
            for x in p:
                if self.disk.edge(x) not in self.mortar:
                    new.add(self.disk.edge(x))
        if not new:
            # every shortest path runs along the boundary: either a segment is
            # itself shortest, or its shortest path is the complementary arc
            L = len(walk)
            for (i, j), p in zip(segs, paths):
                arc = frozenset(self.disk.edge(x) for x in walk[j:] + walk[:i])
                if frozenset(self.disk.edge(x) for x in p) == arc and arc:
                    rot = walk[j:] + walk[:j]
                    a = L - (j - i)
                    self.stats["strips"] += 1
                    self.strip(faces, rot, (a, a, L), "strip")
                    return
            self.stats["stuck"] += 1
            a = segs[0][1]
            b = segs[-1][0]
            self.strip(faces, walk, (a, b, len(walk)), "stuck")
            return
        self.mortar |= new
        seg_of = {}
        for k, (i, j) in enumerate(segs):
            for t in range(i, j):
                seg_of[walk[t]] = k
        path_edges = [frozenset(self.disk.edge(x) for x in p) for p in paths]
        on_path = frozenset().union(*path_edges)
        for sub in self.split(faces):
            sw = self.walk_of(sub)
            s_type = [x for x in sw if x in seg_of and self.disk.edge(x) not in path_edges[seg_of[x]]]
            if not s_type:
                if all(self.disk.edge(x) in on_path for x in sw):
                    self.process(sub)
                else:
                    self.fallback(sub, sw)
                continue
            ks = {seg_of[x] for x in s_type}
            k = ks.pop() if len(ks) == 1 else None
            s_set = set(s_type)
            if k is None or not all(x in s_set or self.disk.edge(x) in path_edges[k] for x in sw):
                self.fallback(sub, sw)
                continue
            lab = self.label_two_runs(sw, lambda x: x in s_set)
            if lab is None:
                self.fallback(sub, sw)
                continue
            self.stats["strips"] += 1
            self.strip(sub, *lab, "strip")

    def label_two_runs(self, walk, is_s):
        """Rotate a walk made of one S run and one N run to N-first; cuts (a, a, L)."""
        L = len(walk)
        flags = [is_s(x) for x in walk]
        starts = [t for t in range(L) if flags[t] and not flags[t - 1]]
        if len(starts) != 1 or all(flags):
            return None
        s0 = starts[0]
        t = s0
        while flags[t % L]:
            t += 1
        n0 = t % L
        rot = walk[n0:] + walk[:n0]
        a = sum(1 for x in rot if not is_s(x))
        return rot, (a, a, L)

    def marks(self, faces, walk, cuts, allowed=None) -> list[int]:
        """Greedy marks along S, left to right, as walk positions."""
        a, b, c = cuts
        L = len(walk)
        allowed = allowed if allowed is not None else self.region_edges(faces)
        n_verts = self.side_vertices(walk, 0, a)
        dn, _ = self.disk.dijkstra(n_verts, allowed)
        # S in walk order covers positions b..c; left to right is the reverse
        pos = list(range(c, b - 1, -1))
        cum = {c: 0}
        for t in range(c - 1, b - 1, -1):
            cum[t] = cum[t + 1] + self.disk.w[self.disk.edge(walk[t])]
        out = [pos[0]]
        for t in pos[1:]:
            v = self.disk.tail(walk[t % L])
            along = cum[t] - cum[out[-1]]
            if along * self.eps.denominator > self.eps.numerator * dn.get(v, 0):
                out.append(t)
        return out

    def side_vertices(self, walk, lo, hi) -> list[int]:
        L = len(walk)
        if hi == lo:
            return [self.disk.tail(walk[lo % L])]
        return [self.disk.tail(walk[t % L]) for t in range(lo, hi)] + [self.disk.head(walk[(hi - 1) % L])]

    def strip(self, faces, walk, cuts, kind):
        allowed = self.region_edges(faces)
        mk = self.marks(faces, walk, cuts, allowed)
        if len(mk) - 1 <= self.kappa:
            self.plans.append(_Plan(faces, walk, cuts, kind))
            return
        a, b, c = cuts
        L = len(walk)
        n_verts = self.side_vertices(walk, 0, a)
        _, pred = self.disk.dijkstra(n_verts, allowed, perturbed=True)
        col_edges = {}
        grew = False
        for idx in range(self.kappa, len(mk), self.kappa):
            v = self.disk.tail(walk[mk[idx] % L])
            p = self.disk.path_to(pred, v)
            if not p:
                continue
            es = frozenset(self.disk.edge(x) for x in p)
            self.columns.append(es)
            self.stats["columns"] += 1
            for e in es:
                col_edges.setdefault(e, len(self.columns) - 1)
            grew |= not es <= self.mortar
            self.mortar |= es
        if not grew:
            # no column leaves the boundary: end S just before mark kappa+1, the rest joins E
            self.stats["truncated"] += 1
            self.plans.append(_Plan(faces, walk, (a, mk[self.kappa + 1] + 1, c), kind))
            return
        s_set = set(walk[b:c])
        n_set = set(walk[:a])
        for sub in self.split(faces):
            sw = self.walk_of(sub)
            lab = self.label_column_brick(sw, s_set, n_set, col_edges)
            if lab is None:
                self.fallback(sub, sw)
                continue
            self.strip(sub, *lab, "column")

    def label_column_brick(self, walk, s_set, n_set, col_edges):
        """Walk order after S: W column, N, E column; cuts for an N-first rotation."""
        L = len(walk)
        is_s = [x in s_set for x in walk]
        starts = [t for t in range(L) if is_s[t] and not is_s[t - 1]]
        if len(starts) != 1 or all(is_s):
            return None
        t = starts[0]
        while is_s[t % L]:
            t += 1
        rest = [walk[(t + i) % L] for i in range(L - sum(is_s))]
        s_run = [walk[(starts[0] + i) % L] for i in range(sum(is_s))]
        kinds = []
        for x in rest:
            e = self.disk.edge(x)
            if x in n_set:
                kinds.append("n")
            elif e in col_edges:
                kinds.append(col_edges[e])
            else:
                return None
        if "n" in kinds:
            first = kinds.index("n")
            last = len(kinds) - 1 - kinds[::-1].index("n")
            if any(k != "n" for k in kinds[first:last + 1]):
                return None
            w_run, n_run, e_run = rest[:first], rest[first:last + 1], rest[last + 1:]
        else:
            if not kinds:
                return None
            c1 = kinds[0]
            split_at = 0
            while split_at < len(kinds) and kinds[split_at] == c1:
                split_at += 1
            # columns merged before reaching N: the left column is a shortest path
            w_run, n_run, e_run = [], rest[:split_at], rest[split_at:]
        new_walk = n_run + e_run + s_run + w_run
        a = len(n_run)
        b = a + len(e_run)
        c = b + len(s_run)
        return new_walk, (a, b, c)

    def fallback(self, faces, walk):
        """Trivially valid labelling: N and S single vertices, E and W the two halves."""
        self.stats["fallback"] += 1
        h = max(1, len(walk) // 2)
        self.plans.append(_Plan(faces, walk, (0, h, h), "fallback"))


def build_mortar(g: EmbeddedGraph, params: ApproxParams, baseline: EdgeSubset | None = None) -> MortarGraph:
    """Mortar graph of ``g``: the cut-open boundary, strip boundaries and supercolumns."""
    base = baseline if baseline is not None else baseline_cut_graph(g)
    disk = _Disk(g, base)
    b = _Builder(disk, params.epsilon, params.kappa)
    b.run()
    # plans whose properties fail on their own brick are relabelled
    plans = []
    for p in b.plans:
        brick = _brick_from_plan(disk, p, len(plans), b.marks(p.faces, p.walk, p.cuts))
        if check_brick_properties(brick, params.epsilon, params.kappa).ok:
            plans.append(p)
        else:
            b.stats["fallback"] += 1
            h = max(1, len(p.walk) // 2)
            plans.append(_Plan(p.faces, p.walk, (0, h, h), "fallback"))
    b.plans = plans
    g_edges = frozenset(g.edge_of(disk.dart_origin[e]) for e in b.mortar)
    sub = EdgeSubset.of(g, g_edges)
    cols = {}
    for p in plans:
        a, bb, c = p.cuts
        for lo, hi in ((a, bb), (c, len(p.walk))):
            es = frozenset(g.edge_of(disk.dart_origin[x]) for x in p.walk[lo:hi])
            if es:
                cols[es] = True
    supercolumns = [EdgeSubset.of(g, es) for es in sorted(cols, key=lambda s: sorted(s))]
    sc_edges = frozenset().union(*cols) if cols else frozenset()
    mg = MortarGraph(
        subgraph=sub,
        disk=disk,
        supercolumns=supercolumns,
        length=sub.length,
        supercolumn_length=sum((g.weight(e) for e in sc_edges), Fraction(0)),
        plans=plans,
        mortar_disk_edges=frozenset(b.mortar),
        epsilon=params.epsilon,
        kappa=params.kappa,
        source=g,
        baseline=base,
        stats=dict(b.stats),
    )
    mg.marks = [b.marks(p.faces, p.walk, p.cuts) for p in plans]
    return mg


# -- bricks --------------------------------------------------------------

@dataclass
class Brick:
    """Planar brick map with its boundary walk cut into N, E, S, W.

    ``walk`` lists brick darts with the brick interior on their side, N first;
    the sides are ``walk[:a]``, ``walk[a:b]``, ``walk[b:c]``, ``walk[c:]``.
    ``s_marks`` are walk positions on S from left to right.
    """

    index: int
    map: EmbeddedGraph
    walk: list
    cuts: tuple
    s_marks: list
    disk_dart: list          # brick dart -> disk dart
    kind: str

    def side(self, name: str) -> list[int]:
        a, b, c = self.cuts
        lo, hi = {"N": (0, a), "E": (a, b), "S": (b, c), "W": (c, len(self.walk))}[name]
        return self.walk[lo:hi]

    @property
    def north(self):
        return self.side("N")

    @property
    def east(self):
        return self.side("E")

    @property
    def south(self):
        return self.side("S")

    @property
    def west(self):
        return self.side("W")

    def vertex_at(self, pos: int) -> int:
        return self.map.vertex_of[self.walk[pos % len(self.walk)]]

    def side_positions(self, name: str) -> list[int]:
        a, b, c = self.cuts
        lo, hi = {"N": (0, a), "E": (a, b), "S": (b, c), "W": (c, len(self.walk))}[name]
        return list(range(lo, hi + 1))

    @property
    def boundary_length(self) -> Fraction:
        return sum((self.map.weight(x) for x in self.walk), Fraction(0))


def _brick_from_plan(disk: _Disk, plan: _Plan, index: int, marks) -> Brick:
    d = disk.map
    keep = set()
    for f in plan.faces:
        for x in d.faces[f]:
            keep.add(x)
            keep.add(d.twin[x])
    rotations = []
    for orb in d.vertices:
        cyc = [x for x in orb if x in keep]
        if cyc:
            rotations.append(cyc)
    pairs = [(x, d.twin[x], d.weight(x)) for x in sorted(keep) if x < d.twin[x]]
    bm, ids = from_rotations(rotations, pairs)
    inv = [0] * bm.n_darts
    for key, i in ids.items():
        inv[i] = key
    if bm.genus != 0:
        raise NonPlanarBrick("brick %d has Euler genus %d" % (index, bm.genus))
    walk = [ids[x] for x in plan.walk]
    return Brick(index, bm, walk, plan.cuts, list(marks), inv, plan.kind)


def extract_bricks(mg: MortarGraph) -> list[Brick]:
    """One brick per mortar face; raises :class:`NonPlanarBrick` on a non-planar brick."""
    bricks = [_brick_from_plan(mg.disk, p, i, mg.marks[i]) for i, p in enumerate(mg.plans)]
    seen = {}
    for br in bricks:
        for x in range(br.map.n_darts):
            e = min(br.disk_dart[x], mg.disk.map.twin[br.disk_dart[x]])
            if e in mg.mortar_disk_edges:
                continue
            if seen.setdefault(e, br.index) != br.index:
                raise NonPlanarBrick("edge %d lies inside two bricks" % e)
    return bricks


# -- property checks -----------------------------------------------------

@dataclass
class BrickReport:
    brick: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def _brick_dist(bm: EmbeddedGraph, sources) -> dict:
    dist = {s: Fraction(0) for s in sources}
    heap = [(Fraction(0), s) for s in sorted(set(sources))]
    heapq.heapify(heap)
    done = set()
    while heap:
        du, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for x in bm.vertices[u]:
            v = bm.vertex_of[bm.twin[x]]
            nd = du + bm.weight(x)
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def _side_walk(br: Brick, name: str):
    """(vertices, cumulative lengths) along a side in walk order."""
    pos = br.side_positions(name)
    verts = [br.vertex_at(p) for p in pos]
    cum = [Fraction(0)]
    for p in pos[:-1]:
        cum.append(cum[-1] + br.map.weight(br.walk[p % len(br.walk)]))
    return verts, cum


def check_brick_properties(br: Brick, epsilon, kappa: int | None = None) -> BrickReport:
    """Check planarity, the N E S W decomposition, shortness of N and S and the S marks."""
    eps = as_fraction(epsilon)
    bm = br.map
    bad = []
    if bm.genus != 0:
        bad.append("brick is not planar (Euler genus %d)" % bm.genus)
    outer = [bm.twin[x] for x in br.walk]
    face = bm.faces[bm.face_of[outer[0]]]
    if sorted(face) != sorted(outer) or len(set(outer)) != len(outer):
        bad.append("N E S W do not form the outer boundary walk")
    for t in range(len(br.walk)):
        nxt = bm.vertex_of[br.walk[(t + 1) % len(br.walk)]]
        if bm.vertex_of[bm.twin[br.walk[t]]] != nxt:
            bad.append("boundary walk is broken at position %d" % t)
            break
    cache = {}

    def dist(u):
        if u not in cache:
            cache[u] = _brick_dist(bm, [u])
        return cache[u]

    nv, ncum = _side_walk(br, "N")
    for i in range(len(nv)):
        for j in range(i + 1, len(nv)):
            if ncum[j] - ncum[i] != dist(nv[i])[nv[j]]:
                bad.append("N is not a shortest path between positions %d and %d" % (i, j))
                break
    sv, scum = _side_walk(br, "S")
    last = len(sv) - 1
    for i in range(len(sv)):
        for j in range(i + 1, len(sv)):
            if (i, j) == (0, last):
                continue
            if scum[j] - scum[i] > (1 + eps) * dist(sv[i])[sv[j]]:
                bad.append("S subpath %d..%d is not eps-short" % (i, j))
    marks = br.s_marks
    if kappa is not None and len(marks) - 1 > kappa:
        bad.append("%d marks exceed kappa %d" % (len(marks) - 1, kappa))
    dn = _brick_dist(bm, nv)
    a, b, c = br.cuts
    # left to right along S is decreasing walk position
    order = list(range(c, b - 1, -1))
    if not marks or marks[0] != c or any(m not in order for m in marks):
        bad.append("marks do not start at the left end of S")
    else:
        rank = {p: i for i, p in enumerate(order)}
        cum_from_left = {}
        acc = Fraction(0)
        for i, p in enumerate(order):
            if i:
                acc += bm.weight(br.walk[p % len(br.walk)])
            cum_from_left[p] = acc
        ms = sorted(marks, key=rank.get)
        m_i = 0
        for p in order:
            while m_i + 1 < len(ms) and rank[ms[m_i + 1]] <= rank[p]:
                m_i += 1
            along = cum_from_left[p] - cum_from_left[ms[m_i]]
            if along > eps * dn.get(br.vertex_at(p), Fraction(0)):
                bad.append("S vertex at position %d too far from its mark" % p)
    return BrickReport(br.index, bad)


# -- portals -------------------------------------------------------------

@dataclass(frozen=True)
class PortalSet:
    positions: tuple         # walk positions
    vertices: tuple          # brick vertices

    def __len__(self):
        return len(self.positions)


def select_portals(br: Brick, theta: int) -> PortalSet:
    """Greedy walk from the minimal-id boundary vertex.

    Every boundary vertex ends up within ``l(dB) / theta`` of a portal along
    the boundary, with at most ``theta`` portals.
    """
    if theta < 1:
        raise ValueError("theta must be at least 1")
    L = len(br.walk)
    verts = [br.vertex_at(p) for p in range(L)]
    start = min(range(L), key=lambda p: (verts[p], p))
    order = [(start + t) % L for t in range(L)]
    if theta >= len(set(verts)):
        chosen = []
        seen = set()
        for p in order:
            if verts[p] not in seen:
                seen.add(verts[p])
                chosen.append(p)
        return PortalSet(tuple(chosen), tuple(verts[p] for p in chosen))
    total = br.boundary_length
    step = total / theta
    pos = [Fraction(0)]
    for p in order[:-1]:
        pos.append(pos[-1] + br.map.weight(br.walk[p]))
    chosen = [0]

    def covered(t):
        if pos[t] - pos[chosen[-1]] <= step:
            return True
        return total - pos[t] <= step

    t = 1
    while t < L:
        if covered(t):
            t += 1
            continue
        best = t
        while best + 1 < L and pos[best + 1] <= pos[t] + step:
            best += 1
        chosen.append(best)
        t = best + 1
    positions = tuple(order[i] for i in chosen)
    return PortalSet(positions, tuple(verts[p] for p in positions))


def portal_gap(br: Brick, portals: PortalSet) -> Fraction:
    """Largest distance along the boundary from a boundary vertex to its nearest portal."""
    L = len(br.walk)
    pos = [Fraction(0)]
    for p in range(L):
        pos.append(pos[-1] + br.map.weight(br.walk[p]))
    total = pos[L]
    worst = Fraction(0)
    for t in range(L):
        best = None
        for q in portals.positions:
            dd = abs(pos[t] - pos[q])
            dd = min(dd, total - dd)
            best = dd if best is None else min(best, dd)
        worst = max(worst, best)
    return worst


# -- brick-copy graph ----------------------------------------------------

@dataclass
class BrickCopyGraph:
    map: EmbeddedGraph
    portal_edges: frozenset
    mortar_edges: frozenset
    brick_of: dict           # face -> brick index, for faces inside a brick copy
    vertex_map: list         # G vertex -> B+ vertex
    edge_origin: dict        # B+ edge -> G edge (None for portal edges)
    ew_edges: frozenset      # E and W edges of brick copies and their mortar copies
    contracted: EmbeddedGraph
    contracted_origin: dict  # contracted edge -> G edge or None


def brick_copy(mg: MortarGraph, bricks: Sequence[Brick], portals: Sequence[PortalSet],
               params: ApproxParams | None = None) -> BrickCopyGraph:
    """Embed each brick inside its mortar face, joined by zero-length portal edges."""
    g = mg.source
    disk = mg.disk
    origin = disk.dart_origin
    mortar_darts = set()
    for e in mg.subgraph.edges:
        mortar_darts.add(e)
        mortar_darts.add(g.twin[e])
    insert_after = {}        # G dart -> portal key inserted after it in the mortar rotation
    brick_insert = {}        # (brick, brick dart) -> portal key
    pairs = []
    for br, ps in zip(bricks, portals):
        if len(ps) == 0:
            raise ValueError("every brick needs at least one portal")
        L = len(br.walk)
        for pos in ps.positions:
            prev = origin[br.disk_dart[br.walk[(pos - 1) % L]]]
            key_m = ("pm", br.index, pos)
            key_b = ("pb", br.index, pos)
            insert_after[g.twin[prev]] = key_m
            brick_insert[(br.index, br.walk[pos])] = key_b
            pairs.append((key_m, key_b, Fraction(0)))
    rotations = []
    vertex_key = {}
    for v, orb in enumerate(g.vertices):
        cyc = []
        for x in orb:
            if x not in mortar_darts:
                continue
            cyc.append(("m", x))
            if x in insert_after:
                cyc.append(insert_after[x])
        if cyc:
            rotations.append(cyc)
            vertex_key[("m", v)] = cyc[0]
    for e in mg.subgraph.edges:
        pairs.append((("m", e), ("m", g.twin[e]), g.weight(e)))
    for br in bricks:
        bm = br.map
        for v, orb in enumerate(bm.vertices):
            cyc = []
            for x in orb:
                cyc.append(("b", br.index, x))
                if (br.index, x) in brick_insert:
                    cyc.append(brick_insert[(br.index, x)])
            rotations.append(cyc)
            vertex_key[("b", br.index, v)] = cyc[0]
        for e in bm.edges:
            pairs.append((("b", br.index, e), ("b", br.index, bm.twin[e]), bm.weight(e)))
    out, ids = from_rotations(rotations, pairs)
    edge_origin = {}
    portal_edges, mortar_edges = set(), set()
    for key, i in ids.items():
        e = out.edge_of(i)
        if key[0] == "m":
            edge_origin[e] = g.edge_of(key[1])
            mortar_edges.add(e)
        elif key[0] == "b":
            br = bricks[key[1]]
            edge_origin[e] = g.edge_of(origin[br.disk_dart[key[2]]])
        else:
            edge_origin[e] = None
            portal_edges.add(e)
    brick_of = {}
    for br in bricks:
        outer_face = br.map.face_of[br.map.twin[br.walk[0]]]
        for x in range(br.map.n_darts):
            if br.map.face_of[x] != outer_face:
                brick_of[out.face_of[ids[("b", br.index, x)]]] = br.index
    vertex_map = [None] * g.n
    on_mortar = set()
    for x in mortar_darts:
        on_mortar.add(g.vertex_of[x])
    for v in on_mortar:
        vertex_map[v] = out.vertex_of[ids[vertex_key[("m", v)]]]
    for br in bricks:
        for bv, orb in enumerate(br.map.vertices):
            gv = g.vertex_of[origin[br.disk_dart[orb[0]]]]
            if vertex_map[gv] is None:
                vertex_map[gv] = out.vertex_of[ids[vertex_key[("b", br.index, bv)]]]
    ew = set()
    for br in bricks:
        for x in br.east + br.west:
            ew.add(out.edge_of(ids[("b", br.index, x)]))
            ew.add(out.edge_of(ids[("m", origin[br.disk_dart[x]])]))
    # contract a spanning forest of the E and W edges
    uf = _UnionFind(out.n)
    forest = []
    for e in sorted(ew):
        if uf.union(out.vertex_of[e], out.vertex_of[out.twin[e]]):
            forest.append(e)
    con = contract_edges(out, forest)
    contracted_origin = {}
    for old, new in con.dart_map.items():
        if old < out.twin[old]:
            contracted_origin[con.map.edge_of(new)] = edge_origin[old]
    return BrickCopyGraph(out, frozenset(portal_edges), frozenset(mortar_edges), brick_of,
                          vertex_map, edge_origin, frozenset(ew), con.map, contracted_origin)
