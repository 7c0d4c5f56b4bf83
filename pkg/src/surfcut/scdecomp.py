"""Polyhedralization and surface-cut decompositions.

Decomposition trees are rooted binary trees stored as parallel lists indexed
by node: ``children[x]`` is ``()`` for a leaf or a pair of nodes, and
``leaf[x]`` is the edge id carried by a leaf (``-1`` for inner nodes). Every
non-root node stands for the tree edge to its parent; the cut at that edge
separates the leaves below ``x`` from the rest.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import HeavyWeightTooSmall, NooseExtractionFailure
from .surface_map import (
    EmbeddedGraph,
    _UnionFind,
    as_fraction,
    is_simple,
    star_faces,
    superpose_with_medial,
    triangulate,
)


# -- polyhedralization ---------------------------------------------------

@dataclass
class Polyhedral:
    """A polyhedral map with the source edges behind each of its edges.

    ``origin[e]`` is the reduced-source edge an allowed edge ``e`` is a piece
    of (``None`` for heavy edges); ``paths`` expands a reduced-source edge to
    the source edges it replaced.
    """

    map: EmbeddedGraph
    origin: dict
    paths: dict
    heavy_weight: Fraction
    source: EmbeddedGraph

    @property
    def allowed(self) -> frozenset:
        return frozenset(e for e, o in self.origin.items() if o is not None)

    def to_source(self, edges) -> frozenset:
        out = set()
        for e in edges:
            o = self.origin[self.map.edge_of(e)]
            if o is not None:
                out.update(self.paths[o])
        return frozenset(out)

    def from_source(self, edges) -> frozenset:
        want = {self.source.edge_of(e) for e in edges}
        keep = {o for o, path in self.paths.items() if set(path) <= want}
        return frozenset(e for e, o in self.origin.items() if o in keep)


def polyhedralize(g: EmbeddedGraph, heavy_weight=None, *, check: bool = True) -> Polyhedral:
    """Simple, triangulated, 3-connected refinement of ``g`` with heavy auxiliary edges.

    The map is first shrunk by :func:`cutgraph.simplify_exact` (pendant
    trees, degree-2 chains, monogon loops and the heavier side of digons
    never matter for a shortest cut graph). Then the medial graph is
    superposed twice and the faces are triangulated. Source edges survive as
    chains of pieces of exactly proportional weight; every added edge weighs
    ``heavy_weight``, which must exceed the baseline cut graph length
    (default: twice it plus one).
    """
    from .cutgraph import baseline_cut_graph, simplify_exact

    base = baseline_cut_graph(g).length
    if heavy_weight is None:
        heavy_weight = 2 * base + 1
    heavy_weight = as_fraction(heavy_weight)
    if heavy_weight <= base:
        raise HeavyWeightTooSmall("heavy weight %s does not exceed baseline length %s" % (heavy_weight, base))
    cur, paths = simplify_exact(g)
    if cur.m == 0 or any(len(orb) < 3 for orb in cur.vertices):
        raise NooseExtractionFailure("nothing to polyhedralize: simplified map is a point or a cycle")
    origin = {e: e for e in cur.edges}
    for _ in range(2):
        heavy = frozenset(e for e, o in origin.items() if o is None)
        nxt, ids = superpose_with_medial(cur, heavy_weight, with_ids=True, unsplit_weight=heavy)
        new_origin = {e: None for e in nxt.edges}
        for e in cur.edges:
            for d in (e, cur.twin[e]):
                new_origin[nxt.edge_of(ids[("h", d)])] = origin[e]
        cur, origin = nxt, new_origin
    nxt, ids = triangulate(cur, heavy_weight, with_ids=True)
    new_origin = {e: None for e in nxt.edges}
    for e in cur.edges:
        new_origin[nxt.edge_of(ids[("d", e)])] = origin[e]
    poly = Polyhedral(nxt, new_origin, paths, heavy_weight, g)
    if check:
        check_polyhedral(nxt)
    return poly


def _articulation_points(adj: dict, skip: int) -> set[int]:
    verts = [v for v in adj if v != skip]
    if not verts:
        return set()
    disc, low, out = {}, {}, set()
    counter = 0
    for root in verts:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        stack = [(root, -1, iter(adj[root]))]
        children = 0
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == skip or w == v:
                    continue
                if w not in disc:
                    disc[w] = low[w] = counter
                    counter += 1
                    stack.append((w, v, iter(adj[w])))
                    if v == root:
                        children += 1
                    advanced = True
                    break
                if w != parent:
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[v])
                if p != root and low[v] >= disc[p]:
                    out.add(p)
        if children > 1:
            out.add(root)
    return out


def _components(adj: dict, skip=()) -> int:
    skip = set(skip)
    seen = set()
    count = 0
    for s in adj:
        if s in seen or s in skip:
            continue
        count += 1
        stack = [s]
        seen.add(s)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen and w not in skip:
                    seen.add(w)
                    stack.append(w)
    return count


def is_three_connected(g: EmbeddedGraph) -> bool:
    """No separating set of at most two vertices (checked by removing each vertex in turn)."""
    adj = {v: sorted({w for w, _ in g.neighbours(v)} - {v}) for v in range(g.n)}
    if g.n <= 3:
        return _components(adj) == 1
    if _components(adj) != 1:
        return False
    for v in range(g.n):
        if _articulation_points(adj, v):
            return False
    return True


def short_nooses_contractible(g: EmbeddedGraph) -> bool:
    """Every noose through at most two vertices bounds a disk.

    A noose through one vertex needs a face meeting that vertex twice; a
    noose through two vertices needs two faces sharing both. In a simple
    triangulation the latter are the two sides of their common edge.
    """
    fverts = [[g.vertex_of[d] for d in orb] for orb in g.faces]
    for vs in fverts:
        if len(set(vs)) < len(vs):
            return False
    edge_faces = defaultdict(set)
    for e in g.edges:
        u, v = g.endpoints(e)
        edge_faces[(min(u, v), max(u, v))].update((g.face_of[e], g.face_of[g.twin[e]]))
    pair_faces = defaultdict(set)
    for fi, vs in enumerate(fverts):
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                u, v = vs[i], vs[j]
                pair_faces[(min(u, v), max(u, v))].add(fi)
    for key, fs in pair_faces.items():
        if len(fs) >= 2 and not fs <= edge_faces.get(key, set()):
            return False
    return True


def check_polyhedral(g: EmbeddedGraph) -> None:
    problems = []
    if not is_simple(g):
        problems.append("not simple")
    if any(len(orb) != 3 for orb in g.faces):
        problems.append("non-triangular face")
    if not is_three_connected(g):
        problems.append("not 3-connected")
    if not short_nooses_contractible(g):
        problems.append("short non-contractible noose")
    if problems:
        raise NooseExtractionFailure("polyhedralization failed: " + ", ".join(problems))


# -- decomposition trees -------------------------------------------------

@dataclass
class BranchDecomposition:
    children: list
    leaf: list
    root: int
    mid: list = field(default_factory=list)
    width: int = 0

    def postorder(self) -> list[int]:
        out, stack = [], [(self.root, False)]
        while stack:
            x, done = stack.pop()
            if done or not self.children[x]:
                out.append(x)
                continue
            stack.append((x, True))
            a, b = self.children[x]
            stack.append((b, False))
            stack.append((a, False))
        return out

    def leaves_below(self) -> list[frozenset]:
        below = [frozenset()] * len(self.children)
        for x in self.postorder():
            if self.children[x]:
                a, b = self.children[x]
                below[x] = below[a] | below[b]
            else:
                below[x] = frozenset((self.leaf[x],))
        return below

    def tree_edges(self) -> list[int]:
        return [x for x in range(len(self.children)) if x != self.root]


def compute_mids(g: EmbeddedGraph, children, leaf, root) -> list[frozenset]:
    """mid(x): vertices incident to edges both below and outside node ``x``."""
    deg = [len(orb) for orb in g.vertices]
    bd = BranchDecomposition(children, leaf, root)
    counts = [None] * len(children)
    mids = [frozenset()] * len(children)
    for x in bd.postorder():
        if children[x]:
            a, b = children[x]
            c = dict(counts[a])
            for v, k in counts[b].items():
                c[v] = c.get(v, 0) + k
            counts[a] = counts[b] = None
        else:
            e = leaf[x]
            c = {}
            for v in g.endpoints(e):
                c[v] = c.get(v, 0) + 1
        c = {v: k for v, k in c.items() if k < deg[v]}
        counts[x] = c
        mids[x] = frozenset(c)
    return mids


def _finish(g, children, leaf, root) -> BranchDecomposition:
    mids = compute_mids(g, children, leaf, root)
    width = max((len(m) for m in mids), default=0)
    return BranchDecomposition(children, leaf, root, mids, width)


def branch_decomposition(g: EmbeddedGraph) -> BranchDecomposition:
    """Greedy branch decomposition.

    Clusters start as single edges. Repeatedly pick the vertex whose incident
    clusters have the smallest joint boundary and merge those clusters,
    smallest joint boundary pair first, until the vertex is internal.
    """
    if g.m == 0:
        raise ValueError("branch decomposition of a map without edges")
    deg = [len(orb) for orb in g.vertices]
    children: list = []
    leaf: list = []
    bnd: dict[int, dict] = {}
    at: dict[int, set] = defaultdict(set)
    for e in g.edges:
        x = len(children)
        children.append(())
        leaf.append(e)
        c = {}
        for v in g.endpoints(e):
            c[v] = c.get(v, 0) + 1
        c = {v: k for v, k in c.items() if k < deg[v]}
        bnd[x] = c
        for v in c:
            at[v].add(x)

    def union(cs):
        c = {}
        for x in cs:
            for v, k in bnd[x].items():
                c[v] = c.get(v, 0) + k
        return {v: k for v, k in c.items() if k < deg[v]}

    def cost(v):
        return len(union(at[v]))

    heap = [(cost(v), v) for v in sorted(at) if len(at[v]) >= 2]
    heapq.heapify(heap)
    while heap:
        c, v = heapq.heappop(heap)
        if len(at[v]) < 2:
            continue
        now = cost(v)
        if now != c:
            heapq.heappush(heap, (now, v))
            continue
        cs = sorted(at[v])
        touched = set()
        while len(cs) > 1:
            best = None
            for i in range(len(cs)):
                for j in range(i + 1, len(cs)):
                    k = len(union((cs[i], cs[j])))
                    if best is None or k < best[0]:
                        best = (k, i, j)
            _, i, j = best
            a, b = cs[i], cs[j]
            x = len(children)
            children.append((a, b))
            leaf.append(-1)
            merged = union((a, b))
            for y in (a, b):
                for u in bnd[y]:
                    at[u].discard(y)
                    touched.add(u)
                del bnd[y]
            bnd[x] = merged
            for u in merged:
                at[u].add(x)
            cs = [y for y in cs if y not in (a, b)] + [x]
        for u in sorted(touched):
            if len(at[u]) >= 2:
                heapq.heappush(heap, (cost(u), u))
    rest = sorted(bnd)
    while len(rest) > 1:
        a, b = rest[0], rest[1]
        x = len(children)
        children.append((a, b))
        leaf.append(-1)
        rest = rest[2:] + [x]
    return _finish(g, children, leaf, rest[0])


# -- carvings of the medial graph ----------------------------------------

def medial_adjacency(g: EmbeddedGraph) -> dict[int, list[int]]:
    """Medial graph on edge ids: one adjacency per corner (loops at a medial vertex omitted)."""
    adj = {e: [] for e in g.edges}
    for x in range(g.n_darts):
        a, b = g.edge_of(x), g.edge_of(g.rotation[x])
        if a != b:
            adj[a].append(b)
            adj[b].append(a)
    return adj


@dataclass
class CarvingDecomposition:
    children: list
    leaf: list
    root: int
    width: int
    is_bond: bool

    def as_branch(self, g: EmbeddedGraph) -> BranchDecomposition:
        return _finish(g, self.children, self.leaf, self.root)

    def sets(self) -> list[frozenset]:
        return BranchDecomposition(self.children, self.leaf, self.root).leaves_below()


def carving_width(adj: dict, children, leaf, root) -> int:
    bd = BranchDecomposition(children, leaf, root)
    below = bd.leaves_below()
    best = 0
    for x in bd.tree_edges():
        s = below[x]
        cut = sum(1 for u in s for w in adj[u] if w not in s)
        best = max(best, cut)
    return best


def is_bond_carving(adj: dict, children, leaf, root) -> bool:
    bd = BranchDecomposition(children, leaf, root)
    below = bd.leaves_below()
    every = frozenset(adj)
    for x in bd.tree_edges():
        s = below[x]
        for side in (s, every - s):
            if _induced_components(adj, side) != 1:
                return False
    return True


def _induced_components(adj: dict, side) -> int:
    side = set(side)
    seen = set()
    count = 0
    for s in side:
        if s in seen:
            continue
        count += 1
        seen.add(s)
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w in side and w not in seen:
                    seen.add(w)
                    stack.append(w)
    return count


def medial_carving_from_branch(bd: BranchDecomposition, g: EmbeddedGraph) -> CarvingDecomposition:
    """Same tree, leaves read as medial vertices."""
    adj = medial_adjacency(g)
    children = list(bd.children)
    leaf = list(bd.leaf)
    return CarvingDecomposition(children, leaf, bd.root, carving_width(adj, children, leaf, bd.root),
                                is_bond_carving(adj, children, leaf, bd.root))


def to_bond_carving(cd: CarvingDecomposition, adj: dict) -> CarvingDecomposition:
    """Rebuild ``cd`` top-down so both sides of every tree edge are connected.

    Each set is split along the input tree when that split is already valid.
    Otherwise a spanning tree of the set is cut at an edge leaving an
    attachment vertex (a vertex adjacent to the outside) on both sides, picking
    the cut that agrees best with the input split. This always succeeds when
    the graph has no cut vertex.
    """
    if cd.is_bond:
        return cd
    n = len(cd.children)
    parent = [-1] * n
    depth = [0] * n
    bd = BranchDecomposition(cd.children, cd.leaf, cd.root)
    below_leaf = bd.leaves_below()
    order = list(reversed(bd.postorder()))
    for x in order:
        if cd.children[x]:
            for c in cd.children[x]:
                parent[c] = x
                depth[c] = depth[x] + 1
    leaf_node = {cd.leaf[x]: x for x in range(n) if not cd.children[x]}
    below = below_leaf
    every = frozenset(adj)

    children: list = []
    leaf: list = []
    bond = True

    def connected(side):
        return _induced_components(adj, side) == 1

    def touches(side, outside):
        return any(w in outside for u in side for w in adj[u])

    def tree_split(s, guide, outside):
        root = min(s)
        par = {root: None}
        order = [root]
        # grow the tree inside the guide sides first so a good cut exists
        inside = guide[0]
        frontier = [(0, root)]
        while frontier:
            _, u = heapq.heappop(frontier)
            for w in adj[u]:
                if w in s and w not in par:
                    par[w] = u
                    order.append(w)
                    heapq.heappush(frontier, (0 if (u in inside) == (w in inside) else 1, w))
        if len(par) != len(s):
            return None
        att = {u for u in s if any(w in outside for w in adj[u])} if outside else set()
        sub_att = {u: (1 if u in att else 0) for u in s}
        sub_in = {u: (1 if u in inside else 0) for u in s}
        size = {u: 1 for u in s}
        for u in reversed(order[1:]):
            p = par[u]
            sub_att[p] += sub_att[u]
            sub_in[p] += sub_in[u]
            size[p] += size[u]
        total_att = len(att)
        kids = defaultdict(list)
        depth = {root: 0}
        for w in order[1:]:
            kids[par[w]].append(w)
            depth[w] = depth[par[w]] + 1
        # cut(X) = deg(X) - 2 e(X); an edge lies inside subtree(u) when u is above its lca
        deg = {u: len(adj[u]) for u in s}
        out = {u: sum(1 for w in adj[u] if w not in s) for u in s}
        twice_inner = {u: 0 for u in s}
        for v in s:
            for w in adj[v]:
                if w not in s:
                    continue
                x, y = v, w
                while depth[x] > depth[y]:
                    x = par[x]
                while depth[y] > depth[x]:
                    y = par[y]
                while x != y:
                    x, y = par[x], par[y]
                twice_inner[x] += 1
        for u in reversed(order[1:]):
            p = par[u]
            deg[p] += deg[u]
            out[p] += out[u]
            twice_inner[p] += twice_inner[u]
        best = None
        for u in order[1:]:
            if outside and not 0 < sub_att[u] < total_att:
                continue
            cut_part = deg[u] - twice_inner[u]
            # edges from the part to the rest count in both cuts
            cross = cut_part - out[u]
            cut_rest = (deg[root] - deg[u]) - (twice_inner[root] - twice_inner[u] - 2 * cross)
            # mismatch between subtree(u) and the guide side it resembles most
            miss_in = (size[u] - sub_in[u]) + (len(inside) - sub_in[u])
            miss = min(miss_in, len(s) - miss_in)
            key = (max(cut_part, cut_rest), miss, abs(len(s) - 2 * size[u]), u)
            if best is None or key < best[0]:
                best = (key, u)
        if best is None:
            return None
        part = {best[1]}
        stack = [best[1]]
        while stack:
            x = stack.pop()
            for w in kids[x]:
                part.add(w)
                stack.append(w)
        part = frozenset(part)
        return part, s - part

    def guide_split(cur):
        # children of the lowest input node holding all of cur
        nodes = [leaf_node[v] for v in cur]
        a = nodes[0]
        for b in nodes[1:]:
            while depth[a] > depth[b]:
                a = parent[a]
            while depth[b] > depth[a]:
                b = parent[b]
            while a != b:
                a, b = parent[a], parent[b]
        l, r = cd.children[a]
        return cur & below[l], cur & below[r]

    def build(top):
        nonlocal bond
        work = [(top, False)]
        made = {}
        while work:
            cur, ready = work.pop()
            if len(cur) == 1:
                (lab,) = cur
                made[cur] = len(children)
                children.append(())
                leaf.append(lab)
                continue
            if not ready:
                outside = every - cur
                p, q = guide_split(cur)
                if connected(p) and connected(q) and (not outside or (touches(p, outside) and touches(q, outside))):
                    split = (p, q)
                else:
                    split = tree_split(cur, (p, q), outside)
                    if split is None:
                        bond = False
                        split = (p, q)
                splits[cur] = split
                work.append((cur, True))
                work.append((split[1], False))
                work.append((split[0], False))
            else:
                p, q = splits[cur]
                made[cur] = len(children)
                children.append((made[p], made[q]))
                leaf.append(-1)
        return made[top]

    splits = {}
    root = build(every)
    bond = bond and is_bond_carving(adj, children, leaf, root)
    return CarvingDecomposition(children, leaf, root, carving_width(adj, children, leaf, root), bond)


# -- nooses and surface-cut decompositions -------------------------------

@dataclass(frozen=True)
class Noose:
    """Closed curve through vertices and faces: ``cycle`` alternates ("v", id) and ("f", id)."""

    cycle: tuple

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(x for kind, x in self.cycle if kind == "v")

    def __len__(self):
        return len(self.vertices)


def theta_of_nooses(nooses) -> int:
    """Sum over vertices met at least twice of (occurrences - 1), counting every pass."""
    count: dict[int, int] = defaultdict(int)
    for nz in nooses:
        for v in nz.vertices:
            count[v] += 1
    return sum(k - 1 for k in count.values() if k >= 2)


@dataclass(frozen=True)
class Region:
    side: int                 # 1 for the leaves below the tree edge, 2 for the rest
    edges: frozenset
    components: int


@dataclass
class SurfaceCutDecomposition:
    branch: BranchDecomposition
    map: EmbeddedGraph
    nooses: dict
    regions: dict
    theta_values: dict
    noose_cap: int
    theta_cap: int
    route: str = "a"
    carving_width: int = 0
    is_bond: bool = True

    @property
    def max_theta(self) -> int:
        return max(self.theta_values.values(), default=0)

    @property
    def max_nooses(self) -> int:
        return max((len(v) for v in self.nooses.values()), default=0)


def _corner_face(g: EmbeddedGraph, x: int) -> int:
    # corner (x, next x) lies in the face traversed by next x
    return g.face_of[g.rotation[x]]


def extract_nooses(g: EmbeddedGraph, side_edges: frozenset) -> list[Noose]:
    """Nooses separating ``side_edges`` from the other edges.

    Cut corners (consecutive darts on different sides) are paired twice: at
    their vertex, the two ends of each run of side darts; in their face, the
    two ends of each run of side darts along the face walk. Following both
    pairings alternately traces closed curves.
    """
    inside = [g.edge_of(d) in side_edges for d in range(g.n_darts)]
    rot = g.rotation
    tw = g.twin
    cut = [inside[x] != inside[rot[x]] for x in range(g.n_darts)]
    vpair = {}
    for orb in g.vertices:
        k = len(orb)
        starts = [i for i in range(k) if cut[orb[i - 1]] and inside[orb[i]]]
        for i in starts:
            # corner before the run is (orb[i-1], orb[i]); walk to the run's end
            j = i
            while inside[orb[(j + 1) % k]]:
                j += 1
            a, b = orb[i - 1], orb[j % k]
            vpair[a], vpair[b] = b, a
    fpair = {}
    for orb in g.faces:
        k = len(orb)
        # corner between orb[i] and orb[i+1] in the face is the rotation corner (tw orb[i], orb[i+1])
        corner = [tw[orb[i]] for i in range(k)]
        side = [inside[d] for d in orb]
        starts = [i for i in range(k) if side[i] and not side[i - 1]]
        for i in starts:
            j = i
            while side[(j + 1) % k]:
                j += 1
            a, b = corner[i - 1], corner[j % k]
            fpair[a], fpair[b] = b, a
    seen = set()
    out = []
    for start in sorted(vpair):
        if start in seen:
            continue
        cyc = []
        x = start
        while x not in seen:
            y = vpair[x]
            seen.add(x)
            seen.add(y)
            cyc.append(("v", g.vertex_of[x]))
            cyc.append(("f", _corner_face(g, y)))
            x = fpair[y]
        out.append(Noose(tuple(cyc)))
    return out


def split_regions(g: EmbeddedGraph, side_edges: frozenset) -> tuple[Region, Region]:
    """The two sides of the nooses, as edge sets with their component counts."""
    uf = _UnionFind(g.n_darts)
    inside = [g.edge_of(d) in side_edges for d in range(g.n_darts)]
    for e in g.edges:
        uf.union(e, g.twin[e])
    for x in range(g.n_darts):
        y = g.rotation[x]
        if inside[x] == inside[y]:
            uf.union(x, y)
    for orb in g.faces:
        outs = [d for d in orb if not inside[d]]
        if len(outs) < len(orb):
            # the central piece of a cut face touches every outer run
            for d in outs[1:]:
                uf.union(outs[0], d)
        else:
            for d in orb[1:]:
                uf.union(orb[0], d)
    regions = []
    for s in (True, False):
        es = frozenset(e for e in g.edges if inside[e] == s)
        comps = len({uf.find(e) for e in es})
        regions.append(Region(1 if s else 2, es, comps))
    return regions[0], regions[1]


def surface_cut_from_bond(bond: CarvingDecomposition, g: EmbeddedGraph, *, noose_cap: int | None = None,
                          theta_cap: int | None = None, route: str = "a", validate: bool = True) -> SurfaceCutDecomposition:
    genus = g.genus
    noose_cap = 2 * genus + 2 if noose_cap is None else noose_cap
    theta_cap = 4 * genus + 4 if theta_cap is None else theta_cap
    branch = bond.as_branch(g)
    below = branch.leaves_below()
    nooses, regions, thetas = {}, {}, {}
    for x in branch.tree_edges():
        s = below[x]
        nz = extract_nooses(g, s)
        nooses[x] = nz
        regions[x] = split_regions(g, s)
        thetas[x] = theta_of_nooses(nz)
    scd = SurfaceCutDecomposition(branch, g, nooses, regions, thetas, noose_cap, theta_cap, route,
                                  bond.width, bond.is_bond)
    if validate:
        problems = validate_scd(scd)
        if problems:
            raise NooseExtractionFailure("%d violations, first: %s" % (len(problems), problems[0]))
    return scd


def validate_scd(scd: SurfaceCutDecomposition) -> list[str]:
    """Every per-edge condition of a surface-cut decomposition; returns the violations."""
    out = []
    g = scd.map
    for x in scd.branch.tree_edges():
        mid = scd.branch.mid[x]
        r1, r2 = scd.regions[x]
        if r1.components + r2.components != 2 or r1.components != 1:
            out.append("edge %d: %d + %d regions" % (x, r1.components, r2.components))
        nz = scd.nooses[x]
        met = set()
        for n in nz:
            met.update(n.vertices)
        if not met <= mid:
            out.append("edge %d: noose meets vertices outside mid" % x)
        for i in range(len(nz)):
            for j in range(i + 1, len(nz)):
                if not set(nz[i].vertices) & set(nz[j].vertices) <= mid:
                    out.append("edge %d: nooses %d, %d meet outside mid" % (x, i, j))
        if len(nz) > scd.noose_cap:
            out.append("edge %d: %d nooses exceed cap %d" % (x, len(nz), scd.noose_cap))
        if scd.theta_values[x] > scd.theta_cap:
            out.append("edge %d: theta %d exceeds cap %d" % (x, scd.theta_values[x], scd.theta_cap))
    del g
    return out


@dataclass
class DecompositionBundle:
    """What the dynamic program needs: the decomposed map, its allowed edges and the way back."""

    scd: SurfaceCutDecomposition
    map: EmbeddedGraph
    allowed: frozenset
    to_source: object


def build_scd(g: EmbeddedGraph, route: str = "a", *, noose_cap=None, theta_cap=None, heavy_weight=None) -> DecompositionBundle:
    """Surface-cut decomposition by route ``a`` (polyhedralize first) or ``b`` (directly on ``g``)."""
    if route == "a":
        poly = polyhedralize(g, heavy_weight)
        work, allowed, back = poly.map, poly.allowed, poly.to_source
    elif route == "b":
        work, allowed = g, frozenset(g.edges)

        def back(edges):
            return frozenset(g.edge_of(e) for e in edges)
    else:
        raise ValueError("route must be 'a' or 'b'")
    bd = branch_decomposition(work)
    adj = medial_adjacency(work)
    bond = to_bond_carving(medial_carving_from_branch(bd, work), adj)
    if not bond.is_bond and route == "b":
        # bridges make medial cut vertices; excluded spokes into every face remove them
        work, ids = star_faces(g, with_ids=True)
        lookup = {work.edge_of(ids[("h", e)]): e for e in g.edges}
        allowed = frozenset(lookup)

        def back(edges):
            return frozenset(lookup[work.edge_of(e)] for e in edges)
        bd = branch_decomposition(work)
        adj = medial_adjacency(work)
        bond = to_bond_carving(medial_carving_from_branch(bd, work), adj)
    if not bond.is_bond:
        raise NooseExtractionFailure("no bond carving: the medial graph has a cut vertex")
    scd = surface_cut_from_bond(bond, work, noose_cap=noose_cap, theta_cap=theta_cap, route=route)
    return DecompositionBundle(scd, work, allowed, back)
