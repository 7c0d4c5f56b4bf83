"""Dart-based combinatorial maps of graphs cellularly embedded on orientable surfaces.

A map on ``N`` darts is given by two permutations of ``range(N)``:

* ``twin``: fixed-point free involution pairing the two darts of an edge;
* ``rotation``: the next dart counterclockwise around the same vertex.

Faces are the orbits of ``rotation . twin`` (apply ``twin`` first). A face
lies on the right of each of its darts. Edges are named by the smaller of
their two dart ids; vertices and faces are numbered ``0..n-1`` in increasing
order of the minimal dart of their orbit.

All lengths are :class:`fractions.Fraction`. Maps are immutable: every
operation returns a new map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import (
    EmptyGraph,
    EmptySubgraph,
    FaceDegreeTooSmall,
    FixedPointTwin,
    NegativeWeight,
    NonCellular,
    NonInvolution,
    OddGenusParityForOrientable,
    ParseError,
    PermutationDomainMismatch,
)

ZERO = Fraction(0)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("weights must be exact; got float %r" % value)
    return Fraction(value)


def orbits(perm: Sequence[int], domain: Iterable[int] | None = None) -> list[tuple[int, ...]]:
    """Cycles of ``perm`` restricted to ``domain``, each starting at its minimal element."""
    seen = set()
    out = []
    for start in sorted(domain) if domain is not None else range(len(perm)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        d = perm[start]
        while d != start:
            cyc.append(d)
            seen.add(d)
            d = perm[d]
        out.append(tuple(cyc))
    return out


class EmbeddedGraph:
    """Immutable combinatorial map with exact edge weights.

    ``isolated`` counts vertices without darts; it is only meaningful for the
    one-vertex map with no edges (a point on the sphere).
    """

    __slots__ = (
        "twin", "rotation", "_weights", "isolated", "vertices", "vertex_of",
        "faces", "face_of", "edges", "_genus",
    )

    def __init__(self, twin: Sequence[int], rotation: Sequence[int],
                 weights: Mapping[int, object], isolated: int = 0, *, validate: bool = True):
        twin = tuple(twin)
        rotation = tuple(rotation)
        n_darts = len(twin)
        if len(rotation) != n_darts:
            raise PermutationDomainMismatch("twin and rotation have different dart sets")
        if validate:
            if sorted(rotation) != list(range(n_darts)):
                raise PermutationDomainMismatch("rotation is not a permutation of the darts")
            for d, t in enumerate(twin):
                if not 0 <= t < n_darts:
                    raise PermutationDomainMismatch("twin maps dart %d outside the dart set" % d)
                if t == d:
                    raise FixedPointTwin("twin fixes dart %d" % d)
                if twin[t] != d:
                    raise NonInvolution("twin is not an involution at dart %d" % d)
        self.twin = twin
        self.rotation = rotation
        w = {}
        for key, value in weights.items():
            e = min(key, twin[key])
            w[e] = as_fraction(value)
        self.edges = tuple(d for d in range(n_darts) if d < twin[d])
        if validate:
            missing = [e for e in self.edges if e not in w]
            if missing:
                raise PermutationDomainMismatch("no weight for edges %s" % missing[:5])
            for e, value in w.items():
                if value < 0:
                    raise NegativeWeight("edge %d has weight %s" % (e, value))
        self._weights = w
        self.isolated = isolated
        self.vertices = orbits(rotation)
        vertex_of = [0] * n_darts
        for i, orb in enumerate(self.vertices):
            for d in orb:
                vertex_of[d] = i
        self.vertex_of = tuple(vertex_of)
        phi = [rotation[twin[d]] for d in range(n_darts)]
        self.faces = orbits(phi)
        face_of = [0] * n_darts
        for i, orb in enumerate(self.faces):
            for d in orb:
                face_of[d] = i
        self.face_of = tuple(face_of)
        self._genus = None
        if validate:
            if n_darts == 0 and isolated != 1:
                raise NonCellular("a map without darts must be a single point")
            if n_darts and isolated:
                raise NonCellular("isolated vertex in a map with edges")
            if not self.is_connected():
                raise NonCellular("graph is disconnected")

    # -- basic counts ---------------------------------------------------
    @property
    def n_darts(self) -> int:
        return len(self.twin)

    @property
    def n(self) -> int:
        return len(self.vertices) + self.isolated

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def f(self) -> int:
        return len(self.faces) + self.isolated

    @property
    def genus(self) -> int:
        if self._genus is None:
            self._genus = 2 - self.n + self.m - self.f
        return self._genus

    def weight(self, e: int) -> Fraction:
        return self._weights[min(e, self.twin[e])]

    @property
    def weights(self) -> dict[int, Fraction]:
        return dict(self._weights)

    def edge_of(self, d: int) -> int:
        return min(d, self.twin[d])

    def tail(self, d: int) -> int:
        return self.vertex_of[d]

    def head(self, d: int) -> int:
        return self.vertex_of[self.twin[d]]

    def endpoints(self, e: int) -> tuple[int, int]:
        return self.vertex_of[e], self.vertex_of[self.twin[e]]

    def prev_rotation(self) -> list[int]:
        prev = [0] * self.n_darts
        for d, nxt in enumerate(self.rotation):
            prev[nxt] = d
        return prev

    def total_weight(self) -> Fraction:
        return sum(self._weights.values(), ZERO)

    def degree(self, v: int) -> int:
        return len(self.vertices[v]) if v < len(self.vertices) else 0

    def is_connected(self) -> bool:
        if self.n_darts == 0:
            return self.isolated <= 1
        parent = list(range(len(self.vertices)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            a, b = find(self.vertex_of[e]), find(self.vertex_of[self.twin[e]])
            if a != b:
                parent[a] = b
        return len({find(v) for v in range(len(self.vertices))}) == 1

    def neighbours(self, v: int) -> list[tuple[int, int]]:
        """(neighbour vertex, edge id) pairs in rotation order."""
        return [(self.head(d), self.edge_of(d)) for d in self.vertices[v]]

    def __eq__(self, other):
        return (isinstance(other, EmbeddedGraph) and self.twin == other.twin
                and self.rotation == other.rotation and self._weights == other._weights
                and self.isolated == other.isolated)

    def __hash__(self):
        return hash((self.twin, self.rotation, self.isolated))

    def __repr__(self):
        return "EmbeddedGraph(n=%d, m=%d, f=%d, genus=%d)" % (self.n, self.m, self.f, self.genus)


def point_map() -> EmbeddedGraph:
    """The single vertex on the sphere."""
    return EmbeddedGraph((), (), {}, isolated=1)


def build_map(rotation: Sequence[int], twin: Sequence[int], weights: Mapping[int, object]) -> EmbeddedGraph:
    """Validated map from raw permutations (``weights`` keyed by either dart of an edge)."""
    g = EmbeddedGraph(twin, rotation, weights)
    euler_genus(g)
    return g


def trace_faces(g: EmbeddedGraph) -> list[tuple[int, ...]]:
    return list(g.faces)


def euler_genus(g: EmbeddedGraph) -> int:
    genus = g.genus
    if genus < 0 or genus % 2:
        raise OddGenusParityForOrientable("Euler genus %d is not a non-negative even number" % genus)
    return genus


def from_rotations(rotations: Sequence[Sequence[Hashable]],
                   pairs: Iterable[tuple[Hashable, Hashable, object]],
                   *, validate: bool = True) -> tuple[EmbeddedGraph, dict]:
    """Build a map from per-vertex cyclic dart lists with arbitrary dart keys.

    Dart ids are assigned in the order keys appear in ``rotations``. Returns
    the map and the key -> dart id dictionary.
    """
    ids = {}
    rot = []
    isolated = 0
    for cyc in rotations:
        if not cyc:
            isolated += 1
            continue
        first = len(ids)
        for key in cyc:
            if key in ids:
                raise PermutationDomainMismatch("dart key %r listed twice" % (key,))
            ids[key] = len(ids)
        k = len(cyc)
        rot.extend(first + (i + 1) % k for i in range(k))
    twin = [-1] * len(ids)
    weights = {}
    for a, b, w in pairs:
        da, db = ids[a], ids[b]
        if twin[da] != -1 or twin[db] != -1:
            raise NonInvolution("dart key paired twice")
        twin[da], twin[db] = db, da
        weights[min(da, db)] = w
    if -1 in twin:
        raise FixedPointTwin("unpaired dart")
    return EmbeddedGraph(twin, rot, weights, isolated=isolated, validate=validate), ids


# -- sub-maps ------------------------------------------------------------

def sub_rotation(g: EmbeddedGraph, darts: Iterable[int]) -> dict[int, int]:
    """Rotation restricted to ``darts`` (next dart of the set around the same vertex)."""
    darts = set(darts)
    nxt = {}
    for orb in g.vertices:
        present = [d for d in orb if d in darts]
        k = len(present)
        for i, d in enumerate(present):
            nxt[d] = present[(i + 1) % k]
    return nxt


def sub_face_orbits(g: EmbeddedGraph, edges: Iterable[int]) -> list[tuple[int, ...]]:
    darts = set()
    for e in edges:
        darts.add(e)
        darts.add(g.twin[e])
    nxt = sub_rotation(g, darts)
    seen = set()
    out = []
    for start in sorted(darts):
        if start in seen:
            continue
        cyc = []
        d = start
        while d not in seen:
            seen.add(d)
            cyc.append(d)
            d = nxt[g.twin[d]]
        out.append(tuple(cyc))
    return out


def restrict(g: EmbeddedGraph, edges: Iterable[int], *, validate: bool = True) -> tuple[EmbeddedGraph, dict[int, int]]:
    """Sub-map on ``edges`` with the induced rotation; returns (map, old dart -> new dart)."""
    keep = set()
    for e in edges:
        keep.add(e)
        keep.add(g.twin[e])
    if not keep:
        raise EmptySubgraph("restriction to no edges")
    rotations = []
    for orb in g.vertices:
        cyc = [d for d in orb if d in keep]
        if cyc:
            rotations.append(cyc)
    pairs = [(e, g.twin[e], g.weight(e)) for e in sorted(keep) if e < g.twin[e]]
    h, ids = from_rotations(rotations, pairs, validate=validate)
    return h, ids


@dataclass(frozen=True)
class EdgeSubset:
    """Subgraph of a host map: edge ids plus extra (possibly isolated) vertices."""

    edges: frozenset
    length: Fraction
    vertices: frozenset = field(default_factory=frozenset)

    @classmethod
    def of(cls, g: EmbeddedGraph, edges: Iterable[int] = (), vertices: Iterable[int] = ()) -> "EdgeSubset":
        es = frozenset(g.edge_of(e) for e in edges)
        return cls(es, sum((g.weight(e) for e in es), ZERO), frozenset(vertices))

    def vertex_set(self, g: EmbeddedGraph) -> set[int]:
        vs = set(self.vertices)
        for e in self.edges:
            vs.update(g.endpoints(e))
        return vs

    def sorted_edges(self) -> tuple[int, ...]:
        return tuple(sorted(self.edges))

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class SurfacePiece:
    genus: int
    boundary_cycles: int

    @property
    def is_disk(self) -> bool:
        return self.genus == 0 and self.boundary_cycles == 1


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)
            return True
        return False


def cut_along(g: EmbeddedGraph, h: EdgeSubset) -> list[SurfacePiece]:
    """Topology of the pieces obtained by cutting the surface along ``h``.

    Pieces are the components of the complement of ``h``; each is described
    by its Euler genus and number of boundary cycles. Sorted for stable
    comparison.
    """
    hv = h.vertex_set(g)
    if not hv:
        raise EmptySubgraph("cannot cut along the empty subgraph")
    if g.n_darts == 0:
        return [SurfacePiece(0, 1)]
    h_edges = {g.edge_of(e) for e in h.edges}
    uf = _UnionFind(len(g.faces))
    for e in g.edges:
        if e not in h_edges:
            uf.union(g.face_of[e], g.face_of[g.twin[e]])
    chi = {}
    bound = {}
    for fi in range(len(g.faces)):
        r = uf.find(fi)
        chi[r] = chi.get(r, 0) + 1
        bound.setdefault(r, 0)
    for e in g.edges:
        if e not in h_edges:
            r = uf.find(g.face_of[e])
            chi[r] -= 1
    for v, orb in enumerate(g.vertices):
        if v not in hv:
            r = uf.find(g.face_of[orb[0]])
            chi[r] += 1
    for orb in sub_face_orbits(g, h_edges):
        r = uf.find(g.face_of[orb[0]])
        bound[r] += 1
    incident = set()
    for e in h_edges:
        incident.update(g.endpoints(e))
    for v in hv - incident:
        r = uf.find(g.face_of[g.vertices[v][0]])
        bound[r] += 1
    pieces = [SurfacePiece(2 - chi[r] - bound[r], bound[r]) for r in chi]
    return sorted(pieces, key=lambda p: (p.genus, p.boundary_cycles))


@dataclass
class CutPiece:
    """One connected piece of a map cut open along a subgraph.

    ``dart_origin[d]`` is the host dart that piece dart ``d`` copies (with
    the same direction); ``vertex_origin[v]`` the host vertex; boundary faces
    are faces made of copies of cut edges.
    """

    map: EmbeddedGraph
    dart_origin: list
    vertex_origin: list
    boundary_faces: list


def cut_open(g: EmbeddedGraph, cut_edges: Iterable[int]) -> list[CutPiece]:
    """Cut the surface along a set of edges, duplicating them and splitting vertices.

    Each cut edge yields one copy on each of its sides, each vertex on the cut
    is split into one copy per sector between consecutive cut darts. The cut
    edges' copies form the boundary faces of the pieces.
    """
    cut = {g.edge_of(e) for e in cut_edges}
    tw = g.twin

    def is_cut(d):
        return min(d, tw[d]) in cut

    rotations = []
    vorigin = []
    for v, orb in enumerate(g.vertices):
        hs = [i for i, d in enumerate(orb) if is_cut(d)]
        if not hs:
            rotations.append([("d", d) for d in orb])
            vorigin.append(v)
            continue
        k = len(orb)
        for j, i in enumerate(hs):
            i_next = hs[(j + 1) % len(hs)]
            sector = [("cb", tw[orb[i]])]
            p = (i + 1) % k
            while p != i_next:
                sector.append(("d", orb[p]))
                p = (p + 1) % k
            sector.append(("c", orb[i_next]))
            rotations.append(sector)
            vorigin.append(v)
    pairs = []
    for d in range(g.n_darts):
        if is_cut(d):
            pairs.append((("c", d), ("cb", d), g.weight(d)))
        elif d < tw[d]:
            pairs.append((("d", d), ("d", tw[d]), g.weight(d)))
    whole, ids = from_rotations(rotations, pairs, validate=False)
    origin = [0] * whole.n_darts
    cb = set()
    for key, i in ids.items():
        kind, d = key
        origin[i] = tw[d] if kind == "cb" else d
        if kind == "cb":
            cb.add(i)
    # split into connected components
    uf = _UnionFind(len(whole.vertices))
    for e in whole.edges:
        uf.union(whole.vertex_of[e], whole.vertex_of[whole.twin[e]])
    comps = {}
    for v in range(len(whole.vertices)):
        comps.setdefault(uf.find(v), []).append(v)
    pieces = []
    for root in sorted(comps):
        vs = comps[root]
        rots = [list(whole.vertices[v]) for v in vs]
        keep = [d for v in vs for d in whole.vertices[v]]
        prs = [(d, whole.twin[d], whole.weight(d)) for d in keep if d < whole.twin[d]]
        pm, pid = from_rotations(rots, prs)
        inv = {new: old for old, new in pid.items()}
        dart_origin = [origin[inv[d]] for d in range(pm.n_darts)]
        vertex_origin = [vorigin[whole.vertex_of[inv[orb[0]]]] for orb in pm.vertices]
        bfaces = [i for i, orb in enumerate(pm.faces) if inv[orb[0]] in cb]
        pieces.append(CutPiece(pm, dart_origin, vertex_origin, bfaces))
    return pieces


# -- derived maps --------------------------------------------------------

def medial_graph(g: EmbeddedGraph, weight=ZERO) -> EmbeddedGraph:
    """One vertex per edge, one edge per corner (pair of consecutive darts)."""
    if g.m == 0:
        raise EmptyGraph("medial graph of a map without edges")
    prev = g.prev_rotation()
    tw = g.twin

    def out_slot(x):
        return ("o", x)

    def in_slot(y):
        return ("i", prev[y])

    rotations = []
    for e in g.edges:
        d, d2 = e, tw[e]
        rotations.append([in_slot(d2), out_slot(d), in_slot(d), out_slot(d2)])
    pairs = [(("o", x), ("i", x), weight) for x in range(g.n_darts)]
    mg, _ = from_rotations(rotations, pairs)
    return mg


def barycentric_subdivision(g: EmbeddedGraph, spoke_weight=ZERO, *, with_ids: bool = False):
    """Add a vertex on every edge and in every face, joined to the corners.

    Half edges carry half of the original weight; spokes weigh ``spoke_weight``.
    Old dart ``d`` becomes key ``("h", d)``.
    """
    spoke_weight = as_fraction(spoke_weight)
    tw = g.twin
    rot = g.rotation
    rotations = []
    pairs = []
    for orb in g.vertices:
        cyc = []
        for x in orb:
            cyc.append(("h", x))
            cyc.append(("sv", rot[x]))  # spoke in the corner (x, next x)
        rotations.append(cyc)
    for e in g.edges:
        d, d2 = e, tw[e]
        # east = towards head(d); north = face of d2; west = towards tail; south = face of d
        rotations.append([("m", d2), ("se", d2), ("m", d), ("se", d)])
        half = g.weight(e) / 2
        pairs.append((("h", d), ("m", d), half))
        pairs.append((("h", d2), ("m", d2), half))
    for orb in g.faces:
        cyc = []
        for d in orb:
            cyc.append(("fv", d))
            cyc.append(("fe", d))
        rotations.append(list(reversed(cyc)))
        for d in orb:
            pairs.append((("fv", d), ("sv", d), spoke_weight))
            pairs.append((("fe", d), ("se", d), spoke_weight))
    out, ids = from_rotations(rotations, pairs)
    return (out, ids) if with_ids else out


def star_faces(g: EmbeddedGraph, spoke_weight=ZERO, *, with_ids: bool = False):
    """Add a vertex inside every face joined to each of its corners.

    Old dart ``d`` becomes key ``("h", d)``; original edges keep their weight.
    """
    spoke_weight = as_fraction(spoke_weight)
    rot = g.rotation
    rotations = []
    pairs = []
    for orb in g.vertices:
        cyc = []
        for x in orb:
            cyc.append(("h", x))
            cyc.append(("s", rot[x]))  # spoke in the corner (x, next x)
        rotations.append(cyc)
    for orb in g.faces:
        rotations.append([("c", d) for d in reversed(orb)])
    for e in g.edges:
        pairs.append((("h", e), ("h", g.twin[e]), g.weight(e)))
    for d in range(g.n_darts):
        pairs.append((("s", d), ("c", d), spoke_weight))
    out, ids = from_rotations(rotations, pairs)
    return (out, ids) if with_ids else out


def superpose_with_medial(g: EmbeddedGraph, new_edge_weight, *, with_ids: bool = False,
                          unsplit_weight=frozenset()):
    """Subdivide every edge at its midpoint and draw the medial graph through the faces.

    Original edges are halved in weight, except those in ``unsplit_weight``
    whose halves both keep the full weight; medial edges get ``new_edge_weight``.
    With ``with_ids`` the dart key table is returned too: old dart ``d``
    becomes key ``("h", d)`` and its far half starts at ``("m", d)``.
    """
    new_edge_weight = as_fraction(new_edge_weight)
    tw = g.twin
    prev = g.prev_rotation()
    rotations = [[("h", x) for x in orb] for orb in g.vertices]
    pairs = []
    for e in g.edges:
        d, d2 = e, tw[e]
        rotations.append([("m", d2), ("i", prev[d2]), ("o", d), ("m", d), ("i", prev[d]), ("o", d2)])
        half = g.weight(e) if e in unsplit_weight else g.weight(e) / 2
        pairs.append((("h", d), ("m", d), half))
        pairs.append((("h", d2), ("m", d2), half))
    for x in range(g.n_darts):
        pairs.append((("o", x), ("i", x), new_edge_weight))
    out, ids = from_rotations(rotations, pairs)
    return (out, ids) if with_ids else out


def is_simple(g: EmbeddedGraph) -> bool:
    seen = set()
    for e in g.edges:
        u, v = g.endpoints(e)
        if u == v:
            return False
        key = (min(u, v), max(u, v))
        if key in seen:
            return False
        seen.add(key)
    return True


def triangulate(g: EmbeddedGraph, heavy_weight, *, with_ids: bool = False):
    """Split every face of degree > 3 into triangles with edges of weight ``heavy_weight``.

    Faces are fanned from their vertex of minimum id. A face whose fan would
    create a loop or a second edge between two vertices gets a new central
    vertex joined to all its corners instead.
    """
    heavy_weight = as_fraction(heavy_weight)
    tw = g.twin
    prev = g.prev_rotation()
    for orb in g.faces:
        if len(orb) < 3:
            raise FaceDegreeTooSmall("face of degree %d" % len(orb))
    adjacent = set()
    for e in g.edges:
        u, v = g.endpoints(e)
        adjacent.add((min(u, v), max(u, v)))
    # inserts[x] = list of new dart keys placed in the corner (prev x, x), in ccw order
    inserts: dict[int, list] = {}
    pairs = []
    centres = []
    for fi, orb in enumerate(g.faces):
        k = len(orb)
        if k == 3:
            continue
        tails = [g.vertex_of[d] for d in orb]
        i = min(range(k), key=lambda j: (tails[j], j))
        apex = tails[i]
        targets = [((i + j) % k) for j in range(2, k - 1)]
        ok = len(set(tails)) == k
        if ok:
            for j in targets:
                key = (min(apex, tails[j]), max(apex, tails[j]))
                if key in adjacent:
                    ok = False
                    break
        if ok:
            for j in targets:
                adjacent.add((min(apex, tails[j]), max(apex, tails[j])))
            apex_list = []
            for j in reversed(targets):
                apex_list.append(("a", fi, j))
                inserts.setdefault(orb[j], []).append(("t", fi, j))
                pairs.append((("a", fi, j), ("t", fi, j), heavy_weight))
            inserts.setdefault(orb[i], [])[:0] = apex_list
        else:
            centre = []
            for j, d in enumerate(orb):
                inserts.setdefault(d, []).append(("s", fi, j))
                centre.append(("c", fi, j))
                pairs.append((("c", fi, j), ("s", fi, j), heavy_weight))
            centres.append(list(reversed(centre)))
    rotations = []
    for orb in g.vertices:
        cyc = []
        for x in orb:
            cyc.extend(inserts.get(x, ()))
            cyc.append(("d", x))
        rotations.append(cyc)
    rotations.extend(centres)
    for e in g.edges:
        pairs.append((("d", e), ("d", tw[e]), g.weight(e)))
    del prev
    out, ids = from_rotations(rotations, pairs)
    return (out, ids) if with_ids else out


@dataclass
class Contraction:
    map: EmbeddedGraph
    vertex_map: list          # old vertex -> new vertex
    dart_map: dict            # surviving old dart -> new dart
    contracted: frozenset     # old edge ids contracted
    deleted: frozenset        # old edge ids removed as loops


def contract_edges(g: EmbeddedGraph, s: EdgeSubset | Iterable[int]) -> Contraction:
    """Contract the edges of ``s``; edges of ``s`` that are (or become) loops are deleted."""
    edges = sorted(s.edges if isinstance(s, EdgeSubset) else {g.edge_of(e) for e in s})
    tw = g.twin
    rot = {v: list(orb) for v, orb in enumerate(g.vertices)}
    owner = list(g.vertex_of)
    members = {v: {v} for v in rot}
    contracted, deleted = set(), set()
    for e in edges:
        d, d2 = e, tw[e]
        u, v = owner[d], owner[d2]
        if u == v:
            lst = rot[u]
            lst.remove(d)
            lst.remove(d2)
            deleted.add(e)
            continue
        ru, rv = rot[u], rot[v]
        iu, iv = ru.index(d), rv.index(d2)
        merged = ru[iu + 1:] + ru[:iu] + rv[iv + 1:] + rv[:iv]
        rot[u] = merged
        del rot[v]
        for x in merged:
            owner[x] = u
        members[u] |= members.pop(v)
        contracted.add(e)
    alive = sorted(rot)
    gone = contracted | deleted
    pairs = [(e, tw[e], g.weight(e)) for e in g.edges if e not in gone]
    rotations = [rot[v] for v in alive] if pairs else [[]]
    out, ids = from_rotations(rotations, pairs)
    vertex_map = [0] * g.n
    for v in alive:
        nv = out.vertex_of[ids[rot[v][0]]] if pairs else 0
        for old in members[v]:
            vertex_map[old] = nv
    return Contraction(out, vertex_map, ids, frozenset(contracted), frozenset(deleted))


# -- text format ---------------------------------------------------------

def format_map(g: EmbeddedGraph) -> str:
    lines = ["map %d" % g.n_darts]
    if g.isolated:
        lines.append("isolated %d" % g.isolated)
    for d in range(g.n_darts):
        lines.append("dart %d twin %d next %d" % (d, g.twin[d], g.rotation[d]))
    for e in g.edges:
        w = g.weight(e)
        lines.append("weight %d %d/%d" % (e, w.numerator, w.denominator))
    return "\n".join(lines) + "\n"


def _parse_fraction(tok: str) -> Fraction:
    num, sep, den = tok.partition("/")
    if not sep:
        raise ParseError("weight %r is not of the form p/q" % tok)
    try:
        value = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError("bad weight %r" % tok) from exc
    return value


def parse_map(text: str) -> EmbeddedGraph:
    """Inverse of :func:`format_map`; blank lines and ``#`` comments are ignored.

    Annotation lines with other keywords (``brick ...``) are skipped.
    """
    n_darts = None
    twin = rotation = None
    weights = {}
    isolated = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "map":
                n_darts = int(tok[1])
                twin = [None] * n_darts
                rotation = [None] * n_darts
            elif tok[0] == "isolated":
                isolated = int(tok[1])
            elif tok[0] == "dart":
                if n_darts is None or len(tok) != 6 or tok[2] != "twin" or tok[4] != "next":
                    raise ParseError("line %d: malformed dart line" % lineno)
                d = int(tok[1])
                twin[d] = int(tok[3])
                rotation[d] = int(tok[5])
            elif tok[0] == "weight":
                if len(tok) != 3:
                    raise ParseError("line %d: malformed weight line" % lineno)
                weights[int(tok[1])] = _parse_fraction(tok[2])
            elif tok[0] in ("brick", "cutgraph", "length"):
                continue
            else:
                raise ParseError("line %d: unknown keyword %r" % (lineno, tok[0]))
        except (IndexError, ValueError, TypeError) as exc:
            raise ParseError("line %d: %s" % (lineno, exc)) from exc
    if n_darts is None:
        raise ParseError("missing 'map' header")
    if None in twin or None in rotation:
        raise ParseError("some darts are not described")
    try:
        return build_map(rotation, twin, weights)
    except Exception as exc:  # map validation errors surface as parse failures
        if isinstance(exc, ParseError):
            raise
        raise ParseError("invalid map: %s" % exc) from exc
