"""Small named maps and the seeded random instance generator."""

from __future__ import annotations

import heapq
import random
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InfeasibleParameters
from .surface_map import EmbeddedGraph, euler_genus, from_rotations


def from_adjacency(rot: Mapping[int, Sequence[int]], weights: Mapping[tuple, object] | None = None) -> EmbeddedGraph:
    """Map of a simple graph from ccw neighbour lists; ``weights[(u, v)]`` defaults to 1."""
    rotations = []
    pairs = []
    for u in sorted(rot):
        rotations.append([(u, v) for v in rot[u]])
        for v in rot[u]:
            if u < v:
                w = 1
                if weights:
                    w = weights.get((u, v), weights.get((v, u), 1))
                pairs.append(((u, v), (v, u), w))
    g, _ = from_rotations(rotations, pairs)
    return g


def triangle(weights=(1, 1, 1)) -> EmbeddedGraph:
    a, b, c = weights
    return from_adjacency({0: [1, 2], 1: [2, 0], 2: [0, 1]}, {(0, 1): a, (1, 2): b, (0, 2): c})


def cube() -> EmbeddedGraph:
    rot = {0: [1, 4, 3], 1: [2, 5, 0], 2: [3, 6, 1], 3: [2, 0, 7],
           4: [5, 7, 0], 5: [6, 4, 1], 6: [2, 7, 5], 7: [6, 3, 4]}
    return from_adjacency(rot)


def k5() -> EmbeddedGraph:
    """K5 with every vertex listing its neighbours in increasing cyclic order."""
    rot = {}
    for v in range(5):
        rot[v] = [(v + i) % 5 for i in range(1, 5)]
    return from_adjacency(rot)


def bouquet(handles: int, weights: Sequence[object] | None = None) -> EmbeddedGraph:
    """One vertex with ``2*handles`` loops in canonical order a1 b1 a1' b1' ...

    Euler genus ``2*handles``; loop a_h is edge ``4h``, loop b_h is edge ``4h+1``.
    """
    if handles < 1:
        raise InfeasibleParameters("a bouquet needs at least one handle")
    loops = 2 * handles
    weights = list(weights) if weights is not None else [1] * loops
    order = []
    for h in range(handles):
        a, b = 2 * h, 2 * h + 1
        order += [("l", a, 0), ("l", b, 0), ("l", a, 1), ("l", b, 1)]
    pairs = [(("l", i, 0), ("l", i, 1), weights[i]) for i in range(loops)]
    g, _ = from_rotations([order], pairs)
    return g


def torus_bouquet(wa=3, wb=5) -> EmbeddedGraph:
    return bouquet(1, [wa, wb])


def torus_grid(p: int, q: int, weight=1) -> EmbeddedGraph:
    def vid(i, j):
        return (i % p) * q + (j % q)

    rot = {}
    for i in range(p):
        for j in range(q):
            rot[vid(i, j)] = [vid(i + 1, j), vid(i, j + 1), vid(i - 1, j), vid(i, j - 1)]
    return from_adjacency(rot, {})


def planar_grid(p: int, q: int) -> EmbeddedGraph:
    rot = {}
    for i in range(p):
        for j in range(q):
            nb = []
            for di, dj in ((1, 0), (0, 1), (-1, 0), (0, -1)):
                a, b = i + di, j + dj
                if 0 <= a < p and 0 <= b < q:
                    nb.append(a * q + b)
            rot[i * q + j] = nb
    return from_adjacency(rot)


def subdivide_edge(g: EmbeddedGraph, e: int, parts: Sequence[object]) -> EmbeddedGraph:
    """Replace edge ``e`` by a path whose edges carry the given weights."""
    tw = g.twin
    d, d2 = e, tw[e]
    k = len(parts)
    rotations = []
    for orb in g.vertices:
        cyc = []
        for x in orb:
            if x == d:
                cyc.append(("s", 0, 0))
            elif x == d2:
                cyc.append(("s", k - 1, 1))
            else:
                cyc.append(("d", x))
        rotations.append(cyc)
    for i in range(1, k):
        rotations.append([("s", i - 1, 1), ("s", i, 0)])
    pairs = [(("d", x), ("d", tw[x]), g.weight(x)) for x in g.edges if x != e]
    pairs += [(("s", i, 0), ("s", i, 1), parts[i]) for i in range(k)]
    out, _ = from_rotations(rotations, pairs)
    return out


# -- random instances ----------------------------------------------------

def _weights(rng: random.Random, model: str, m: int):
    if model == "unit":
        return [1] * m
    if model.startswith("uniform"):
        hi = int(model[model.index("(") + 1:model.index(")")].split("..")[-1]) if "(" in model else 9
        return [rng.randint(1, hi) for _ in range(m)]
    if model == "metric":
        return [rng.randint(1, 9) for _ in range(m)]
    raise InfeasibleParameters("unknown weight model %r" % model)


def _metric_closure(rotations, pairs):
    """Replace each edge weight by the shortest-path distance between its endpoints."""
    owner = {}
    for v, cyc in enumerate(rotations):
        for key in cyc:
            owner[key] = v
    adj = {v: [] for v in range(len(rotations))}
    for a, b, w in pairs:
        adj[owner[a]].append((owner[b], w))
        adj[owner[b]].append((owner[a], w))

    def dist(s, t):
        best = {s: 0}
        heap = [(0, s)]
        while heap:
            du, u = heapq.heappop(heap)
            if u == t:
                return du
            if du > best[u]:
                continue
            for v, w in adj[u]:
                nd = du + w
                if nd < best.get(v, nd + 1):
                    best[v] = nd
                    heapq.heappush(heap, (nd, v))
        return None

    return [(a, b, dist(owner[a], owner[b]) if owner[a] != owner[b] else w) for a, b, w in pairs]


def generate_instance(genus: int, target_n: int, weight_model: str = "unit", seed: int = 0,
                      extra_edges: int | None = None) -> EmbeddedGraph:
    """Random cellular map of exactly the requested Euler genus.

    Starts from the canonical polygon (a bouquet of loops, or one loop on the
    sphere), then splits vertices until there are ``target_n`` of them and
    splits faces with ``extra_edges`` chords (default ``target_n // 2``).
    """
    if genus < 0 or genus % 2:
        raise InfeasibleParameters("orientable Euler genus must be even and >= 0, got %d" % genus)
    if target_n < 1:
        raise InfeasibleParameters("target_n must be >= 1")
    rng = random.Random(seed)
    # mutable representation: rotations as lists of dart keys, edges as key pairs
    if genus == 0:
        rotations = [[0, 1]]
        edges = [(0, 1)]
    else:
        rotations = [[]]
        edges = []
        for h in range(genus // 2):
            a, b = 4 * h, 4 * h + 2
            rotations[0] += [a, b, a + 1, b + 1]
            edges += [(a, a + 1), (b, b + 1)]
    counter = [max(k for cyc in rotations for k in cyc) + 1]

    def fresh():
        counter[0] += 1
        return counter[0] - 1

    while len(rotations) < target_n:
        v = rng.randrange(len(rotations))
        r = rotations[v]
        k = len(r)
        i = rng.randrange(k)
        s = rng.randint(1, k - 1) if k >= 2 else 0
        arc = [r[(i + t) % k] for t in range(s)]
        rest = [r[(i + s + t) % k] for t in range(k - s)]
        xv, xw = fresh(), fresh()
        rotations[v] = rest + [xv]
        rotations.append(arc + [xw])
        edges.append((xv, xw))
    if extra_edges is None:
        extra_edges = target_n // 2
    for _ in range(extra_edges):
        g, ids = _assemble(rotations, edges, [1] * len(edges))
        inv = {d: key for key, d in ids.items()}
        face = g.faces[rng.randrange(len(g.faces))]
        if len(face) < 2:
            continue
        candidates = [(a, b) for a in range(len(face)) for b in range(len(face))
                      if a < b and g.tail(face[a]) != g.tail(face[b])]
        if not candidates:
            continue
        a, b = candidates[rng.randrange(len(candidates))]
        y1, y2 = fresh(), fresh()
        for y, d in ((y1, face[a]), (y2, face[b])):
            key = inv[d]
            for cyc in rotations:
                if key in cyc:
                    cyc.insert(cyc.index(key), y)
                    break
        edges.append((y1, y2))
    weights = _weights(rng, weight_model, len(edges))
    pairs = [(a, b, w) for (a, b), w in zip(edges, weights)]
    if weight_model == "metric":
        pairs = _metric_closure(rotations, pairs)
    g, _ = from_rotations(rotations, pairs)
    if euler_genus(g) != genus:
        raise InfeasibleParameters("generator produced genus %d instead of %d" % (g.genus, genus))
    return g


def _assemble(rotations, edges, weights):
    pairs = [(a, b, w) for (a, b), w in zip(edges, weights)]
    return from_rotations(rotations, pairs)


def random_instance_with_edges(genus: int, max_edges: int, seed: int, weight_model: str = "uniform(1..9)") -> EmbeddedGraph:
    """Instance with at most ``max_edges`` edges, used by oracle sweeps."""
    rng = random.Random(seed * 7919 + genus)
    base = genus // 2 * 2 if genus else 1
    budget = max_edges - base
    n = rng.randint(1, max(1, budget // 2 + 1))
    extra = rng.randint(0, max(0, budget - (n - 1)))
    return generate_instance(genus, n, weight_model, seed, extra_edges=extra)


def to_fraction_weights(g: EmbeddedGraph) -> dict[int, Fraction]:
    return {e: g.weight(e) for e in g.edges}
