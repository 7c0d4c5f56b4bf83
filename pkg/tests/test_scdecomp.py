import itertools
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from surfcut import generate as gen
from surfcut.cutgraph import exact_cut_graph
from surfcut.errors import HeavyWeightTooSmall
from surfcut.scdecomp import (
    CarvingDecomposition,
    Noose,
    branch_decomposition,
    build_scd,
    carving_width,
    is_bond_carving,
    is_three_connected,
    medial_adjacency,
    medial_carving_from_branch,
    polyhedralize,
    theta_of_nooses,
    to_bond_carving,
    validate_scd,
)
from surfcut.dp_solver import solve
from surfcut.surface_map import from_rotations, is_simple, star_faces


def brute_branchwidth(g):
    # minimum over all rooted binary trees on the edge set
    edges = frozenset(g.edges)
    deg = {v: len(orb) for v, orb in enumerate(g.vertices)}

    def mid(s):
        cnt = {}
        for e in s:
            for v in g.endpoints(e):
                cnt[v] = cnt.get(v, 0) + 1
        return sum(1 for v, k in cnt.items() if k < deg[v])

    @lru_cache(maxsize=None)
    def best(s):
        if len(s) == 1:
            return mid(s)
        items = sorted(s)
        first, rest = items[0], items[1:]
        out = None
        for k in range(0, len(rest)):
            for comb in itertools.combinations(rest, k):
                left = frozenset((first,) + comb)
                right = s - left
                w = max(best(left), best(right), mid(s))
                out = w if out is None else min(out, w)
        return out

    return best(edges)


def k4():
    return gen.from_adjacency({0: [1, 2, 3], 1: [0, 3, 2], 2: [0, 1, 3], 3: [0, 2, 1]})


def test_path_of_three_edges_width():
    g = gen.planar_grid(1, 4)
    # P4 has two vertices of degree two, so no decomposition achieves width 1
    assert brute_branchwidth(g) == 2
    assert branch_decomposition(g).width == 2


def test_k4_width():
    g = k4()
    assert brute_branchwidth(g) == 3
    assert branch_decomposition(g).width == 3


def test_branch_decomposition_leaves_are_edges():
    g = gen.generate_instance(4, 20, "unit", 1)
    bd = branch_decomposition(g)
    leaves = sorted(bd.leaf[x] for x in range(len(bd.children)) if not bd.children[x])
    assert leaves == sorted(g.edges)


def test_polyhedralize_torus_bouquet():
    p = polyhedralize(gen.torus_bouquet())
    m = p.map
    assert m.genus == 2
    assert is_simple(m) and is_three_connected(m)
    assert all(len(f) == 3 for f in m.faces)
    assert sum(m.weight(e) for e in p.allowed) == 8
    assert all(m.weight(e) == p.heavy_weight for e in m.edges if e not in p.allowed)


def test_polyhedralize_rejects_light_heavy_weight():
    with pytest.raises(HeavyWeightTooSmall):
        polyhedralize(gen.torus_bouquet(), heavy_weight=8)


def test_polyhedralize_already_triangulated_input():
    g = gen.torus_grid(3, 3)
    p = polyhedralize(g)
    assert p.map.genus == 2 and p.map.m > g.m


def test_medial_carving_same_tree():
    g = gen.triangle()
    bd = branch_decomposition(g)
    cd = medial_carving_from_branch(bd, g)
    assert cd.children == bd.children and cd.leaf == bd.leaf
    leaves = [cd.leaf[x] for x in range(len(cd.children)) if not cd.children[x]]
    assert sorted(leaves) == sorted(g.edges)
    # the medial graph of a triangle is a 4-regular graph on 3 vertices: each leaf cut is 4
    assert cd.width == 4


def test_carving_width_direct_count():
    g = gen.cube()
    adj = medial_adjacency(g)
    cd = medial_carving_from_branch(branch_decomposition(g), g)
    sets = cd.sets()
    direct = max(sum(1 for u in s for w in adj[u] if w not in s)
                 for x, s in enumerate(sets) if x != cd.root)
    assert cd.width == direct


def test_bond_input_unchanged():
    g = gen.triangle()
    cd = medial_carving_from_branch(branch_decomposition(g), g)
    assert cd.is_bond
    assert to_bond_carving(cd, medial_adjacency(g)) is cd


def test_bad_caterpillar_repaired():
    g = gen.cube()
    adj = medial_adjacency(g)
    # caterpillar in an order that jumps across the cube
    order = sorted(g.edges, key=lambda e: (e * 7) % 23)
    children, leaf = [], []
    for e in order:
        children.append(())
        leaf.append(e)
    cur = 0
    for i in range(1, len(order)):
        children.append((cur, i))
        leaf.append(-1)
        cur = len(children) - 1
    assert not is_bond_carving(adj, children, leaf, cur)
    cd = CarvingDecomposition(children, leaf, cur, carving_width(adj, children, leaf, cur), False)
    bond = to_bond_carving(cd, adj)
    assert bond.is_bond and is_bond_carving(adj, bond.children, bond.leaf, bond.root)


def test_repair_keeps_width_near_the_guide():
    # splits scored on agreement alone gave branch width 42 here
    p = polyhedralize(gen.random_instance_with_edges(4, 14, 25)).map
    bd = branch_decomposition(p)
    bond = to_bond_carving(medial_carving_from_branch(bd, p), medial_adjacency(p))
    assert bond.is_bond
    assert bond.as_branch(p).width <= 20


def test_theta_examples():
    a = Noose((("v", 1), ("f", 0), ("v", 2), ("f", 1)))
    b = Noose((("v", 1), ("f", 2), ("v", 2), ("f", 3)))
    c = Noose((("v", 1), ("f", 4), ("v", 5), ("f", 5)))
    assert theta_of_nooses([a]) == 0
    assert theta_of_nooses([a, b]) == 2
    x = Noose((("v", 9), ("f", 0), ("v", 3), ("f", 1)))
    y = Noose((("v", 9), ("f", 2), ("v", 4), ("f", 3)))
    z = Noose((("v", 9), ("f", 4), ("v", 6), ("f", 5)))
    assert theta_of_nooses([x, y, z]) == 2
    assert theta_of_nooses([c]) == 0


def test_scd_torus_bouquet_route_a():
    b = build_scd(gen.torus_bouquet(), "a")
    scd = b.scd
    assert validate_scd(scd) == []
    for x in scd.branch.tree_edges():
        r1, r2 = scd.regions[x]
        assert (r1.components, r2.components) == (1, 1)
        assert r1.edges | r2.edges == frozenset(b.map.edges)


def test_theta_zero_without_repeats():
    b = build_scd(gen.torus_bouquet(), "b")
    for x, nz in b.scd.nooses.items():
        if len({v for n in nz for v in n.vertices}) == sum(len(n) for n in nz):
            assert b.scd.theta_values[x] == 0


instances = st.builds(
    gen.random_instance_with_edges,
    genus=st.sampled_from([2, 4]),
    max_edges=st.integers(4, 12),
    seed=st.integers(0, 10**6),
)


@settings(max_examples=15, deadline=None)
@given(g=instances, route=st.sampled_from("ab"))
def test_scd_validates(g, route):
    b = build_scd(g, route)
    scd = b.scd
    assert scd.is_bond
    assert validate_scd(scd) == []
    adj = medial_adjacency(b.map)
    assert is_bond_carving(adj, scd.branch.children, scd.branch.leaf, scd.branch.root)


@settings(max_examples=10, deadline=None)
@given(g=instances)
def test_polyhedralize_keeps_opt(g):
    p = polyhedralize(g)
    assert exact_cut_graph(g).length == exact_cut_graph(p.map, allowed=p.allowed).length


def two_tori_and_a_bridge():
    rots = [[("a", 0), ("b", 0), ("a", 1), ("b", 1), ("c", 0)],
            [("d", 0), ("e", 0), ("d", 1), ("e", 1), ("c", 1)]]
    pairs = [(("a", 0), ("a", 1), 3), (("b", 0), ("b", 1), 5), (("c", 0), ("c", 1), 7),
             (("d", 0), ("d", 1), 2), (("e", 0), ("e", 1), 4)]
    return from_rotations(rots, pairs)[0]


def test_star_faces_triangulates_and_keeps_genus():
    for g in [gen.torus_bouquet(), gen.cube(), two_tori_and_a_bridge()]:
        s = star_faces(g)
        assert s.genus == g.genus
        assert (s.n, s.m) == (g.n + len(g.faces), 3 * g.m)
        assert all(len(f) == 3 for f in s.faces)


def test_route_b_handles_a_bridge():
    g = two_tori_and_a_bridge()
    # the bridge is a cut vertex of the medial graph
    assert not is_bond_carving_possible(g)
    bundle = build_scd(g, "b")
    assert validate_scd(bundle.scd) == []
    assert len(bundle.allowed) == g.m < bundle.map.m
    assert solve(g, bundle).length == exact_cut_graph(g).length == 21


def is_bond_carving_possible(g):
    adj = medial_adjacency(g)
    bd = branch_decomposition(g)
    return to_bond_carving(medial_carving_from_branch(bd, g), adj).is_bond
