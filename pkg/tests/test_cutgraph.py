import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from surfcut import generate as gen
from surfcut.cutgraph import (
    baseline_cut_graph,
    check_reduced_bounds,
    exact_cut_graph,
    format_solution,
    is_cut_graph,
    parse_solution,
    prune_to_single_face,
    reduce,
)
from surfcut.errors import BudgetExceeded, EmptySubgraph, NotACutGraph, NotADiskDecomposition
from surfcut.surface_map import EdgeSubset, cut_along, from_rotations


def brute_force_opt(g):
    # independent oracle: smallest subset whose complement is a single disk
    best = None
    for k in range(1, g.m + 1):
        for sub in itertools.combinations(g.edges, k):
            h = EdgeSubset.of(g, sub)
            if best is not None and h.length >= best:
                continue
            pieces = cut_along(g, h)
            if len(pieces) == 1 and pieces[0].is_disk:
                best = h.length
    return best


def torus_with_chord():
    order = [("a", 0), ("c", 0), ("b", 0), ("a", 1), ("c", 1), ("b", 1)]
    pairs = [(("a", 0), ("a", 1), 3), (("b", 0), ("b", 1), 5), (("c", 0), ("c", 1), 7)]
    g, ids = from_rotations([order], pairs)
    return g, ids


def test_sphere_single_vertex_valid():
    g = gen.cube()
    c = is_cut_graph(g, EdgeSubset.of(g, (), (3,)))
    assert c.valid and c.face_count == 1 and c.euler_lhs == 2


def test_torus_single_loop_invalid():
    g = gen.torus_bouquet()
    c = is_cut_graph(g, EdgeSubset.of(g, [0]))
    assert (c.face_count, c.euler_lhs, c.euler_rhs, c.valid) == (1, 1, 0, False)


def test_torus_both_loops_valid():
    g = gen.torus_bouquet()
    c = is_cut_graph(g, EdgeSubset.of(g, [0, 1]))
    assert (c.face_count, c.euler_lhs, c.euler_rhs, c.valid) == (1, 0, 0, True)


def test_empty_subgraph_error():
    g = gen.cube()
    with pytest.raises(EmptySubgraph):
        is_cut_graph(g, EdgeSubset.of(g))


def test_reduce_path_vanishes():
    g = gen.planar_grid(1, 6)
    r = reduce(g, g.edges)
    assert r.map.m == 0


def test_reduce_bouquet_unchanged():
    g = gen.torus_bouquet()
    r = reduce(g, [0, 1])
    assert (r.map.n, r.map.m) == (1, 2)
    assert sorted(r.map.weight(e) for e in r.map.edges) == [3, 5]


def test_reduce_subdivided_loops():
    g = gen.torus_bouquet()
    g = gen.subdivide_edge(g, 0, [1, 1, 1])
    b = next(e for e in g.edges if g.weight(e) == 5)
    g = gen.subdivide_edge(g, b, [Fraction(1, 2), 2, Fraction(5, 2)])
    r = reduce(g, g.edges)
    assert (r.map.n, r.map.m) == (1, 2)
    assert sorted(r.map.weight(e) for e in r.map.edges) == [3, 5]
    assert sorted(len(path) for _, path in r.contraction_log) == [3, 3]
    assert r.host_edges(r.map.edges) == set(g.edges)


def test_reduce_keeps_boundary():
    g = gen.planar_grid(1, 4)
    r = reduce(g, g.edges, boundary={0, 3})
    assert r.map.m == 1 and r.map.weight(r.map.edges[0]) == 3


def test_reduced_bounds_examples():
    assert check_reduced_bounds(reduce(gen.torus_bouquet(), [0, 1]), 2)
    g = gen.bouquet(2)
    assert check_reduced_bounds(reduce(g, g.edges), 4)


def test_reduced_bounds_rejects_non_reduced():
    g = gen.torus_bouquet()
    with pytest.raises(NotACutGraph):
        check_reduced_bounds(reduce(g, [0]), 2)


def test_baseline_genus_zero():
    h = baseline_cut_graph(gen.cube())
    assert h.length == 0 and not h.edges and len(h.vertices) == 1


def test_baseline_torus_bouquet():
    g = gen.torus_bouquet()
    h = baseline_cut_graph(g)
    assert h.sorted_edges() == (0, 1) and h.length == 8


def test_baseline_torus_grid():
    g = gen.torus_grid(4, 4)
    h = baseline_cut_graph(g)
    assert is_cut_graph(g, h).valid
    # two essential cycles of length 4 meet somewhere
    assert h.length >= 7


def test_exact_examples():
    assert exact_cut_graph(gen.cube()).length == 0
    g = gen.torus_bouquet()
    h = exact_cut_graph(g)
    assert h.sorted_edges() == (0, 1) and h.length == 8
    g = gen.subdivide_edge(gen.torus_bouquet(), 1, [2, 4])
    h = exact_cut_graph(g)
    assert h.length == 9 and len(h.edges) == 3


def test_exact_budget():
    g = gen.torus_grid(3, 3)
    with pytest.raises(BudgetExceeded):
        exact_cut_graph(g, edge_budget=8)


def test_exact_lexicographic_ties():
    g = gen.torus_grid(3, 3)
    h = exact_cut_graph(g, edge_budget=18)
    # two 3-cycles through one vertex; no theta graph is shorter
    assert h.length == 6
    again = exact_cut_graph(g, edge_budget=18)
    assert again == h


def test_prune_identity_on_cut_graph():
    g = gen.torus_bouquet()
    h = EdgeSubset.of(g, [0, 1])
    assert prune_to_single_face(g, h) == h


def test_prune_triangle_to_vertex():
    g = gen.triangle((1, 2, 3))
    h = prune_to_single_face(g, EdgeSubset.of(g, g.edges))
    assert not h.edges and len(h.vertices) == 1 and is_cut_graph(g, h).valid


def test_prune_chord():
    g, ids = torus_with_chord()
    assert g.f == 2
    h = prune_to_single_face(g, EdgeSubset.of(g, g.edges))
    chord = g.edge_of(ids[("c", 0)])
    assert chord not in h.edges and len(h.edges) == 2 and h.length == 8


def test_prune_rejects_non_disks():
    g = gen.torus_bouquet()
    with pytest.raises(NotADiskDecomposition):
        prune_to_single_face(g, EdgeSubset.of(g, [0]))


def test_solution_round_trip():
    g = gen.torus_bouquet()
    h = exact_cut_graph(g)
    text = format_solution(h)
    assert text.splitlines()[0] == "cutgraph 2"
    assert text.splitlines()[-1] == "length 8/1"
    assert parse_solution(text, g) == h


instances = st.builds(
    gen.random_instance_with_edges,
    genus=st.sampled_from([2, 4]),
    max_edges=st.integers(4, 11),
    seed=st.integers(0, 10**6),
)


@settings(max_examples=30, deadline=None)
@given(g=instances)
def test_oracle_matches_brute_force(g):
    h = exact_cut_graph(g)
    assert is_cut_graph(g, h).valid
    assert h.length == brute_force_opt(g)


@settings(max_examples=40, deadline=None)
@given(g=instances)
def test_certificate_agrees_with_cut_along(g):
    import random
    rng = random.Random(g.m * 31 + g.n)
    for _ in range(20):
        sub = [e for e in g.edges if rng.random() < 0.5]
        if not sub:
            continue
        h = EdgeSubset.of(g, sub)
        pieces = cut_along(g, h)
        disk = len(pieces) == 1 and pieces[0].is_disk
        assert is_cut_graph(g, h).valid == disk


@settings(max_examples=40, deadline=None)
@given(g=instances)
def test_baseline_and_reduction(g):
    b = baseline_cut_graph(g)
    opt = exact_cut_graph(g)
    assert is_cut_graph(g, b).valid
    assert b.length >= opt.length
    r = reduce(g, opt)
    assert r.length <= opt.length
    assert check_reduced_bounds(r, g.genus)


@settings(max_examples=30, deadline=None)
@given(g=instances, seed=st.integers(0, 1000))
def test_prune_between_opt_and_input(g, seed):
    import random
    rng = random.Random(seed)
    # grow the baseline by random edges while every piece stays a disk
    edges = set(baseline_cut_graph(g).edges)
    for e in g.edges:
        if rng.random() < 0.4 and all(p.is_disk for p in cut_along(g, EdgeSubset.of(g, edges | {e}))):
            edges.add(e)
    h = EdgeSubset.of(g, edges)
    p = prune_to_single_face(g, h)
    assert is_cut_graph(g, p).valid
    assert p.edges <= h.edges
    assert exact_cut_graph(g).length <= p.length <= h.length


def test_prune_rejects_an_annulus():
    # an extra edge off the baseline closes a loop inside the disk
    g = gen.random_instance_with_edges(2, 8, 113)
    h = EdgeSubset.of(g, {0, 1, 3, 4, 6, 7})
    assert not all(p.is_disk for p in cut_along(g, h))
    with pytest.raises(NotADiskDecomposition):
        prune_to_single_face(g, h)


@settings(max_examples=30, deadline=None)
@given(g=instances, seed=st.integers(0, 1000))
def test_oracle_monotone_under_edge_deletion(g, seed):
    # OPT over a subset of allowed edges can only be larger
    import random
    rng = random.Random(seed)
    full = exact_cut_graph(g).length
    drop = rng.choice(g.edges)
    allowed = [e for e in g.edges if e != drop]
    try:
        sub = exact_cut_graph(g, allowed=allowed).length
    except NotACutGraph:
        return
    assert sub >= full
