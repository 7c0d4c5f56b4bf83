import itertools

import pytest
from hypothesis import given, settings, strategies as st

from surfcut import generate as gen
from surfcut.cutgraph import exact_cut_graph, is_cut_graph
from surfcut.dp_solver import CutGraphDP, enumerate_region_maps, solve, _cycles, _canonical
from surfcut.errors import BoundaryTooLarge, WidthCapExceeded
from surfcut.scdecomp import branch_decomposition, build_scd


def exhaustive_table(dp, x):
    # classify every allowed subset below x by its walk signature
    edges = sorted(e for e in dp.below[x] if e in dp.allowed)
    nd = dp.node(x)
    best = {}
    for k in range(len(edges) + 1):
        for sub in itertools.combinations(edges, k):
            try:
                key = dp.state_of(x, sub)
            except AssertionError:
                continue
            if not dp._viable(nd, key):
                continue
            w = sum(dp.iw[e] for e in sub)
            if key not in best or w < best[key]:
                best[key] = w
    return best


def test_genus_zero_single_vertex():
    h = solve(gen.cube())
    assert h.length == 0 and not h.edges


def test_torus_bouquet_both_routes():
    g = gen.torus_bouquet()
    for route in "ab":
        h = solve(g, route=route)
        assert h.sorted_edges() == (0, 1) and h.length == 8


def test_leaf_table_entries():
    g = gen.triangle((7, 1, 1))
    dp = CutGraphDP(g, branch_decomposition(g))
    e = next(x for x in g.edges if g.weight(x) == 7)
    leaf = next(x for x in range(len(dp.branch.children)) if dp.branch.leaf[x] == e)
    t = dp.leaf_table(leaf)
    assert sorted(w for w, _ in t.values()) == [0, 7]


def test_merge_tables_match_exhaustive_torus():
    g = gen.torus_bouquet()
    b = build_scd(g, "b")
    dp = CutGraphDP(b.map, b.scd.branch)
    dp.run()
    for x in range(len(dp.branch.children)):
        got = {k: w for k, (w, _) in dp.tables[x].items()}
        assert got == exhaustive_table(dp, x)


def test_two_edge_path_reduces_to_one_edge():
    g = gen.torus_grid(3, 3)
    b = build_scd(g, "b")
    dp = CutGraphDP(b.map, b.scd.branch)
    dp.run()
    # find an entry whose witness is a path of two edges with an internal middle vertex
    for x in range(len(dp.branch.children)):
        for key in dp.tables[x]:
            h = dp.witness(x, key)
            if len(h) != 2:
                continue
            (e1, e2) = sorted(h)
            shared = set(g.endpoints(e1)) & set(g.endpoints(e2))
            if len(shared) != 1 or shared.pop() not in dp.node(x).internal:
                continue
            rm, pos = dp.region_map(x, key)
            if rm.abstract_map.map.m == 1:
                assert rm.abstract_map.length == g.weight(e1) + g.weight(e2)
                assert len(pos.assignment) == 2
                return
    pytest.fail("no two-edge path entry found")


def test_state_cap():
    g = gen.random_instance_with_edges(4, 14, 5)
    with pytest.raises(WidthCapExceeded):
        solve(g, route="a", state_cap=5)


def test_region_map_examples():
    assert len(enumerate_region_maps(0, 0)) == 2
    assert len(enumerate_region_maps(1, 0)) == 3
    with pytest.raises(BoundaryTooLarge):
        enumerate_region_maps(20, 2)


def test_region_map_counts_monotone():
    counts = {(b, g): len(enumerate_region_maps(b, g, dart_cap=6)) for b in range(3) for g in (0, 2)}
    for b in range(2):
        for g in (0, 2):
            assert counts[(b, g)] <= counts[(b + 1, g)]
    for b in range(3):
        assert counts[(b, 0)] <= counts[(b, 2)]


def slow_region_maps(b, g, dart_cap):
    # independent path: fix the rotation to consecutive blocks and vary the twin involution
    found = set()

    def involutions(items):
        if not items:
            yield {}
            return
        a = items[0]
        for i in range(1, len(items)):
            c = items[i]
            for rest in involutions(items[1:i] + items[i + 1:]):
                rest = dict(rest)
                rest[a], rest[c] = c, a
                yield rest

    for m in range(1, min(dart_cap // 2, 6 * g + b - 1) + 1):
        n = 2 * m
        for parts in _partitions(n):
            if 2 in parts:
                continue
            rotation = []
            start = 0
            for k in parts:
                rotation += [start + (i + 1) % k for i in range(k)]
                start += k
            vid = []
            for i, k in enumerate(parts):
                vid += [i] * k
            for tw in involutions(list(range(n))):
                twin = [tw[d] for d in range(n)]
                faces = _cycles([rotation[twin[d]] for d in range(n)])
                if 2 - len(parts) + m - len(faces) > g:
                    continue
                free = [i for i, k in enumerate(parts) if k >= 3]
                forced = [i for i, k in enumerate(parts) if k == 1]
                for extra in range(len(free) + 1):
                    for chosen in itertools.combinations(free, extra):
                        bset = set(forced) | set(chosen)
                        if len(bset) > b or len(parts) - len(bset) > 4 * g:
                            continue
                        code = _canonical(rotation, twin, [vid[d] in bset for d in range(n)])
                        if code is not None:
                            found.add(code)
    return len(found) + 2 + (1 if b >= 1 else 0)


def _partitions(n, smallest=1):
    if n == 0:
        yield []
        return
    for k in range(smallest, n + 1):
        for rest in _partitions(n - k, k):
            yield [k] + rest


@pytest.mark.parametrize("b,g", [(0, 2), (1, 2), (2, 0), (2, 2), (3, 0)])
def test_region_maps_cross_checked(b, g):
    assert len(enumerate_region_maps(b, g, dart_cap=6)) == slow_region_maps(b, g, 6)


instances = st.builds(
    gen.random_instance_with_edges,
    genus=st.sampled_from([2, 4]),
    max_edges=st.integers(3, 9),
    seed=st.integers(0, 10**6),
)


@settings(max_examples=20, deadline=None)
@given(g=instances)
def test_tables_match_exhaustive(g):
    b = build_scd(g, "b")
    dp = CutGraphDP(b.map, b.scd.branch)
    dp.run()
    for x in range(len(dp.branch.children)):
        got = {k: w for k, (w, _) in dp.tables[x].items()}
        assert got == exhaustive_table(dp, x)


@settings(max_examples=20, deadline=None)
@given(g=instances, route=st.sampled_from("ab"))
def test_solve_matches_oracle(g, route):
    h, dp = solve(g, route=route, return_dp=True)
    assert is_cut_graph(g, h).valid
    assert h.length == exact_cut_graph(g).length
    dp.spot_check(0.1, seed=1)
