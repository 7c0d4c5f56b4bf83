from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from surfcut import generate as gen
from surfcut.cutgraph import baseline_cut_graph, exact_cut_graph
from surfcut.errors import NonPositiveEpsilon
from surfcut.mortar_brick import (Brick, brick_copy, build_mortar, check_brick_properties, derive_params,
                                  extract_bricks, portal_gap, select_portals)


def built(g, eps=1):
    p = derive_params(g.genus, eps, 1)
    mg = build_mortar(g, p)
    return p, mg, extract_bricks(mg)


def corpus():
    yield gen.torus_bouquet()
    yield gen.torus_grid(3, 3)
    yield gen.cube()
    for genus, n, seed in [(0, 20, 1), (2, 30, 2), (4, 40, 3), (2, 12, 5)]:
        yield gen.generate_instance(genus, n, "uniform(1..9)", seed)


# -- parameters ----------------------------------------------------------

def test_params_by_hand():
    # g=2: 1 + log2(4)^2 = 5
    p = derive_params(2, 1, 1)
    assert (p.kappa, p.gamma, p.theta) == (5, 5, 5)
    # eps=1/2: kappa = 5*8, gamma = ceil(2^2.5 * 40) = 227, theta = 227*2
    p = derive_params(2, Fraction(1, 2), 1)
    assert (p.kappa, p.gamma, p.theta) == (40, 227, 454)


def test_params_alpha_and_k():
    p = derive_params(4, 1, Fraction(3, 2), measured_f=Fraction(7, 2))
    assert p.theta == -(-p.gamma * 3 // 2)
    assert p.k_contraction == 4
    assert derive_params(4, 1, 1).k_contraction == 2


def test_params_monotone_in_epsilon():
    thetas = [derive_params(2, Fraction(1, d), 1, kappa_cap=10**9, gamma_cap=10**9, theta_cap=10**9).theta
              for d in (1, 2, 4)]
    assert thetas[0] < thetas[1] < thetas[2]


@pytest.mark.parametrize("eps", [0, -1, Fraction(-1, 2)])
def test_params_reject_nonpositive_epsilon(eps):
    with pytest.raises(NonPositiveEpsilon):
        derive_params(2, eps, 1)


# -- mortar and bricks ---------------------------------------------------

def test_bouquet_has_one_brick_bounded_by_the_baseline():
    g = gen.torus_bouquet()
    _, mg, bricks = built(g)
    assert mg.subgraph.edges == baseline_cut_graph(g).edges
    assert mg.length == 8
    assert len(bricks) == 1
    assert bricks[0].map.genus == 0
    assert bricks[0].boundary_length == 16


def test_triangle_on_sphere_two_bricks():
    g = gen.triangle((1, 1, 5))
    _, mg, bricks = built(g)
    assert len(bricks) == 2
    assert all(len(br.walk) == 3 for br in bricks)


@pytest.mark.parametrize("g", list(corpus()), ids=lambda g: "g%d_n%d" % (g.genus, g.n))
@pytest.mark.parametrize("eps", [1, Fraction(1, 2), Fraction(1, 4)])
def test_mortar_contains_baseline_and_bricks_check(g, eps):
    p, mg, bricks = built(g, eps)
    assert mg.baseline.edges <= mg.subgraph.edges
    assert mg.length >= mg.baseline.length
    for br in bricks:
        assert br.map.genus == 0
        rep = check_brick_properties(br, eps, p.kappa)
        assert rep.ok, rep.violations


@pytest.mark.parametrize("g", list(corpus()), ids=lambda g: "g%d_n%d" % (g.genus, g.n))
def test_bricks_partition_the_non_mortar_edges(g):
    _, mg, bricks = built(g)
    origin = mg.disk.dart_origin
    mortar = set(mg.subgraph.edges)
    owner = {}
    for br in bricks:
        interior = set()
        for x in range(br.map.n_darts):
            e = g.edge_of(origin[br.disk_dart[x]])
            if e not in mortar:
                interior.add(e)
        for e in interior:
            assert owner.setdefault(e, br.index) == br.index
    assert set(owner) == set(g.edges) - mortar


def _relabelled(br: Brick, shift: int, cuts, marks) -> Brick:
    L = len(br.walk)
    walk = [br.walk[(t + shift) % L] for t in range(L)]
    return Brick(br.index, br.map, walk, cuts, marks, br.disk_dart, br.kind)


def test_check_flags_a_long_north_side():
    g = gen.triangle((1, 1, 5))
    _, _, bricks = built(g)
    br = bricks[0]
    heavy = next(t for t, x in enumerate(br.walk) if br.map.weight(x) == 5)
    bad = _relabelled(br, heavy, (1, 1, 2), [2])
    rep = check_brick_properties(bad, 1)
    assert any("N is not a shortest path" in v for v in rep.violations)
    ok = _relabelled(br, heavy + 1, (1, 1, 2), [2])
    assert not any("N is not" in v for v in check_brick_properties(ok, 1).violations)


def test_check_flags_too_many_marks():
    g = gen.torus_grid(3, 3)
    _, _, bricks = built(g)
    br = bricks[0]
    a, b, c = br.cuts
    many = list(range(c, b - 1, -1))
    fake = Brick(br.index, br.map, br.walk, br.cuts, many, br.disk_dart, br.kind)
    rep = check_brick_properties(fake, 1, kappa=1)
    assert any("exceed kappa" in v for v in rep.violations)


def test_check_flags_a_broken_walk():
    g = gen.torus_grid(3, 3)
    _, _, bricks = built(g)
    br = bricks[0]
    walk = list(br.walk)
    walk[0], walk[1] = walk[1], walk[0]
    fake = Brick(br.index, br.map, walk, br.cuts, br.s_marks, br.disk_dart, br.kind)
    assert not check_brick_properties(fake, 1).ok


@settings(max_examples=25, deadline=None)
@given(genus=st.sampled_from([0, 2, 4]), n=st.integers(1, 40), seed=st.integers(0, 10**6),
       eps=st.sampled_from([1, Fraction(1, 2), Fraction(1, 4)]))
def test_random_bricks_satisfy_properties(genus, n, seed, eps):
    g = gen.generate_instance(genus, n, "uniform(1..9)", seed)
    p, mg, bricks = built(g, eps)
    assert mg.baseline.edges <= mg.subgraph.edges
    for br in bricks:
        rep = check_brick_properties(br, eps, p.kappa)
        assert rep.ok, rep.violations


# -- portals -------------------------------------------------------------

def gap_oracle(br, positions):
    L = len(br.walk)
    w = [br.map.weight(x) for x in br.walk]
    total = sum(w)
    worst = 0
    for t in range(L):
        best = None
        for q in positions:
            lo, hi = min(t, q), max(t, q)
            d = sum(w[lo:hi])
            d = min(d, total - d)
            best = d if best is None else min(best, d)
        worst = max(worst, best)
    return worst


def test_enough_portals_take_every_boundary_vertex():
    g = gen.torus_grid(3, 3)
    _, _, bricks = built(g)
    br = bricks[0]
    distinct = {br.vertex_at(p) for p in range(len(br.walk))}
    ps = select_portals(br, len(distinct))
    assert set(ps.vertices) == distinct
    assert len(ps) == len(distinct)


def test_bouquet_one_portal_covers_at_theta_two():
    # boundary 3,5,3,5: one portal is within 8 of every corner
    _, _, bricks = built(gen.torus_bouquet())
    ps = select_portals(bricks[0], 2)
    assert len(ps) == 1
    assert portal_gap(bricks[0], ps) == 8


@pytest.mark.parametrize("g", list(corpus()), ids=lambda g: "g%d_n%d" % (g.genus, g.n))
@pytest.mark.parametrize("theta", [1, 2, 3, 5, 8])
def test_portal_count_and_spacing(g, theta):
    _, _, bricks = built(g)
    for br in bricks:
        ps = select_portals(br, theta)
        assert 1 <= len(ps) <= theta
        assert gap_oracle(br, ps.positions) <= br.boundary_length / theta
        assert portal_gap(br, ps) == gap_oracle(br, ps.positions)


def test_theta_must_be_positive():
    _, _, bricks = built(gen.torus_bouquet())
    with pytest.raises(ValueError):
        select_portals(bricks[0], 0)


# -- brick-copy graph ----------------------------------------------------

def test_bouquet_brick_copy():
    g = gen.torus_bouquet()
    p, mg, bricks = built(g)
    ps = [select_portals(br, 2) for br in bricks]
    bc = brick_copy(mg, bricks, ps, p)
    assert len(bc.portal_edges) == 1
    assert all(bc.map.weight(e) == 0 for e in bc.portal_edges)
    assert bc.map.genus == 2
    assert bc.contracted.genus == 2


@pytest.mark.parametrize("g", list(corpus()), ids=lambda g: "g%d_n%d" % (g.genus, g.n))
@pytest.mark.parametrize("theta", [1, 3, 6])
def test_brick_copy_keeps_genus(g, theta):
    p, mg, bricks = built(g)
    ps = [select_portals(br, theta) for br in bricks]
    bc = brick_copy(mg, bricks, ps, p)
    assert len(bc.portal_edges) == sum(len(x) for x in ps)
    assert bc.map.genus == g.genus
    assert bc.contracted.genus == g.genus
    for e in bc.map.edges:
        if e not in bc.portal_edges:
            assert bc.map.weight(e) == g.weight(bc.edge_origin[e])


def test_brick_copy_optimum_not_below_original():
    g = gen.torus_bouquet()
    p, mg, bricks = built(g)
    bc = brick_copy(mg, bricks, [select_portals(br, p.theta) for br in bricks], p)
    assert exact_cut_graph(bc.map).length >= exact_cut_graph(g).length == 8
