"""Brute-force reference computations shared by the test files."""

from fractions import Fraction
from itertools import combinations


def steiner_oracle(g, terminals):
    """Minimum over vertex supersets of the terminals of a spanning tree of the induced graph."""
    terms = set(terminals)
    others = [v for v in range(g.n) if v not in terms]
    best = None
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            vs = terms | set(extra)
            parent = {v: v for v in vs}

            def find(v):
                while parent[v] != v:
                    parent[v] = parent[parent[v]]
                    v = parent[v]
                return v
            total, joined = Fraction(0), 0
            for e in sorted(g.edges, key=g.weight):
                a, b = g.endpoints(e)
                if a in vs and b in vs and find(a) != find(b):
                    parent[find(a)] = find(b)
                    total += g.weight(e)
                    joined += 1
            if joined == len(vs) - 1 and (best is None or total < best):
                best = total
    return best


def tree_spans(g, edges, terminals):
    vs = set(terminals)
    adj = {}
    for e in edges:
        a, b = g.endpoints(e)
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    start = next(iter(vs))
    seen, stack = {start}, [start]
    while stack:
        for u in adj.get(stack.pop(), ()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return vs <= seen


def induced_connected(adj, nodes):
    nodes = set(nodes)
    if not nodes:
        return True
    start = next(iter(nodes))
    seen, stack = {start}, [start]
    while stack:
        for u in adj[stack.pop()]:
            if u in nodes and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen == nodes


def carving_sides_connected(adj, children, leaf, root):
    """Both sides of every tree edge of a carving induce connected subgraphs."""
    below = {}
    order, stack = [], [root]
    while stack:
        x = stack.pop()
        order.append(x)
        stack.extend(children[x] or ())
    for x in reversed(order):
        below[x] = {leaf[x]} if not children[x] else below[children[x][0]] | below[children[x][1]]
    everything = below[root]
    return all(induced_connected(adj, below[x]) and induced_connected(adj, everything - below[x])
               for x in order if x != root)


def mid_sets(g, children, leaf, root):
    """Vertices incident to leaf edges on both sides of each tree edge."""
    below = {}
    order, stack = [], [root]
    while stack:
        x = stack.pop()
        order.append(x)
        stack.extend(children[x] or ())
    for x in reversed(order):
        below[x] = {leaf[x]} if not children[x] else below[children[x][0]] | below[children[x][1]]
    out = {}
    for x in order:
        if x == root:
            continue
        inside = set()
        outside = set()
        for e in g.edges:
            (inside if e in below[x] else outside).update(g.endpoints(e))
        out[x] = inside & outside
    return out
