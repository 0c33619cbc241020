import numpy as np
import pytest

from planted_bisection import FrozenAssignment, Graph
from planted_bisection.core import core_degree_feasible
from planted_bisection.wp import cut_width


def build_graph(n, edges):
    edges = list(edges)
    if edges:
        u, v = zip(*edges)
    else:
        u, v = (), ()
    return Graph(n, np.array(u, dtype=np.int64), np.array(v, dtype=np.int64))


def path_graph(n):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves):
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def random_tree(rng, n):
    return build_graph(n, [(int(rng.integers(0, v)), v) for v in range(1, n)])


def random_frozen_tree(rng, n, freeze_prob):
    g = random_tree(rng, n)
    values = np.zeros(n, dtype=np.int8)
    for v in range(n):
        if rng.random() < freeze_prob:
            values[v] = int(rng.choice([-1, 1]))
    return g, FrozenAssignment(values)


def subtree_heights(g, root):
    """BFS parents plus the height of each vertex's branch away from root."""
    order = [root]
    parent = {root: None}
    for u in order:
        for w in g.neighbors(u).tolist():
            if w not in parent:
                parent[w] = u
                order.append(w)
    heights = {}
    for u in reversed(order):
        kids = [w for w in g.neighbors(u).tolist() if parent.get(w) == u]
        heights[u] = 1 + max((heights[w] for w in kids), default=-1)
    return parent, heights


def monolithic_min_cut(g, f):
    """Joint enumeration over all free vertices at once (no decomposition)."""
    values = f.values
    free = np.flatnonzero(values == 0)
    k = free.size
    if k > 20:
        raise ValueError("test oracle limited to 20 free vertices")
    best = None
    best_tau = None
    for mask in range(1 << k):
        tau = values.copy()
        for i in range(k):
            tau[free[i]] = -1 if (mask >> i) & 1 else 1
        width = cut_width(g, tau)
        if best is None or width < best:
            best, best_tau = width, tau
    return best, best_tau


def brute_force_core_mask(g, a, params, cp):
    """Union of all subsets satisfying both core conditions (2^n enumeration)."""
    n = g.n
    feasible = core_degree_feasible(g, a, params, cp)
    adj_bits = [0] * n
    for v in range(n):
        for w in g.neighbors(v).tolist():
            adj_bits[v] |= 1 << w
    feasible_mask = 0
    for v in range(n):
        if feasible[v]:
            feasible_mask |= 1 << v
    union = 0
    for subset in range(1 << n):
        if subset & ~feasible_mask:
            continue
        ok = True
        s = subset
        while s:
            v = (s & -s).bit_length() - 1
            s &= s - 1
            if (adj_bits[v] & ~subset).bit_count() > cp.outside_cap:
                ok = False
                break
        if ok:
            union |= subset
    return np.array([(union >> v) & 1 for v in range(n)], dtype=bool)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
