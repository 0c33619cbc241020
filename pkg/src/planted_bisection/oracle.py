"""Brute-force ground truth on small instances.

`min_bisection_exact` enumerates balanced bipartitions with gray-code bit
flips and incremental cut updates (vertex 0 is pinned to one side to halve
the work).  `min_cut_extension` minimizes over all extensions of a partial
assignment with no balance constraint; connected components of the subgraph
induced on free vertices are optimized independently given the frozen
boundary.  Witness ties are broken toward the numerically smallest
assignment vector (-1 before +1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError
from .graphs import FrozenAssignment, Graph

__all__ = [
    "min_bisection_exact",
    "min_cut_extension",
    "cut_difference_check",
    "CutDifferenceReport",
    "MAX_ENUM_VERTICES",
]

MAX_ENUM_VERTICES = 22


def min_bisection_exact(g: Graph) -> tuple[int, np.ndarray]:
    """Exact minimum over bipartitions with class sizes differing by <= 1.

    Returns (width, witness); the witness has vertex 0 on the +1 side and is
    the lexicographically smallest minimizer (values compared numerically).
    """
    n = g.n
    if n > MAX_ENUM_VERTICES:
        raise BudgetError(f"min_bisection_exact limited to n <= {MAX_ENUM_VERTICES}, got {n}")
    if n == 0:
        return 0, np.empty(0, dtype=np.int8)
    adj = [g.neighbors(v).tolist() for v in range(n)]
    side = np.ones(n, dtype=np.int8)  # +1 everywhere; flips move vertices to -1
    n_minus = 0
    cut = 0
    best: int | None = None
    best_key: tuple | None = None
    witness = side.copy()
    # gray-code sweep over subsets of {1..n-1}
    for step in range(1 << (n - 1)):
        sizes_ok = abs(n - 2 * n_minus) <= 1
        if sizes_ok and (best is None or cut < best or (cut == best and tuple(side) < best_key)):
            best = cut
            best_key = tuple(side)
            witness = side.copy()
        if step == (1 << (n - 1)) - 1:
            break
        v = ((step + 1) & -(step + 1)).bit_length()  # vertex to flip (1-based gray code)
        s = side[v]
        for u in adj[v]:
            cut += 1 if side[u] == s else -1
        side[v] = -s
        n_minus += 1 if s == 1 else -1
    assert best is not None
    return best, witness


def _component_best(
    k: int,
    ff_edges: list[tuple[int, int]],
    boundary: list[tuple[int, int]],
) -> tuple[int, np.ndarray]:
    """Exhaustive minimum over 2^k assignments of one free component.

    ff_edges are free-free edges as local index pairs; boundary entries are
    (local index, frozen neighbor sign).  Bit set = vertex on the -1 side.
    """
    if k > MAX_ENUM_VERTICES:
        raise BudgetError(
            f"free component of size {k} exceeds the enumeration budget {MAX_ENUM_VERTICES}"
        )
    masks = np.arange(1 << k, dtype=np.uint32)
    cut = np.zeros(1 << k, dtype=np.int32)
    for i, j in ff_edges:
        cut += (((masks >> i) ^ (masks >> j)) & 1).astype(np.int32)
    for i, s in boundary:
        frozen_bit = 1 if s == -1 else 0
        cut += (((masks >> i) & 1) ^ frozen_bit).astype(np.int32)
    best = int(cut.min())
    ties = np.flatnonzero(cut == best)
    # lexicographic tie-break: -1 (bit set) preferred at the lowest local index
    rev = np.zeros(ties.size, dtype=np.uint32)
    for i in range(k):
        rev |= (((ties >> i) & 1) << (k - 1 - i)).astype(np.uint32)
    mask = int(ties[np.argmax(rev)])
    local = np.array([-1 if (mask >> i) & 1 else 1 for i in range(k)], dtype=np.int8)
    return best, local


def min_cut_extension(g: Graph, f: FrozenAssignment) -> tuple[int, np.ndarray]:
    """Exact minimum of the cut over all total extensions of f (no balance
    constraint), optimized independently per free component."""
    if f.n != g.n:
        raise ValueError("frozen assignment size does not match graph")
    values = f.values
    witness = values.copy()
    frozen = values != 0
    total = 0
    if g.num_edges:
        both = frozen[g.edge_u] & frozen[g.edge_v]
        total += int(np.sum(both & (values[g.edge_u] != values[g.edge_v])))
    free = np.flatnonzero(~frozen)
    seen = np.zeros(g.n, dtype=bool)
    for start in free.tolist():
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        head = 0
        while head < len(comp):
            u = comp[head]
            head += 1
            for w in g.neighbors(u).tolist():
                if not frozen[w] and not seen[w]:
                    seen[w] = True
                    comp.append(w)
        comp.sort()
        local_of = {v: i for i, v in enumerate(comp)}
        ff_edges = []
        boundary = []
        for v in comp:
            for w in g.neighbors(v).tolist():
                if frozen[w]:
                    boundary.append((local_of[v], int(values[w])))
                elif w > v:
                    ff_edges.append((local_of[v], local_of[w]))
        width, local = _component_best(len(comp), ff_edges, boundary)
        total += width
        witness[comp] = local
    return total, witness


@dataclass(frozen=True)
class CutDifferenceReport:
    message: int
    cut_plus: int
    cut_minus: int
    holds: bool


def _tree_parents(g: Graph, root: int) -> np.ndarray:
    """BFS parents on a tree; raises on cycles or disconnection."""
    if g.num_edges != g.n - 1:
        raise ValueError("non-tree input")
    parent = np.full(g.n, -2, dtype=np.int64)
    parent[root] = -1
    queue = [root]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for w in g.neighbors(u).tolist():
            if parent[w] == -2:
                parent[w] = u
                queue.append(w)
    if len(queue) != g.n:
        raise ValueError("non-tree input")
    return parent


def _pinned_stable_messages(g: Graph, f: FrozenAssignment) -> np.ndarray:
    """Stabilized messages where frozen vertices emit their sign at every
    round (persistent sources, the behavior degree-surplus vertices have)."""
    from .wp import wp_step, init_messages

    pinned = f.values[g.tails] != 0
    pinned_vals = f.values[g.tails][pinned]
    state = init_messages(g, f)
    for _ in range(g.n + 1):
        state = wp_step(g, state)
        state.msg[pinned] = pinned_vals
    return state.msg


def cut_difference_check(g: Graph, f: FrozenAssignment, u: int, v: int) -> CutDifferenceReport:
    """Compare the stabilized message u -> (parent toward v) with the exact
    minimal cuts of u's subtree under u forced to +1 and to -1.

    A nonzero message must strictly favor its own sign; a zero message must
    tie.  u must not itself be frozen.
    """
    if u == v:
        raise ValueError("u must differ from the reference vertex v")
    if f.get(u) is not None:
        raise ValueError("u must not be frozen")
    parent = _tree_parents(g, v)
    msg = _pinned_stable_messages(g, f)
    message = int(msg[g.directed_index(u, int(parent[u]))])

    # subtree of u on the far side of the edge {u, parent(u)}
    sub = [u]
    head = 0
    in_sub = {u}
    while head < len(sub):
        x = sub[head]
        head += 1
        for w in g.neighbors(x).tolist():
            if parent[w] == x and w not in in_sub:
                in_sub.add(w)
                sub.append(w)
    sub.sort()
    local_of = {x: i for i, x in enumerate(sub)}
    eu, ev = [], []
    for x in sub:
        for w in g.neighbors(x).tolist():
            if w in in_sub and w > x:
                eu.append(local_of[x])
                ev.append(local_of[w])
    sub_graph = Graph(len(sub), np.array(eu, dtype=np.int64), np.array(ev, dtype=np.int64))
    base = np.zeros(len(sub), dtype=np.int8)
    for x in sub:
        s = f.get(x)
        if s is not None:
            base[local_of[x]] = s
    cuts = {}
    for z in (1, -1):
        frozen_z = base.copy()
        frozen_z[local_of[u]] = z
        cuts[z], _ = min_cut_extension(sub_graph, FrozenAssignment(frozen_z))
    if message == 0:
        holds = cuts[1] == cuts[-1]
    else:
        holds = cuts[message] < cuts[-message]
    return CutDifferenceReport(message=message, cut_plus=cuts[1], cut_minus=cuts[-1], holds=holds)
