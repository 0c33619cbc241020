"""Two-type Galton-Watson trees, upward message passing, and neighborhood
censuses.

A node of type s spawns Poisson(d_+) children of type s and Poisson(d_-)
children of type -s.  The upward message of a node after r rounds is its type
when r = 0, else the clamp of the sum of its children's (r-1)-round messages;
so the root message after t rounds only depends on the first t generations.

`root_message_distribution` samples that root message without materializing
the tree: children are generated lazily and a node's evaluation stops as soon
as the running partial sum pins the clamp regardless of the unevaluated
children.  Unevaluated subtrees are iid and independent of everything
resolved, so the pruned draw has exactly the materialized-tree distribution
(the equivalence is tested).  This matters because the expected generation
size grows like (d_+ + d_-)^depth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import BudgetError
from .fixed_point import Dist3
from .graphs import Graph, PlantedAssignment
from .rng import derive_child_seeds, derive_rng

__all__ = [
    "TypedTree",
    "sample_tree",
    "truncate_tree",
    "tree_to_graph",
    "wp_upward",
    "root_message_distribution",
    "canonical_code",
    "neighborhood_census",
    "tree_census",
    "census_tv",
    "CYCLIC_BUCKET",
]

CYCLIC_BUCKET = b"<cyclic>"


@dataclass
class TypedTree:
    """Rooted tree in BFS layout: node 0 is the root, parents precede children."""

    types: np.ndarray  # int8, values in {-1,+1}
    parent: np.ndarray  # int64, -1 for the root
    level: np.ndarray  # int64, distance from the root

    def __post_init__(self):
        if not (self.types.size == self.parent.size == self.level.size):
            raise ValueError("tree arrays must have equal length")
        if self.types.size == 0 or self.parent[0] != -1:
            raise ValueError("node 0 must be the root")

    @property
    def n(self) -> int:
        return self.types.size

    @property
    def depth(self) -> int:
        return int(self.level.max())

    def children_lists(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in range(self.n)]
        for v in range(1, self.n):
            kids[int(self.parent[v])].append(v)
        return kids


def sample_tree(
    d_plus: float,
    d_minus: float,
    max_depth: int,
    root_type: int | None,
    seed: int,
    max_nodes: int = 2_000_000,
) -> TypedTree:
    """Generation-truncated sample; deterministic per seed.  root_type None
    draws the root type uniformly."""
    if max_depth < 0:
        raise ValueError("max_depth must be nonnegative")
    if d_plus < 0 or d_minus < 0:
        raise ValueError("offspring means must be nonnegative")
    rng = derive_rng(seed, "gw-tree")
    if root_type is None:
        root_type = 1 if rng.random() < 0.5 else -1
    if root_type not in (-1, 1):
        raise ValueError("root_type must be -1, +1 or None")
    types = [np.array([root_type], dtype=np.int8)]
    parents = [np.array([-1], dtype=np.int64)]
    levels = [np.zeros(1, dtype=np.int64)]
    frontier_types = types[0]
    frontier_ids = np.zeros(1, dtype=np.int64)
    total = 1
    for depth in range(1, max_depth + 1):
        k = frontier_types.size
        if k == 0:
            break
        same = rng.poisson(d_plus, k)
        cross = rng.poisson(d_minus, k)
        counts = same + cross
        n_new = int(counts.sum())
        if n_new == 0:
            break
        total += n_new
        if total > max_nodes:
            raise BudgetError(
                f"tree would exceed {max_nodes} nodes at depth {depth}; "
                "lower max_depth or raise max_nodes"
            )
        parent_ids = np.repeat(frontier_ids, counts)
        # per parent: `same` copies of its type, then `cross` of the opposite
        child_types = np.repeat(frontier_types, counts).astype(np.int8)
        offset = np.concatenate([[0], np.cumsum(counts)])[:-1]
        pos_in_parent = np.arange(n_new) - np.repeat(offset, counts)
        flip = pos_in_parent >= np.repeat(same, counts)
        child_types[flip] = -child_types[flip]
        ids = np.arange(total - n_new, total, dtype=np.int64)
        types.append(child_types)
        parents.append(parent_ids)
        levels.append(np.full(n_new, depth, dtype=np.int64))
        frontier_types = child_types
        frontier_ids = ids
    return TypedTree(
        types=np.concatenate(types),
        parent=np.concatenate(parents),
        level=np.concatenate(levels),
    )


def truncate_tree(tree: TypedTree, depth: int) -> TypedTree:
    keep = tree.level <= depth
    index = np.cumsum(keep) - 1
    parent = tree.parent[keep].copy()
    mask = parent >= 0
    parent[mask] = index[parent[mask]]
    return TypedTree(types=tree.types[keep].copy(), parent=parent, level=tree.level[keep].copy())


def tree_to_graph(tree: TypedTree) -> Graph:
    return Graph(tree.n, np.arange(1, tree.n, dtype=np.int64), tree.parent[1:])


def wp_upward(tree: TypedTree, t: int) -> int:
    """Root message after t rounds of the upward recursion (round 0 = types)."""
    if t < 0:
        raise ValueError("round count must be nonnegative")
    msg = tree.types.astype(np.int64)
    for _ in range(t):
        sums = np.bincount(tree.parent[1:], weights=msg[1:], minlength=tree.n)
        msg = np.clip(sums, -1, 1).astype(np.int64)
    return int(msg[0])


@njit(cache=True)
def _lazy_root_message(d_plus: float, d_minus: float, t: int, root_type: int) -> int:
    """One exact draw of the t-round root message, depth-first with pruning."""
    if t == 0:
        return root_type
    node_type = np.empty(t + 1, np.int64)
    rem_same = np.empty(t + 1, np.int64)
    rem_cross = np.empty(t + 1, np.int64)
    partial = np.empty(t + 1, np.int64)
    depth = 0
    node_type[0] = root_type
    rem_same[0] = np.random.poisson(d_plus)
    rem_cross[0] = np.random.poisson(d_minus)
    partial[0] = 0
    while True:
        rem = rem_same[depth] + rem_cross[depth]
        s = partial[depth]
        decided = False
        value = 0
        if s - rem >= 1:
            value = 1
            decided = True
        elif s + rem <= -1:
            value = -1
            decided = True
        elif rem == 0:
            value = -1 if s < -1 else (1 if s > 1 else s)
            decided = True
        if decided:
            if depth == 0:
                return value
            depth -= 1
            partial[depth] += value
            continue
        if rem_same[depth] > 0:
            ctype = node_type[depth]
            rem_same[depth] -= 1
        else:
            ctype = -node_type[depth]
            rem_cross[depth] -= 1
        if depth + 1 == t:
            partial[depth] += ctype
        else:
            depth += 1
            node_type[depth] = ctype
            rem_same[depth] = np.random.poisson(d_plus)
            rem_cross[depth] = np.random.poisson(d_minus)
            partial[depth] = 0


_TRIALS_PER_SEED_BLOCK = 8192


@njit(cache=True)
def _root_message_counts(
    d_plus: float, d_minus: float, t: int, root_type: int, trials: int, block_seeds: np.ndarray
) -> np.ndarray:
    counts = np.zeros(3, np.int64)
    for i in range(trials):
        if i % _TRIALS_PER_SEED_BLOCK == 0:
            np.random.seed(block_seeds[i // _TRIALS_PER_SEED_BLOCK])
        v = _lazy_root_message(d_plus, d_minus, t, root_type)
        counts[v + 1] += 1
    return counts


def root_message_distribution(
    d_plus: float,
    d_minus: float,
    t: int,
    trials: int,
    seed: int,
    root_type: int = 1,
) -> Dist3:
    """Empirical law of the t-round root message over independent trees with
    the stated root type."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if t < 0:
        raise ValueError("round count must be nonnegative")
    if root_type not in (-1, 1):
        raise ValueError("root_type must be -1 or +1")
    n_blocks = (trials + _TRIALS_PER_SEED_BLOCK - 1) // _TRIALS_PER_SEED_BLOCK
    block_seeds = derive_child_seeds(seed, n_blocks, "gw-root", t, root_type)
    counts = _root_message_counts(
        float(d_plus), float(d_minus), int(t), int(root_type), int(trials), block_seeds
    )
    return Dist3(*(counts / trials))


# --- canonical codes and censuses ------------------------------------------


def _encode_from_arrays(types, parent_pos, order_levels, depth) -> bytes:
    """Canonical bytes for a rooted typed tree given in BFS layout."""
    n = len(types)
    codes: list[bytes | None] = [None] * n
    kids: list[list[bytes]] = [[] for _ in range(n)]
    for i in range(n - 1, 0, -1):
        if order_levels[i] > depth:
            continue
        mark = b"+" if types[i] == 1 else b"-"
        codes[i] = mark + b"(" + b"".join(sorted(kids[i])) + b")"
        kids[parent_pos[i]].append(codes[i])
    mark = b"+" if types[0] == 1 else b"-"
    return mark + b"(" + b"".join(sorted(kids[0])) + b")"


def canonical_code(tree: TypedTree, depth: int) -> bytes:
    """Order-independent byte string; equal iff the depth-truncated rooted
    typed trees are isomorphic."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    return _encode_from_arrays(tree.types, tree.parent, tree.level, depth)


@njit(cache=True)
def _ball_bfs(indptr, heads, v, depth, stamp, stamp_id, order, level, parent_pos):
    """BFS ball of radius `depth` around v.  Returns (size, cyclic) where
    cyclic means the subgraph induced on the ball contains a cycle."""
    order[0] = v
    level[0] = 0
    parent_pos[0] = -1
    stamp[v] = stamp_id
    size = 1
    head = 0
    cyclic = False
    while head < size:
        u = order[head]
        lu = level[head]
        if lu >= depth:
            break
        pu = parent_pos[head]
        parent_vertex = order[pu] if pu >= 0 else -1
        for k in range(indptr[u], indptr[u + 1]):
            w = heads[k]
            if stamp[w] == stamp_id:
                if w != parent_vertex:
                    cyclic = True
            else:
                stamp[w] = stamp_id
                order[size] = w
                level[size] = lu + 1
                parent_pos[size] = head
                size += 1
        head += 1
    # edges among last-level vertices are not traversed above
    for i in range(size):
        if level[i] == depth:
            u = order[i]
            pu = parent_pos[i]
            parent_vertex = order[pu] if pu >= 0 else -1
            for k in range(indptr[u], indptr[u + 1]):
                w = heads[k]
                if w != parent_vertex and stamp[w] == stamp_id:
                    cyclic = True
    return size, cyclic


def neighborhood_census(
    g: Graph,
    a: PlantedAssignment,
    t: int,
    sample_size: int | None = None,
    seed: int = 0,
) -> dict[bytes, float]:
    """Frequencies of depth-t neighborhood classes over sampled vertices.
    Acyclic neighborhoods are keyed by their canonical code; cyclic ones all
    land in the CYCLIC_BUCKET key.  Frequencies sum to 1."""
    if t < 0:
        raise ValueError("depth must be nonnegative")
    if a.n != g.n:
        raise ValueError("assignment size does not match graph")
    if sample_size is None or sample_size <= 0 or sample_size >= g.n:
        vertices = np.arange(g.n, dtype=np.int64)
    else:
        rng = derive_rng(seed, "census-vertices")
        vertices = np.sort(rng.choice(g.n, size=sample_size, replace=False))
    stamp = np.zeros(g.n, dtype=np.int64)
    order = np.empty(g.n, dtype=np.int64)
    level = np.empty(g.n, dtype=np.int64)
    parent_pos = np.empty(g.n, dtype=np.int64)
    counts: dict[bytes, int] = {}
    sigma = a.sigma
    for i, v in enumerate(vertices.tolist()):
        size, cyclic = _ball_bfs(
            g.indptr, g.heads, v, t, stamp, i + 1, order, level, parent_pos
        )
        if cyclic:
            key = CYCLIC_BUCKET
        else:
            key = _encode_from_arrays(
                sigma[order[:size]], parent_pos[:size], level[:size], t
            )
        counts[key] = counts.get(key, 0) + 1
    total = vertices.size
    return {k: c / total for k, c in counts.items()}


def tree_census(
    d_plus: float, d_minus: float, t: int, trials: int, seed: int
) -> dict[bytes, float]:
    """Frequencies of depth-t classes over independent trees with uniformly
    random root type; the comparison law for the graph census."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if t < 0:
        raise ValueError("depth must be nonnegative")
    rng = derive_rng(seed, "gw-census")
    root_types = rng.choice(np.array([-1, 1], dtype=np.int8), size=trials)
    if t == 0:
        n_plus = int(np.count_nonzero(root_types == 1))
        out = {}
        if trials - n_plus:
            out[b"-()"] = (trials - n_plus) / trials
        if n_plus:
            out[b"+()"] = n_plus / trials
        return out

    # Materialize generations 0..t-1; the boundary generation only enters
    # through per-parent type counts.
    level_types = [root_types]
    level_parent = [np.full(trials, -1, dtype=np.int64)]
    for _ in range(t - 1):
        cur = level_types[-1]
        same = rng.poisson(d_plus, cur.size)
        cross = rng.poisson(d_minus, cur.size)
        counts = same + cross
        child_types = np.repeat(cur, counts).astype(np.int8)
        offset = np.concatenate([[0], np.cumsum(counts)])[:-1]
        pos = np.arange(child_types.size) - np.repeat(offset, counts)
        flip = pos >= np.repeat(same, counts)
        child_types[flip] = -child_types[flip]
        level_types.append(child_types)
        level_parent.append(np.repeat(np.arange(cur.size, dtype=np.int64), counts))
    deepest = level_types[-1]
    g_same = rng.poisson(d_plus, deepest.size)
    g_cross = rng.poisson(d_minus, deepest.size)
    g_plus = np.where(deepest == 1, g_same, g_cross)
    g_minus = np.where(deepest == 1, g_cross, g_same)

    # Interned integer codes, built upward from the boundary.  Any globally
    # consistent id order canonicalizes a child multiset; rendered bytes sort
    # children by code so they match the graph-census encoding.
    if g_plus.size and max(int(g_plus.max()), int(g_minus.max())) >= 1 << 20:
        raise BudgetError("offspring count overflows the packed census key")
    packed = (
        ((deepest == 1).astype(np.int64) << 40)
        | (g_plus.astype(np.int64) << 20)
        | g_minus.astype(np.int64)
    )
    uniq, codes = np.unique(packed, return_inverse=True)
    rendered: list[bytes] = []
    for key in uniq.tolist():
        mark = b"+" if (key >> 40) & 1 else b"-"
        gp, gm = (key >> 20) & 0xFFFFF, key & 0xFFFFF
        rendered.append(mark + b"(" + b"+()" * gp + b"-()" * gm + b")")
    table: dict[tuple, int] = {}

    for lvl in range(t - 1, 0, -1):
        parents = level_parent[lvl]
        ptypes = level_types[lvl - 1]
        n_parents = ptypes.size
        order = np.lexsort((codes, parents))
        sorted_parents = parents[order]
        sorted_codes = codes[order]
        bounds = np.searchsorted(sorted_parents, np.arange(n_parents + 1))
        new_codes = np.empty(n_parents, dtype=np.int64)
        for pi in range(n_parents):
            child_ids = tuple(sorted_codes[bounds[pi] : bounds[pi + 1]].tolist())
            key = (int(ptypes[pi]), child_ids)
            idx = table.get(key)
            if idx is None:
                mark = b"+" if key[0] == 1 else b"-"
                body = b"".join(sorted(rendered[c] for c in child_ids))
                idx = len(rendered)
                table[key] = idx
                rendered.append(mark + b"(" + body + b")")
            new_codes[pi] = idx
        codes = new_codes

    freq: dict[bytes, float] = {}
    root_ids, cnt = np.unique(codes, return_counts=True)
    for idx, c in zip(root_ids.tolist(), cnt.tolist()):
        freq[rendered[idx]] = c / trials
    return freq


def census_tv(
    census_a: dict[bytes, float],
    census_b: dict[bytes, float],
    min_prob: float = 0.0,
    reference: dict[bytes, float] | None = None,
) -> float:
    """Half the L1 gap between two censuses, optionally restricted to classes
    whose `reference` frequency (default: census_b) is at least min_prob."""
    ref = census_b if reference is None else reference
    keys = set(census_a) | set(census_b)
    if min_prob > 0:
        keys = {k for k in keys if ref.get(k, 0.0) >= min_prob}
    return 0.5 * sum(abs(census_a.get(k, 0.0) - census_b.get(k, 0.0)) for k in keys)
