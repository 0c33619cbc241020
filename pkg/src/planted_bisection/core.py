"""Frozen-core extraction by peeling, per-vertex closures, and restrictions.

The core is the largest vertex set U such that every member u has both
class-degrees within dev = (c/4)*sqrt(d_+ ln d_+) of their means and at most
`outside_cap` neighbors outside U.  The family of sets with this property is
closed under unions, so greedy peeling from the degree-feasible set reaches
the unique maximum regardless of removal order; we peel in ascending vertex
order for a reproducible trace.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import FrozenAssignment, Graph, ModelParams, PlantedAssignment

__all__ = [
    "CoreParams",
    "CoreSet",
    "extract_core",
    "core_degree_feasible",
    "verify_core_property",
    "component_closure",
    "restrict_assignment",
]


@dataclass(frozen=True)
class CoreParams:
    """Slack constant c and the cap on neighbors outside the candidate set."""

    c: float = 4.0
    outside_cap: int = 100

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.outside_cap < 0:
            raise ValueError("outside_cap must be nonnegative")

    def deviation_bound(self, d_plus: float) -> float:
        """dev = (c/4) * sqrt(d_+ ln d_+); requires d_+ > 1."""
        if d_plus <= 1.0:
            raise ValueError("deviation bound needs d_plus > 1")
        return 0.25 * self.c * math.sqrt(d_plus * math.log(d_plus))


@dataclass
class CoreSet:
    """Sorted member array plus a boolean membership mask."""

    members: np.ndarray
    params: CoreParams
    mask: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.members.size

    def __contains__(self, v: int) -> bool:
        return bool(self.mask[v])


def core_degree_feasible(g: Graph, a: PlantedAssignment, params: ModelParams, cp: CoreParams) -> np.ndarray:
    """Mask of vertices passing the two class-degree deviation tests."""
    dev = cp.deviation_bound(params.d_plus)
    sigma = a.sigma
    agree = sigma[g.tails] == sigma[g.heads]
    same = np.bincount(g.tails[agree], minlength=g.n)
    deg = np.diff(g.indptr)
    cross = deg - same
    return (np.abs(same - params.d_plus) <= dev) & (np.abs(cross - params.d_minus) <= dev)


def extract_core(g: Graph, a: PlantedAssignment, params: ModelParams, cp: CoreParams) -> CoreSet:
    """Largest set whose members pass the degree tests and have at most
    outside_cap neighbors outside the set; computed by peeling violators in
    ascending vertex order until stable."""
    if a.n != g.n:
        raise ValueError("assignment size does not match graph")
    in_set = core_degree_feasible(g, a, params, cp).copy()
    deg = np.diff(g.indptr)
    in_nb = np.bincount(
        g.tails, weights=in_set[g.heads].astype(np.float64), minlength=g.n
    ).astype(np.int64)
    outside = np.where(in_set, deg - in_nb, 0)
    queue = np.flatnonzero(in_set & (outside > cp.outside_cap)).tolist()
    heapq.heapify(queue)
    while queue:
        v = heapq.heappop(queue)
        if not in_set[v] or outside[v] <= cp.outside_cap:
            continue
        in_set[v] = False
        for w in g.neighbors(v).tolist():
            if in_set[w]:
                outside[w] += 1
                if outside[w] > cp.outside_cap:
                    heapq.heappush(queue, w)
    members = np.flatnonzero(in_set)
    return CoreSet(members=members, params=cp, mask=in_set)


def verify_core_property(
    g: Graph, a: PlantedAssignment, params: ModelParams, cp: CoreParams, mask: np.ndarray
) -> bool:
    """Direct re-check that every member of `mask` satisfies both conditions."""
    feasible = core_degree_feasible(g, a, params, cp)
    if np.any(mask & ~feasible):
        return False
    for v in np.flatnonzero(mask):
        nbrs = g.neighbors(v)
        if nbrs.size - int(np.count_nonzero(mask[nbrs])) > cp.outside_cap:
            return False
    return True


def component_closure(g: Graph, core, v: int) -> np.ndarray:
    """Least fixed point of: start from {v} + neighbors, then repeatedly add
    the neighborhoods of non-core members.  Core vertices act as boundary:
    their neighbors are not pulled in.  `core` is a CoreSet or a boolean mask."""
    if not 0 <= v < g.n:
        raise ValueError(f"unknown vertex {v}")
    core_mask = core.mask if isinstance(core, CoreSet) else np.asarray(core, dtype=bool)
    seen = {v}
    seen.update(g.neighbors(v).tolist())
    frontier = [u for u in seen if not core_mask[u]]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u).tolist():
                if w not in seen:
                    seen.add(w)
                    if not core_mask[w]:
                        nxt.append(w)
        frontier = nxt
    return np.array(sorted(seen), dtype=np.int64)


def restrict_assignment(a: PlantedAssignment, subset) -> FrozenAssignment:
    """Partial map agreeing with `a` on `subset`, undefined elsewhere."""
    values = np.zeros(a.n, dtype=np.int8)
    subset = np.asarray(list(subset) if not isinstance(subset, np.ndarray) else subset, dtype=np.int64)
    if subset.size:
        if subset.min() < 0 or subset.max() >= a.n:
            raise ValueError("subset contains unknown vertices")
        values[subset] = a.sigma[subset]
    return FrozenAssignment(values)
