"""Planted bisection random graphs and the shared graph/assignment data model.

A graph is stored as a sorted undirected edge list plus a CSR index of
directed edges: directed edge ``e`` runs ``tails[e] -> heads[e]`` and
``rev[e]`` is the index of the opposite direction.  The CSR layout makes the
synchronous message sweeps cache-friendly at millions of edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GraphFileError
from .rng import derive_rng

__all__ = [
    "Graph",
    "PlantedAssignment",
    "FrozenAssignment",
    "ModelParams",
    "sample_planted_graph",
    "planted_cut_width",
    "class_degrees",
    "store_graph",
    "load_graph",
]


class Graph:
    """Undirected simple graph with a dense directed-edge index.

    Attributes
    ----------
    n : vertex count; vertices are 0..n-1.
    edge_u, edge_v : int64 arrays of the m undirected edges (u < v, sorted).
    indptr, heads : CSR of directed edges, sorted by (tail, head).
    tails : tail vertex of each directed edge.
    rev : index of the reversed directed edge.
    """

    __slots__ = ("n", "edge_u", "edge_v", "indptr", "heads", "tails", "rev")

    def __init__(self, n: int, edge_u: np.ndarray, edge_v: np.ndarray):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        edge_u = np.asarray(edge_u, dtype=np.int64)
        edge_v = np.asarray(edge_v, dtype=np.int64)
        if edge_u.shape != edge_v.shape or edge_u.ndim != 1:
            raise ValueError("edge endpoint arrays must be 1-d and equal length")
        if edge_u.size:
            if edge_u.min() < 0 or edge_v.min() < 0 or max(edge_u.max(), edge_v.max()) >= n:
                raise GraphFileError("vertex index out of range")
            if np.any(edge_u == edge_v):
                raise GraphFileError("self-loop")
        lo = np.minimum(edge_u, edge_v)
        hi = np.maximum(edge_u, edge_v)
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        if lo.size > 1 and np.any((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])):
            raise GraphFileError("duplicate edge")
        self.n = int(n)
        self.edge_u = lo
        self.edge_v = hi
        m = lo.size
        tails = np.concatenate([lo, hi])
        heads = np.concatenate([hi, lo])
        uid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((heads, tails))
        tails, heads, uid = tails[order], heads[order], uid[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(tails, minlength=n), out=self.indptr[1:])
        self.heads = heads
        self.tails = tails
        twin = np.argsort(uid, kind="stable")
        rev = np.empty(2 * m, dtype=np.int64)
        rev[twin[0::2]] = twin[1::2]
        rev[twin[1::2]] = twin[0::2]
        self.rev = rev

    @property
    def num_edges(self) -> int:
        return self.edge_u.size

    @property
    def num_directed(self) -> int:
        return self.heads.size

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor list of v (a CSR view; do not mutate)."""
        if not 0 <= v < self.n:
            raise ValueError(f"unknown vertex {v}")
        return self.heads[self.indptr[v] : self.indptr[v + 1]]

    def directed_index(self, v: int, w: int) -> int:
        """Index of directed edge v->w in [0, 2m); {v,w} must be an edge."""
        lo, hi = self.indptr[v], self.indptr[v + 1]
        pos = lo + np.searchsorted(self.heads[lo:hi], w)
        if pos >= hi or self.heads[pos] != w:
            raise KeyError(f"no edge {{{v},{w}}}")
        return int(pos)

    def has_edge(self, v: int, w: int) -> bool:
        try:
            self.directed_index(v, w)
            return True
        except KeyError:
            return False

    def edge_pairs(self):
        """Iterator over undirected edges as (u, v) with u < v."""
        return zip(self.edge_u.tolist(), self.edge_v.tolist())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and np.array_equal(self.edge_u, other.edge_u)
            and np.array_equal(self.edge_v, other.edge_v)
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


class PlantedAssignment:
    """Total balanced labeling vertex -> {-1,+1} (class sizes differ by <= 1)."""

    __slots__ = ("sigma",)

    def __init__(self, sigma: np.ndarray):
        sigma = np.asarray(sigma, dtype=np.int8)
        if sigma.ndim != 1 or not np.all(np.abs(sigma) == 1):
            raise ValueError("assignment values must all be -1 or +1")
        if abs(int(np.sum(sigma == 1)) - int(np.sum(sigma == -1))) > 1:
            raise ValueError("assignment is not balanced")
        self.sigma = sigma

    @property
    def n(self) -> int:
        return self.sigma.size

    def __call__(self, v: int) -> int:
        return int(self.sigma[v])

    def class_vertices(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.sigma == label)

    def __eq__(self, other) -> bool:
        return isinstance(other, PlantedAssignment) and np.array_equal(self.sigma, other.sigma)

    def __repr__(self) -> str:
        return f"PlantedAssignment(n={self.n}, n_plus={int(np.sum(self.sigma == 1))})"


class FrozenAssignment:
    """Partial labeling: values[v] in {-1,+1} on the support, 0 elsewhere."""

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=np.int8)
        if values.ndim != 1 or not np.all(np.abs(values) <= 1):
            raise ValueError("frozen values must be -1, 0 or +1")
        self.values = values

    @classmethod
    def empty(cls, n: int) -> "FrozenAssignment":
        return cls(np.zeros(n, dtype=np.int8))

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "FrozenAssignment":
        values = np.zeros(n, dtype=np.int8)
        for v, s in dict(pairs).items():
            if s not in (-1, 1):
                raise ValueError("frozen values must be -1 or +1")
            values[v] = s
        return cls(values)

    @classmethod
    def from_assignment(cls, a: PlantedAssignment) -> "FrozenAssignment":
        return cls(a.sigma.copy())

    @property
    def n(self) -> int:
        return self.values.size

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values != 0)

    def support_size(self) -> int:
        return int(np.count_nonzero(self.values))

    def get(self, v: int) -> int | None:
        s = int(self.values[v])
        return s if s != 0 else None

    def negate(self) -> "FrozenAssignment":
        return FrozenAssignment(-self.values)

    def __eq__(self, other) -> bool:
        return isinstance(other, FrozenAssignment) and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the planted model: edge probabilities are p_± = 2 d_± / n."""

    n: int
    d_plus: float
    d_minus: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0 <= self.d_minus <= self.d_plus:
            raise ValueError("need 0 <= d_minus <= d_plus")
        if self.p_plus > 1:
            raise ValueError("p_plus = 2*d_plus/n exceeds 1")

    @property
    def p_plus(self) -> float:
        return 2.0 * self.d_plus / self.n

    @property
    def p_minus(self) -> float:
        return 2.0 * self.d_minus / self.n


def _sample_pair_indices(rng: np.random.Generator, n_pairs: int, p: float) -> np.ndarray:
    """Indices of an iid Bernoulli(p) subset of range(n_pairs), by geometric skips."""
    if n_pairs <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(n_pairs, dtype=np.int64)
    chunks = []
    pos = np.int64(-1)
    mean = n_pairs * p
    batch = max(64, int(mean + 6.0 * math.sqrt(mean) + 16))
    while True:
        gaps = rng.geometric(p, size=batch).astype(np.int64)
        positions = pos + np.cumsum(gaps)
        if positions[-1] >= n_pairs:
            chunks.append(positions[positions < n_pairs])
            break
        chunks.append(positions)
        pos = positions[-1]
        batch = max(64, int((n_pairs - pos) * p + 6.0 * math.sqrt((n_pairs - pos) * p) + 16))
    return np.concatenate(chunks) if len(chunks) > 1 else chunks[0]


def _unrank_triangular(idx: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the lexicographic ranking of pairs (i, j), 0 <= i < j < k.

    Rank of (i, j) is i*(2k-i-1)/2 + (j-i-1).  Float inversion is corrected
    by +-1 fix-up passes, so results are exact for k up to ~1e9.
    """
    idxf = idx.astype(np.float64)
    i = np.floor((2 * k - 1 - np.sqrt((2 * k - 1) ** 2 - 8 * idxf)) / 2).astype(np.int64)
    i = np.clip(i, 0, k - 2)

    def row_start(row):
        return row * (2 * k - row - 1) // 2

    for _ in range(2):
        i = np.where(row_start(i + 1) <= idx, i + 1, i)
        i = np.where(row_start(i) > idx, i - 1, i)
    j = i + 1 + (idx - row_start(i))
    return i, j


def sample_planted_graph(params: ModelParams) -> tuple[Graph, PlantedAssignment]:
    """Draw (G, sigma): balanced uniform sigma, then each same-class pair is an
    edge with probability 2 d_+/n and each cross-class pair with 2 d_-/n,
    independently.  Deterministic given params.seed."""
    n = params.n
    rng = derive_rng(params.seed, "planted-graph")
    if n % 2 == 0:
        n_plus = n // 2
    else:
        n_plus = (n + 1) // 2 if rng.random() < 0.5 else n // 2
    sigma = np.full(n, -1, dtype=np.int8)
    perm = rng.permutation(n)
    sigma[perm[:n_plus]] = 1
    assignment = PlantedAssignment(sigma)

    plus = np.flatnonzero(sigma == 1)
    minus = np.flatnonzero(sigma == -1)
    parts_u, parts_v = [], []
    for verts in (plus, minus):
        k = verts.size
        idx = _sample_pair_indices(rng, k * (k - 1) // 2, params.p_plus)
        if idx.size:
            i, j = _unrank_triangular(idx, k)
            parts_u.append(verts[i])
            parts_v.append(verts[j])
    k1, k2 = plus.size, minus.size
    idx = _sample_pair_indices(rng, k1 * k2, params.p_minus)
    if idx.size:
        parts_u.append(plus[idx // k2])
        parts_v.append(minus[idx % k2])
    if parts_u:
        edge_u = np.concatenate(parts_u)
        edge_v = np.concatenate(parts_v)
    else:
        edge_u = edge_v = np.empty(0, dtype=np.int64)
    return Graph(n, edge_u, edge_v), assignment


def planted_cut_width(g: Graph, a: PlantedAssignment) -> int:
    """Number of edges joining the two planted classes."""
    if a.n != g.n:
        raise ValueError("assignment size does not match graph")
    if g.num_edges == 0:
        return 0
    return int(np.sum(a.sigma[g.edge_u] != a.sigma[g.edge_v]))


def class_degrees(g: Graph, a: PlantedAssignment, v: int) -> tuple[int, int]:
    """(same-class, cross-class) neighbor counts of v under the planted labels."""
    nbrs = g.neighbors(v)
    if nbrs.size == 0:
        return (0, 0)
    same = int(np.sum(a.sigma[nbrs] == a.sigma[v]))
    return same, nbrs.size - same


# --- file I/O -------------------------------------------------------------
#
# Edge-list file: line 1 "n m", then m lines "u v" with 0 <= u < v < n,
# sorted; assignment file (same path + ".sigma"): n lines "v s", s in {-1,1}.
# Both ASCII, LF-terminated, so round-trips are bit-exact.


def assignment_path(path: str) -> str:
    return str(path) + ".sigma"


def store_graph(g: Graph, a: PlantedAssignment, path: str) -> None:
    if a.n != g.n:
        raise ValueError("assignment size does not match graph")
    lines = [f"{g.n} {g.num_edges}\n"]
    lines.extend(f"{u} {v}\n" for u, v in g.edge_pairs())
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.writelines(lines)
    with open(assignment_path(path), "w", encoding="ascii", newline="\n") as fh:
        fh.writelines(f"{v} {int(a.sigma[v])}\n" for v in range(a.n))


def _parse_int_pair(line: str, lineno: int, path: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise GraphFileError(f"{path}:{lineno}: malformed line {line!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise GraphFileError(f"{path}:{lineno}: malformed integer in {line!r}") from exc


def load_graph(path: str) -> tuple[Graph, PlantedAssignment]:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise GraphFileError(f"{path}: empty file")
    n, m = _parse_int_pair(lines[0], 1, path)
    if n < 0 or m < 0:
        raise GraphFileError(f"{path}: negative header values")
    if len(lines) != m + 1:
        raise GraphFileError(f"{path}: header announces {m} edges, found {len(lines) - 1} lines")
    edge_u = np.empty(m, dtype=np.int64)
    edge_v = np.empty(m, dtype=np.int64)
    for i, line in enumerate(lines[1:]):
        u, v = _parse_int_pair(line, i + 2, path)
        if u == v:
            raise GraphFileError(f"{path}:{i + 2}: self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFileError(f"{path}:{i + 2}: vertex index out of range")
        edge_u[i], edge_v[i] = u, v
    g = Graph(n, edge_u, edge_v)

    spath = assignment_path(path)
    with open(spath, "r", encoding="ascii") as fh:
        slines = fh.read().splitlines()
    if len(slines) != n:
        raise GraphFileError(f"{spath}: expected {n} assignment lines, found {len(slines)}")
    sigma = np.zeros(n, dtype=np.int8)
    seen = np.zeros(n, dtype=bool)
    for i, line in enumerate(slines):
        v, s = _parse_int_pair(line, i + 1, spath)
        if not 0 <= v < n:
            raise GraphFileError(f"{spath}:{i + 1}: vertex index out of range")
        if seen[v]:
            raise GraphFileError(f"{spath}:{i + 1}: duplicate assignment for vertex {v}")
        if s not in (-1, 1):
            raise GraphFileError(f"{spath}:{i + 1}: label must be -1 or 1")
        sigma[v] = s
        seen[v] = True
    return g, PlantedAssignment(sigma)
