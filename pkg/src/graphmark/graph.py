"""Simple undirected graphs stored as canonical edge arrays.

A :class:`Graph` holds its edges as an ``(E, 2)`` int64 array of pairs
``(i, j)`` with ``i < j``, sorted lexicographically and free of duplicates.
Vertex identity is the integer label; nothing here ever searches for an
isomorphism.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^%\s*n\s*=\s*(\d+)\s*$")


class EdgeListError(ValueError):
    """Raised for unreadable or malformed edge-list files."""


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    edges: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"graph needs at least one vertex, got n={self.n}")
        e = self.edges
        if e.ndim != 2 or e.shape[1] != 2:
            raise ValueError("edges must have shape (E, 2)")
        e.flags.writeable = False

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[Sequence[int]] | np.ndarray) -> "Graph":
        """Build a graph from arbitrary pairs, dropping self-loops and duplicates."""
        arr = np.asarray(pairs if isinstance(pairs, np.ndarray) else list(pairs), dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("pairs must be a sequence of 2-tuples")
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"edge endpoint out of range [0, {n})")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        keep = lo != hi
        codes = np.unique(lo[keep] * n + hi[keep])
        return cls._from_codes(n, codes)

    @classmethod
    def _from_codes(cls, n: int, codes: np.ndarray) -> "Graph":
        # codes must be sorted, unique, and encode i * n + j with i < j
        edges = np.empty((codes.size, 2), dtype=np.int64)
        np.divmod(codes, n, out=(edges[:, 0], edges[:, 1]))
        g = cls(n, edges)
        object.__setattr__(g, "codes", codes)
        codes.flags.writeable = False
        return g

    @classmethod
    def from_adjacency(cls, matrix: np.ndarray) -> "Graph":
        n = matrix.shape[0]
        i, j = np.nonzero(np.triu(matrix, 1))
        return cls._from_codes(n, i.astype(np.int64) * n + j)

    @cached_property
    def codes(self) -> np.ndarray:
        """Sorted int64 codes ``i * n + j``, one per edge."""
        return self.edges[:, 0] * self.n + self.edges[:, 1]

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.edges}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.codes, other.codes)

    def __hash__(self) -> int:
        return hash((self.n, self.codes.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


@dataclass(frozen=True)
class LoadReport:
    self_loops: int
    duplicates: int


def load_edge_list(path: str | Path, with_report: bool = False):
    """Read a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` are comments, except a ``% n=<N>``
    header which pins the vertex count. Self-loops are dropped and reported.
    """
    path = Path(path)
    pairs: list[tuple[int, int]] = []
    n_header = None
    with path.open() as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s[0] == "%":
                m = _HEADER.match(s)
                if m:
                    n_header = int(m.group(1))
                continue
            if s[0] == "#":
                continue
            parts = s.split()
            try:
                u, v = int(parts[0]), int(parts[1])
            except (ValueError, IndexError):
                raise EdgeListError(f"{path}:{lineno}: expected two integers, got {s!r}") from None
            if u < 0 or v < 0:
                raise EdgeListError(f"{path}:{lineno}: negative vertex id in {s!r}")
            pairs.append((u, v))
    if not pairs and n_header is None:
        raise EdgeListError(f"{path}: no edges found")

    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    n = n_header if n_header is not None else int(arr.max()) + 1
    if arr.size and arr.max() >= n:
        raise EdgeListError(f"{path}: vertex id {int(arr.max())} exceeds header n={n}")
    loops = int(np.count_nonzero(arr[:, 0] == arr[:, 1]))
    g = Graph.from_edges(n, arr)
    report = LoadReport(self_loops=loops, duplicates=len(pairs) - loops - g.num_edges)
    if loops:
        logger.info("%s: dropped %d self-loop(s)", path, loops)
    return (g, report) if with_report else g


def write_edge_list(graph: Graph, path: str | Path) -> None:
    """Write ``graph`` with a ``% n=`` header so isolated vertices survive."""
    with Path(path).open("w") as fh:
        fh.write(f"% n={graph.n}\n")
        np.savetxt(fh, graph.edges, fmt="%d")


def adjacency(graph: Graph, dtype=np.uint8) -> np.ndarray:
    a = np.zeros((graph.n, graph.n), dtype=dtype)
    i, j = graph.edges[:, 0], graph.edges[:, 1]
    a[i, j] = 1
    a[j, i] = 1
    return a


def average_entry(a: np.ndarray) -> float:
    """Mean of all N^2 stored entries (2|E|/N^2 for a symmetric adjacency)."""
    return float(np.sum(a, dtype=np.float64)) / a.size


def density(graph: Graph) -> float:
    return graph.num_edges / graph.n


@dataclass(frozen=True, eq=False)
class SubgraphSelection:
    """Top-degree vertices in rank order, with the inverse label map."""

    kept: np.ndarray
    n: int

    @cached_property
    def local_index(self) -> np.ndarray:
        # -1 marks vertices outside the selection
        idx = np.full(self.n, -1, dtype=np.int64)
        idx[self.kept] = np.arange(self.kept.size)
        return idx

    @property
    def size(self) -> int:
        return int(self.kept.size)

    def __eq__(self, other):
        return isinstance(other, SubgraphSelection) and self.n == other.n and np.array_equal(self.kept, other.kept)


def top_degree_selection(graph: Graph, n0: int) -> SubgraphSelection:
    """Keep the ``n0`` highest-degree vertices, ties broken by ascending label.

    Uses a partial partition, so the cost is linear in N plus ``n0 log n0``.
    """
    if n0 < 1:
        raise ValueError("n0 must be >= 1")
    n = graph.n
    k = min(n0, n)
    # unique sort key: degree descending, then label ascending
    key = -graph.degrees().astype(np.int64) * n + np.arange(n, dtype=np.int64)
    if k < n:
        cand = np.argpartition(key, k - 1)[:k]
    else:
        cand = np.arange(n)
    kept = cand[np.argsort(key[cand])].astype(np.int64)
    kept.flags.writeable = False
    return SubgraphSelection(kept=kept, n=n)


def _internal_mask(graph: Graph, sel: SubgraphSelection) -> np.ndarray:
    loc = sel.local_index
    return (loc[graph.edges[:, 0]] >= 0) & (loc[graph.edges[:, 1]] >= 0)


def induced_subgraph(graph: Graph, sel: SubgraphSelection) -> Graph:
    if sel.n != graph.n:
        raise ValueError("selection was computed for a different vertex count")
    loc = sel.local_index
    inner = graph.edges[_internal_mask(graph, sel)]
    return Graph.from_edges(sel.size, loc[inner])


def splice_subgraph(full: Graph, sel: SubgraphSelection, modified_sub: Graph) -> Graph:
    """Replace every pair between kept vertices by the edges of ``modified_sub``."""
    if modified_sub.n != sel.size:
        raise ValueError(f"modified subgraph has {modified_sub.n} vertices, selection has {sel.size}")
    if sel.n != full.n:
        raise ValueError("selection was computed for a different vertex count")
    outer = full.codes[~_internal_mask(full, sel)]
    mapped = sel.kept[modified_sub.edges]
    lo = np.minimum(mapped[:, 0], mapped[:, 1])
    hi = np.maximum(mapped[:, 0], mapped[:, 1])
    codes = np.union1d(outer, lo * full.n + hi)
    return Graph._from_codes(full.n, codes)


def edit_distance_percent(g1: Graph, g2: Graph) -> float:
    """Percentage of ``g1``'s edges needed to describe the symmetric difference."""
    if g1.n != g2.n:
        raise ValueError(f"vertex counts differ: {g1.n} vs {g2.n}")
    if g1.num_edges == 0:
        raise ValueError("edit distance is undefined against an edgeless reference graph")
    diff = np.setxor1d(g1.codes, g2.codes, assume_unique=True).size
    return 100.0 * diff / g1.num_edges


def differing_pairs(g1: Graph, g2: Graph) -> int:
    return int(np.setxor1d(g1.codes, g2.codes, assume_unique=True).size)


def total_pairs(n: int) -> int:
    return n * (n - 1) // 2


def unrank_pairs(ranks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map ranks ``r = j(j-1)/2 + i`` back to pairs ``(i, j)`` with ``i < j``."""
    r = np.asarray(ranks, dtype=np.int64)
    j = ((1.0 + np.sqrt(1.0 + 8.0 * r.astype(np.float64))) / 2.0).astype(np.int64)
    # float sqrt can be off by one near perfect squares
    j -= (j * (j - 1) // 2) > r
    j += ((j + 1) * j // 2) <= r
    i = r - j * (j - 1) // 2
    return i, j


def edge_flip_attack(graph: Graph, flip_percent: float, seed: int) -> Graph:
    """Toggle ``round(flip_percent/100 * |E|)`` distinct vertex pairs chosen uniformly."""
    if flip_percent < 0:
        raise ValueError("flip_percent must be non-negative")
    k = int(round(flip_percent / 100.0 * graph.num_edges))
    total = total_pairs(graph.n)
    if k > total:
        raise ValueError(f"cannot flip {k} pairs in a graph with {total} vertex pairs")
    if k == 0:
        return graph
    rng = np.random.default_rng(seed)
    i, j = unrank_pairs(rng.choice(total, size=k, replace=False))
    flips = np.sort(i * graph.n + j)
    return Graph._from_codes(graph.n, np.setxor1d(graph.codes, flips, assume_unique=True))


def _degree_order(deg: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    # positions of `vertices` when sorted by (degree desc, label asc)
    order = np.lexsort((vertices, -deg[vertices]))
    ranks = np.empty(vertices.size, dtype=np.int64)
    ranks[order] = np.arange(vertices.size)
    return ranks


def topk_degree_spearman(g1: Graph, g2: Graph, k: int) -> float:
    """Spearman correlation of the top-``k`` degree ranking of ``g1`` against ``g2``."""
    if g1.n != g2.n:
        raise ValueError(f"vertex counts differ: {g1.n} vs {g2.n}")
    if not 1 <= k <= g1.n:
        raise ValueError(f"k must lie in [1, {g1.n}]")
    top = top_degree_selection(g1, k).kept
    if top.size < 2:
        return 1.0
    # both rankings are strict permutations, so the tie-free closed form is exact
    d = _degree_order(g2.degrees(), top) - np.arange(top.size)
    k = top.size
    return float(1.0 - 6.0 * np.dot(d, d) / (k * (k * k - 1)))
