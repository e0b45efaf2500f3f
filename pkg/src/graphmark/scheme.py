"""Keygen, Embed and Extract for in-spectrum graph watermarks.

The key is a Gaussian vector added to the lowest-magnitude Fourier
coefficients of the adjacency matrix; the inverse transform is thresholded
by the mean adjacency entry to get a graph back. Extraction compares the
spectrum of (original minus suspect) against the spectrum of (original
minus watermarked).

Large graphs are handled by working on the subgraph induced by the ``n0``
highest-degree vertices and splicing the result back into the full graph.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .graph import (
    Graph,
    SubgraphSelection,
    adjacency,
    average_entry,
    differing_pairs,
    edit_distance_percent,
    induced_subgraph,
    splice_subgraph,
    top_degree_selection,
)
from .spectral import binarize, dft2, idft2, lowest_magnitude_indices, place_key, two_norm
from . import kernels

KEY_FORMAT = "graphmark-key"
RECEIPT_FORMAT = "graphmark-receipt"
FORMAT_VERSION = 1

#: reduction size used when nothing else is requested
DEFAULT_N0 = 10_000

N0 = Optional[int]


class EmptyWatermarkError(ValueError):
    """The embedding left the graph unchanged, so no watermark exists."""


@dataclass(frozen=True, eq=False)
class Key:
    m: int
    sigma: float
    seed: Optional[int]
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.m,):
            raise ValueError(f"key declares m={self.m} but holds {self.values.size} values")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        self.values.flags.writeable = False

    @property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.values.astype("<f8").tobytes()).hexdigest()[:16]

    def __eq__(self, other):
        return isinstance(other, Key) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.fingerprint)

    def to_json(self) -> str:
        doc = {
            "format": KEY_FORMAT,
            "version": FORMAT_VERSION,
            "m": self.m,
            "sigma": self.sigma,
            "seed": self.seed,
            "values": [float(v) for v in self.values],
        }
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Key":
        doc = json.loads(text)
        if doc.get("format") != KEY_FORMAT:
            raise ValueError("not a key file")
        if doc.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported key format version {doc.get('version')}")
        values = np.array(doc["values"], dtype=np.float64).reshape(-1)
        return cls(m=int(doc["m"]), sigma=float(doc["sigma"]), seed=doc["seed"], values=values)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Key":
        return cls.from_json(Path(path).read_text())


def keygen(m: int, sigma: float, seed: int) -> Key:
    """Draw ``m`` values from N(0, sigma^2).

    Values are ``sigma * z`` where ``z`` are the first ``m`` standard normals
    of ``numpy.random.default_rng(seed)`` (PCG64, ziggurat sampler).
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    z = np.random.default_rng(seed).standard_normal(m)
    return Key(m=int(m), sigma=float(sigma), seed=seed, values=sigma * z)


@dataclass(frozen=True, eq=False)
class EmbedReceipt:
    watermarked: Graph
    ed_percent: float
    changed_pairs: int
    positions: np.ndarray
    threshold_used: float
    n0_used: Union[int, str]
    selection: Optional[SubgraphSelection] = None
    key_ref: str = ""

    @property
    def succeeded(self) -> bool:
        return self.changed_pairs > 0

    def to_json(self) -> str:
        doc = {
            "format": RECEIPT_FORMAT,
            "version": FORMAT_VERSION,
            "key": self.key_ref,
            "n": self.watermarked.n,
            "edges_watermarked": self.watermarked.num_edges,
            "ed_percent": self.ed_percent,
            "changed_pairs": self.changed_pairs,
            "threshold_used": self.threshold_used,
            "n0": self.n0_used,
            "positions": self.positions.tolist(),
            "selection": None if self.selection is None else self.selection.kept.tolist(),
        }
        return json.dumps(doc) + "\n"

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_json())


@dataclass(frozen=True, eq=False)
class WatermarkRecord:
    coefficients: np.ndarray
    norm: float
    key_ref: str
    selection: Optional[SubgraphSelection]


@dataclass(frozen=True)
class ExtractResult:
    score: float
    norm: float
    theta: float
    verdict: bool

    @property
    def normalized(self) -> float:
        return self.score / self.norm


def _ed(original: Graph, other: Graph, changed: int) -> float:
    if original.num_edges == 0:
        return 0.0 if changed == 0 else float("inf")
    return edit_distance_percent(original, other)


class EmbeddingContext:
    """Spectral state of one graph, shared by every key embedded into it.

    ``n0=None`` (or ``n0 >= graph.n``) works on the whole graph with its own
    labels; otherwise on the induced top-degree subgraph.
    """

    def __init__(self, graph: Graph, n0: N0 = None):
        if n0 is not None and n0 < 1:
            raise ValueError("n0 must be >= 1")
        self.graph = graph
        if n0 is None or n0 >= graph.n:
            self.selection = None
            self.sub = graph
        else:
            self.selection = top_degree_selection(graph, n0)
            self.sub = induced_subgraph(graph, self.selection)
        self.n0_used: Union[int, str] = "full" if self.selection is None else self.selection.size
        self.adj = adjacency(self.sub)
        self.threshold = average_entry(self.adj)
        self.spectrum = dft2(self.adj.astype(np.float64))
        self._positions: dict[int, np.ndarray] = {}

    @property
    def dim(self) -> int:
        return self.sub.n

    def positions(self, m: int) -> np.ndarray:
        if m == 0:
            return np.empty((0, 2), dtype=np.int64)
        if m > self.dim * self.dim:
            raise ValueError(f"key length {m} exceeds the {self.dim}x{self.dim} spectrum")
        if m not in self._positions:
            self._positions[m] = lowest_magnitude_indices(self.spectrum, m)
        return self._positions[m]

    def watermarked_matrix(self, key: Key) -> np.ndarray:
        """Watermarked adjacency on the working vertices, as a 0/1 uint8 matrix."""
        n = self.dim
        a_prime = idft2(place_key(key.values, self.positions(key.m), n))
        a_prime += self.adj
        return binarize(a_prime, self.threshold)

    def _sub_graph_of(self, matrix: np.ndarray) -> Graph:
        pairs = kernels.upper_pairs(matrix)
        return Graph._from_codes(self.dim, pairs[:, 0] * self.dim + pairs[:, 1])

    def embed(self, key: Key) -> tuple[Graph, EmbedReceipt]:
        sub_w = self._sub_graph_of(self.watermarked_matrix(key))
        if self.selection is None:
            watermarked = sub_w
        else:
            watermarked = splice_subgraph(self.graph, self.selection, sub_w)
        changed = differing_pairs(self.sub, sub_w)
        receipt = EmbedReceipt(
            watermarked=watermarked,
            ed_percent=_ed(self.graph, watermarked, changed),
            changed_pairs=changed,
            positions=self.positions(key.m),
            threshold_used=self.threshold,
            n0_used=self.n0_used,
            selection=self.selection,
            key_ref=key.fingerprint,
        )
        return watermarked, receipt

    def watermark(self, key: Key) -> WatermarkRecord:
        diff = self.adj.astype(np.float64) - self.watermarked_matrix(key)
        coefficients = dft2(diff)
        norm = two_norm(coefficients)
        if norm == 0.0:
            raise EmptyWatermarkError(
                "empty watermark: the key does not change the graph; retry with a larger sigma or m"
            )
        return WatermarkRecord(coefficients=coefficients, norm=norm, key_ref=key.fingerprint, selection=self.selection)

    def restrict(self, suspect: Graph) -> np.ndarray:
        """Adjacency of ``suspect`` on this context's working vertices."""
        if suspect.n != self.graph.n:
            raise ValueError(f"suspect has {suspect.n} vertices, original has {self.graph.n}")
        if self.selection is None:
            return adjacency(suspect)
        return adjacency(induced_subgraph(suspect, self.selection))

    def extract(self, record: WatermarkRecord, suspect: Graph, theta: float) -> ExtractResult:
        if theta < 0:
            raise ValueError("theta must be non-negative")
        suspect_spectrum = dft2(self.adj.astype(np.float64) - self.restrict(suspect))
        suspect_spectrum -= record.coefficients
        s = two_norm(suspect_spectrum)
        return ExtractResult(score=s, norm=record.norm, theta=float(theta), verdict=bool(s <= theta * record.norm))


def embed_full(graph: Graph, key: Key) -> tuple[Graph, EmbedReceipt]:
    return EmbeddingContext(graph, None).embed(key)


def embed_reduced(graph: Graph, key: Key, n0: int) -> tuple[Graph, EmbedReceipt]:
    """Embed into the subgraph of the ``n0`` highest-degree vertices.

    ``ed_percent`` is measured against the full original graph.
    """
    if n0 < 1:
        raise ValueError("n0 must be >= 1")
    return EmbeddingContext(graph, n0).embed(key)


def derive_watermark(graph: Graph, key: Key, n0: N0 = None) -> WatermarkRecord:
    """Recompute the spectrum of (original minus watermarked) for ``(graph, key)``.

    Raises :class:`EmptyWatermarkError` when the key changes nothing.
    """
    return EmbeddingContext(graph, n0).watermark(key)


def extract(original: Graph, suspect: Graph, key: Key, theta: float, n0: N0 = None) -> ExtractResult:
    """Decide whether ``suspect`` carries the watermark ``key`` put into ``original``.

    The working vertices are always chosen from the original's degrees.
    """
    if suspect.n != original.n:
        raise ValueError(f"suspect has {suspect.n} vertices, original has {original.n}")
    ctx = EmbeddingContext(original, n0)
    return ctx.extract(ctx.watermark(key), suspect, theta)


def embed_with_retry(
    graph: Graph,
    m: int,
    sigma: float,
    seed: int,
    n0: N0 = None,
    growth: float = 2.0,
    max_attempts: int = 64,
    context: Optional[EmbeddingContext] = None,
) -> tuple[Graph, EmbedReceipt, Key]:
    """Embed, multiplying sigma by ``growth`` until at least one pair changes."""
    ctx = context or EmbeddingContext(graph, n0)
    for _ in range(max_attempts):
        key = keygen(m, sigma, seed)
        watermarked, receipt = ctx.embed(key)
        if receipt.succeeded:
            return watermarked, receipt, key
        sigma *= growth
    raise EmptyWatermarkError(f"embedding still empty after {max_attempts} attempts (sigma={sigma:g})")
