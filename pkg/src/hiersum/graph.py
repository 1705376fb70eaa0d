"""Undirected input graphs with dense ids and CSR adjacency.

Graphs are simple (no self-loops, no parallel edges) and immutable after
construction. External node ids from an edge-list file are remapped to dense
ids 0..n-1 in first-appearance order; the reverse mapping is kept so output
can refer to the original labels.
"""
from __future__ import annotations

import math
import random
from typing import IO, Iterable, Iterator

import numpy as np


class EdgeListParseError(ValueError):
    """Raised when an edge-list file is malformed. Carries the line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class InputGraph:
    """Simple undirected graph over nodes 0..node_count-1.

    Adjacency is stored in CSR form (`indptr`, `indices`) with every
    neighbor row sorted ascending, so lookups are binary searches and
    traversal order is deterministic.
    """

    __slots__ = ("node_count", "indptr", "indices", "external_ids")

    def __init__(self, node_count: int, indptr: np.ndarray, indices: np.ndarray,
                 external_ids: list[int] | None = None):
        self.node_count = int(node_count)
        self.indptr = indptr
        self.indices = indices
        self.external_ids = external_ids

    @classmethod
    def from_edges(cls, node_count: int, pairs: Iterable[tuple[int, int]],
                   external_ids: list[int] | None = None) -> "InputGraph":
        """Build a graph from (u, v) pairs. Self-loops and duplicates are dropped."""
        node_count = int(node_count)
        edge_set = set()
        for u, v in pairs:
            u = int(u)
            v = int(v)
            if u == v:
                continue
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) out of range for {node_count} nodes")
            edge_set.add((u, v) if u < v else (v, u))
        m = len(edge_set)
        if m == 0:
            indptr = np.zeros(node_count + 1, dtype=np.int64)
            indices = np.zeros(0, dtype=np.int64)
            return cls(node_count, indptr, indices, external_ids)
        arr = np.fromiter((x for e in edge_set for x in e), dtype=np.int64, count=2 * m)
        a = arr[0::2]
        b = arr[1::2]
        src = np.concatenate([a, b])
        dst = np.concatenate([b, a])
        order = np.lexsort((dst, src))
        indices = dst[order]
        counts = np.bincount(src, minlength=node_count)
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(node_count, indptr, indices, external_ids)

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    def neighbors(self, u: int) -> np.ndarray:
        """Sorted neighbor ids of u as a read-only array view."""
        if not 0 <= u < self.node_count:
            raise IndexError(f"node {u} out of range (graph has {self.node_count} nodes)")
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        if not 0 <= u < self.node_count:
            raise IndexError(f"node {u} out of range (graph has {self.node_count} nodes)")
        return int(self.indptr[u + 1] - self.indptr[u])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as (u, v) with u < v, ascending."""
        for u in range(self.node_count):
            for v in self.neighbors(u):
                if v > u:
                    yield (u, int(v))

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges())

    def external(self, u: int) -> int:
        return self.external_ids[u] if self.external_ids is not None else u

    def __eq__(self, other) -> bool:
        if not isinstance(other, InputGraph):
            return NotImplemented
        return (self.node_count == other.node_count
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.node_count, self.indices.tobytes()))

    def __repr__(self):
        return f"InputGraph(nodes={self.node_count}, edges={self.edge_count})"


def load_edge_list(source: str | bytes | IO) -> InputGraph:
    """Parse whitespace-separated edge-list text into an InputGraph.

    Each non-blank, non-comment line must hold exactly two integer tokens.
    Lines starting with '#' are comments. Duplicate edges and self-loops are
    dropped. External ids are remapped densely in first-appearance order.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    remap: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(line_no, f"expected two integer tokens, got {len(tokens)}")
        try:
            ext_u, ext_v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(line_no, f"non-integer token in {tokens!r}") from None
        u = remap.setdefault(ext_u, len(remap))
        v = remap.setdefault(ext_v, len(remap))
        pairs.append((u, v))
    external_ids = [0] * len(remap)
    for ext, internal in remap.items():
        external_ids[internal] = ext
    return InputGraph.from_edges(len(remap), pairs, external_ids)


def load_edge_list_path(path) -> InputGraph:
    with open(path, "rb") as fh:
        return load_edge_list(fh)


def write_edge_list(g: InputGraph, stream: IO) -> None:
    """Write one 'u v' line per edge using external ids, sorted by internal pair."""
    for u, v in g.edges():
        stream.write(f"{g.external(u)} {g.external(v)}\n")


def induced_sample(g: InputGraph, fraction: float, seed: int) -> InputGraph:
    """Induced subgraph on ceil(fraction * n) nodes sampled uniformly.

    Sampled nodes are re-densified in ascending original-id order, so a fixed
    (fraction, seed) always yields the same graph.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n = g.node_count
    k = math.ceil(fraction * n)
    rng = random.Random(seed)
    chosen = sorted(rng.sample(range(n), k))
    new_id = {old: i for i, old in enumerate(chosen)}
    pairs = []
    for old in chosen:
        for v in g.neighbors(old):
            v = int(v)
            if v > old and v in new_id:
                pairs.append((new_id[old], new_id[v]))
    externals = [g.external(old) for old in chosen]
    return InputGraph.from_edges(k, pairs, externals)
