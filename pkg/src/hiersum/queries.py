"""Graph algorithms that run directly on a hierarchical summary.

Each algorithm reaches the graph only through a neighbor function, so the
same implementation serves both the compressed form (via neighbors_of) and a
plain adjacency structure. Neighbor lists are consumed in ascending id order,
which pins down the visit order and makes float accumulation in PageRank
reproducible between the two access paths.
"""
from __future__ import annotations

import random
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

from hiersum.graph import InputGraph
from hiersum.summary import HierarchicalSummary

NeighborFn = Callable[[int], Sequence[int]]


@dataclass(frozen=True)
class PageRankVector:
    scores: tuple[float, ...]
    damping: float
    iterations: int

    def top(self, k: int) -> list[tuple[int, float]]:
        """Highest-scoring subnodes; score ties broken by lower id."""
        order = sorted(range(len(self.scores)),
                       key=lambda u: (-self.scores[u], u))
        return [(u, self.scores[u]) for u in order[:k]]


@dataclass(frozen=True)
class NeighborBenchReport:
    samples: int
    mean_microseconds: float
    mean_leaf_depth: float


def _dfs(neighbors: NeighborFn, start: int) -> list[int]:
    order = []
    visited = set()
    stack = [start]
    while stack:
        v = stack.pop()
        if v in visited:
            continue
        visited.add(v)
        order.append(v)
        for w in reversed(neighbors(v)):
            if w not in visited:
                stack.append(w)
    return order


def _bfs(neighbors: NeighborFn, start: int) -> dict[int, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def _pagerank(neighbors: NeighborFn, n: int, damping: float,
              iterations: int) -> tuple[float, ...]:
    if not 0 < damping < 1:
        raise ValueError("damping must lie in (0, 1)")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    adjacency = [list(neighbors(u)) for u in range(n)]
    scores = [1.0 / n] * n
    for _ in range(iterations):
        pushed = [0.0] * n
        for u in range(n):
            around = adjacency[u]
            if not around:
                continue
            share = scores[u] / len(around)
            for w in around:
                pushed[w] += share
        leak = (1.0 - damping * sum(pushed)) / n
        scores = [damping * value + leak for value in pushed]
    return tuple(scores)


def _summary_neighbors(s: HierarchicalSummary) -> NeighborFn:
    # neighbors_of yields a set; algorithms need ascending order
    return lambda v: sorted(s.neighbors_of(v))


def dfs(s: HierarchicalSummary, start: int) -> list[int]:
    """Preorder DFS over the decoded graph, served from the summary."""
    if not 0 <= start < s.subnode_count:
        raise ValueError(f"start {start} outside subnode range")
    return _dfs(_summary_neighbors(s), start)


def bfs(s: HierarchicalSummary, start: int) -> dict[int, int]:
    """Hop distances from start; unreachable subnodes are absent."""
    if not 0 <= start < s.subnode_count:
        raise ValueError(f"start {start} outside subnode range")
    return _bfs(_summary_neighbors(s), start)


def pagerank(s: HierarchicalSummary, d: float = 0.85,
             iters: int = 30) -> PageRankVector:
    """Power iteration with uniform redistribution of leaked mass.

    Dangling subnodes push nothing; their mass returns through the leak
    term, so every iterate sums to one up to rounding.
    """
    scores = _pagerank(_summary_neighbors(s), s.subnode_count, d, iters)
    return PageRankVector(scores=scores, damping=d, iterations=iters)


def dfs_on_graph(g: InputGraph, start: int) -> list[int]:
    return _dfs(lambda u: g.neighbors(u).tolist(), start)


def bfs_on_graph(g: InputGraph, start: int) -> dict[int, int]:
    return _bfs(lambda u: g.neighbors(u).tolist(), start)


def pagerank_on_graph(g: InputGraph, d: float = 0.85,
                      iters: int = 30) -> PageRankVector:
    scores = _pagerank(lambda u: g.neighbors(u).tolist(), g.node_count, d, iters)
    return PageRankVector(scores=scores, damping=d, iterations=iters)


def neighbor_query_bench(s: HierarchicalSummary, sample: int,
                         seed: int = 0) -> NeighborBenchReport:
    """Mean wall time of neighbors_of over randomly sampled subnodes."""
    if sample < 1:
        raise ValueError("sample must be >= 1")
    rng = random.Random(seed)
    targets = [rng.randrange(s.subnode_count) for _ in range(sample)]
    start = time.perf_counter()
    for v in targets:
        s.neighbors_of(v)
    elapsed = time.perf_counter() - start
    return NeighborBenchReport(
        samples=sample,
        mean_microseconds=elapsed * 1e6 / sample,
        mean_leaf_depth=s.mean_leaf_depth(),
    )
