"""Shared fixtures and independent oracles for the test suite.

The oracles here recompute expected values from first principles (pairwise
net counts, recursive traversals) so library results are checked against
logic that shares no code with the implementation under test.
"""
from __future__ import annotations

from itertools import combinations

import pytest

from hiersum.graph import InputGraph
from hiersum.summary import HierarchicalSummary


def net_decode_oracle(s: HierarchicalSummary) -> set[tuple[int, int]]:
    """Decode by brute force: for every subnode pair, count covering edges.

    An edge (X, Y) covers pair {u, v} when one endpoint's leaf set holds u
    and the other's holds v (checked directly on leaf sets, once per edge).
    Raises if any pair's net count leaves {0, 1}.
    """
    leafsets = {}

    def leaves(x):
        if x not in leafsets:
            if s.is_leaf(x):
                leafsets[x] = frozenset([x])
            else:
                acc = set()
                for c in s.children[x]:
                    acc |= leaves(c)
                leafsets[x] = frozenset(acc)
        return leafsets[x]

    net = {}
    for (a, b, sign) in s.edges_signed():
        la, lb = leaves(a), leaves(b)
        if a == b:
            covered = set(combinations(sorted(la), 2))
        else:
            covered = set()
            for u in la:
                for v in lb:
                    if u != v:
                        covered.add((u, v) if u < v else (v, u))
        for pair in covered:
            net[pair] = net.get(pair, 0) + sign
    out = set()
    for pair, value in net.items():
        if value == 1:
            out.add(pair)
        elif value != 0:
            raise AssertionError(f"pair {pair} has net {value}")
    return out


def graphs_equal(a: InputGraph, b: InputGraph) -> bool:
    return a.edge_set() == b.edge_set() and a.node_count == b.node_count


@pytest.fixture
def path3() -> InputGraph:
    return InputGraph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def star5() -> InputGraph:
    return InputGraph.from_edges(5, [(0, i) for i in range(1, 5)])


@pytest.fixture
def clique5() -> InputGraph:
    return InputGraph.from_edges(5, combinations(range(5), 2))
