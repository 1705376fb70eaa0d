"""Fixture generators, the reference encoding, and the flat-model witness."""
import math
import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiersum.generators import (FlatEncoding, RingGroupSpec, caveman_graph,
                                er_graph, flat_lower_bound_witness,
                                flat_relative_size,
                                reference_ring_group_summary,
                                ring_group_graph)

from conftest import graphs_equal


# ----------------------------------------------------------------------
# ring-group family

def test_spec_validation():
    with pytest.raises(ValueError):
        RingGroupSpec(2, 3)
    with pytest.raises(ValueError):
        RingGroupSpec(5, 0)


def test_smallest_ring_is_empty_graph():
    g = ring_group_graph(RingGroupSpec(3, 1))
    assert g.node_count == 3 and g.edge_count == 0


def test_four_singleton_groups_form_perfect_matching():
    g = ring_group_graph(RingGroupSpec(4, 1))
    assert g.edge_count == 2
    assert g.edge_set() == {(0, 2), (1, 3)}


def test_degree_and_non_neighbor_formulas():
    spec = RingGroupSpec(32, 3)
    g = ring_group_graph(spec)
    assert g.node_count == 96
    for u in range(g.node_count):
        assert g.degree(u) == 89
        assert g.node_count - 1 - g.degree(u) == 6
    assert g.edge_count == spec.edge_count == 96 * 89 // 2


def test_within_group_pairs_adjacent_and_ring_adjacent_not():
    spec = RingGroupSpec(5, 2)
    g = ring_group_graph(spec)
    for grp in range(5):
        for u, v in combinations(spec.group_members(grp), 2):
            assert g.has_edge(u, v)
        for u in spec.group_members(grp):
            for v in spec.group_members((grp + 1) % 5):
                assert not g.has_edge(min(u, v), max(u, v))


def test_reference_summary_cost_and_losslessness():
    for (n, k) in [(4, 1), (16, 2), (32, 3)]:
        spec = RingGroupSpec(n, k)
        s = reference_ring_group_summary(spec)
        assert s.cost() == n * k + 2 * n + 1
        assert s.verify_lossless(ring_group_graph(spec))


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 12), st.integers(1, 4))
def test_reference_summary_round_trip_random_specs(n, k):
    spec = RingGroupSpec(n, k)
    s = reference_ring_group_summary(spec)
    assert graphs_equal(s.decode(), ring_group_graph(spec))


def test_reference_ratio_shrinks_with_n():
    ratios = []
    for n in (16, 32, 64):
        spec = RingGroupSpec(n, 3)
        cost = reference_ring_group_summary(spec).cost()
        ratios.append(cost / ring_group_graph(spec).edge_count)
    assert ratios[0] > ratios[1] > ratios[2]


# ----------------------------------------------------------------------
# random graph generators

def test_er_extremes():
    assert er_graph(10, 0.0, seed=1).edge_count == 0
    g = er_graph(6, 1.0, seed=1)
    assert g.edge_count == 15


def test_er_edge_count_within_binomial_band():
    g = er_graph(1000, 0.01, seed=9)
    mean = 999 * 1000 / 2 * 0.01
    sigma = math.sqrt(999 * 1000 / 2 * 0.01 * 0.99)
    assert abs(g.edge_count - mean) <= 4 * sigma


def test_er_deterministic_per_seed():
    assert er_graph(100, 0.05, seed=3) == er_graph(100, 0.05, seed=3)
    assert er_graph(100, 0.05, seed=3) != er_graph(100, 0.05, seed=4)


def test_er_validates():
    with pytest.raises(ValueError):
        er_graph(10, 1.5, seed=0)


def test_caveman_edge_counts():
    assert caveman_graph(1, 3, seed=0).edge_count == 3
    assert caveman_graph(2, 3, seed=0).edge_count == 7
    assert caveman_graph(20, 10, seed=0).edge_count == 20 * 45 + 20


def test_caveman_bridges_connect_adjacent_cliques():
    g = caveman_graph(5, 4, seed=8)
    for (u, v) in g.edges():
        cu, cv = u // 4, v // 4
        diff = abs(cu - cv)
        assert diff == 0 or diff == 1 or diff == 4


def test_caveman_validates():
    with pytest.raises(ValueError):
        caveman_graph(0, 3, seed=0)
    with pytest.raises(ValueError):
        caveman_graph(3, 1, seed=0)


# ----------------------------------------------------------------------
# flat encoding

def test_flat_encoding_requires_partition():
    g = er_graph(4, 0.5, seed=0)
    with pytest.raises(ValueError):
        FlatEncoding(node_count=4, groups=[[0, 1], [1, 2, 3]])
    with pytest.raises(ValueError):
        FlatEncoding(node_count=4, groups=[[0, 1]])


def test_flat_singletons_cost_equals_edges():
    g = er_graph(12, 0.3, seed=5)
    flat = FlatEncoding.from_partition_optimal(g, [[u] for u in range(12)])
    assert flat.cost() == g.edge_count
    assert flat.is_valid_for(g)


def test_flat_superedge_on_dense_block():
    g = ring_group_graph(RingGroupSpec(4, 2))
    # one supernode per ring group: within-group blocks are complete
    groups = [[0, 1], [2, 3], [4, 5], [6, 7]]
    flat = FlatEncoding.from_partition_optimal(g, groups)
    assert flat.is_valid_for(g)
    assert flat.decode() == g
    assert (0, 2) in flat.superedges


def test_flat_relative_size_matches_hand_count():
    from hiersum.graph import InputGraph
    g = InputGraph.from_edges(4, combinations(range(4), 2))
    flat = FlatEncoding.from_partition_optimal(g, [[0, 1, 2, 3]])
    # all six pairs present: one self superedge, hierarchy charge 4
    assert flat.superedges == {(0, 0)}
    assert not flat.plus and not flat.minus
    assert flat.cost() == 5
    assert flat_relative_size(flat, g) == 5 / 6


def test_witness_vacuous_for_singletons():
    spec = RingGroupSpec(16, 1)
    g = ring_group_graph(spec)
    flat = FlatEncoding.from_partition_optimal(g, [[u] for u in range(16)])
    report = flat_lower_bound_witness(spec, flat)
    assert report.ok
    assert report.big_supernodes == 0
    assert report.total_cost == g.edge_count


def test_witness_all_in_one_supernode():
    spec = RingGroupSpec(16, 1)
    g = ring_group_graph(spec)
    flat = FlatEncoding.from_partition_optimal(g, [list(range(16))])
    report = flat_lower_bound_witness(spec, flat)
    assert report.big_supernodes == 1
    assert report.ok
    assert (0, 0) in flat.superedges


def test_witness_rejects_invalid_encoding():
    spec = RingGroupSpec(16, 1)
    g = ring_group_graph(spec)
    flat = FlatEncoding.from_partition_optimal(g, [[u] for u in range(16)])
    flat.plus.discard(next(iter(flat.plus)))
    with pytest.raises(ValueError):
        flat_lower_bound_witness(spec, flat)


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_witness_lemma_never_violated_on_random_partitions(rng):
    spec = RingGroupSpec(16, 1)
    g = ring_group_graph(spec)
    nodes = list(range(16))
    rng.shuffle(nodes)
    groups = []
    i = 0
    while i < len(nodes):
        take = rng.randint(1, 16 - i)
        groups.append(nodes[i:i + take])
        i += take
    flat = FlatEncoding.from_partition_optimal(g, groups)
    assert flat.is_valid_for(g)
    report = flat_lower_bound_witness(spec, flat)
    assert report.ok
