"""Hierarchical summary model: edges, merges, costs, decoding, serialization."""
import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiersum.graph import InputGraph
from hiersum.summary import (HierarchicalSummary, InvalidSummaryError,
                             SummaryFormatError, trivial_summary)

from conftest import graphs_equal, net_decode_oracle


def small_graphs(max_nodes=10):
    return st.integers(2, max_nodes).flatmap(
        lambda n: st.builds(
            lambda pairs: InputGraph.from_edges(n, pairs),
            st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                    .filter(lambda uv: uv[0] != uv[1]), max_size=2 * n)))


# ----------------------------------------------------------------------
# trivial summary and basic edge bookkeeping

def test_trivial_summary_shape(path3):
    s = trivial_summary(path3)
    assert s.cost() == path3.edge_count
    assert s.pos_count == 2 and s.neg_count == 0 and s.h_edge_count() == 0
    assert s.roots == {0, 1, 2}
    assert graphs_equal(s.decode(), path3)
    assert s.edge_composition() == (1.0, 0.0, 0.0)
    assert s.max_height() == 0


def test_add_edge_cancels_opposite_sign():
    s = HierarchicalSummary(3)
    assert s.add_edge(0, 1, 1)
    assert not s.add_edge(1, 0, -1)
    assert s.pos_count == 0 and s.neg_count == 0
    assert s.edge_sign(0, 1) == 0


def test_add_edge_same_sign_is_net_violation():
    s = HierarchicalSummary(3)
    s.add_edge(0, 1, 1)
    with pytest.raises(InvalidSummaryError):
        s.add_edge(0, 1, 1)


def test_remove_edge_updates_counts():
    s = HierarchicalSummary(3)
    s.add_edge(0, 1, 1)
    s.add_edge(1, 2, -1)
    s.remove_edge(0, 1)
    s.remove_edge(2, 1)
    assert s.pos_count == 0 and s.neg_count == 0
    assert not s.incident_edges(1)


# ----------------------------------------------------------------------
# merging and hierarchy bookkeeping

def test_merge_creates_fresh_ids_and_h_edges():
    s = HierarchicalSummary(4)
    m = s.merge(0, 1)
    assert m == 4
    assert s.parent[0] == m and s.parent[1] == m
    assert s.roots == {m, 2, 3}
    assert s.h_edge_count() == 2
    assert s.leaf_count(m) == 2
    assert s.subtree_node_count(m) == 3
    assert s.height_of(m) == 1
    m2 = s.merge(m, 2)
    assert m2 == 5
    assert s.height_of(m2) == 2
    assert s.leaves_of(m2) == [0, 1, 2]
    assert s.top(0) == m2 and s.top(3) == 3


def test_merge_rejects_non_roots():
    s = HierarchicalSummary(3)
    s.merge(0, 1)
    with pytest.raises(ValueError):
        s.merge(0, 2)
    with pytest.raises(ValueError):
        s.merge(2, 2)


def test_merge_preserves_decode(star5):
    s = trivial_summary(star5)
    s.merge(1, 2)
    assert graphs_equal(s.decode(), star5)
    s.merge(3, 4)
    assert graphs_equal(s.decode(), star5)


def test_ancestors_and_tree_nodes():
    s = HierarchicalSummary(4)
    m = s.merge(0, 1)
    m2 = s.merge(m, 2)
    assert s.ancestors_of_leaf(0) == [0, m, m2]
    assert sorted(s.tree_nodes(m2)) == [0, 1, 2, m, m2]


# ----------------------------------------------------------------------
# cost accounting

def test_cost_components_and_tally_agree_through_merges():
    g = InputGraph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5),
                                  (0, 5), (1, 4)])
    s = trivial_summary(g)
    rng = random.Random(1)
    while len(s.roots) > 1:
        a, b = rng.sample(sorted(s.roots), 2)
        s.merge(a, b)
        for r in s.roots:
            h_cost, p_cost = s.cost_components(r)
            assert p_cost == s.tree_edge_tally(r)
            assert h_cost == s.subtree_node_count(r) - 1
    assert graphs_equal(s.decode(), g)


def test_pair_cost_counts_cross_and_within():
    g = InputGraph.from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
    s = trivial_summary(g)
    m = s.merge(0, 1)
    assert s.pair_cost(m, 2) == 2
    assert s.pair_cost(m, m) == 1
    assert s.pair_cost(m, 3) == 0


def test_cost_is_sum_of_root_components():
    g = InputGraph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    s = trivial_summary(g)
    s.merge(0, 1)
    total_h = sum(s.cost_components(r)[0] for r in s.roots)
    assert s.cost() == total_h + s.pos_count + s.neg_count


# ----------------------------------------------------------------------
# decoding against the brute-force oracle

def test_decode_with_nested_edges_matches_oracle():
    s = HierarchicalSummary(4)
    m = s.merge(0, 1)
    m2 = s.merge(m, 2)
    s.add_edge(m2, m2, 1)
    s.add_edge(0, 1, -1)
    expected = net_decode_oracle(s)
    assert s.decode().edge_set() == expected
    assert expected == {(0, 2), (1, 2)}


def test_decode_self_loop_on_group():
    s = HierarchicalSummary(3)
    m = s.merge(0, 1)
    m2 = s.merge(m, 2)
    s.add_edge(m2, m2, 1)
    assert s.decode().edge_set() == {(0, 1), (0, 2), (1, 2)}


def test_decode_rejects_net_two():
    s = HierarchicalSummary(3)
    m = s.merge(0, 1)
    s.add_edge(m, m, 1)
    s.add_edge(m, 2, 1)
    s.add_edge(0, 1, 1)
    with pytest.raises(InvalidSummaryError):
        s.decode()


def test_decode_rejects_negative_net():
    s = HierarchicalSummary(3)
    s.add_edge(0, 1, -1)
    with pytest.raises(InvalidSummaryError):
        s.decode()


def test_nested_endpoint_covers_pair_once():
    # edge between a node and its own ancestor: pairs counted once, not twice
    s = HierarchicalSummary(3)
    m = s.merge(0, 1)
    m2 = s.merge(m, 2)
    s.add_edge(0, m2, 1)
    assert s.decode().edge_set() == {(0, 1), (0, 2)}
    assert net_decode_oracle(s) == {(0, 1), (0, 2)}


# ----------------------------------------------------------------------
# neighbors_of (partial decompression)

def test_neighbors_of_trivial(path3):
    s = trivial_summary(path3)
    assert s.neighbors_of(1) == {0, 2}
    assert s.neighbors_of(0) == {1}


def test_neighbors_of_with_hierarchy_and_negative_edges():
    s = HierarchicalSummary(4)
    m = s.merge(0, 1)
    m2 = s.merge(m, 2)
    s.add_edge(m2, m2, 1)
    s.add_edge(0, 1, -1)
    s.add_edge(m2, 3, 1)
    s.add_edge(1, 3, -1)
    decoded = s.decode()
    for v in range(4):
        assert s.neighbors_of(v) == set(decoded.neighbors(v).tolist())


@settings(max_examples=60, deadline=None)
@given(small_graphs(), st.randoms(use_true_random=False))
def test_neighbors_of_matches_decode_after_random_merges(g, rng):
    s = trivial_summary(g)
    for _ in range(min(6, g.node_count - 1)):
        roots = sorted(s.roots)
        if len(roots) < 2:
            break
        a, b = rng.sample(roots, 2)
        s.merge(a, b)
    decoded = s.decode()
    for v in range(g.node_count):
        assert s.neighbors_of(v) == set(decoded.neighbors(v).tolist())


# ----------------------------------------------------------------------
# verify_lossless and super_distance

def test_verify_lossless_passes_and_fails(path3):
    s = trivial_summary(path3)
    assert s.verify_lossless(path3)
    s.remove_edge(0, 1)
    report = s.verify_lossless(path3)
    assert not report
    assert report.missing == 1


def test_verify_lossless_detects_extra(path3):
    s = trivial_summary(path3)
    s.add_edge(0, 2, 1)
    report = s.verify_lossless(path3)
    assert not report and report.extra == 1


def test_super_distance_on_path():
    g = InputGraph.from_edges(6, [(i, i + 1) for i in range(5)])
    s = trivial_summary(g)
    assert s.super_distance(g, 0, 5) == 5
    m = s.merge(0, 1)
    assert s.super_distance(g, m, 5) == 4
    disconnected = InputGraph.from_edges(3, [(0, 1)])
    s2 = trivial_summary(disconnected)
    assert s2.super_distance(disconnected, 0, 2) == float("inf")


# ----------------------------------------------------------------------
# structural edits used by pruning

def test_splice_out_promotes_children():
    s = HierarchicalSummary(4)
    m = s.merge(0, 1)
    m2 = s.merge(m, 2)
    s.splice_out(m)
    assert s.children[m2] == [0, 1, 2]
    assert s.parent[0] == m2
    assert m not in s.children and m not in s.parent
    assert s.subtree_node_count(m2) == 4


def test_splice_out_requires_no_incident_edges():
    s = HierarchicalSummary(3)
    m = s.merge(0, 1)
    s.add_edge(m, 2, 1)
    with pytest.raises(ValueError):
        s.splice_out(m)


def test_splice_out_root_promotes_to_roots():
    s = HierarchicalSummary(3)
    m = s.merge(0, 1)
    s.splice_out(m)
    assert s.roots == {0, 1, 2}


def test_delete_root_keep_children():
    s = HierarchicalSummary(3)
    m = s.merge(0, 1)
    s.delete_root_keep_children(m)
    assert s.roots == {0, 1, 2}
    assert not s.parent


def test_rebuild_aggregates_restores_tallies():
    g = InputGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    s = trivial_summary(g)
    m = s.merge(0, 1)
    before = {r: s.tree_edge_tally(r) for r in s.roots}
    s.rebuild_aggregates()
    after = {r: s.tree_edge_tally(r) for r in s.roots}
    assert before == after
    assert s.subtree_node_count(m) == 3


def test_copy_is_deep():
    s = HierarchicalSummary(3)
    s.merge(0, 1)
    dup = s.copy()
    assert dup == s
    dup.add_edge(0, 2, 1)
    assert dup != s


# ----------------------------------------------------------------------
# serialization

def test_serialize_round_trip():
    s = HierarchicalSummary(4)
    m = s.merge(0, 1)
    m2 = s.merge(m, 2)
    s.add_edge(m2, m2, 1)
    s.add_edge(0, 1, -1)
    s.add_edge(m2, 3, 1)
    text = s.serialize()
    again = HierarchicalSummary.deserialize(text)
    assert again == s
    assert again.serialize() == text
    assert graphs_equal(again.decode(), s.decode())


def test_serialize_is_deterministic():
    def build():
        s = HierarchicalSummary(5)
        m = s.merge(3, 1)
        s.add_edge(m, 0, 1)
        s.add_edge(2, 4, -1)
        return s
    assert build().serialize() == build().serialize()


def test_deserialize_rejects_bad_magic():
    with pytest.raises(SummaryFormatError):
        HierarchicalSummary.deserialize("NOPE v9\n0 0 0 0 0\n")


def test_deserialize_rejects_count_mismatch():
    s = HierarchicalSummary(3)
    s.add_edge(0, 1, 1)
    lines = s.serialize().splitlines()
    lines[1] = "3 3 2 0 0"
    with pytest.raises(SummaryFormatError):
        HierarchicalSummary.deserialize("\n".join(lines) + "\n")


def test_deserialize_rejects_two_parents():
    s = HierarchicalSummary(4)
    s.merge(0, 1)
    text = s.serialize()
    bad = text.replace("H 4 0\nH 4 1", "H 4 0\nH 4 0")
    with pytest.raises(SummaryFormatError):
        HierarchicalSummary.deserialize(bad)


def test_deserialize_rejects_cycle():
    text = ("HSUM v1\n"
            "2 4 0 0 2\n"
            "H 2 3\n"
            "H 3 2\n")
    with pytest.raises(SummaryFormatError):
        HierarchicalSummary.deserialize(text)


def test_deserialize_rejects_leaf_as_parent():
    text = ("HSUM v1\n"
            "2 3 0 0 1\n"
            "H 0 1\n")
    with pytest.raises(SummaryFormatError):
        HierarchicalSummary.deserialize(text)


def test_deserialize_rejects_dangling_edge_endpoint():
    text = ("HSUM v1\n"
            "2 2 1 0 0\n"
            "P 0 9\n")
    with pytest.raises(SummaryFormatError):
        HierarchicalSummary.deserialize(text)


def test_deserialize_rejects_duplicate_edge():
    text = ("HSUM v1\n"
            "2 2 2 0 0\n"
            "P 0 1\n"
            "P 0 1\n")
    with pytest.raises(SummaryFormatError):
        HierarchicalSummary.deserialize(text)


def test_deserialize_rejects_edge_listed_in_both_sections():
    text = ("HSUM v1\n"
            "2 2 1 1 0\n"
            "P 0 1\n"
            "N 0 1\n")
    with pytest.raises(SummaryFormatError):
        HierarchicalSummary.deserialize(text)


# ----------------------------------------------------------------------
# properties

@settings(max_examples=50, deadline=None)
@given(small_graphs())
def test_trivial_summary_always_lossless(g):
    s = trivial_summary(g)
    assert graphs_equal(s.decode(), g)
    assert s.cost() == g.edge_count


@settings(max_examples=40, deadline=None)
@given(small_graphs(), st.randoms(use_true_random=False))
def test_random_merges_keep_decode_and_oracle_agreement(g, rng):
    s = trivial_summary(g)
    for _ in range(g.node_count):
        roots = sorted(s.roots)
        if len(roots) < 2:
            break
        a, b = rng.sample(roots, 2)
        s.merge(a, b)
        assert s.decode().edge_set() == net_decode_oracle(s)
    assert graphs_equal(s.decode(), g)
    text = s.serialize()
    assert HierarchicalSummary.deserialize(text) == s
