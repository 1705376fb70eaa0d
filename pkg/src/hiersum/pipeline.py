"""The summarization pipeline: grouping, greedy merging, and pruning.

Starting from the one-edge-per-edge trivial summary, the pipeline runs T
iterations. Each iteration groups current roots by min-hash shingles of their
neighborhoods (roots sharing a shingle are within two hops of each other),
then greedily merges pairs inside each group while the relative cost saving
clears a threshold of 1/(1+t), dropping to 0 in the final iteration. A final
pruning pass removes supernodes and edges that no longer pay for themselves.

All randomness flows from one seed through named streams, so a fixed
(graph, config) pair always produces the identical summary.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from hiersum.encoder import (MemoTable, apply_plan, panel_for_cross,
                             panel_for_merge, plan_panel)
from hiersum.graph import InputGraph
from hiersum.summary import HierarchicalSummary, trivial_summary

NEG_INFINITY = float("-inf")

_MASK64 = (1 << 64) - 1


@dataclass
class SummarizeConfig:
    iterations: int = 20
    max_candidate_size: int = 500
    max_shingle_rounds: int = 10
    height_bound: Optional[int] = None
    seed: int = 0
    pruning_enabled: bool = True

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.max_candidate_size < 2:
            raise ValueError("max_candidate_size must be >= 2")
        if self.max_shingle_rounds < 1:
            raise ValueError("max_shingle_rounds must be >= 1")
        if self.height_bound is not None and self.height_bound < 1:
            raise ValueError("height_bound must be >= 1 when set")


def derive_seed(*parts) -> int:
    """Stable 64-bit stream seed from a tuple of labels."""
    digest = hashlib.blake2b(repr(parts).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def merge_threshold(t: int, total: int) -> Fraction:
    """Acceptance threshold for iteration t of `total`: 1/(1+t), 0 at the end."""
    if not 1 <= t <= total:
        raise ValueError(f"iteration {t} outside 1..{total}")
    if t == total:
        return Fraction(0)
    return Fraction(1, 1 + t)


# ----------------------------------------------------------------------
# candidate generation

def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = (x + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(_MASK64)
    x = ((x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(_MASK64)
    x = ((x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & np.uint64(_MASK64)
    return x ^ (x >> np.uint64(31))


def _subnode_hashes(n: int, hash_seed: int) -> np.ndarray:
    ids = np.arange(n, dtype=np.uint64)
    return _splitmix64(ids ^ np.uint64(hash_seed & _MASK64))


def _closed_neighborhood_minima(g: InputGraph, hashes: np.ndarray) -> np.ndarray:
    """m[u] = min hash over u and its neighbors, vectorized over all nodes."""
    if g.indices.size == 0:
        return hashes.copy()
    neighbor_hashes = hashes[g.indices]
    starts = g.indptr[:-1]
    has_neighbors = g.indptr[1:] > starts
    mins = hashes.copy()
    # reduceat misreads empty rows; fix up by masking to rows with neighbors
    safe_starts = np.minimum(starts, g.indices.size - 1)
    row_mins = np.minimum.reduceat(neighbor_hashes, safe_starts)
    mins[has_neighbors] = np.minimum(mins[has_neighbors], row_mins[has_neighbors])
    return mins


def root_shingle(s: HierarchicalSummary, g: InputGraph, root: int,
                 hash_seed: int) -> int:
    """Min hash over the closed neighborhoods of the root's subnodes."""
    hashes = _subnode_hashes(g.node_count, hash_seed)
    best = None
    for u in s.leaves_of(root):
        value = int(hashes[u])
        for w in g.neighbors(u):
            hw = int(hashes[w])
            if hw < value:
                value = hw
        if best is None or value < best:
            best = value
    if best is None:
        raise ValueError(f"root {root} has no leaves")
    return best


def _all_root_shingles(s: HierarchicalSummary, g: InputGraph, roots: list[int],
                       hash_seed: int) -> dict[int, int]:
    hashes = _subnode_hashes(g.node_count, hash_seed)
    mins = _closed_neighborhood_minima(g, hashes)
    out = {}
    for r in roots:
        if s.is_leaf(r):
            out[r] = int(mins[r])
        else:
            out[r] = int(min(mins[u] for u in s.leaves_of(r)))
    return out


def generate_candidates(s: HierarchicalSummary, g: InputGraph, t: int,
                        cfg: SummarizeConfig) -> list[list[int]]:
    """Partition current roots into merge candidate groups.

    Roots are split by shingle value, oversized groups re-split with fresh
    hash seeds up to max_shingle_rounds, then halved at random until every
    group fits. Groups of one are useless and dropped.
    """
    cap = cfg.max_candidate_size
    final: list[list[int]] = []
    pending: list[list[int]] = [sorted(s.roots)]
    for round_no in range(cfg.max_shingle_rounds):
        if not pending:
            break
        members = [r for group in pending for r in group]
        shingles = _all_root_shingles(s, g, members, derive_seed(cfg.seed, "shingle", t, round_no))
        next_pending: list[list[int]] = []
        for group in pending:
            buckets: dict[int, list[int]] = {}
            for r in group:
                buckets.setdefault(shingles[r], []).append(r)
            for value in sorted(buckets):
                bucket = buckets[value]
                if len(bucket) <= cap:
                    final.append(bucket)
                else:
                    next_pending.append(bucket)
        pending = next_pending
    if pending:
        rng = random.Random(derive_seed(cfg.seed, "split", t))
        while pending:
            group = pending.pop()
            if len(group) <= cap:
                final.append(group)
                continue
            shuffled = group[:]
            rng.shuffle(shuffled)
            mid = len(shuffled) // 2
            pending.append(sorted(shuffled[:mid]))
            pending.append(sorted(shuffled[mid:]))
    groups = [sorted(grp) for grp in final if len(grp) >= 2]
    groups.sort(key=lambda grp: grp[0])
    return groups


# ----------------------------------------------------------------------
# saving evaluation and merging

def _case2_roots(s: HierarchicalSummary, yellow_ids, skip_tops: set[int]) -> list[int]:
    """Roots with an adjustable edge into the yellow panel, ascending.

    An edge qualifies its root only if the far endpoint is the root itself or
    one of its direct children; deeper endpoints sit below the panel frontier
    and stay fixed.
    """
    yellow = {y for y in yellow_ids if y >= 0}
    found = set()
    for y in yellow:
        for (p, q) in s.incident_edges(y):
            other = q if p == y else p
            if other in yellow:
                continue
            top = s.top(other)
            if top in skip_tops or top in found:
                continue
            if other == top or s.parent.get(other) == top:
                found.add(top)
    return sorted(found)


def saving(s: HierarchicalSummary, a: int, b: int,
           memo: Optional[MemoTable]) -> Fraction | float:
    """Relative cost reduction of merging roots a and b, without mutating.

    Evaluates the exact panel re-encodings the real merge would perform; the
    numerator is denominator + 2 h-edges + the net panel edge change.
    """
    den = (s.subtree_node_count(a) - 1 + s.tree_edge_tally(a)
           + s.subtree_node_count(b) - 1 + s.tree_edge_tally(b)
           - s.count_cross_edges(a, b))
    if den <= 0:
        return NEG_INFINITY
    delta = 0
    panel = panel_for_merge(s, a, b)
    delta += plan_panel(s, panel, memo)[0]
    for c in _case2_roots(s, panel.ids, {a, b}):
        delta += plan_panel(s, panel_for_cross(s, panel, c), memo)[0]
    return Fraction(-(2 + delta), den)


def merge_and_update(s: HierarchicalSummary, a: int, b: int,
                     memo: Optional[MemoTable]) -> int:
    """Merge roots a and b and re-encode every affected panel."""
    m = s.merge(a, b)
    panel = panel_for_merge(s, a, b, m)
    _, plan = plan_panel(s, panel, memo)
    if plan is not None:
        apply_plan(s, panel, plan)
    for c in _case2_roots(s, panel.ids, {m}):
        cross = panel_for_cross(s, panel, c)
        _, plan = plan_panel(s, cross, memo)
        if plan is not None:
            apply_plan(s, cross, plan)
    return m


def merge_step(s: HierarchicalSummary, g: InputGraph, candidates: list[int],
               t: int, cfg: SummarizeConfig, memo: MemoTable,
               rng: random.Random) -> int:
    """Greedy merging within one candidate set; returns merges performed.

    Pops a random root A, merges it with the best-saving partner if the
    saving clears the iteration threshold, and keeps the merged node in play.
    """
    threshold = merge_threshold(t, cfg.iterations)
    queue = [r for r in candidates if r in s.roots]
    merges = 0
    while len(queue) >= 2:
        a = queue.pop(rng.randrange(len(queue)))
        best_saving = None
        best_partner = None
        for z in queue:
            if cfg.height_bound is not None:
                if max(s.height_of(a), s.height_of(z)) + 1 > cfg.height_bound:
                    continue
            value = saving(s, a, z, memo)
            if best_saving is None or value > best_saving or \
                    (value == best_saving and z < best_partner):
                best_saving = value
                best_partner = z
        if best_partner is None:
            continue
        if best_saving >= threshold:
            merged = merge_and_update(s, a, best_partner, memo)
            queue[queue.index(best_partner)] = merged
            merges += 1
    return merges


# ----------------------------------------------------------------------
# pruning

def prune_splice_edgeless(s: HierarchicalSummary) -> int:
    """Remove supernodes that have children but no incident p/n-edge.

    Their children attach to the grandparent (or become roots); the h-edges
    to the removed node vanish. Returns the number of supernodes removed.
    """
    removed = 0
    queue = sorted(s.roots)
    i = 0
    while i < len(queue):
        x = queue[i]
        i += 1
        kids = s.children.get(x)
        if not kids:
            continue
        queue.extend(kids)
        if not s.incident_edges(x):
            s.splice_out(x)
            removed += 1
    if removed:
        s.rebuild_aggregates()
    return removed


def prune_push_down_single_edges(s: HierarchicalSummary) -> int:
    """Dissolve roots whose only incident edge is a single non-self edge.

    The edge is pushed to the children (opposite-sign edges cancel), the root
    is deleted, and the children become roots. Repeats until stable, since a
    push-down can newly qualify other roots. Returns roots dissolved.
    """
    removed = 0
    changed = True
    while changed:
        changed = False
        for a in sorted(s.roots):
            if a not in s.roots or s.is_leaf(a):
                continue
            kids = s.children.get(a)
            if not kids:
                continue
            inc = s.incident_edges(a)
            if len(inc) != 1:
                continue
            (p, q) = next(iter(inc))
            if p == q:
                continue
            other = q if p == a else p
            sign = s.edge_sign(p, q)
            s.remove_edge(p, q)
            for c in list(kids):
                # opposite-sign edges cancel inside add_edge
                s.add_edge(c, other, sign)
            s.delete_root_keep_children(a)
            removed += 1
            changed = True
    if removed:
        s.rebuild_aggregates()
    return removed


def prune_flatten_blocks(s: HierarchicalSummary, g: InputGraph) -> int:
    """Re-encode each root-pair block flat when that is strictly cheaper.

    For roots A, B the flat cost is min(|T|-|E|+1, |E|) (0 when the block has
    no input edges): either one p-edge per input edge, or a block-level
    p-edge plus one n-edge per absent pair. Returns blocks rewritten.
    """
    leaf_root: dict[int, int] = {}
    for r in s.roots:
        for u in s.leaves_of(r):
            leaf_root[u] = r
    block_edges: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for (u, v) in g.edges():
        ru, rv = leaf_root[u], leaf_root[v]
        key = (ru, rv) if ru <= rv else (rv, ru)
        block_edges.setdefault(key, []).append((u, v))
    buckets: dict[tuple[int, int], list] = {}
    for k in s._sign:
        ra, rb = s.top(k[0]), s.top(k[1])
        key = (ra, rb) if ra <= rb else (rb, ra)
        buckets.setdefault(key, []).append(k)
    rewritten = 0
    for key in sorted(buckets):
        a, b = key
        current = buckets[key]
        edges_here = block_edges.get(key, [])
        e = len(edges_here)
        sa = s.leaf_count(a)
        if a == b:
            t_size = sa * (sa - 1) // 2
        else:
            t_size = sa * s.leaf_count(b)
        flat_cost = 0 if e == 0 else min(t_size - e + 1, e)
        if flat_cost >= len(current):
            continue
        for k in current:
            s.remove_edge(*k)
        if e and e <= t_size - e + 1:
            for (u, v) in sorted(edges_here):
                s.add_edge(u, v, 1)
        elif e:
            s.add_edge(a, b, 1)
            leaves_a = sorted(s.leaves_of(a))
            leaves_b = sorted(s.leaves_of(b)) if a != b else leaves_a
            for i, u in enumerate(leaves_a):
                start = i + 1 if a == b else 0
                for v in leaves_b[start:]:
                    if not g.has_edge(u, v):
                        s.add_edge(u, v, -1)
        rewritten += 1
    if rewritten:
        s.rebuild_aggregates()
    return rewritten


def prune(s: HierarchicalSummary, g: InputGraph) -> dict[str, int]:
    """All three pruning substeps in order; each preserves the decoded graph."""
    report = {
        "spliced": prune_splice_edgeless(s),
        "pushed_down": prune_push_down_single_edges(s),
        "flattened": prune_flatten_blocks(s, g),
    }
    s.rebuild_aggregates()
    return report


# ----------------------------------------------------------------------
# driver

def summarize(g: InputGraph, cfg: Optional[SummarizeConfig] = None,
              on_iteration: Optional[Callable[[int, HierarchicalSummary, int], None]] = None
              ) -> HierarchicalSummary:
    """Full pipeline: trivial summary, T merge iterations, pruning."""
    if cfg is None:
        cfg = SummarizeConfig()
    s = trivial_summary(g)
    memo = MemoTable()
    for t in range(1, cfg.iterations + 1):
        groups = generate_candidates(s, g, t, cfg)
        merges = 0
        for index, members in enumerate(groups):
            rng = random.Random(derive_seed(cfg.seed, "merge", t, index))
            merges += merge_step(s, g, members, t, cfg, memo, rng)
        if on_iteration is not None:
            on_iteration(t, s, merges)
    if cfg.pruning_enabled:
        prune(s, g)
    return s
