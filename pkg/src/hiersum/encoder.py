"""Merge-time re-encoding of p/n-edges over a small supernode panel.

When two roots A and B merge into M, only edges among a bounded panel of
supernodes are reconsidered: M, A, B, and their direct children (at most 7
nodes), optionally crossed with one other root C and its direct children (at
most 3 more). The frontier is the deepest panel layer; its leaf sets tile
every subnode pair the adjustable edges can touch, and each adjustable edge
covers each frontier-pair block either fully or not at all. Re-encoding
therefore reduces to exact integer delta-matching: find the fewest signed
edges over panel pairs whose per-block sums equal the sums of the edges being
replaced. Solutions are memoized under a shape + symmetry-canonicalized delta
key.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Optional

SlotPair = tuple[int, int]
Assignment = dict[SlotPair, int]

# sides with more children than this skip non-identity symmetries (panel
# shapes from the merge pipeline never exceed 2 children per side)
_MAX_PERM_ARITY = 3


class EncodingInfeasibleError(RuntimeError):
    """No edge assignment over the panel realizes the requested deltas.

    Cannot happen for signatures read off a valid summary: the edges being
    replaced realize their own deltas.
    """


def _norm(i: int, j: int) -> SlotPair:
    return (i, j) if i <= j else (j, i)


class PanelStructure:
    """Slot layout, coverage, constraint blocks, and symmetries for a shape.

    Shapes are tuples: ("merge", ca, cb) or ("cross", ca, cb, cc), where the
    counts are the direct-children counts of A, B (and C), 0 for childless.
    Slot 0 is always the merged node M; each side contributes its node plus
    its children; orange slots (C side) come after all yellow slots.
    """

    def __init__(self, shape: tuple):
        self.shape = shape
        kind = shape[0]
        ca, cb = shape[1], shape[2]
        cc = shape[3] if kind == "cross" else None

        slots: list[str] = ["M"]
        frontier: list[int] = []

        def add_side(count: int, tag: str) -> tuple[int, list[int]]:
            node_slot = len(slots)
            slots.append(tag)
            kid_slots = []
            for _ in range(count):
                kid_slots.append(len(slots))
                slots.append(tag + "kid")
            frontier.extend(kid_slots if count else [node_slot])
            return node_slot, kid_slots

        self.a_slot, self.a_kids = add_side(ca, "A")
        self.b_slot, self.b_kids = add_side(cb, "B")
        self.yellow_count = len(slots)
        self.yellow_frontier = len(frontier)
        if kind == "cross":
            self.c_slot, self.c_kids = add_side(cc, "C")
        self.n_slots = len(slots)
        self.frontier_slots = tuple(frontier)
        nf = len(frontier)

        # frontier positions covered by each slot
        covers: list[frozenset[int]] = []
        pos_of_slot = {s: p for p, s in enumerate(frontier)}
        yellow_positions = frozenset(range(self.yellow_frontier))
        orange_positions = frozenset(range(self.yellow_frontier, nf))
        for s in range(self.n_slots):
            if s == 0:
                covers.append(yellow_positions)
            elif s == self.a_slot:
                covers.append(frozenset(pos_of_slot[k] for k in self.a_kids)
                              or frozenset({pos_of_slot[s]}))
            elif s == self.b_slot:
                covers.append(frozenset(pos_of_slot[k] for k in self.b_kids)
                              or frozenset({pos_of_slot[s]}))
            elif kind == "cross" and s == self.c_slot:
                covers.append(frozenset(pos_of_slot[k] for k in self.c_kids)
                              or frozenset({pos_of_slot[s]}))
            else:
                covers.append(frozenset({pos_of_slot[s]}))
        self.covers = tuple(covers)

        if kind == "merge":
            self.blocks = tuple((p, q) for p in range(nf) for q in range(p, nf))
            self.pairs = tuple((i, j) for i in range(self.n_slots)
                               for j in range(i, self.n_slots))
        else:
            self.blocks = tuple((p, q) for p in range(self.yellow_frontier)
                                for q in range(self.yellow_frontier, nf))
            self.pairs = tuple((i, j) for i in range(self.yellow_count)
                               for j in range(self.yellow_count, self.n_slots))
        block_index = {b: t for t, b in enumerate(self.blocks)}

        pair_blocks: list[tuple[int, ...]] = []
        for (i, j) in self.pairs:
            ci, cj = covers[i], covers[j]
            hit = set()
            for (p, q) in self.blocks:
                if (p in ci and q in cj) or (p in cj and q in ci):
                    hit.add(block_index[(p, q)])
            pair_blocks.append(tuple(sorted(hit)))
        self.pair_blocks = tuple(pair_blocks)

        self.symmetries = self._build_symmetries(kind, ca, cb, cc, block_index)

    def _build_symmetries(self, kind, ca, cb, cc, block_index):
        def side_perms(kids: list[int]) -> list[dict[int, int]]:
            if not kids or len(kids) > _MAX_PERM_ARITY:
                return [{}]
            out = []
            for perm in permutations(kids):
                out.append({k: p for k, p in zip(kids, perm)})
            return out

        swap_options = [False, True] if ca == cb else [False]
        c_perm_list = side_perms(self.c_kids) if kind == "cross" else [{}]
        syms = []
        for swap, pa, pb, pc in product(swap_options, side_perms(self.a_kids),
                                        side_perms(self.b_kids), c_perm_list):
            slot_perm = list(range(self.n_slots))
            for src, dst in {**pa, **pb, **pc}.items():
                slot_perm[src] = dst
            if swap:
                base = slot_perm[:]
                slot_perm[self.a_slot] = base[self.b_slot]
                slot_perm[self.b_slot] = base[self.a_slot]
                for ka, kb in zip(self.a_kids, self.b_kids):
                    slot_perm[ka] = base[kb]
                    slot_perm[kb] = base[ka]
            # induced permutation of frontier positions, then of blocks
            pos_map = {}
            for p, s in enumerate(self.frontier_slots):
                new_slot = slot_perm[s]
                pos_map[p] = self.frontier_slots.index(new_slot)
            block_perm = [0] * len(self.blocks)
            for t, (p, q) in enumerate(self.blocks):
                block_perm[t] = block_index[_norm(pos_map[p], pos_map[q])]
            syms.append((tuple(slot_perm), tuple(block_perm)))
        # dedupe: child permutations collapse when sides coincide
        unique = {}
        for sp, bp in syms:
            unique.setdefault(sp, (sp, bp))
        return tuple(unique.values())


@lru_cache(maxsize=None)
def structure_for(shape: tuple) -> PanelStructure:
    return PanelStructure(shape)


@dataclass(frozen=True)
class Panel:
    """A concrete panel: a shape plus the supernode id occupying each slot.

    ids[0] is the merged node; -1 stands for a merged node that does not
    exist yet (dry-run evaluation), which simply holds no current edges.
    """
    shape: tuple
    ids: tuple[int, ...]

    @property
    def struct(self) -> PanelStructure:
        return structure_for(self.shape)

    @property
    def yellow_ids(self) -> tuple[int, ...]:
        return self.ids[:self.struct.yellow_count]


def panel_for_merge(s, a: int, b: int, merged_id: int = -1) -> Panel:
    """Yellow panel for merging roots a and b: M, both nodes, their children."""
    ka = s.children.get(a, ())
    kb = s.children.get(b, ())
    shape = ("merge", len(ka), len(kb))
    ids = (merged_id, a, *ka, b, *kb)
    return Panel(shape, ids)


def panel_for_cross(s, merge_panel: Panel, c: int) -> Panel:
    """Extend a merge panel with root c's side for cross re-encoding."""
    kc = s.children.get(c, ())
    shape = ("cross", merge_panel.shape[1], merge_panel.shape[2], len(kc))
    ids = merge_panel.ids + (c, *kc)
    return Panel(shape, ids)


def build_panel(s, merged: int, case2_root: Optional[int] = None) -> Panel:
    """Panel around an existing merged root; optionally crossed with a root."""
    kids = s.children.get(merged)
    if merged not in s.roots or not kids or len(kids) != 2:
        raise ValueError(f"{merged} is not a root over exactly two children")
    a, b = kids
    panel = panel_for_merge(s, a, b, merged)
    if case2_root is None:
        return panel
    if case2_root == merged or case2_root not in s.roots:
        raise ValueError(f"{case2_root} is not a distinct root")
    cross = panel_for_cross(s, panel, case2_root)
    yellow = set(panel.ids)
    orange = set(cross.ids[cross.struct.yellow_count:])
    has_edge = any(
        ((k[0] in yellow and k[1] in orange) or (k[0] in orange and k[1] in yellow))
        for o in orange for k in s.incident_edges(o))
    if not has_edge:
        raise ValueError(f"root {case2_root} has no edge into the merge panel")
    return cross


@dataclass(frozen=True)
class DeltaSignature:
    """Required net contribution of adjustable edges, per frontier block."""
    shape: tuple
    deltas: tuple[int, ...]
    current: tuple[tuple[int, int], ...]  # (pair index, sign) of edges present

    @property
    def current_cardinality(self) -> int:
        return len(self.current)


def signature_of(s, panel: Panel) -> DeltaSignature:
    """Read the panel's current adjustable edges off the summary as deltas."""
    st = panel.struct
    ids = panel.ids
    deltas = [0] * len(st.blocks)
    current = []
    for pi, (i, j) in enumerate(st.pairs):
        u, v = ids[i], ids[j]
        if u < 0 or v < 0:
            continue
        sign = s.edge_sign(u, v)
        if sign:
            current.append((pi, sign))
            for t in st.pair_blocks[pi]:
                deltas[t] += sign
    return DeltaSignature(panel.shape, tuple(deltas), tuple(current))


# ----------------------------------------------------------------------
# exact minimum-cardinality search

def _solve(st: PanelStructure, deltas: tuple[int, ...],
           bound: Optional[int]) -> Optional[Assignment]:
    """Branch and bound over signs in {0, +1, -1} per adjustable pair.

    Minimizes (cardinality, n-edge count); among ties the first solution in
    sign-code order (0 < +1 < -1 per pair, pairs in slot order) wins. Returns
    None when no assignment realizes the deltas.
    """
    pairs = st.pairs
    pair_blocks = st.pair_blocks
    nb = len(st.blocks)
    np_ = len(pairs)
    # suffix[i][b]: how many pairs from i on cover block b
    suffix = [[0] * nb for _ in range(np_ + 1)]
    for i in range(np_ - 1, -1, -1):
        row = suffix[i + 1][:]
        for b in pair_blocks[i]:
            row[b] += 1
        suffix[i] = row

    resid = list(deltas)
    best: list = [bound + 1 if bound is not None else np_ + 1, 0, None]
    chosen: list[int] = [0] * np_

    def dfs(idx: int, card: int, ncount: int) -> None:
        cap = suffix[idx]
        need = 0
        for b in range(nb):
            r = resid[b]
            if r < 0:
                r = -r
            if r > cap[b]:
                return
            if r > need:
                need = r
        if card + need > best[0]:
            return
        if idx == np_:
            if (card, ncount) < (best[0], best[1]):
                best[0] = card
                best[1] = ncount
                best[2] = {pairs[i]: chosen[i] for i in range(np_) if chosen[i]}
            return
        blocks = pair_blocks[idx]
        dfs(idx + 1, card, ncount)
        if card < best[0]:
            for sign, dn in ((1, 0), (-1, 1)):
                chosen[idx] = sign
                for b in blocks:
                    resid[b] -= sign
                dfs(idx + 1, card + 1, ncount + dn)
                for b in blocks:
                    resid[b] += sign
            chosen[idx] = 0

    dfs(0, 0, 0)
    return best[2]


def _canonicalize(st: PanelStructure,
                  deltas: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Smallest delta vector over the shape's symmetry group.

    Returns (canonical deltas, slot permutation that produced them)."""
    best_vec = None
    best_slot_perm = None
    for slot_perm, block_perm in st.symmetries:
        vec = [0] * len(deltas)
        for old, d in enumerate(deltas):
            vec[block_perm[old]] = d
        vec = tuple(vec)
        if best_vec is None or vec < best_vec:
            best_vec = vec
            best_slot_perm = slot_perm
    return best_vec, best_slot_perm


def _transport(assignment: Assignment, slot_perm: tuple[int, ...]) -> Assignment:
    """Map a canonical-coordinate assignment back to original slots."""
    inv = [0] * len(slot_perm)
    for i, p in enumerate(slot_perm):
        inv[p] = i
    return {_norm(inv[x], inv[y]): sign for (x, y), sign in assignment.items()}


class MemoTable:
    """Canonical (shape, deltas) -> optimal assignment, with hit counters.

    Delta components beyond the band are rare; such signatures are solved
    directly and not stored, keeping the table bounded.
    """

    def __init__(self, delta_band: int = 4):
        self.delta_band = delta_band
        self._table: dict[tuple, tuple[int, Assignment]] = {}
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._table)

    def lookup(self, key: tuple) -> Optional[tuple[int, Assignment]]:
        entry = self._table.get(key)
        if entry is None:
            self.misses += 1
        else:
            self.hits += 1
        return entry

    def store(self, key: tuple, card: int, assignment: Assignment) -> None:
        self._table[key] = (card, assignment)

    def in_band(self, deltas: Iterable[int]) -> bool:
        return all(-self.delta_band <= d <= self.delta_band for d in deltas)

    def dump(self, stream) -> None:
        for key, (card, _) in sorted(self._table.items()):
            stream.write(f"{key} {card}\n")


@dataclass(frozen=True)
class MemoStats:
    entries: int
    bytes_estimate: int
    hit_rate: float


def memo_stats(memo: MemoTable) -> MemoStats:
    total = memo.hits + memo.misses
    rate = memo.hits / total if total else 0.0
    size = sys.getsizeof(memo._table)
    for key, (card, assignment) in memo._table.items():
        size += sys.getsizeof(key) + sys.getsizeof(assignment) + 64
    return MemoStats(len(memo._table), size, rate)


def min_encoding(sig: DeltaSignature, memo: Optional[MemoTable] = None) -> Assignment:
    """Minimum-cardinality assignment realizing the signature's deltas.

    The bound from the signature's current edges (they realize the deltas
    themselves) only prunes the search above the optimum, so memoized results
    are valid for any caller with the same canonical key.
    """
    st = structure_for(sig.shape)
    if not any(sig.deltas):
        return {}
    bound = len(sig.current) if sig.current else None
    canon, slot_perm = _canonicalize(st, sig.deltas)
    use_memo = memo is not None and memo.in_band(canon)
    if use_memo:
        key = (sig.shape, canon)
        entry = memo.lookup(key)
        if entry is not None:
            return _transport(entry[1], slot_perm)
    solution = _solve(st, canon, bound)
    if solution is None:
        raise EncodingInfeasibleError(
            f"no assignment realizes deltas {sig.deltas} on shape {sig.shape}")
    if use_memo:
        memo.store(key, len(solution), solution)
    return _transport(solution, slot_perm)


def brute_force_min_encoding(sig: DeltaSignature) -> Assignment:
    """Exact optimum by full enumeration; test oracle for small panels.

    Enumerates all 3^pairs assignments meet-in-the-middle, so the search
    space is identical to the naive scan but completes in reasonable time.
    Refuses panels with more than 5 supernodes.
    """
    st = structure_for(sig.shape)
    if st.n_slots > 5:
        raise ValueError(f"oracle limited to panels of <= 5 nodes, got {st.n_slots}")
    if not any(sig.deltas):
        return {}
    pairs = st.pairs
    nb = len(st.blocks)
    half = len(pairs) // 2
    front, back = pairs[:half], pairs[half:]

    def enumerate_half(pair_slice, offset):
        table: dict[tuple[int, ...], tuple[int, int, tuple]] = {}
        for signs in product((0, 1, -1), repeat=len(pair_slice)):
            vec = [0] * nb
            card = 0
            ncount = 0
            for k, sign in enumerate(signs):
                if not sign:
                    continue
                card += 1
                if sign < 0:
                    ncount += 1
                for b in st.pair_blocks[offset + k]:
                    vec[b] += sign
            key = tuple(vec)
            cur = table.get(key)
            if cur is None or (card, ncount) < cur[:2]:
                table[key] = (card, ncount, signs)
        return table

    front_table = enumerate_half(front, 0)
    best = None
    for key, (card2, ncount2, signs2) in sorted(enumerate_half(back, half).items()):
        need = tuple(d - v for d, v in zip(sig.deltas, key))
        got = front_table.get(need)
        if got is None:
            continue
        card = got[0] + card2
        ncount = got[1] + ncount2
        if best is None or (card, ncount) < best[:2]:
            best = (card, ncount, got[2], signs2)
    if best is None:
        raise EncodingInfeasibleError(
            f"no assignment realizes deltas {sig.deltas} on shape {sig.shape}")
    assignment: Assignment = {}
    for k, sign in enumerate(best[2]):
        if sign:
            assignment[pairs[k]] = sign
    for k, sign in enumerate(best[3]):
        if sign:
            assignment[pairs[half + k]] = sign
    return assignment


# ----------------------------------------------------------------------
# planning and applying a re-encoding

def plan_panel(s, panel: Panel, memo: Optional[MemoTable]):
    """Edge-count change and edit plan for re-encoding one panel.

    Returns (delta_cost, plan); plan is None for "leave as is", else a pair
    (current, assignment) for apply_plan. A single current edge is already a
    minimum-cardinality realization of its own signature, so it stays.
    """
    sig = signature_of(s, panel)
    if not any(sig.deltas):
        if not sig.current:
            return 0, None
        return -len(sig.current), (sig.current, {})
    if len(sig.current) == 1:
        return 0, None
    assignment = min_encoding(sig, memo)
    current_map = {panel.struct.pairs[pi]: sign for pi, sign in sig.current}
    if assignment == current_map:
        return 0, None
    return len(assignment) - len(sig.current), (sig.current, assignment)


def apply_plan(s, panel: Panel, plan) -> None:
    current, assignment = plan
    st = panel.struct
    ids = panel.ids
    for pi, _sign in current:
        i, j = st.pairs[pi]
        s.remove_edge(ids[i], ids[j])
    for (i, j) in sorted(assignment):
        s.add_edge(ids[i], ids[j], assignment[(i, j)])


def apply_encoding(s, panel: Panel, assignment: Assignment) -> None:
    """Replace the panel's adjustable edges with the given assignment."""
    sig = signature_of(s, panel)
    apply_plan(s, panel, (sig.current, assignment))
