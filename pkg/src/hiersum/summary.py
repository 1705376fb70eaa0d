"""Hierarchical graph summaries: a supernode forest plus signed correction edges.

A summary represents a simple undirected graph exactly. Supernodes form a
forest whose leaves are the original nodes (ids 0..n-1); internal supernodes
take fresh ids from n upward. Positive and negative edges (p-edges, n-edges)
connect supernodes, self-loops allowed. A node pair (u, v) is an edge of the
represented graph iff the number of p-edges covering it minus the number of
n-edges covering it equals 1; a valid summary keeps that net value in {0, 1}
for every pair. An edge (X, Y) covers (u, v) iff one endpoint supernode
contains u and the other contains v.

Total encoding cost is |P+| + |P-| + |H|, where |H| counts parent->child
hierarchy edges.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator

from hiersum.graph import InputGraph

EdgeKey = tuple[int, int]


class InvalidSummaryError(ValueError):
    """A subnode pair's net edge count left {0, 1}."""

    def __init__(self, pair: tuple[int, int], net: int):
        super().__init__(f"pair {pair} has net edge count {net}, expected 0 or 1")
        self.pair = pair
        self.net = net


class SummaryFormatError(ValueError):
    """Serialized summary text is malformed."""


def _key(a: int, b: int) -> EdgeKey:
    return (a, b) if a <= b else (b, a)


class LosslessReport:
    """Outcome of verify_lossless: pass flag plus the first few violations."""

    __slots__ = ("ok", "violations", "missing", "extra", "invalid_pairs")

    def __init__(self, ok: bool, violations: list[str], missing: int,
                 extra: int, invalid_pairs: int):
        self.ok = ok
        self.violations = violations
        self.missing = missing
        self.extra = extra
        self.invalid_pairs = invalid_pairs

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self):
        status = "pass" if self.ok else "FAIL"
        return (f"LosslessReport({status}, missing={self.missing}, "
                f"extra={self.extra}, invalid={self.invalid_pairs})")


class HierarchicalSummary:
    """Mutable summary structure operated on by the summarizer.

    Leaf supernodes 0..subnode_count-1 always exist and are never deleted.
    Internal supernodes may be deleted by pruning, leaving id gaps; ids are
    never reused within one summary's lifetime.
    """

    def __init__(self, subnode_count: int):
        self.subnode_count = int(subnode_count)
        self.parent: dict[int, int] = {}
        self.children: dict[int, list[int]] = {}
        self.roots: set[int] = set(range(subnode_count))
        self.next_id = int(subnode_count)
        # per-internal-node subtree stats; leaves are implicit (1, 1, 0)
        self._leaf_total: dict[int, int] = {}
        self._node_total: dict[int, int] = {}
        self._height: dict[int, int] = {}
        self._sign: dict[EdgeKey, int] = {}
        self._inc: dict[int, set[EdgeKey]] = {}
        self.pos_count = 0
        self.neg_count = 0
        # per-root count of p/n-edges with at least one endpoint in the tree
        self._tree_edges: dict[int, int] = {r: 0 for r in self.roots}

    # ------------------------------------------------------------------
    # basic structure queries

    def is_leaf(self, x: int) -> bool:
        return x < self.subnode_count

    def exists(self, x: int) -> bool:
        return self.is_leaf(x) or x in self.children

    def leaf_count(self, x: int) -> int:
        return self._leaf_total.get(x, 1)

    def subtree_node_count(self, x: int) -> int:
        return self._node_total.get(x, 1)

    def height_of(self, x: int) -> int:
        return self._height.get(x, 0)

    def top(self, x: int) -> int:
        """Root of the tree containing supernode x."""
        while x in self.parent:
            x = self.parent[x]
        return x

    def ancestors_of_leaf(self, v: int) -> list[int]:
        """Chain [v, parent(v), ..., root]."""
        chain = [v]
        while chain[-1] in self.parent:
            chain.append(self.parent[chain[-1]])
        return chain

    def tree_nodes(self, root: int) -> Iterator[int]:
        stack = [root]
        while stack:
            x = stack.pop()
            yield x
            stack.extend(self.children.get(x, ()))

    def leaves_of(self, x: int) -> list[int]:
        """Subnodes under x, ascending."""
        if self.is_leaf(x):
            return [x]
        out = []
        stack = [x]
        while stack:
            y = stack.pop()
            kids = self.children.get(y)
            if kids:
                stack.extend(kids)
            else:
                out.append(y)
        out.sort()
        return out

    def supernode_ids(self) -> list[int]:
        return list(range(self.subnode_count)) + sorted(self.children)

    def incident_edges(self, x: int) -> set[EdgeKey]:
        return self._inc.get(x, set())

    def edge_sign(self, a: int, b: int) -> int:
        """+1, -1, or 0 if no edge between supernodes a and b."""
        return self._sign.get(_key(a, b), 0)

    def edges_signed(self) -> Iterator[tuple[int, int, int]]:
        for (a, b), sign in self._sign.items():
            yield a, b, sign

    # ------------------------------------------------------------------
    # mutation

    def add_edge(self, a: int, b: int, sign: int) -> bool:
        """Insert a p-edge (+1) or n-edge (-1) between supernodes a and b.

        An existing edge of the opposite sign cancels instead (both vanish,
        net contribution 0); returns False in that case, True when inserted.
        A same-sign duplicate is an error: it would push some pair's net
        outside {0, 1}.
        """
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        if not (self.exists(a) and self.exists(b)):
            raise KeyError(f"supernode missing: ({a}, {b})")
        k = _key(a, b)
        old = self._sign.get(k, 0)
        if old == sign:
            raise InvalidSummaryError(k, 2 * sign)
        if old == -sign:
            self.remove_edge(a, b)
            return False
        self._sign[k] = sign
        self._inc.setdefault(k[0], set()).add(k)
        self._inc.setdefault(k[1], set()).add(k)
        if sign > 0:
            self.pos_count += 1
        else:
            self.neg_count += 1
        ta = self.top(k[0])
        tb = self.top(k[1])
        self._tree_edges[ta] = self._tree_edges.get(ta, 0) + 1
        if tb != ta:
            self._tree_edges[tb] = self._tree_edges.get(tb, 0) + 1
        return True

    def remove_edge(self, a: int, b: int) -> None:
        k = _key(a, b)
        sign = self._sign.pop(k)
        self._inc[k[0]].discard(k)
        self._inc[k[1]].discard(k)
        if sign > 0:
            self.pos_count -= 1
        else:
            self.neg_count -= 1
        ta = self.top(k[0])
        tb = self.top(k[1])
        # .get: tallies may be mid-rebuild during pruning edits
        self._tree_edges[ta] = self._tree_edges.get(ta, 0) - 1
        if tb != ta:
            self._tree_edges[tb] = self._tree_edges.get(tb, 0) - 1

    def merge(self, a: int, b: int) -> int:
        """Create a fresh root with children a and b (two new h-edges).

        Leaves p/n-edges untouched; the caller re-encodes afterwards.
        """
        if a == b or a not in self.roots or b not in self.roots:
            raise ValueError(f"merge requires two distinct roots, got ({a}, {b})")
        cross = self.count_cross_edges(a, b)
        m = self.next_id
        self.next_id += 1
        self.parent[a] = m
        self.parent[b] = m
        self.children[m] = [a, b]
        self.roots.discard(a)
        self.roots.discard(b)
        self.roots.add(m)
        self._leaf_total[m] = self.leaf_count(a) + self.leaf_count(b)
        self._node_total[m] = self.subtree_node_count(a) + self.subtree_node_count(b) + 1
        self._height[m] = max(self.height_of(a), self.height_of(b)) + 1
        self._tree_edges[m] = (self._tree_edges.pop(a, 0)
                               + self._tree_edges.pop(b, 0) - cross)
        return m

    def add_supernode(self, child_roots: list[int]) -> int:
        """Group several current roots under one fresh root (generator path)."""
        if len(child_roots) < 1:
            raise ValueError("add_supernode needs at least one child")
        if len(set(child_roots)) != len(child_roots):
            raise ValueError("duplicate children")
        for c in child_roots:
            if c not in self.roots:
                raise ValueError(f"{c} is not a root")
        m = self.next_id
        self.next_id += 1
        self.children[m] = list(child_roots)
        for c in child_roots:
            self.parent[c] = m
            self.roots.discard(c)
        self.roots.add(m)
        self._leaf_total[m] = sum(self.leaf_count(c) for c in child_roots)
        self._node_total[m] = 1 + sum(self.subtree_node_count(c) for c in child_roots)
        self._height[m] = 1 + max(self.height_of(c) for c in child_roots)
        seen: set[EdgeKey] = set()
        for x in self.tree_nodes(m):
            seen |= self._inc.get(x, set())
        for c in child_roots:
            self._tree_edges.pop(c, None)
        self._tree_edges[m] = len(seen)
        return m

    def count_cross_edges(self, a: int, b: int) -> int:
        """Edges with one endpoint in root a's tree and the other in b's."""
        if self.subtree_node_count(a) > self.subtree_node_count(b):
            a, b = b, a
        count = 0
        for x in self.tree_nodes(a):
            for (p, q) in self._inc.get(x, ()):
                other = q if p == x else p
                if other == x:
                    continue
                if self.top(other) == b:
                    count += 1
        return count

    def splice_out(self, x: int) -> None:
        """Remove internal supernode x, attaching its children to its parent
        (or making them roots). x must have no incident p/n-edges."""
        kids = self.children.get(x)
        if not kids:
            raise ValueError(f"{x} has no children to splice")
        if self._inc.get(x):
            raise ValueError(f"{x} still has incident edges")
        p = self.parent.pop(x, None)
        if p is None:
            self.roots.discard(x)
            for c in kids:
                del self.parent[c]
                self.roots.add(c)
        else:
            siblings = self.children[p]
            i = siblings.index(x)
            self.children[p] = siblings[:i] + kids + siblings[i + 1:]
            for c in kids:
                self.parent[c] = p
        del self.children[x]
        self._drop_node_entries(x)
        anc = p
        while anc is not None:
            self._node_total[anc] -= 1
            self._height[anc] = 1 + max(self.height_of(c)
                                        for c in self.children[anc])
            anc = self.parent.get(anc)

    def delete_root_keep_children(self, a: int) -> None:
        """Remove root a, promoting its children to roots. No incident edges."""
        if a not in self.roots:
            raise ValueError(f"{a} is not a root")
        if self._inc.get(a):
            raise ValueError(f"{a} still has incident edges")
        kids = self.children.get(a)
        if not kids:
            raise ValueError(f"{a} has no children")
        self.roots.discard(a)
        for c in kids:
            del self.parent[c]
            self.roots.add(c)
        del self.children[a]
        self._drop_node_entries(a)

    def _drop_node_entries(self, x: int) -> None:
        self._leaf_total.pop(x, None)
        self._node_total.pop(x, None)
        self._height.pop(x, None)
        self._inc.pop(x, None)
        self._tree_edges.pop(x, None)

    def rebuild_aggregates(self) -> None:
        """Recompute subtree stats and per-root edge tallies from scratch.

        Needed after structural edits that bypass merge/add_edge bookkeeping
        (the pruning substeps)."""
        self._leaf_total.clear()
        self._node_total.clear()
        self._height.clear()
        for r in self.roots:
            # children-before-parent order via postorder stack
            order: list[int] = []
            stack = [r]
            while stack:
                x = stack.pop()
                order.append(x)
                stack.extend(self.children.get(x, ()))
            for x in reversed(order):
                kids = self.children.get(x)
                if not kids:
                    continue
                self._leaf_total[x] = sum(self.leaf_count(c) for c in kids)
                self._node_total[x] = 1 + sum(self.subtree_node_count(c) for c in kids)
                self._height[x] = 1 + max(self.height_of(c) for c in kids)
        self._tree_edges = {r: 0 for r in self.roots}
        for (a, b) in self._sign:
            ta = self.top(a)
            tb = self.top(b)
            self._tree_edges[ta] += 1
            if tb != ta:
                self._tree_edges[tb] += 1

    def copy(self) -> "HierarchicalSummary":
        dup = HierarchicalSummary(self.subnode_count)
        dup.parent = dict(self.parent)
        dup.children = {k: list(v) for k, v in self.children.items()}
        dup.roots = set(self.roots)
        dup.next_id = self.next_id
        dup._leaf_total = dict(self._leaf_total)
        dup._node_total = dict(self._node_total)
        dup._height = dict(self._height)
        dup._sign = dict(self._sign)
        dup._inc = {k: set(v) for k, v in self._inc.items() if v}
        dup.pos_count = self.pos_count
        dup.neg_count = self.neg_count
        dup._tree_edges = dict(self._tree_edges)
        return dup

    def __eq__(self, other) -> bool:
        if not isinstance(other, HierarchicalSummary):
            return NotImplemented
        return (self.subnode_count == other.subnode_count
                and self.parent == other.parent
                and {k: sorted(v) for k, v in self.children.items()}
                == {k: sorted(v) for k, v in other.children.items()}
                and self._sign == other._sign)

    def __hash__(self):
        return hash((self.subnode_count, len(self.parent), len(self._sign)))

    # ------------------------------------------------------------------
    # cost metrics

    def h_edge_count(self) -> int:
        return len(self.parent)

    def cost(self) -> int:
        return self.pos_count + self.neg_count + len(self.parent)

    def cost_components(self, root: int) -> tuple[int, int]:
        """(h-edges inside root's tree, p/n-edges touching the tree).

        Computed fresh by a tree walk; the incremental tallies used on the
        merge hot path are checked against this in tests.
        """
        if root not in self.roots:
            raise ValueError(f"{root} is not a root")
        h_cost = self.subtree_node_count(root) - 1
        seen: set[EdgeKey] = set()
        for x in self.tree_nodes(root):
            seen |= self._inc.get(x, set())
        return h_cost, len(seen)

    def tree_edge_tally(self, root: int) -> int:
        """Incrementally maintained count of edges touching root's tree."""
        return self._tree_edges.get(root, 0)

    def pair_cost(self, a: int, b: int) -> int:
        """Edges with one endpoint in root a's tree and the other in b's;
        for a == b, edges with both endpoints inside the tree, each once."""
        if a not in self.roots or b not in self.roots:
            raise ValueError(f"pair_cost requires roots, got ({a}, {b})")
        if a == b:
            found: set[EdgeKey] = set()
            for x in self.tree_nodes(a):
                for k in self._inc.get(x, ()):
                    p, q = k
                    if self.top(p) == a and self.top(q) == a:
                        found.add(k)
            return len(found)
        return self.count_cross_edges(a, b)

    def relative_size(self, g: InputGraph) -> float:
        if g.edge_count == 0:
            raise ValueError("relative size undefined for an edgeless graph")
        return self.cost() / g.edge_count

    def edge_composition(self) -> tuple[float, float, float]:
        total = self.cost()
        if total == 0:
            raise ValueError("edge composition undefined at zero cost")
        h = len(self.parent)
        return self.pos_count / total, self.neg_count / total, h / total

    def max_height(self) -> int:
        return max((self.height_of(r) for r in self.roots), default=0)

    def mean_leaf_depth(self) -> float:
        if self.subnode_count == 0:
            return 0.0
        total = 0
        for r in self.roots:
            stack = [(r, 0)]
            while stack:
                x, d = stack.pop()
                kids = self.children.get(x)
                if kids:
                    stack.extend((c, d + 1) for c in kids)
                else:
                    total += d
        return total / self.subnode_count

    # ------------------------------------------------------------------
    # decoding

    def _covered_pairs(self, a: int, b: int) -> Iterable[tuple[int, int]]:
        """Subnode pairs covered by an edge between supernodes a and b.

        Each pair appears exactly once, including when a and b are nested."""
        if a == b:
            return combinations(sorted(self.leaves_of(a)), 2)
        la = self.leaves_of(a)
        lb = self.leaves_of(b)
        sa = set(la)
        if not sa.isdisjoint(lb):
            # nested supernodes: dedupe via a set
            out = set()
            for u in la:
                for v in lb:
                    if u != v:
                        out.add((u, v) if u < v else (v, u))
            return out
        return ((u, v) if u < v else (v, u) for u in la for v in lb)

    def decode(self) -> InputGraph:
        """Expand the summary back into the graph it represents.

        Raises InvalidSummaryError if any pair's net count leaves {0, 1}.
        """
        net: dict[tuple[int, int], int] = {}
        for (a, b), sign in self._sign.items():
            for pair in self._covered_pairs(a, b):
                net[pair] = net.get(pair, 0) + sign
        edges = []
        for pair, value in net.items():
            if value == 1:
                edges.append(pair)
            elif value != 0:
                raise InvalidSummaryError(pair, value)
        return InputGraph.from_edges(self.subnode_count, edges)

    def neighbors_of(self, v: int) -> set[int]:
        """Neighbors of subnode v straight from the summary.

        Only edges incident to v's ancestor chain can cover a pair containing
        v, so the walk touches a small part of the structure.
        """
        if not 0 <= v < self.subnode_count:
            raise IndexError(f"subnode {v} out of range")
        chain = self.ancestors_of_leaf(v)
        chain_pos = {x: i for i, x in enumerate(chain)}
        counts: dict[int, int] = {}
        seen: set[EdgeKey] = set()
        for x in chain:
            for k in self._inc.get(x, ()):
                if k in seen:
                    continue
                seen.add(k)
                a, b = k
                sign = self._sign[k]
                if a == b:
                    block = self.leaves_of(a)
                elif a in chain_pos and b in chain_pos:
                    # nested ancestors: the higher one is the superset
                    sup = a if chain_pos[a] > chain_pos[b] else b
                    block = self.leaves_of(sup)
                else:
                    other = b if a in chain_pos else a
                    block = self.leaves_of(other)
                for w in block:
                    if w != v:
                        counts[w] = counts.get(w, 0) + sign
        return {w for w, c in counts.items() if c == 1}

    def verify_lossless(self, g: InputGraph, max_violations: int = 10) -> LosslessReport:
        """Validity (net in {0,1}) plus exact edge-set equality with g."""
        net: dict[tuple[int, int], int] = {}
        for (a, b), sign in self._sign.items():
            for pair in self._covered_pairs(a, b):
                net[pair] = net.get(pair, 0) + sign
        violations: list[str] = []
        invalid = 0
        decoded = set()
        for pair, value in net.items():
            if value == 1:
                decoded.add(pair)
            elif value != 0:
                invalid += 1
                if len(violations) < max_violations:
                    violations.append(f"pair {pair}: net {value} outside {{0, 1}}")
        expected = g.edge_set()
        missing = expected - decoded
        extra = decoded - expected
        for pair in sorted(missing):
            if len(violations) >= max_violations:
                break
            violations.append(f"missing edge {pair}")
        for pair in sorted(extra):
            if len(violations) >= max_violations:
                break
            violations.append(f"extra edge {pair}")
        ok = invalid == 0 and not missing and not extra
        return LosslessReport(ok, violations, len(missing), len(extra), invalid)

    def super_distance(self, g: InputGraph, a: int, b: int) -> float:
        """Shortest input-graph distance between the leaf sets of roots a, b."""
        if a not in self.roots or b not in self.roots:
            raise ValueError("super_distance requires roots")
        if a == b:
            raise ValueError("super_distance requires distinct roots")
        sources = self.leaves_of(a)
        targets = set(self.leaves_of(b))
        dist = {u: 0 for u in sources}
        frontier = sources
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for w in g.neighbors(u):
                    w = int(w)
                    if w not in dist:
                        if w in targets:
                            return d
                        dist[w] = d
                        nxt.append(w)
            frontier = nxt
        return float("inf")

    # ------------------------------------------------------------------
    # serialization

    MAGIC = "HSUM v1"

    def serialize(self) -> str:
        internal = sorted(self.children)
        lines = [self.MAGIC,
                 f"{self.subnode_count} {self.subnode_count + len(internal)} "
                 f"{self.pos_count} {self.neg_count} {len(self.parent)}"]
        h_rows = sorted((p, c) for c, p in self.parent.items())
        lines.extend(f"H {p} {c}" for p, c in h_rows)
        pos_rows = sorted(k for k, s in self._sign.items() if s > 0)
        neg_rows = sorted(k for k, s in self._sign.items() if s < 0)
        lines.extend(f"P {a} {b}" for a, b in pos_rows)
        lines.extend(f"N {a} {b}" for a, b in neg_rows)
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str | bytes) -> "HierarchicalSummary":
        if isinstance(text, bytes):
            text = text.decode("ascii")
        lines = text.splitlines()
        if not lines or lines[0] != cls.MAGIC:
            raise SummaryFormatError(f"bad header, expected {cls.MAGIC!r}")
        if len(lines) < 2:
            raise SummaryFormatError("missing count line")
        try:
            subnodes, supernodes, n_pos, n_neg, n_h = map(int, lines[1].split())
        except ValueError:
            raise SummaryFormatError(f"bad count line: {lines[1]!r}") from None
        body = lines[2:]
        if len(body) != n_h + n_pos + n_neg:
            raise SummaryFormatError(
                f"expected {n_h + n_pos + n_neg} record lines, found {len(body)}")
        s = cls(subnodes)
        internal: set[int] = set()
        for row in body[:n_h]:
            tag, p, c = cls._parse_row(row, "H")
            internal.add(p)
            if c >= subnodes:
                internal.add(c)
            if c in s.parent:
                raise SummaryFormatError(f"supernode {c} has two parents")
            s.parent[c] = p
            s.children.setdefault(p, []).append(c)
        if subnodes + len(internal) != supernodes:
            raise SummaryFormatError(
                f"header claims {supernodes} supernodes, found {subnodes + len(internal)}")
        for x in internal:
            if x < subnodes:
                raise SummaryFormatError(f"leaf id {x} used as a parent")
            if x not in s.children:
                raise SummaryFormatError(f"supernode {x} referenced but has no children")
        # forest check: every chain must terminate without revisiting
        for c in s.parent:
            slow = c
            seen = set()
            while slow in s.parent:
                if slow in seen:
                    raise SummaryFormatError("cycle in hierarchy edges")
                seen.add(slow)
                slow = s.parent[slow]
        s.roots = set(range(subnodes)) | {x for x in internal if x not in s.parent}
        s.next_id = max(internal, default=subnodes - 1) + 1
        s.next_id = max(s.next_id, subnodes)
        valid_ids = set(range(subnodes)) | internal
        s._tree_edges = {}
        for row, sign in [(r, 1) for r in body[n_h:n_h + n_pos]] + \
                         [(r, -1) for r in body[n_h + n_pos:]]:
            tag, a, b = cls._parse_row(row, "P" if sign > 0 else "N")
            if a not in valid_ids or b not in valid_ids:
                raise SummaryFormatError(f"edge ({a}, {b}) references unknown supernode")
            if (a, b) != _key(a, b):
                raise SummaryFormatError(f"edge ({a}, {b}) not in canonical order")
            if (a, b) in s._sign:
                raise SummaryFormatError(f"duplicate edge ({a}, {b})")
            s._sign[(a, b)] = sign
            s._inc.setdefault(a, set()).add((a, b))
            s._inc.setdefault(b, set()).add((a, b))
            if sign > 0:
                s.pos_count += 1
            else:
                s.neg_count += 1
        s.rebuild_aggregates()
        return s

    @staticmethod
    def _parse_row(row: str, expect_tag: str) -> tuple[str, int, int]:
        parts = row.split()
        if len(parts) != 3 or parts[0] != expect_tag:
            raise SummaryFormatError(f"bad {expect_tag} record: {row!r}")
        try:
            return parts[0], int(parts[1]), int(parts[2])
        except ValueError:
            raise SummaryFormatError(f"non-integer id in record: {row!r}") from None

    def __repr__(self):
        return (f"HierarchicalSummary(subnodes={self.subnode_count}, "
                f"p={self.pos_count}, n={self.neg_count}, h={len(self.parent)})")


def trivial_summary(g: InputGraph) -> HierarchicalSummary:
    """Summary with every node its own root and one p-edge per input edge."""
    s = HierarchicalSummary(g.node_count)
    for u, v in g.edges():
        s._sign[(u, v)] = 1
        s._inc.setdefault(u, set()).add((u, v))
        s._inc.setdefault(v, set()).add((u, v))
    s.pos_count = len(s._sign)
    s._tree_edges = {u: g.degree(u) for u in range(g.node_count)}
    return s
