"""The bijective k-pebble game, solved exactly by a least fixpoint.

Positions are sets of pairs (v in G, w in H) of size at most k. Spoiler wins
a position outright when the graphs have different sizes or the position is
not a local isomorphism. A position of size < k is "bad at round r" when the
bipartite graph, whose edges are the pairs (v, w) such that extending by
(v, w) is not Spoiler-won within r-1 rounds, has no perfect matching (a Hall
violation); a position is Spoiler-won within r rounds exactly when it
contains a bad subset. Matchings are found with augmenting paths.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .graphs import ColouredGraph, GraphError

Pair = Tuple[str, str]
Position = FrozenSet[Pair]

DEFAULT_POSITION_BUDGET = 10 ** 6


def position_budget() -> int:
    raw = os.environ.get("ALGISO_BUDGET")
    return int(raw) if raw else DEFAULT_POSITION_BUDGET


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class GameVerdict:
    winner: str                 # "spoiler" | "duplicator"
    rounds: Optional[int] = None  # minimal rounds on Spoiler wins, None otherwise

    @property
    def spoiler_wins(self) -> bool:
        return self.winner == "spoiler"


def pairs_compatible(g: ColouredGraph, h: ColouredGraph, p: Pair, q: Pair) -> bool:
    """Whether the two-element set {p, q} is a local isomorphism."""
    (v, w), (v2, w2) = p, q
    if v == v2:
        return w == w2
    if w == w2:
        return False
    eg = g.has_edge(v, v2)
    eh = h.has_edge(w, w2)
    if eg != eh:
        return False
    if eg and g.edge_colour(v, v2) != h.edge_colour(w, w2):
        return False
    return True


def pair_respects_colours(g: ColouredGraph, h: ColouredGraph, p: Pair) -> bool:
    return g.colour(p[0]) == h.colour(p[1])


def is_position_local_iso(g: ColouredGraph, h: ColouredGraph, pos: Sequence[Pair]) -> bool:
    pos = sorted(set(pos))
    for p in pos:
        if not pair_respects_colours(g, h, p):
            return False
    for p, q in combinations(pos, 2):
        if not pairs_compatible(g, h, p, q):
            return False
    return True


class GameTable:
    """Spoiler-winning rounds for every local-isomorphism position up to size k.

    Built once per (G, H, k); queries are dictionary lookups plus a scan over
    the at most 2^k subsets of the queried position.
    """

    def __init__(self, g: ColouredGraph, h: ColouredGraph, k: int,
                 budget: Optional[int] = None):
        if k < 1:
            raise GraphError("the game needs at least one pebble pair")
        self.g = g
        self.h = h
        self.k = k
        self.size_mismatch = len(g) != len(h)
        self.budget = budget if budget is not None else position_budget()
        self._bad: Dict[Position, int] = {}
        if not self.size_mismatch:
            self._solve()

    # -- fixpoint ------------------------------------------------------------

    def _solve(self):
        g, h, k = self.g, self.h, self.k
        pairs = [(v, w) for v in g.vertices for w in h.vertices
                 if pair_respects_colours(g, h, (v, w))]
        pair_index = {p: i for i, p in enumerate(pairs)}
        n = len(pairs)
        compat = [set() for _ in range(n)]
        for i, p in enumerate(pairs):
            for j in range(i + 1, n):
                if pairs_compatible(g, h, p, pairs[j]):
                    compat[i].add(j)
                    compat[j].add(i)

        # local-iso positions as sorted index tuples; for positions below the
        # pebble bound also their safe extensions (pairs keeping local-iso)
        all_indices = set(range(n))
        safe: Dict[Tuple[int, ...], set] = {(): set(all_indices)}
        allowed_of: Dict[Tuple[int, ...], set] = {(): all_indices}
        count = 1
        frontier: List[Tuple[int, ...]] = [()]
        for _ in range(k):
            new_frontier = []
            for base in frontier:
                allowed = allowed_of[base]
                start = base[-1] + 1 if base else 0
                for j in sorted(allowed):
                    if j < start:
                        continue
                    ext = base + (j,)
                    count += 1
                    if count > self.budget:
                        raise BudgetExceeded(
                            f"position budget exceeded ({count} > {self.budget})")
                    if len(ext) < k:
                        ext_allowed = allowed & compat[j]
                        allowed_of[ext] = ext_allowed
                        # extending by a pair already pebbled keeps the position
                        safe[ext] = set(ext) | ext_allowed
                        new_frontier.append(ext)
            frontier = new_frontier
        del allowed_of

        self._pairs = pairs
        self._pair_index = pair_index
        bad: Dict[Tuple[int, ...], int] = {}
        won = set()  # size<k positions containing a bad subset

        g_verts = list(g.vertices)
        pairs_of_left = {v: [] for v in g_verts}
        for idx, (v, w) in enumerate(pairs):
            pairs_of_left[v].append(idx)
        right_of = {idx: pairs[idx][1] for idx in range(n)}
        h_index = {w: i for i, w in enumerate(h.vertices)}
        n_right = len(h.vertices)

        def has_matching(pos: Tuple[int, ...]) -> bool:
            s = safe[pos]
            adj = []
            for v in g_verts:
                row = [h_index[right_of[idx]] for idx in pairs_of_left[v] if idx in s]
                if not row:
                    return False
                adj.append(row)
            return _has_perfect_matching(adj, n_right)

        def supersets(base: Tuple[int, ...]):
            """All local-iso supersets of base with size <= k (incl. base)."""
            out = [base]
            allowed = all_indices.copy()
            for i in base:
                allowed &= compat[i] | {i}
            allowed -= set(base)
            stack = [(base, sorted(allowed))]
            while stack:
                cur, ext_allowed = stack.pop()
                if len(cur) >= k:
                    continue
                for pos_j, j in enumerate(ext_allowed):
                    nxt = tuple(sorted(cur + (j,)))
                    out.append(nxt)
                    if len(nxt) < k:
                        stack.append((nxt, [jj for jj in ext_allowed[pos_j + 1:]
                                            if jj in compat[j]]))
            return out

        round_no = 1
        dirty = [pos for pos in safe]
        while True:
            newly = []
            for pos in dirty:
                if pos in bad or pos in won:
                    continue
                if not has_matching(pos):
                    newly.append(pos)
            if not newly:
                break
            next_dirty = set()
            for sigma in newly:
                bad[sigma] = round_no
                for ext in supersets(sigma):
                    if len(ext) < k:
                        won.add(ext)
                        # pairs (ext, x) with x already pebbled collapse to ext
                        s = safe[ext]
                        before = len(s)
                        s.difference_update(ext)
                        if len(s) != before:
                            next_dirty.add(ext)
                    for pos_i, x in enumerate(ext):
                        sub = ext[:pos_i] + ext[pos_i + 1:]
                        s = safe.get(sub)
                        if s is not None and x in s:
                            s.discard(x)
                            next_dirty.add(sub)
            dirty = [pos for pos in next_dirty if pos not in bad and pos not in won]
            round_no += 1

        self._bad = {frozenset(self._pairs[i] for i in pos): r for pos, r in bad.items()}

    # -- queries ---------------------------------------------------------------

    def verdict(self, position: Sequence[Pair]) -> GameVerdict:
        pos = frozenset(position)
        if len(pos) > self.k:
            raise GraphError(f"position larger than the pebble count ({len(pos)} > {self.k})")
        if self.size_mismatch:
            return GameVerdict("spoiler", 0)
        if not is_position_local_iso(self.g, self.h, tuple(pos)):
            return GameVerdict("spoiler", 0)
        best = None
        items = tuple(pos)
        for size in range(min(len(items), self.k - 1) + 1):
            for sub in combinations(items, size):
                r = self._bad.get(frozenset(sub))
                if r is not None and (best is None or r < best):
                    best = r
        if best is None:
            return GameVerdict("duplicator")
        return GameVerdict("spoiler", best)

    def duplicator_wins(self, position: Sequence[Pair]) -> bool:
        return not self.verdict(position).spoiler_wins


def _has_perfect_matching(adj: List[List[int]], n_right: int) -> bool:
    """Kuhn's augmenting-path matching; True when every left vertex is matched."""
    match_right = [-1] * n_right
    for left, row in enumerate(adj):
        if not row:
            return False

    def try_augment(left: int, seen: List[bool]) -> bool:
        for right in adj[left]:
            if not seen[right]:
                seen[right] = True
                if match_right[right] == -1 or try_augment(match_right[right], seen):
                    match_right[right] = left
                    return True
        return False

    for left in range(len(adj)):
        if not try_augment(left, [False] * n_right):
            return False
    return True


def solve_bijective_pebble_game(g: ColouredGraph, h: ColouredGraph, k: int,
                                initial: Sequence[Pair] = (),
                                budget: Optional[int] = None) -> GameVerdict:
    """Exact verdict of the bijective k-pebble game from a given position."""
    table = GameTable(g, h, k, budget=budget)
    return table.verdict(initial)


# ---------------------------------------------------------------------------
# tuple types
# ---------------------------------------------------------------------------


@dataclass
class TypePartition:
    """Equivalence classes of tuples (both graphs) per length, with counts.

    ``classes[l]`` lists the classes as lists of (side, tuple) entries where
    side 0 is G and side 1 is H; ``class_of[(side, tuple)]`` indexes into it.
    ``same_side_count[(side, tuple)]`` is the number of class members from the
    tuple's own graph.
    """

    k: int
    classes: Dict[int, List[List[Tuple[int, tuple]]]]
    class_of: Dict[Tuple[int, tuple], int]
    same_side_count: Dict[Tuple[int, tuple], int]

    def tp_equal(self, a: Tuple[int, tuple], b: Tuple[int, tuple]) -> bool:
        return self.class_of[a] == self.class_of[b]

    def t(self, entry: Tuple[int, tuple]) -> int:
        return self.same_side_count[entry]


def tuple_type_partition(g: ColouredGraph, h: ColouredGraph, k: int,
                         budget: Optional[int] = None) -> TypePartition:
    """Classify all tuples of length <= k from both graphs by game equivalence.

    Two tuples are equivalent when Duplicator wins the bijective k-pebble game
    on the corresponding graph pair started with the paired-up position.
    """
    if k < 1:
        raise GraphError("k must be at least 1")
    budget = budget if budget is not None else position_budget()
    est = _position_estimate(len(g), len(h), k)
    if est > budget:
        raise BudgetExceeded(f"estimated positions {est} exceed the budget {budget}")

    tables = {
        (0, 0): GameTable(g, g, k, budget=budget),
        (0, 1): GameTable(g, h, k, budget=budget),
        (1, 1): GameTable(h, h, k, budget=budget),
    }

    def equivalent(a: Tuple[int, tuple], b: Tuple[int, tuple]) -> bool:
        (sa, ta), (sb, tb) = a, b
        if sa <= sb:
            pos = list(zip(ta, tb))
            return tables[(sa, sb)].duplicator_wins(pos)
        pos = list(zip(tb, ta))
        return tables[(sb, sa)].duplicator_wins(pos)

    sides = [(0, g), (1, h)]
    classes: Dict[int, List[List[Tuple[int, tuple]]]] = {}
    class_of: Dict[Tuple[int, tuple], int] = {}
    same_side: Dict[Tuple[int, tuple], int] = {}
    for ell in range(1, k + 1):
        cls: List[List[Tuple[int, tuple]]] = []
        reps: List[Tuple[int, tuple]] = []
        for side, graph in sides:
            for tup in product(graph.vertices, repeat=ell):
                entry = (side, tup)
                for ci, rep in enumerate(reps):
                    if equivalent(entry, rep):
                        cls[ci].append(entry)
                        class_of[entry] = ci
                        break
                else:
                    reps.append(entry)
                    cls.append([entry])
                    class_of[entry] = len(cls) - 1
        classes[ell] = cls
        for members in cls:
            counts = [0, 0]
            for side, _ in members:
                counts[side] += 1
            for entry in members:
                same_side[entry] = counts[entry[0]]
    return TypePartition(k, classes, class_of, same_side)


def _position_estimate(n: int, m: int, k: int) -> int:
    total = 1
    universe = n * m
    term = 1
    for i in range(1, k + 1):
        term = term * (universe - i + 1) // i
        total += term
    return total
