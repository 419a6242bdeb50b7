"""
Oracle Module
Exhaustive reference searches for small trees, used to check the solver

The main oracle runs a best-first (min over max) search over cleared-edge
bitmasks. A second, independent oracle tries every move order on very small
trees. Both price moves with the general edge-weighted cost rule.
"""

import heapq
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.exceptions import OracleCapExceededError
from src.search_semantics import SearchContext, SearchStrategy, move_charge
from src.tree_core import Edge, SubtreeRef, WeightedRootedTree

logger = logging.getLogger(__name__)

DEFAULT_MAX_EDGES = 20
PERMUTATION_MAX_EDGES = 6


class _MaskSpace:
    """Cleared-edge bitmasks over an edge universe, with the move cost rule"""

    def __init__(self, t: WeightedRootedTree, start: int, head: Optional[int], max_edges: int):
        t._require(start)
        self.tree = t
        self.start = start
        self.anchored = head is not None
        universe = sorted(t.subtree_edges(head)) if self.anchored else list(t.edge_keys)
        if len(universe) > max_edges:
            raise OracleCapExceededError(
                f"Oracle is capped at {max_edges} edges, instance has {len(universe)}"
            )
        self.edges: List[Edge] = universe
        self.full = (1 << len(universe)) - 1
        self.incident: Dict[int, int] = {}
        for i, (a, b) in enumerate(universe):
            self.incident[a] = self.incident.get(a, 0) | (1 << i)
            self.incident[b] = self.incident.get(b, 0) | (1 << i)
        self.start_degree = bin(self.incident.get(start, 0)).count("1")

    def degree(self, v: int) -> int:
        return bin(self.incident.get(v, 0)).count("1")

    def touched(self, mask: int) -> set:
        result = {self.start}
        i = 0
        m = mask
        while m:
            if m & 1:
                result.update(self.edges[i])
            m >>= 1
            i += 1
        return result

    def guarded(self, mask: int) -> List[int]:
        return sorted(v for v in self.touched(mask) if self.incident.get(v, 0) & ~mask)

    def guard_weight(self, mask: int) -> int:
        weights = self.tree.vertex_weights
        return sum(weights[v] for v in self.guarded(mask))

    def initial_peak(self) -> int:
        return self.guard_weight(0) if self.anchored else 0

    def successors(self, mask: int) -> Iterator[Tuple[int, int]]:
        """(edge index, searchers for the move) for every admissible next move"""
        weights = self.tree.vertex_weights
        touched = self.touched(mask)
        total = sum(weights[v] for v in touched if self.incident.get(v, 0) & ~mask)
        released = not self.anchored and mask == 0 and self.start_degree == 1
        for i, (a, b) in enumerate(self.edges):
            bit = 1 << i
            if mask & bit:
                continue
            if a in touched:
                u, v = a, b
            elif b in touched:
                u, v = b, a
            else:
                continue
            w_edge = self.tree.edge_weights[(a, b)]
            dest = max(w_edge, weights[v]) if self.degree(v) > 1 else w_edge
            keeps = bool(self.incident[u] & ~mask & ~bit)
            clearing, guarding = move_charge(total - weights[u], weights[u], dest, keeps, released)
            yield i, clearing + guarding

    def moves_to(self, parents: Dict[int, Optional[Tuple[int, int]]], mask: int) -> Tuple[Edge, ...]:
        moves: List[Edge] = []
        while parents[mask] is not None:
            previous, i = parents[mask]
            moves.append(self.edges[i])
            mask = previous
        return tuple(reversed(moves))


def _best_first(space: _MaskSpace, stop_at_full: bool
                ) -> Tuple[Dict[int, int], Dict[int, Optional[Tuple[int, int]]]]:
    """Least achievable peak for every reachable mask (min over max paths)"""
    start_peak = space.initial_peak()
    best: Dict[int, int] = {0: start_peak}
    parents: Dict[int, Optional[Tuple[int, int]]] = {0: None}
    heap = [(start_peak, 0)]
    while heap:
        peak, mask = heapq.heappop(heap)
        if peak > best[mask]:
            continue
        if stop_at_full and mask == space.full:
            break
        for i, cost in space.successors(mask):
            nxt = mask | (1 << i)
            candidate = max(peak, cost)
            if nxt not in best or candidate < best[nxt]:
                best[nxt] = candidate
                parents[nxt] = (mask, i)
                heapq.heappush(heap, (candidate, nxt))
    return best, parents


def oracle_cs(t: WeightedRootedTree, start: Optional[int] = None,
              max_edges: int = DEFAULT_MAX_EDGES) -> Tuple[int, SearchStrategy]:
    """
    Exact connected search number of t from start (default: the root)

    Raises:
        OracleCapExceededError: more than max_edges edges
    """
    start = t.root if start is None else start
    space = _MaskSpace(t, start, None, max_edges)
    if space.full == 0:
        return 0, SearchStrategy(start)
    best, parents = _best_first(space, stop_at_full=True)
    k = best[space.full]
    logger.debug(f"Oracle: cs from {start} is {k} ({len(best)} states)")
    return k, SearchStrategy(start, space.moves_to(parents, space.full))


def oracle_cs_unrooted(t: WeightedRootedTree,
                       max_edges: int = DEFAULT_MAX_EDGES) -> Tuple[int, int, SearchStrategy]:
    """(start, k, strategy) minimizing k over all starts, ties to the smallest start"""
    best: Optional[Tuple[int, int, SearchStrategy]] = None
    for v in t.vertices:
        k, strategy = oracle_cs(t, v, max_edges)
        if best is None or k < best[1]:
            best = (v, k, strategy)
    return best


@dataclass
class GuardProfile:
    """
    Every reachable cleared set of T_v with its least peak and guard weight.

    pareto lists (peak, guard weight, mask) with peaks ascending and guard
    weights strictly descending.
    """

    head: int
    head_weight: int
    pareto: List[Tuple[int, int, int]]
    strategies: Dict[int, Tuple[Edge, ...]]

    def min_guard(self, k: int) -> Optional[Tuple[int, int]]:
        """(guard weight, mask) of the best cleared set reachable with k searchers"""
        chosen = None
        for peak, guard, mask in self.pareto:
            if peak > k:
                break
            chosen = (guard, mask)
        return chosen


def oracle_guard_profile(sub: SubtreeRef, max_edges: int = DEFAULT_MAX_EDGES) -> GuardProfile:
    """One anchored best-first pass over T_v collecting peak/guard trade-offs"""
    t = sub.tree
    space = _MaskSpace(t, sub.head, sub.head, max_edges)
    best, parents = _best_first(space, stop_at_full=False)
    candidates = sorted(
        (peak, space.guard_weight(mask), mask) for mask, peak in best.items()
    )
    pareto: List[Tuple[int, int, int]] = []
    for peak, guard, mask in candidates:
        if pareto and pareto[-1][1] <= guard:
            continue
        pareto.append((peak, guard, mask))
    strategies = {mask: space.moves_to(parents, mask) for _, _, mask in pareto}
    return GuardProfile(sub.head, t.vertex_weights[sub.head], pareto, strategies)


def oracle_min_guard(sub: SubtreeRef, k: int,
                     max_edges: int = DEFAULT_MAX_EDGES) -> Optional[Tuple[int, SearchStrategy]]:
    """
    Least guard weight a partial strategy of T_v can leave using at most k searchers.

    Returns:
        (guard weight, witness strategy), or None when k < w(v) and T_v has edges
    """
    t = sub.tree
    v = sub.head
    if not t.children(v):
        return 0, SearchStrategy(v, (), head=v)
    if k < t.vertex_weights[v]:
        return None
    profile = oracle_guard_profile(sub, max_edges)
    found = profile.min_guard(k)
    if found is None:
        return None
    guard, mask = found
    return guard, SearchStrategy(v, profile.strategies[mask], head=v)


def permutation_oracle_cs(t: WeightedRootedTree, start: Optional[int] = None,
                          max_edges: int = PERMUTATION_MAX_EDGES) -> Tuple[int, SearchStrategy]:
    """
    Connected search number by trying every connected move order.

    Shares no search code with oracle_cs; moves are priced by SearchContext.
    """
    start = t.root if start is None else start
    ctx = SearchContext(t, start)
    if len(ctx.universe) > max_edges:
        raise OracleCapExceededError(
            f"Permutation oracle is capped at {max_edges} edges, instance has {len(ctx.universe)}"
        )
    if not ctx.universe:
        return 0, SearchStrategy(start)

    best_peak = [None]
    best_moves: List[Tuple[Edge, ...]] = [()]

    def search(state, moves: Tuple[Edge, ...]) -> None:
        if best_peak[0] is not None and state.peak_so_far >= best_peak[0]:
            return
        if len(state.cleared) == len(ctx.universe):
            best_peak[0] = state.peak_so_far
            best_moves[0] = moves
            return
        for edge in sorted(ctx.universe - state.cleared):
            if edge[0] not in state.touched and edge[1] not in state.touched:
                continue
            _, nxt = ctx.advance(state, edge)
            search(nxt, moves + (edge,))

    search(ctx.initial_state(), ())
    return best_peak[0], SearchStrategy(start, best_moves[0])


# ----------------------------------------------------------------------
# Small tree enumeration
# ----------------------------------------------------------------------

Shape = Tuple


@lru_cache(maxsize=None)
def _shape_size(shape: Shape) -> int:
    return 1 + sum(_shape_size(c) for c in shape)


@lru_cache(maxsize=None)
def _rooted_shapes(n: int, cap: int, child_cap: int) -> Tuple[Shape, ...]:
    """Unlabelled rooted trees on n vertices, root with at most cap children"""
    if n == 1:
        return ((),)
    pool = [s for size in range(1, n) for s in _rooted_shapes(size, child_cap, child_cap)]
    sizes = [_shape_size(s) for s in pool]
    results: List[Shape] = []

    def extend(first: int, remaining: int, chosen: List[Shape]) -> None:
        if remaining == 0:
            results.append(tuple(chosen))
            return
        if len(chosen) == cap:
            return
        for idx in range(first, len(pool)):
            if sizes[idx] <= remaining:
                chosen.append(pool[idx])
                extend(idx, remaining - sizes[idx], chosen)
                chosen.pop()

    extend(0, n - 1, [])
    return tuple(results)


def _shape_edges(shape: Shape) -> Tuple[int, List[Tuple[int, int]]]:
    edges: List[Tuple[int, int]] = []
    count = 1
    stack = [(0, shape)]
    while stack:
        vid, node = stack.pop()
        for child in node:
            cid = count
            count += 1
            edges.append((vid, cid))
            stack.append((cid, child))
    return count, edges


def enumerate_small_trees(max_edges: int, max_degree: int, weight_set: Iterable[int],
                          min_edges: Optional[int] = None, normalize_leaves: bool = False,
                          edge_weight_set: Sequence[int] = (1,)) -> Iterator[WeightedRootedTree]:
    """
    Rooted weighted trees up to isomorphism.

    Edge counts run from min_edges (default: max_edges) to max_edges. With
    normalize_leaves, every leaf gets weight 1 instead of ranging over weight_set.
    """
    weight_set = sorted(set(weight_set))
    edge_weight_set = sorted(set(edge_weight_set))
    min_edges = max_edges if min_edges is None else min_edges
    for m in range(min_edges, max_edges + 1):
        n = m + 1
        if m > 0 and max_degree < 1:
            continue
        seen = set()
        for shape in _rooted_shapes(n, max_degree, max(max_degree - 1, 0)):
            count, edges = _shape_edges(shape)
            degrees = [0] * count
            for a, b in edges:
                degrees[a] += 1
                degrees[b] += 1
            choices = [
                (1,) if normalize_leaves and degrees[v] <= 1 else tuple(weight_set)
                for v in range(count)
            ]
            for vertex_weights in product(*choices):
                for edge_weights in product(edge_weight_set, repeat=len(edges)):
                    tree = WeightedRootedTree.from_edges(
                        vertex_weights,
                        [(a, b, w) for (a, b), w in zip(edges, edge_weights)],
                        0,
                    )
                    form = tree.canonical_form()
                    if form in seen:
                        continue
                    seen.add(form)
                    yield tree


def small_tree_corpus(max_edges: int, max_degree: int, weight_set: Iterable[int],
                      normalize_leaves: bool = False) -> List[WeightedRootedTree]:
    """All trees with 1..max_edges edges"""
    return list(enumerate_small_trees(max_edges, max_degree, weight_set,
                                      min_edges=1, normalize_leaves=normalize_leaves))
