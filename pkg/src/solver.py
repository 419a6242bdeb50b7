"""
Solver Module
Exact connected search numbers of node-weighted trees

Every vertex v gets a Pareto frontier of partial strategies of T_v, traded
off between searchers used and guard weight left behind. Frontiers are built
bottom-up by greedily trying every order of v's children, and the frontier at
the root yields the connected search number together with a strategy.
"""

import bisect
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from src.exceptions import DegreeCapExceededError, InvalidTreeError
from src.search_semantics import SearchStrategy, move_charge
from src.transform import normalize_leaf_weights, strategy_from_subdivided, to_node_weighted
from src.tree_core import Edge, SubtreeRef, WeightedRootedTree, edge_key

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEGREE_CAP = 8


@dataclass(frozen=True)
class SolverOptions:
    max_degree_cap: int = DEFAULT_MAX_DEGREE_CAP
    naive_k: bool = False
    dedup_permutations: bool = False
    trace: bool = False

    @classmethod
    def from_config(cls, config: Dict) -> "SolverOptions":
        solver = config.get('solver', {}) or {}
        return cls(
            max_degree_cap=solver.get('max_degree_cap', DEFAULT_MAX_DEGREE_CAP),
            naive_k=solver.get('naive_k', False),
            dedup_permutations=solver.get('dedup_permutations', False),
            trace=(config.get('output', {}) or {}).get('trace', False),
        )


@dataclass(frozen=True)
class Plan:
    """Move sequence of a partial strategy, nesting the plans it absorbed"""

    head: int
    steps: Tuple[Union[Edge, "Plan"], ...]

    def moves(self) -> List[Edge]:
        result: List[Edge] = []
        stack: List[Iterator] = [iter(self.steps)]
        while stack:
            step = next(stack[-1], None)
            if step is None:
                stack.pop()
            elif isinstance(step, Plan):
                stack.append(iter(step.steps))
            else:
                result.append(step)
        return result


@dataclass(frozen=True)
class FrontierEntry:
    """A partial strategy of T_head with its searcher count and guard weight"""

    plan: Plan
    searchers: int
    guard_weight: int
    guarded: Tuple[int, ...]

    @property
    def head(self) -> int:
        return self.plan.head

    @cached_property
    def strategy(self) -> SearchStrategy:
        return SearchStrategy(self.head, tuple(self.plan.moves()), head=self.head)


class StrategyFrontier:
    """
    Pareto set of (searchers, guard weight) pairs for one rooted subtree.

    Entries are kept sorted by searchers ascending, which makes guard weights
    strictly descending.
    """

    def __init__(self, head: int, head_weight: int):
        self.head = head
        self.head_weight = head_weight
        self.entries: List[FrontierEntry] = []
        self._keys: List[int] = []

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def offer(self, entry: FrontierEntry) -> bool:
        """
        Insert an entry unless some entry is at least as good on both counts.
        Entries the newcomer dominates are dropped.

        Returns:
            True if the entry was added
        """
        pos = bisect.bisect_right(self._keys, entry.searchers)
        if pos > 0 and self.entries[pos - 1].guard_weight <= entry.guard_weight:
            return False
        end = pos
        while end < len(self.entries) and self.entries[end].guard_weight >= entry.guard_weight:
            end += 1
        self.entries[pos:end] = [entry]
        self._keys[pos:end] = [entry.searchers]
        return True

    def best_within(self, budget: int) -> Optional[FrontierEntry]:
        """Entry with the most searchers not above budget (hence the least guard weight)"""
        pos = bisect.bisect_right(self._keys, budget)
        return self.entries[pos - 1] if pos > 0 else None

    def next_above(self, budget: int) -> Optional[int]:
        """Smallest searcher count on the frontier above budget"""
        pos = bisect.bisect_right(self._keys, budget)
        return self._keys[pos] if pos < len(self._keys) else None

    def best_guard_at(self, k: int) -> Optional[int]:
        """Least guard weight reachable with k searchers, the empty strategy included"""
        if k < self.head_weight:
            return None
        entry = self.best_within(k)
        if entry is None:
            return self.head_weight
        return min(entry.guard_weight, self.head_weight)

    def complete_entry(self) -> Optional[FrontierEntry]:
        """Cheapest entry that clears the whole subtree"""
        for entry in self.entries:
            if entry.guard_weight == 0:
                return entry
        return None

    def pairs(self) -> List[Tuple[int, int]]:
        return [(e.searchers, e.guard_weight) for e in self.entries]


@dataclass
class McpsOutcome:
    """Result of one greedy pass; entry is None when the budget was not enough"""

    entry: Optional[FrontierEntry]
    next_k: Optional[int]


FrontierLookup = Callable[[int], StrategyFrontier]


def mcps(k: int, sub: SubtreeRef, order: Sequence[int],
         frontiers: FrontierLookup) -> McpsOutcome:
    """
    Greedy partial search of T_v with at most k searchers, children cleared in the given order.

    The head starts guarded. Each child edge is cleared in turn, absorbing at
    the child the best fitting frontier strategy of its subtree; after the last
    child edge, absorption repeats at the smallest-id guarded vertex that
    admits one until none does.

    next_k is the least budget above k at which some decision of this pass
    would change, or None if no larger budget changes anything.
    """
    t = sub.tree
    r = sub.head
    weights = t.vertex_weights
    guarded: Dict[int, int] = {r: weights[r]}
    total = weights[r]
    peak = weights[r]
    steps: List[Union[Edge, Plan]] = []
    thresholds: List[int] = []

    def absorb(v: int) -> bool:
        nonlocal total, peak
        others = total - guarded[v]
        budget = k - others
        frontier = frontiers(v)
        nxt = frontier.next_above(budget)
        if nxt is not None:
            thresholds.append(nxt + others)
        entry = frontier.best_within(budget)
        if entry is None:
            return False
        steps.append(entry.plan)
        peak = max(peak, others + entry.searchers)
        del guarded[v]
        total -= weights[v]
        for x in entry.guarded:
            guarded[x] = weights[x]
            total += weights[x]
        return True

    if k < weights[r]:
        thresholds.append(weights[r])
        return McpsOutcome(None, min(thresholds))

    for i, child in enumerate(order):
        last = i == len(order) - 1
        internal = not t.is_leaf(child)
        dest = max(t.edge_weight(r, child), weights[child]) if internal else t.edge_weight(r, child)
        clearing, guarding = move_charge(total - weights[r], weights[r], dest, not last)
        cost = clearing + guarding
        if cost > k:
            thresholds.append(cost)
            return McpsOutcome(None, min(thresholds))
        peak = max(peak, cost)
        steps.append(edge_key(r, child))
        if last:
            del guarded[r]
            total -= weights[r]
        if internal:
            guarded[child] = weights[child]
            total += weights[child]
            if not last:
                absorb(child)

    progress = True
    while progress:
        progress = False
        for v in sorted(guarded):
            if v != r and absorb(v):
                progress = True
                break

    entry = FrontierEntry(Plan(r, tuple(steps)), peak, total, tuple(sorted(guarded)))
    return McpsOutcome(entry, min(thresholds) if thresholds else None)


def _child_orders(t: WeightedRootedTree, v: int, dedup: bool) -> Iterator[Tuple[int, ...]]:
    kids = t.children(v)
    if not dedup:
        yield from permutations(kids)
        return
    classes: Dict[str, List[int]] = {}
    for c in kids:
        classes.setdefault(t.canonical_form(c), []).append(c)
    labels = [t.canonical_form(c) for c in kids]
    seen = set()
    for label_order in permutations(labels):
        if label_order in seen:
            continue
        seen.add(label_order)
        pools = {key: list(members) for key, members in classes.items()}
        yield tuple(pools[label].pop(0) for label in label_order)


def cst(sub: SubtreeRef, frontiers: FrontierLookup,
        options: SolverOptions = SolverOptions()) -> StrategyFrontier:
    """
    Frontier of (k, v)-minimal partial strategies of T_v.

    Runs the greedy pass for every child order and every budget from 1 up,
    jumping straight to the next budget that can change the outcome, and keeps
    the Pareto-optimal results whose guard weight does not exceed w(v).
    """
    t = sub.tree
    v = sub.head
    frontier = StrategyFrontier(v, t.vertex_weights[v])
    if not t.children(v):
        return frontier
    ceiling = t.total_weight + 1
    for order in _child_orders(t, v, options.dedup_permutations):
        k = 1
        while k <= ceiling:
            outcome = mcps(k, sub, order, frontiers)
            entry = outcome.entry
            if entry is not None:
                if entry.guard_weight <= frontier.head_weight:
                    added = frontier.offer(entry)
                    if options.trace and added:
                        logger.debug(f"frontier[{v}] order={order} k={k} "
                                     f"-> ({entry.searchers}, {entry.guard_weight})")
                if entry.guard_weight == 0:
                    break
            if options.naive_k:
                k += 1
            elif outcome.next_k is None or outcome.next_k <= k:
                logger.warning(f"No budget change possible at vertex {v} for order {order}")
                break
            else:
                k = outcome.next_k
    return frontier


@dataclass
class Solution:
    root: int
    k: int
    strategy: SearchStrategy
    frontier: Optional[StrategyFrontier] = field(default=None, repr=False)


def materialize(entry: FrontierEntry, complete: bool = True) -> SearchStrategy:
    """Explicit move list of a frontier entry, as a complete strategy or a partial one of T_head"""
    moves = tuple(entry.plan.moves())
    return SearchStrategy(entry.head, moves, None if complete else entry.head)


def map_to_original(t: WeightedRootedTree, prepared: WeightedRootedTree,
                    strategy: SearchStrategy) -> SearchStrategy:
    """Translate a strategy of the node-weighted form back onto t"""
    if prepared.n == t.n:
        return strategy
    return strategy_from_subdivided(t, prepared, strategy)


def _check_degree(t: WeightedRootedTree, options: SolverOptions) -> None:
    delta = t.max_degree()
    if delta > options.max_degree_cap:
        raise DegreeCapExceededError(delta, options.max_degree_cap, math.factorial(delta))


def subtree_frontiers(t: WeightedRootedTree, options: SolverOptions,
                      cache: Dict[Tuple[int, Optional[int]], StrategyFrontier]
                      ) -> Dict[int, StrategyFrontier]:
    """Frontiers of every rooted subtree of t, shared through cache keyed by (vertex, parent)"""
    local: Dict[int, StrategyFrontier] = {}
    for v in t.postorder():
        key = (v, t.parent(v))
        if key not in cache:
            cache[key] = cst(SubtreeRef(t, v), local.__getitem__, options)
        local[v] = cache[key]
    return local


def _solve_node_weighted(t: WeightedRootedTree, options: SolverOptions,
                         cache: Optional[Dict] = None) -> Tuple[int, SearchStrategy, StrategyFrontier]:
    if not t.has_unit_edges:
        raise InvalidTreeError("The frontier solver needs unit edge weights")
    if t.n == 1:
        return 0, SearchStrategy(t.root), StrategyFrontier(t.root, t.vertex_weights[t.root])
    frontiers = subtree_frontiers(t, options, {} if cache is None else cache)
    top = frontiers[t.root]
    entry = top.complete_entry()
    if entry is None:
        raise InvalidTreeError(f"No complete strategy found from root {t.root}")
    # Leaf roots weigh 1 here, so the anchored peak equals the released one.
    return entry.searchers, materialize(entry), top


def solve_rooted(t: WeightedRootedTree, options: SolverOptions = SolverOptions()) -> Solution:
    """
    Connected search number of t from its root, with a strategy achieving it.

    Edge-weighted trees are translated to node-weighted form first and the
    strategy is mapped back onto the original edges.

    Raises:
        DegreeCapExceededError: max degree above options.max_degree_cap
    """
    _check_degree(t, options)
    prepared = to_node_weighted(t)
    k, strategy, frontier = _solve_node_weighted(prepared, options)
    strategy = map_to_original(t, prepared, strategy)
    logger.info(f"Rooted search number from {t.root}: {k} ({len(strategy.moves)} moves)")
    return Solution(t.root, k, strategy, frontier)


def _solve_root_task(args: Tuple[WeightedRootedTree, int, SolverOptions]) -> Tuple[int, int, Tuple[Edge, ...]]:
    t, root, options = args
    solution = solve_rooted(t.reroot(root), options)
    return solution.k, root, solution.strategy.moves


def solve_unrooted(t: WeightedRootedTree, options: SolverOptions = SolverOptions(),
                   parallel_hint: bool = False) -> Solution:
    """
    Connected search number of t over all starting vertices.

    Unit-edge trees share directed-subtree frontiers between roots; other
    trees are solved root by root. Ties go to the smallest root id.
    """
    _check_degree(t, options)
    if t.n == 1:
        return Solution(0, 0, SearchStrategy(0))

    if parallel_hint:
        tasks = [(t, root, options) for root in t.vertices]
        with ProcessPoolExecutor() as executor:
            results = list(executor.map(_solve_root_task, tasks))
        k, root, moves = min(results, key=lambda item: (item[0], item[1]))
        logger.info(f"Unrooted search number: {k} from root {root} (parallel)")
        return Solution(root, k, SearchStrategy(root, moves))

    prepared = normalize_leaf_weights(t)
    best: Optional[Solution] = None
    if prepared.has_unit_edges:
        cache: Dict[Tuple[int, Optional[int]], StrategyFrontier] = {}
        for root in t.vertices:
            k, strategy, frontier = _solve_node_weighted(prepared.reroot(root), options, cache)
            if best is None or k < best.k:
                best = Solution(root, k, strategy, frontier)
    else:
        for root in t.vertices:
            solution = solve_rooted(t.reroot(root), options)
            if best is None or solution.k < best.k:
                best = solution
    logger.info(f"Unrooted search number: {best.k} from root {best.root}")
    return best
