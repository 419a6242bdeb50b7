"""
Search Semantics Module
Monotone connected search strategies: move costs, guard sets, verification, composition

Two flavours share one engine:

* complete strategies (head is None) search the whole tree; a start of
  degree one is released, so the first move only pays for the edge/endpoint
  being cleared;
* partial strategies of a rooted subtree T_v (head == v) are anchored: the
  head counts as guarded from the outset and may only clear edges of T_v.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Tuple

from src.exceptions import CompositionError, InvalidStrategyError, TreeSearchError
from src.tree_core import Edge, SubtreeRef, WeightedRootedTree, edge_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchStrategy:
    """Start vertex plus an ordered sequence of edges to clear"""

    start: int
    moves: Tuple[Edge, ...] = ()
    head: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'moves', tuple(edge_key(a, b) for a, b in self.moves))

    @property
    def anchored(self) -> bool:
        return self.head is not None

    def prefix(self, i: int) -> "SearchStrategy":
        return SearchStrategy(self.start, self.moves[:i], self.head)

    def __len__(self) -> int:
        return len(self.moves)


@dataclass(frozen=True)
class StrategyState:
    """Snapshot after a prefix of moves"""

    start: int
    head: Optional[int]
    cleared: FrozenSet[Edge]
    guarded: Mapping[int, int]
    touched: FrozenSet[int]
    peak_so_far: int

    @property
    def guard_weight(self) -> int:
        return sum(self.guarded.values())


@dataclass(frozen=True)
class MoveRecord:
    """Searchers needed for one move, split into the clearing and guarding parts"""

    edge: Edge
    clearing: int
    guarding: int

    @property
    def cost(self) -> int:
        return self.clearing + self.guarding


@dataclass
class VerificationReport:
    ok: bool
    searchers_used: int
    per_move: List[MoveRecord] = field(default_factory=list)
    failure_reason: Optional[str] = None
    failed_move: Optional[int] = None
    final_state: Optional[StrategyState] = None

    def to_dict(self) -> Dict:
        return {
            'ok': self.ok,
            'searchers_used': self.searchers_used,
            'failure_reason': self.failure_reason,
            'failed_move': self.failed_move,
            'per_move': [
                {'edge': f"{r.edge[0]}-{r.edge[1]}", 'clearing': r.clearing,
                 'guarding': r.guarding, 'cost': r.cost}
                for r in self.per_move
            ],
        }


def move_charge(others: int, w_from: int, dest: int, keeps: bool,
                released: bool = False) -> Tuple[int, int]:
    """
    Clearing and guarding searchers for sliding along an edge.

    Args:
        others: guard weight of every guarded vertex except the mover's vertex
        w_from: weight of the vertex the searchers move from
        dest: max(edge weight, destination weight) if the destination has
            further edges, otherwise the edge weight
        keeps: the source vertex still has contaminated edges afterwards
        released: first move of a complete strategy from a degree-one start

    Returns:
        (clearing, guarding)
    """
    if released:
        return dest, 0
    if keeps:
        return dest, others + w_from
    return max(w_from, dest), others


class SearchContext:
    """Edge universe and incidence for replaying strategies from one start"""

    def __init__(self, tree: WeightedRootedTree, start: int, head: Optional[int] = None):
        tree._require(start)
        if head is not None and head != start:
            raise InvalidStrategyError(
                f"Partial strategy of the subtree at {head} must start there, not at {start}"
            )
        self.tree = tree
        self.start = start
        self.head = head
        self.universe: FrozenSet[Edge] = (
            tree.subtree_edges(head) if head is not None else frozenset(tree.edge_keys)
        )
        self.incident: Dict[int, List[Edge]] = {}
        for e in self.universe:
            for x in e:
                self.incident.setdefault(x, []).append(e)

    @property
    def anchored(self) -> bool:
        return self.head is not None

    def degree(self, v: int) -> int:
        return len(self.incident.get(v, ()))

    def guard_set(self, cleared: FrozenSet[Edge]) -> Dict[int, int]:
        """Guarded vertices computed from scratch"""
        touched = {self.start}
        for a, b in cleared:
            touched.update((a, b))
        return {
            v: self.tree.vertex_weights[v]
            for v in sorted(touched)
            if any(e not in cleared for e in self.incident.get(v, ()))
        }

    def initial_state(self) -> StrategyState:
        guarded = self.guard_set(frozenset())
        peak = sum(guarded.values()) if self.anchored else 0
        return StrategyState(self.start, self.head, frozenset(), guarded,
                             frozenset({self.start}), peak)

    def price(self, state: StrategyState, edge: Edge) -> MoveRecord:
        """
        Raises:
            InvalidStrategyError: move outside the universe, repeated, or disconnected
        """
        edge = edge_key(*edge)
        if edge not in self.universe:
            scope = f"the subtree at {self.head}" if self.anchored else "the tree"
            raise InvalidStrategyError(f"Edge {edge[0]}-{edge[1]} is not an edge of {scope}")
        if edge in state.cleared:
            raise InvalidStrategyError(f"Edge {edge[0]}-{edge[1]} cleared twice")
        a, b = edge
        if a in state.touched:
            u, v = a, b
        elif b in state.touched:
            u, v = b, a
        else:
            raise InvalidStrategyError(
                f"Edge {edge[0]}-{edge[1]} is not adjacent to the searched part"
            )
        weights = self.tree.vertex_weights
        w_edge = self.tree.edge_weights[edge]
        dest = max(w_edge, weights[v]) if self.degree(v) > 1 else w_edge
        keeps = any(e != edge and e not in state.cleared for e in self.incident[u])
        others = state.guard_weight - state.guarded.get(u, 0)
        released = (not self.anchored and not state.cleared and self.degree(self.start) == 1)
        clearing, guarding = move_charge(others, weights[u], dest, keeps, released)
        return MoveRecord(edge, clearing, guarding)

    def advance(self, state: StrategyState, edge: Edge) -> Tuple[MoveRecord, StrategyState]:
        record = self.price(state, edge)
        cleared = state.cleared | {record.edge}
        touched = state.touched | set(record.edge)
        guarded = dict(state.guarded)
        for x in record.edge:
            if any(e not in cleared for e in self.incident[x]):
                guarded[x] = self.tree.vertex_weights[x]
            else:
                guarded.pop(x, None)
        peak = max(state.peak_so_far, record.cost)
        return record, StrategyState(state.start, state.head, frozenset(cleared),
                                     dict(sorted(guarded.items())), frozenset(touched), peak)


def replay_states(t: WeightedRootedTree,
                  s: SearchStrategy) -> Iterator[Tuple[MoveRecord, StrategyState]]:
    """Yield (move record, state after the move) for each move of s"""
    ctx = SearchContext(t, s.start, s.head)
    state = ctx.initial_state()
    for edge in s.moves:
        record, state = ctx.advance(state, edge)
        yield record, state


def replay(t: WeightedRootedTree, s: SearchStrategy, budget: Optional[int] = None,
           require_complete: bool = False, require_unit: bool = False) -> VerificationReport:
    """
    Replay a strategy under the general edge-weighted cost model.

    Budget violations are reported against the first offending move while the
    replay goes on, so searchers_used is always the true peak. Structural
    violations stop the replay.
    """
    if require_unit and not t.has_unit_edges:
        return VerificationReport(False, 0, failure_reason="tree has non-unit edge weights",
                                  failed_move=0)
    try:
        ctx = SearchContext(t, s.start, s.head)
    except TreeSearchError as e:
        return VerificationReport(False, 0, failure_reason=str(e), failed_move=0)

    state = ctx.initial_state()
    report = VerificationReport(True, state.peak_so_far, final_state=state)
    if budget is not None and ctx.anchored and ctx.universe and t.vertex_weights[s.start] > budget:
        report.ok = False
        report.failure_reason = f"budget {budget} is below the start weight {t.vertex_weights[s.start]}"
        report.failed_move = 0

    for i, edge in enumerate(s.moves, start=1):
        try:
            record, state = ctx.advance(state, edge)
        except InvalidStrategyError as e:
            report.ok = False
            report.failure_reason = str(e)
            report.failed_move = i
            report.final_state = state
            report.searchers_used = state.peak_so_far
            return report
        report.per_move.append(record)
        if budget is not None and record.cost > budget and report.ok:
            report.ok = False
            report.failure_reason = (
                f"move {i} ({record.edge[0]}-{record.edge[1]}) needs {record.cost} "
                f"searchers, budget is {budget}"
            )
            report.failed_move = i

    report.final_state = state
    report.searchers_used = state.peak_so_far
    if require_complete and state.cleared != ctx.universe and report.ok:
        missing = len(ctx.universe) - len(state.cleared)
        report.ok = False
        report.failure_reason = f"{missing} edges are still contaminated"
        report.failed_move = len(s.moves)
    return report


def verify(t: WeightedRootedTree, s: SearchStrategy, k: int) -> VerificationReport:
    """
    Check that s is a complete monotone connected search of t using at most k searchers.

    Only unit-edge (node-weighted) trees are accepted; translate edge-weighted
    trees with the transform module first.
    """
    report = replay(t, s, budget=k, require_complete=True, require_unit=True)
    if report.ok:
        logger.debug(f"Strategy from {s.start} verified with {report.searchers_used} searchers")
    else:
        logger.debug(f"Strategy from {s.start} rejected: {report.failure_reason}")
    return report


def guarded_set(t: WeightedRootedTree, cleared: FrozenSet[Edge], start: int,
                head: Optional[int] = None) -> Dict[int, int]:
    """Guarded vertices (with weights) of a prefix-connected cleared edge set"""
    ctx = SearchContext(t, start, head)
    return ctx.guard_set(frozenset(edge_key(a, b) for a, b in cleared))


def move_cost(t: WeightedRootedTree, state: StrategyState, edge: Edge) -> int:
    return SearchContext(t, state.start, state.head).price(state, edge).cost


def _structural_replay(t: WeightedRootedTree, s: SearchStrategy) -> StrategyState:
    ctx = SearchContext(t, s.start, s.head)
    state = ctx.initial_state()
    for edge in s.moves:
        _, state = ctx.advance(state, edge)
    return state


def guard_weight(t: WeightedRootedTree, s: SearchStrategy) -> int:
    """
    Total weight of the guarded set after s

    Raises:
        InvalidStrategyError: if s is not a valid partial search
    """
    return _structural_replay(t, s).guard_weight


def searchers_needed(t: WeightedRootedTree, s: SearchStrategy) -> int:
    """Peak searcher count s(S) of a partial or complete strategy"""
    return _structural_replay(t, s).peak_so_far


def compose(t: WeightedRootedTree, s1: SearchStrategy, s2: SearchStrategy) -> SearchStrategy:
    """
    Concatenate s2 after s1.

    s2 may clear several separate pieces, but after each of its moves every
    connected piece it has cleared must contain a vertex guarded at the end of s1.

    Raises:
        CompositionError: overlapping moves or a piece that loses contact
    """
    try:
        end = _structural_replay(t, s1)
    except InvalidStrategyError as e:
        raise CompositionError(f"First strategy is invalid: {e}") from e
    delta = set(end.guarded)
    overlap = end.cleared.intersection(s2.moves)
    if overlap:
        raise CompositionError(f"Strategies share edges: {sorted(overlap)}")

    parent: Dict[int, int] = {}
    contact: Dict[int, bool] = {}

    def find(x: int) -> int:
        if x not in parent:
            parent[x] = x
            contact[x] = x in delta
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, (a, b) in enumerate(s2.moves, start=1):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
            contact[ra] = contact[ra] or contact[rb]
        if not contact[ra]:
            raise CompositionError(
                f"After move {i} of the second strategy a cleared piece "
                f"does not touch the first strategy's guarded set"
            )

    composite = SearchStrategy(s1.start, s1.moves + s2.moves, s1.head)
    try:
        _structural_replay(t, composite)
    except InvalidStrategyError as e:
        raise CompositionError(f"Composite is not a valid search: {e}") from e
    return composite


def is_k_v_minimal(t: WeightedRootedTree, s: SearchStrategy, k: int, v: int) -> bool:
    """
    True iff s is a partial strategy of T_v using at most k searchers, leaves
    guard weight at most w(v), and no such strategy leaves a smaller guard weight.
    """
    from src.oracle import oracle_min_guard

    if s.start != v:
        raise InvalidStrategyError(f"Strategy starts at {s.start}, not at {v}")
    anchored = SearchStrategy(v, s.moves, head=v)
    report = replay(t, anchored, budget=k)
    if len(report.per_move) < len(anchored.moves):
        raise InvalidStrategyError(report.failure_reason)
    if not report.ok:
        return False
    g = report.final_state.guard_weight
    if g > t.vertex_weights[v]:
        return False
    best = oracle_min_guard(SubtreeRef(t, v), k)
    return best is not None and g == best[0]
