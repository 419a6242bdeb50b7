"""
Scheduling Module
Time-dependent single-machine scheduling, the interval gadget built from
3-partition instances, and the reduction of schedules to tree searches
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import (
    BruteForceCapExceededError,
    InfeasibleScheduleError,
    InvalidInstanceError,
    InvalidStrategyError,
    ReductionInvariantError,
)
from src.search_semantics import SearchStrategy, verify
from src.tree_core import Edge, WeightedRootedTree, edge_key

logger = logging.getLogger(__name__)

DEFAULT_BRUTE_MAX_TASKS = 9

VALUE = "value"
GADGET = "gadget"


# ======================================================================
# Instances
# ======================================================================

@dataclass(frozen=True, eq=False)
class Task:
    """
    A task whose duration depends on its integer start time.

    durations[t] is the execution time when starting at t, for t in [0, deadline).
    """

    id: str
    deadline: int
    durations: np.ndarray = field(repr=False)
    kind: str = VALUE
    index: int = 0

    def __post_init__(self):
        durations = np.asarray(self.durations, dtype=np.int64)
        object.__setattr__(self, 'durations', durations)
        if isinstance(self.deadline, bool) or not isinstance(self.deadline, (int, np.integer)) \
                or self.deadline < 0:
            raise InvalidInstanceError(f"Task {self.id}: deadline must be a non-negative integer")
        object.__setattr__(self, 'deadline', int(self.deadline))
        if durations.ndim != 1 or len(durations) != self.deadline:
            raise InvalidInstanceError(
                f"Task {self.id}: expected {self.deadline} durations, got {durations.size}"
            )
        if durations.size and durations.min() < 1:
            raise InvalidInstanceError(f"Task {self.id}: durations must be positive")
        if durations.size > 1 and np.any(np.diff(durations) < 0):
            raise InvalidInstanceError(f"Task {self.id}: durations must be nondecreasing in time")
        if self.kind not in (VALUE, GADGET):
            raise InvalidInstanceError(f"Task {self.id}: unknown kind '{self.kind}'")

    def duration(self, t: int) -> int:
        return int(self.durations[t])

    @cached_property
    def latest_start(self) -> Optional[int]:
        """Largest start time that still meets the deadline, None if there is none"""
        if not self.deadline:
            return None
        starts = np.arange(self.deadline)
        ok = np.nonzero(starts + self.durations <= self.deadline)[0]
        return int(ok.max()) if ok.size else None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Task):
            return NotImplemented
        return (self.id == other.id and self.deadline == other.deadline
                and self.kind == other.kind and self.index == other.index
                and np.array_equal(self.durations, other.durations))

    def __hash__(self) -> int:
        return hash((self.id, self.deadline, self.kind, self.index))


@dataclass(frozen=True)
class ThreePartitionInstance:
    B: int
    A: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'A', tuple(int(a) for a in self.A))
        if self.B < 1:
            raise InvalidInstanceError("B must be positive")
        if not self.A or len(self.A) % 3:
            raise InvalidInstanceError(f"Need 3m numbers, got {len(self.A)}")
        if sum(self.A) != self.m * self.B:
            raise InvalidInstanceError(f"Numbers sum to {sum(self.A)}, expected {self.m * self.B}")
        for a in self.A:
            if not (4 * a > self.B and 2 * a < self.B):
                raise InvalidInstanceError(f"{a} is not strictly between B/4 and B/2 (B={self.B})")

    @property
    def m(self) -> int:
        return len(self.A) // 3


@dataclass(frozen=True)
class TdsInstance:
    tasks: Tuple[Task, ...]
    horizon: int
    partition: Optional[ThreePartitionInstance] = None

    def __post_init__(self):
        object.__setattr__(self, 'tasks', tuple(self.tasks))
        ids = [task.id for task in self.tasks]
        if len(set(ids)) != len(ids):
            raise InvalidInstanceError("Task ids must be unique")
        if self.tasks and self.horizon < max(task.deadline for task in self.tasks):
            raise InvalidInstanceError("Horizon is below the largest deadline")

    @classmethod
    def from_tasks(cls, tasks: Sequence[Task]) -> "TdsInstance":
        """Instance whose horizon is the largest deadline"""
        return cls(tuple(tasks), max((t.deadline for t in tasks), default=0))

    @cached_property
    def by_id(self) -> Dict[str, Task]:
        return {task.id: task for task in self.tasks}

    @property
    def task_ids(self) -> List[str]:
        return [task.id for task in self.tasks]

    def gadget_tasks(self) -> List[Task]:
        return sorted((t for t in self.tasks if t.kind == GADGET), key=lambda t: t.index)

    def value_tasks(self) -> List[Task]:
        return sorted((t for t in self.tasks if t.kind == VALUE), key=lambda t: t.index)


@dataclass
class Schedule:
    order: Tuple[str, ...]
    starts: Dict[str, int]
    completions: Dict[str, int]
    makespan: int
    feasible: bool
    diagnostic: Optional[str] = None


# ======================================================================
# Simulation and brute force
# ======================================================================

def simulate(inst: TdsInstance, order: Sequence[str]) -> Schedule:
    """
    Run tasks back to back in the given order starting at time 0.

    Raises:
        InvalidInstanceError: order is not a permutation of the task ids
    """
    order = tuple(order)
    if sorted(order) != sorted(inst.task_ids):
        raise InvalidInstanceError("Order must be a permutation of the task ids")
    now = 0
    starts: Dict[str, int] = {}
    completions: Dict[str, int] = {}
    feasible = True
    diagnostic = None
    for task_id in order:
        task = inst.by_id[task_id]
        if now >= task.deadline:
            feasible = False
            diagnostic = diagnostic or (
                f"{task_id} cannot start at {now}: deadline is {task.deadline}"
            )
            break
        starts[task_id] = now
        now += task.duration(now)
        completions[task_id] = now
        if now > task.deadline and feasible:
            feasible = False
            diagnostic = f"{task_id} completes at {now}, after its deadline {task.deadline}"
    makespan = max(completions.values(), default=0)
    return Schedule(order, starts, completions, makespan, feasible, diagnostic)


def _extend_feasible(inst: TdsInstance, prefix: List[str], now: int,
                     remaining: List[str]) -> Iterator[Tuple[str, ...]]:
    if not remaining:
        yield tuple(prefix)
        return
    for i, task_id in enumerate(remaining):
        task = inst.by_id[task_id]
        if now >= task.deadline:
            continue
        end = now + task.duration(now)
        if end > task.deadline:
            continue
        prefix.append(task_id)
        yield from _extend_feasible(inst, prefix, end, remaining[:i] + remaining[i + 1:])
        prefix.pop()


def _check_cap(inst: TdsInstance, max_tasks: int) -> None:
    if len(inst.tasks) > max_tasks:
        raise BruteForceCapExceededError(
            f"Brute force is capped at {max_tasks} tasks, instance has {len(inst.tasks)}"
        )


def feasible_orders(inst: TdsInstance,
                    max_tasks: int = DEFAULT_BRUTE_MAX_TASKS) -> Iterator[Tuple[str, ...]]:
    """Every feasible order, in lexicographic order of task positions; infeasible prefixes are cut"""
    _check_cap(inst, max_tasks)
    yield from _extend_feasible(inst, [], 0, inst.task_ids)


def _orders_after(args: Tuple[TdsInstance, str]) -> List[Tuple[str, ...]]:
    inst, first = args
    task = inst.by_id[first]
    if task.deadline == 0 or task.duration(0) > task.deadline:
        return []
    rest = [tid for tid in inst.task_ids if tid != first]
    return list(_extend_feasible(inst, [first], task.duration(0), rest))


def all_feasible_orders(inst: TdsInstance, jobs: int = 1,
                        max_tasks: int = DEFAULT_BRUTE_MAX_TASKS) -> List[Tuple[str, ...]]:
    """feasible_orders as a list, optionally split over processes by first task"""
    _check_cap(inst, max_tasks)
    if jobs <= 1 or len(inst.tasks) < 2:
        return list(feasible_orders(inst, max_tasks))
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        chunks = executor.map(_orders_after, [(inst, tid) for tid in inst.task_ids])
        return [order for chunk in chunks for order in chunk]


def _first_order_after(args: Tuple[TdsInstance, str]) -> Optional[Tuple[str, ...]]:
    inst, first = args
    task = inst.by_id[first]
    if task.deadline == 0 or task.duration(0) > task.deadline:
        return None
    rest = [tid for tid in inst.task_ids if tid != first]
    return next(_extend_feasible(inst, [first], task.duration(0), rest), None)


def tds_feasible(inst: TdsInstance, max_tasks: int = DEFAULT_BRUTE_MAX_TASKS,
                 jobs: int = 1) -> Optional[Tuple[str, ...]]:
    """
    First feasible order found by brute force, or None.

    With jobs > 1 each first task is searched in its own process; the answer
    is the same order the serial search finds.
    """
    _check_cap(inst, max_tasks)
    if jobs <= 1 or len(inst.tasks) < 2:
        return next(feasible_orders(inst, max_tasks), None)
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        found = executor.map(_first_order_after, [(inst, tid) for tid in inst.task_ids])
        return next((order for order in found if order is not None), None)


def three_partition_exists(tp: ThreePartitionInstance) -> Optional[List[Tuple[int, int, int]]]:
    """
    Brute-force 3-partition.

    Returns:
        m triples of 1-based indices into A, each summing to B, or None
    """
    def solve(remaining: Tuple[int, ...]) -> Optional[List[Tuple[int, int, int]]]:
        if not remaining:
            return []
        first = remaining[0]
        for a, b in combinations(remaining[1:], 2):
            if tp.A[first - 1] + tp.A[a - 1] + tp.A[b - 1] == tp.B:
                rest = tuple(x for x in remaining if x not in (first, a, b))
                found = solve(rest)
                if found is not None:
                    return [(first, a, b)] + found
        return None

    return solve(tuple(range(1, len(tp.A) + 1)))


# ======================================================================
# 3-partition to scheduling
# ======================================================================

def gadget_intervals(B: int, m: int) -> List[Tuple[int, int]]:
    """Intervals [l_i, r_i) splitting [0, L), the i-th of length B^3 + iB"""
    cube = B ** 3
    return [
        ((i - 1) * cube + (i - 1) * i * B // 2, i * cube + i * (i + 1) * B // 2)
        for i in range(1, m + 1)
    ]


def three_partition_to_tds(tp: ThreePartitionInstance) -> TdsInstance:
    """
    Value task J_j (deadline L) takes i * a_j when started in the i-th interval;
    gadget task G_i takes B^3 and must finish by l_i + B^3.
    """
    m, B = tp.m, tp.B
    cube = B ** 3
    intervals = gadget_intervals(B, m)
    horizon = intervals[-1][1]
    tasks: List[Task] = []
    for j, a in enumerate(tp.A, start=1):
        durations = np.concatenate([
            np.full(right - left, i * a, dtype=np.int64)
            for i, (left, right) in enumerate(intervals, start=1)
        ])
        tasks.append(Task(f"J{j}", horizon, durations, VALUE, j))
    for i, (left, _) in enumerate(intervals, start=1):
        deadline = left + cube
        tasks.append(Task(f"G{i}", deadline, np.full(deadline, cube, dtype=np.int64), GADGET, i))
    logger.info(f"Generated scheduling instance with {len(tasks)} tasks, horizon {horizon}")
    return TdsInstance(tuple(tasks), horizon, tp)


def three_partition_schedule_order(triples: Sequence[Sequence[int]]) -> Tuple[str, ...]:
    """Order G_1, first triple, G_2, second triple, ... for a 3-partition solution"""
    order: List[str] = []
    for i, triple in enumerate(triples, start=1):
        order.append(f"G{i}")
        order.extend(f"J{j}" for j in triple)
    return tuple(order)


@dataclass
class Window:
    index: int
    start: int
    end: int
    contained: bool
    length: int
    expected_length: int


@dataclass
class StructuralReport:
    windows: List[Window] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def rows(self) -> List[List]:
        return [[w.index, w.start, w.end, w.contained, w.length, w.expected_length]
                for w in self.windows]


def _require_gadget(inst: TdsInstance, schedule: Schedule) -> ThreePartitionInstance:
    if inst.partition is None:
        raise InvalidInstanceError("Instance was not generated from a 3-partition instance")
    if not schedule.feasible:
        raise InfeasibleScheduleError(schedule.diagnostic or "schedule is infeasible")
    return inst.partition


def _gadget_windows(inst: TdsInstance, schedule: Schedule) -> List[Tuple[int, int]]:
    gadgets = inst.gadget_tasks()
    windows = []
    for pos, task in enumerate(gadgets):
        begin = schedule.completions[task.id]
        end = schedule.starts[gadgets[pos + 1].id] if pos + 1 < len(gadgets) else inst.horizon
        windows.append((begin, end))
    return windows


def check_structural_lemmas(inst: TdsInstance, schedule: Schedule) -> StructuralReport:
    """
    Check a feasible schedule of a gadget instance: gadget tasks run in index
    order, and the window between G_i and G_{i+1} lies inside the i-th interval
    with length iB.
    """
    tp = _require_gadget(inst, schedule)
    report = StructuralReport()
    gadgets = inst.gadget_tasks()
    for first, second in zip(gadgets, gadgets[1:]):
        if schedule.starts[first.id] >= schedule.starts[second.id]:
            report.violations.append(f"{second.id} runs before {first.id}")
    intervals = gadget_intervals(tp.B, tp.m)
    for i, ((begin, end), (left, right)) in enumerate(zip(_gadget_windows(inst, schedule), intervals),
                                                      start=1):
        window = Window(i, begin, end, left <= begin and end <= right, end - begin, i * tp.B)
        report.windows.append(window)
        if not window.contained:
            report.violations.append(f"window {i} [{begin}, {end}) is outside [{left}, {right})")
        if window.length != window.expected_length:
            report.violations.append(
                f"window {i} has length {window.length}, expected {window.expected_length}"
            )
    if report.violations:
        logger.error(f"Structural check failed: {report.violations}")
    return report


def extract_three_partition(inst: TdsInstance, schedule: Schedule) -> List[List[int]]:
    """Numbers a_j grouped by the gadget window their task starts in"""
    tp = _require_gadget(inst, schedule)
    windows = _gadget_windows(inst, schedule)
    groups: List[List[int]] = [[] for _ in windows]
    for task in inst.value_tasks():
        start = schedule.starts[task.id]
        for i, (begin, end) in enumerate(windows):
            if begin <= start < end:
                groups[i].append(tp.A[task.index - 1])
                break
        else:
            raise ReductionInvariantError(f"{task.id} starts outside every gadget window")
    for i, group in enumerate(groups, start=1):
        if sum(group) != tp.B:
            raise ReductionInvariantError(f"Group {i} sums to {sum(group)}, expected {tp.B}")
    return groups


# ======================================================================
# Scheduling to tree search
# ======================================================================

@dataclass
class ReductionTree:
    """
    Tree built from a scheduling instance.

    labels maps ("r",), ("y", j), ("z", j), ("u", j, i), ("v", j, i) to
    vertex ids, with j = 1..n indexing task_ids and j = 0 for the root arm.
    """

    tree: WeightedRootedTree
    k: int
    horizon: int
    task_ids: Tuple[str, ...]
    latest_starts: Tuple[int, ...]
    labels: Dict[Tuple, int]

    def vertex(self, *label) -> int:
        return self.labels[tuple(label)]

    def task_index(self, task_id: str) -> int:
        return self.task_ids.index(task_id) + 1

    @property
    def root(self) -> int:
        return self.labels[("r",)]


def tds_to_tree(inst: TdsInstance) -> ReductionTree:
    """
    Node-weighted tree that can be searched by 4L searchers from its root iff
    the instance has a feasible schedule.

    The root r (2L) has an arm y_0 (3L) - z_0 (1) and, per task, a path
    u^f, v^f, ..., u^0, v^0 followed by y_j (3L) - z_j (1), with
    w(u^i) = 2L - i and w(v^i) = p(i).

    Raises:
        InvalidInstanceError: a task cannot meet its deadline from any start
    """
    horizon = max((task.deadline for task in inst.tasks), default=0) or 1
    labels: Dict[Tuple, int] = {}
    weights: List[int] = []
    edges: List[Tuple[int, int, int]] = []

    def add(label: Tuple, weight: int) -> int:
        labels[label] = len(weights)
        weights.append(weight)
        return labels[label]

    root = add(("r",), 2 * horizon)
    y0 = add(("y", 0), 3 * horizon)
    edges.append((root, y0, 1))
    edges.append((y0, add(("z", 0), 1), 1))

    latest: List[int] = []
    for j, task in enumerate(inst.tasks, start=1):
        f = task.latest_start
        if f is None:
            raise InvalidInstanceError(f"Task {task.id} cannot meet its deadline from any start")
        latest.append(f)
        previous = root
        for i in range(f, -1, -1):
            u = add(("u", j, i), 2 * horizon - i)
            v = add(("v", j, i), task.duration(i))
            edges.append((previous, u, 1))
            edges.append((u, v, 1))
            previous = v
        y = add(("y", j), 3 * horizon)
        edges.append((previous, y, 1))
        edges.append((y, add(("z", j), 1), 1))

    _check_reduction_weights(inst, labels, weights, latest, horizon)
    provenance = {vid: label for label, vid in labels.items()}
    tree = WeightedRootedTree.from_edges(weights, edges, root, provenance)
    logger.info(f"Reduction tree: {tree.n} vertices, budget {4 * horizon}")
    return ReductionTree(tree, 4 * horizon, horizon, tuple(inst.task_ids), tuple(latest), labels)


def _check_reduction_weights(inst: TdsInstance, labels: Dict[Tuple, int], weights: List[int],
                             latest: List[int], horizon: int) -> None:
    for j, f in enumerate(latest, start=1):
        us = [weights[labels[("u", j, i)]] for i in range(f + 1)]
        vs = [weights[labels[("v", j, i)]] for i in range(f + 1)]
        if min(us) <= horizon or max(vs) > horizon:
            raise ReductionInvariantError(f"Blocking weights violated on path {j}")
        if any(a <= b for a, b in zip(us, us[1:])):
            raise ReductionInvariantError(f"u weights on path {j} are not strictly decreasing")
        if any(a > b for a, b in zip(vs, vs[1:])):
            raise ReductionInvariantError(f"v weights on path {j} decrease along the path")


def schedule_to_strategy(inst: TdsInstance, schedule: Schedule, rt: ReductionTree) -> SearchStrategy:
    """
    Search of the reduction tree from r that follows a feasible schedule.

    Tasks in schedule order: clear r down to v^{s_j} on each path. Then clear
    y_0 and z_0, which releases r. Finally finish every path down to z_j.

    Raises:
        InfeasibleScheduleError: the schedule is not feasible
    """
    if not schedule.feasible:
        raise InfeasibleScheduleError(schedule.diagnostic or "schedule is infeasible")
    moves: List[Edge] = []
    for task_id in schedule.order:
        j = rt.task_index(task_id)
        start = schedule.starts[task_id]
        previous = rt.root
        for i in range(rt.latest_starts[j - 1], start - 1, -1):
            u = rt.vertex("u", j, i)
            moves.append(edge_key(previous, u))
            moves.append(edge_key(u, rt.vertex("v", j, i)))
            previous = rt.vertex("v", j, i)
    y0 = rt.vertex("y", 0)
    moves.append(edge_key(rt.root, y0))
    moves.append(edge_key(y0, rt.vertex("z", 0)))
    for task_id in schedule.order:
        j = rt.task_index(task_id)
        for i in range(schedule.starts[task_id] - 1, -1, -1):
            u = rt.vertex("u", j, i)
            moves.append(edge_key(rt.vertex("v", j, i + 1), u))
            moves.append(edge_key(u, rt.vertex("v", j, i)))
        y = rt.vertex("y", j)
        moves.append(edge_key(rt.vertex("v", j, 0), y))
        moves.append(edge_key(y, rt.vertex("z", j)))
    return SearchStrategy(rt.root, tuple(moves))


def strategy_to_schedule(inst: TdsInstance, rt: ReductionTree, s: SearchStrategy) -> Schedule:
    """
    Schedule read off a 4L-search of the reduction tree: tasks run in the
    order their root edges are cleared.

    Raises:
        InvalidStrategyError: s is not a valid search within budget 4L
        ReductionInvariantError: a property the reduction guarantees failed
    """
    report = verify(rt.tree, s, rt.k)
    if not report.ok:
        raise InvalidStrategyError(f"Strategy rejected at budget {rt.k}: {report.failure_reason}")

    provenance = rt.tree.provenance
    root = rt.root
    order: List[str] = []
    arm_cleared_at: Optional[int] = None
    for pos, (a, b) in enumerate(s.moves):
        if root not in (a, b):
            continue
        other = b if a == root else a
        label = provenance[other]
        if label[0] == "y":
            arm_cleared_at = pos
        elif arm_cleared_at is not None:
            raise ReductionInvariantError("Edge r-y_0 is not the last root edge cleared")
        else:
            order.append(rt.task_ids[label[1] - 1])

    schedule = simulate(inst, order)
    if not schedule.feasible:
        raise ReductionInvariantError(f"Extracted order is infeasible: {schedule.diagnostic}")
    for task_id in order:
        j = rt.task_index(task_id)
        if schedule.starts[task_id] > rt.latest_starts[j - 1]:
            raise ReductionInvariantError(f"{task_id} starts after its latest start")

    for a, b in s.moves[:arm_cleared_at]:
        for x in (a, b):
            label = provenance[x]
            if label[0] == "u" and label[2] < schedule.starts[rt.task_ids[label[1] - 1]]:
                raise ReductionInvariantError(
                    f"Path {label[1]} cleared below its start time before r was released"
                )
    check_path_bursts(rt, s, schedule, exact=False)

    canonical = schedule_to_strategy(inst, schedule, rt)
    if not verify(rt.tree, canonical, rt.k).ok:
        raise ReductionInvariantError("Canonical strategy of the extracted schedule exceeds 4L")
    check_path_bursts(rt, normalize_bursts(rt, s, canonical), schedule)
    logger.debug(f"Extracted order {order} from a {len(s.moves)}-move strategy")
    return schedule


def _path_depth(rt: ReductionTree, label: Tuple) -> int:
    """Position on P_j below r: u_j^f is 0, v_j^f is 1, ..., v_j^0 is 2f + 1"""
    f = rt.latest_starts[label[1] - 1]
    return 2 * (f - label[2]) + (1 if label[0] == "v" else 0)


def path_bursts(rt: ReductionTree, s: SearchStrategy) -> List[Tuple[int, int]]:
    """
    (j, depth) per path in the order its root edge is cleared, depth being the
    deepest position cleared on P_j when the next root edge is cleared
    (-1 if none below r).
    """
    provenance = rt.tree.provenance
    deepest: Dict[int, int] = {}
    bursts: List[Tuple[int, int]] = []
    current: Optional[int] = None
    for a, b in s.moves:
        if rt.root in (a, b):
            if current is not None:
                bursts.append((current, deepest.get(current, -1)))
                current = None
            label = provenance[b if a == rt.root else a]
            if label[0] == "y":
                return bursts
            current = label[1]
        for x in (a, b):
            label = provenance[x]
            if label[0] in ("u", "v"):
                deepest[label[1]] = max(deepest.get(label[1], -1), _path_depth(rt, label))
    if current is not None:
        bursts.append((current, deepest.get(current, -1)))
    return bursts


def check_path_bursts(rt: ReductionTree, s: SearchStrategy, schedule: Schedule,
                      exact: bool = True) -> None:
    """
    Each burst on P_j ends at v_j^{s_j} before the next root edge is cleared.

    With exact=False a burst may stop above v_j^{s_j}, but never below it.

    Raises:
        ReductionInvariantError: a burst ends below v_j^{s_j}, or above it when exact
    """
    for j, depth in path_bursts(rt, s):
        task_id = rt.task_ids[j - 1]
        start = schedule.starts[task_id]
        target = _path_depth(rt, ("v", j, start))
        if depth > target:
            raise ReductionInvariantError(
                f"{task_id}: path cleared below v^{start} before the next root edge"
            )
        if exact and depth != target:
            raise ReductionInvariantError(f"{task_id}: burst stops above v^{start}")


def normalize_bursts(rt: ReductionTree, s: SearchStrategy,
                     canonical: SearchStrategy) -> SearchStrategy:
    """
    Replace everything before r-y_0 by the canonical bursts, each path cleared
    from its root edge down to v_j^{s_j}; the remaining moves of s follow in
    their original order.

    Raises:
        ReductionInvariantError: the regrouped strategy needs more than 4L searchers
    """
    arm = edge_key(rt.root, rt.vertex("y", 0))
    keys = [edge_key(*move) for move in canonical.moves]
    head = canonical.moves[:keys.index(arm)]
    done = set(keys[:len(head)])
    rest = tuple(move for move in s.moves if edge_key(*move) not in done)
    normalized = SearchStrategy(rt.root, head + rest)
    report = verify(rt.tree, normalized, rt.k)
    if not report.ok:
        raise ReductionInvariantError(f"Burst normalization exceeds 4L: {report.failure_reason}")
    return normalized
