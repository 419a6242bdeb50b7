"""
Instance file formats

Every file is a JSON object {"version": 1, "kind": ..., ...}. Kinds are
tree, strategy, tds, three_partition and schedule. Output is deterministic
so files can be compared byte for byte.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from src.exceptions import InstanceFormatError, TreeSearchError
from src.scheduling import Schedule, Task, TdsInstance, ThreePartitionInstance
from src.search_semantics import SearchStrategy
from src.tree_core import WeightedRootedTree

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
KINDS = ("tree", "strategy", "tds", "three_partition", "schedule")


@dataclass
class InstanceFile:
    version: int
    kind: str
    payload: Dict[str, Any]


def _field(doc: Dict, key: str, expected: Union[type, Tuple[type, ...]], path: str = "") -> Any:
    name = f"{path}{key}"
    if key not in doc:
        raise InstanceFormatError("missing field", field=name)
    value = doc[key]
    if isinstance(value, bool) and expected is not bool:
        raise InstanceFormatError(f"expected {expected}, got a boolean", field=name)
    if not isinstance(value, expected):
        raise InstanceFormatError(f"expected {expected}, got {type(value).__name__}", field=name)
    return value


def parse_text(text: str) -> InstanceFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(e.msg, line=e.lineno) from e
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level must be an object")
    version = _field(doc, "version", int)
    if version != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported version {version}", field="version")
    kind = _field(doc, "kind", str)
    if kind not in KINDS:
        raise InstanceFormatError(f"unknown kind '{kind}'", field="kind")
    payload = {k: v for k, v in doc.items() if k not in ("version", "kind")}
    return InstanceFile(version, kind, payload)


def read_instance_file(path: Union[str, Path], kind: Optional[str] = None) -> InstanceFile:
    """
    Raises:
        InstanceFormatError: unreadable file, bad JSON or a kind other than the expected one
    """
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise InstanceFormatError(f"cannot read {path}: {e}") from e
    instance = parse_text(text)
    if kind is not None and instance.kind != kind:
        raise InstanceFormatError(f"expected a {kind} file, got {instance.kind}", field="kind")
    return instance


def dumps(kind: str, payload: Dict[str, Any]) -> str:
    doc = {"version": FORMAT_VERSION, "kind": kind}
    doc.update(payload)
    return json.dumps(doc, indent=2) + "\n"


def write_instance_file(path: Union[str, Path], kind: str, payload: Dict[str, Any]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(kind, payload), encoding='utf-8')
    logger.info(f"Wrote {kind} file {path}")


# ----------------------------------------------------------------------
# Trees
# ----------------------------------------------------------------------

def tree_from_payload(payload: Dict) -> WeightedRootedTree:
    vertices = _field(payload, "vertices", list)
    edges = _field(payload, "edges", list)
    root = _field(payload, "root", int)
    weights: Dict[int, int] = {}
    for i, item in enumerate(vertices):
        path = f"vertices[{i}]."
        if not isinstance(item, dict):
            raise InstanceFormatError("expected an object", field=f"vertices[{i}]")
        vid = _field(item, "id", int, path)
        if vid in weights:
            raise InstanceFormatError(f"duplicate vertex id {vid}", field=f"{path}id")
        weights[vid] = _field(item, "w", int, path)
    if sorted(weights) != list(range(len(weights))):
        raise InstanceFormatError("vertex ids must be 0..n-1", field="vertices")
    triples = []
    for i, item in enumerate(edges):
        path = f"edges[{i}]."
        if not isinstance(item, dict):
            raise InstanceFormatError("expected an object", field=f"edges[{i}]")
        triples.append((_field(item, "u", int, path), _field(item, "v", int, path),
                        _field(item, "w", int, path)))
    provenance = None
    if "provenance" in payload:
        raw = _field(payload, "provenance", dict)
        try:
            provenance = {int(k): tuple(v) for k, v in raw.items()}
        except (TypeError, ValueError) as e:
            raise InstanceFormatError(f"bad provenance entry: {e}", field="provenance") from e
    try:
        return WeightedRootedTree.from_edges([weights[v] for v in range(len(weights))],
                                             triples, root, provenance)
    except TreeSearchError as e:
        raise InstanceFormatError(str(e)) from e


def tree_payload(t: WeightedRootedTree, metadata: Optional[Dict] = None) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "root": t.root,
        "vertices": [{"id": v, "w": w} for v, w in enumerate(t.vertex_weights)],
        "edges": [{"u": u, "v": v, "w": w} for u, v, w in t.edges],
    }
    if t.provenance is not None:
        payload["provenance"] = {str(v): list(t.provenance[v]) for v in sorted(t.provenance)}
    if metadata:
        payload["metadata"] = metadata
    return payload


# ----------------------------------------------------------------------
# Strategies
# ----------------------------------------------------------------------

def _parse_move(text: Any, i: int) -> Tuple[int, int]:
    if not isinstance(text, str) or text.count("-") != 1:
        raise InstanceFormatError("moves are written 'u-v'", field=f"moves[{i}]")
    a, b = text.split("-")
    try:
        return int(a), int(b)
    except ValueError as e:
        raise InstanceFormatError("move endpoints must be integers", field=f"moves[{i}]") from e


def strategy_from_payload(payload: Dict) -> Tuple[SearchStrategy, Optional[int]]:
    start = _field(payload, "start", int)
    moves = [_parse_move(m, i) for i, m in enumerate(_field(payload, "moves", list))]
    k = _field(payload, "k", int) if "k" in payload else None
    return SearchStrategy(start, tuple(moves)), k


def strategy_payload(s: SearchStrategy, k: Optional[int] = None) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"start": s.start, "moves": [f"{a}-{b}" for a, b in s.moves]}
    if k is not None:
        payload["k"] = k
    return payload


# ----------------------------------------------------------------------
# Scheduling
# ----------------------------------------------------------------------

def encode_runs(values: np.ndarray) -> List[List[int]]:
    """Run-length encoding as [[length, value], ...]"""
    runs: List[List[int]] = []
    for value in values.tolist():
        if runs and runs[-1][1] == value:
            runs[-1][0] += 1
        else:
            runs.append([1, value])
    return runs


def decode_runs(runs: List, field_name: str) -> np.ndarray:
    try:
        lengths = [int(length) for length, _ in runs]
        values = [int(value) for _, value in runs]
    except (TypeError, ValueError) as e:
        raise InstanceFormatError("runs are [length, value] pairs", field=field_name) from e
    if any(length < 1 for length in lengths):
        raise InstanceFormatError("run lengths must be positive", field=field_name)
    return np.repeat(np.array(values, dtype=np.int64), lengths)


def three_partition_from_payload(payload: Dict) -> ThreePartitionInstance:
    B = _field(payload, "B", int)
    A = _field(payload, "A", list)
    try:
        return ThreePartitionInstance(B, tuple(A))
    except TreeSearchError as e:
        raise InstanceFormatError(str(e)) from e


def three_partition_payload(tp: ThreePartitionInstance) -> Dict[str, Any]:
    return {"B": tp.B, "A": list(tp.A)}


def tds_from_payload(payload: Dict) -> TdsInstance:
    tasks = []
    for i, item in enumerate(_field(payload, "tasks", list)):
        path = f"tasks[{i}]."
        if not isinstance(item, dict):
            raise InstanceFormatError("expected an object", field=f"tasks[{i}]")
        if "p" in item:
            durations = np.array(_field(item, "p", list, path), dtype=np.int64)
        elif "p_rle" in item:
            durations = decode_runs(_field(item, "p_rle", list, path), f"{path}p_rle")
        else:
            raise InstanceFormatError("needs 'p' or 'p_rle'", field=f"tasks[{i}]")
        try:
            tasks.append(Task(_field(item, "id", str, path), _field(item, "d", int, path), durations,
                              item.get("kind", "value"), item.get("index", i + 1)))
        except TreeSearchError as e:
            raise InstanceFormatError(str(e), field=f"tasks[{i}]") from e
    partition = None
    if "three_partition" in payload:
        partition = three_partition_from_payload(_field(payload, "three_partition", dict))
    horizon = payload.get("horizon", max((t.deadline for t in tasks), default=0))
    try:
        return TdsInstance(tuple(tasks), horizon, partition)
    except TreeSearchError as e:
        raise InstanceFormatError(str(e)) from e


def tds_payload(inst: TdsInstance) -> Dict[str, Any]:
    tasks = []
    for task in inst.tasks:
        item: Dict[str, Any] = {"id": task.id, "d": task.deadline, "kind": task.kind,
                                "index": task.index}
        runs = encode_runs(task.durations)
        if 2 * len(runs) < len(task.durations):
            item["p_rle"] = runs
        else:
            item["p"] = task.durations.tolist()
        tasks.append(item)
    payload: Dict[str, Any] = {"horizon": inst.horizon, "tasks": tasks}
    if inst.partition is not None:
        payload["three_partition"] = three_partition_payload(inst.partition)
    return payload


def schedule_order_from_payload(payload: Dict) -> Tuple[str, ...]:
    order = _field(payload, "order", list)
    if not all(isinstance(x, str) for x in order):
        raise InstanceFormatError("task ids must be strings", field="order")
    return tuple(order)


def schedule_payload(schedule: Schedule) -> Dict[str, Any]:
    return {
        "order": list(schedule.order),
        "feasible": schedule.feasible,
        "makespan": schedule.makespan,
        "starts": [schedule.starts.get(tid) for tid in schedule.order],
    }


# ----------------------------------------------------------------------
# Shortcuts
# ----------------------------------------------------------------------

def load_tree(path: Union[str, Path]) -> WeightedRootedTree:
    return tree_from_payload(read_instance_file(path, "tree").payload)


def load_strategy(path: Union[str, Path]) -> Tuple[SearchStrategy, Optional[int]]:
    return strategy_from_payload(read_instance_file(path, "strategy").payload)


def load_tds(path: Union[str, Path]) -> TdsInstance:
    return tds_from_payload(read_instance_file(path, "tds").payload)


def load_three_partition(path: Union[str, Path]) -> ThreePartitionInstance:
    return three_partition_from_payload(read_instance_file(path, "three_partition").payload)


def load_schedule_order(path: Union[str, Path]) -> Tuple[str, ...]:
    return schedule_order_from_payload(read_instance_file(path, "schedule").payload)
