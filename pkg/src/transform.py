"""
Transform Module
Weight-preserving rewrites between tree models and strategy translation
"""

import logging
from typing import Dict, List, Tuple

from src.exceptions import InvalidStrategyError, InvalidTreeError
from src.search_semantics import SearchStrategy
from src.tree_core import Edge, WeightedRootedTree, edge_key

logger = logging.getLogger(__name__)


def _provenance_of(t: WeightedRootedTree) -> Dict[int, Tuple]:
    if t.provenance is not None:
        return dict(t.provenance)
    return {v: ("vertex", v) for v in t.vertices}


def normalize_leaf_weights(t: WeightedRootedTree) -> WeightedRootedTree:
    """Set every leaf weight to 1; the search number does not change"""
    weights = [1 if t.is_leaf(v) else w for v, w in enumerate(t.vertex_weights)]
    return WeightedRootedTree(tuple(weights), dict(t.edge_weights), t.root, t.provenance)


def lift_edge_weights(t: WeightedRootedTree) -> WeightedRootedTree:
    """Raise each edge weight to at least its child endpoint's weight (parent to child orientation)"""
    lifted = {
        edge_key(u, v): max(w, t.vertex_weights[v]) for u, v, w in t.edges
    }
    return WeightedRootedTree(t.vertex_weights, lifted, t.root, t.provenance)


def subdivide_to_node_weighted(t: WeightedRootedTree) -> WeightedRootedTree:
    """
    Replace every edge uv by a path u - x_uv - v with unit edges and w(x_uv) = w(uv).

    Original vertices keep their ids; subdivision vertices are numbered from n
    upwards in BFS edge order. The provenance map labels x_uv as ("edge", u, v).
    """
    n = t.n
    provenance = _provenance_of(t)
    weights = list(t.vertex_weights)
    new_edges: List[Tuple[int, int, int]] = []
    for u, v, w in t.edges:
        x = len(weights)
        weights.append(w)
        provenance[x] = ("edge", u, v)
        new_edges.append((u, x, 1))
        new_edges.append((x, v, 1))
    logger.debug(f"Subdivided {n - 1} edges into {len(new_edges)} unit edges")
    return WeightedRootedTree.from_edges(weights, new_edges, t.root, provenance)


def to_node_weighted(t: WeightedRootedTree) -> WeightedRootedTree:
    """
    Normalize leaves, then lift and subdivide unless all edges are already unit.

    A unit-edge tree is already node-weighted, so applying this to its own
    output changes nothing.
    """
    normalized = normalize_leaf_weights(t)
    if normalized.has_unit_edges:
        return normalized
    return subdivide_to_node_weighted(lift_edge_weights(normalized))


def double_weights(t: WeightedRootedTree) -> WeightedRootedTree:
    """Multiply every vertex and edge weight by two"""
    return t.with_weights(
        [2 * w for w in t.vertex_weights],
        {e: 2 * w for e, w in t.edge_weights.items()},
    )


def unrooted_hardness_gadget(t: WeightedRootedTree, k: int) -> WeightedRootedTree:
    """
    Apex of weight 1 joined by unit edges to the roots of three doubled copies of t.

    If k is the connected search number of t from its root, the result needs
    2k + 1 searchers from every starting vertex. The apex gets id 0 and copy c
    maps vertex v to 1 + c * n + v. Leaves of t, a leaf root included, weigh 1
    before doubling.
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise InvalidTreeError(f"Gadget budget must be a non-negative integer, got {k!r}")
    doubled = double_weights(normalize_leaf_weights(t))
    n = t.n
    weights = [1]
    provenance: Dict[int, Tuple] = {0: ("apex",)}
    edges: List[Tuple[int, int, int]] = []
    for c in range(3):
        offset = 1 + c * n
        weights.extend(doubled.vertex_weights)
        for v in t.vertices:
            provenance[offset + v] = ("copy", c, v)
        edges.append((0, offset + t.root, 1))
        for (a, b), w in doubled.edge_weights.items():
            edges.append((offset + a, offset + b, w))
    logger.info(f"Built unrooted gadget with {len(weights)} vertices for k={k} (claims {2 * k + 1})")
    return WeightedRootedTree.from_edges(weights, edges, 0, provenance)


# ----------------------------------------------------------------------
# Strategy translation between a tree and its subdivision
# ----------------------------------------------------------------------

def _subdivision_vertices(t: WeightedRootedTree, tprime: WeightedRootedTree) -> Dict[int, Edge]:
    provenance = tprime.provenance or {}
    mapping: Dict[int, Edge] = {}
    for x in range(t.n, tprime.n):
        label = provenance.get(x)
        if label is None or label[0] != "edge":
            raise InvalidTreeError(f"Vertex {x} carries no subdivision label")
        mapping[x] = edge_key(label[1], label[2])
    return mapping


def strategy_to_subdivided(t: WeightedRootedTree, tprime: WeightedRootedTree,
                           s: SearchStrategy) -> SearchStrategy:
    """
    Translate a strategy of t into one of its subdivision tprime.

    Each move uv, with u the already-touched endpoint, becomes u-x_uv then x_uv-v.
    """
    xs = {e: x for x, e in _subdivision_vertices(t, tprime).items()}
    touched = {s.start}
    moves: List[Edge] = []
    for a, b in s.moves:
        key = edge_key(a, b)
        if key not in xs:
            raise InvalidStrategyError(f"Move {a}-{b} has no subdivision vertex")
        if a in touched:
            u, v = a, b
        elif b in touched:
            u, v = b, a
        else:
            raise InvalidStrategyError(f"Move {a}-{b} is not adjacent to the searched part")
        x = xs[key]
        moves.append(edge_key(u, x))
        moves.append(edge_key(x, v))
        touched.add(v)
    return SearchStrategy(start=s.start, moves=tuple(moves), head=s.head)


def strategy_from_subdivided(t: WeightedRootedTree, tprime: WeightedRootedTree,
                             s: SearchStrategy) -> SearchStrategy:
    """
    Map a strategy of tprime back to t.

    Original edges are ordered by the first of their two halves to be cleared.
    A start on a subdivision vertex moves to the original endpoint reached first.
    """
    xs = _subdivision_vertices(t, tprime)
    order: List[Edge] = []
    seen = set()
    for a, b in s.moves:
        x = a if a >= t.n else b
        if x not in xs:
            raise InvalidStrategyError(f"Move {a}-{b} does not touch a subdivision vertex")
        key = xs[x]
        if key not in seen:
            seen.add(key)
            order.append(key)
    start = s.start
    if start >= t.n:
        if s.moves:
            a, b = s.moves[0]
            start = b if a == s.start else a
        else:
            start = xs[start][0]
    return SearchStrategy(start=start, moves=tuple(order), head=s.head)
