"""
Tree Core Module
Weighted rooted trees, rooted-subtree handles and structural queries
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from src.exceptions import InvalidTreeError, UnknownVertexError, WeightOverflowError

logger = logging.getLogger(__name__)

MAX_TOTAL_WEIGHT = 2 ** 64 - 1

Edge = Tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    """Undirected edge identity, smaller endpoint first"""
    return (u, v) if u < v else (v, u)


def _check_weight(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidTreeError(f"{what} must be an integer, got {value!r}")
    if value < 1:
        raise InvalidTreeError(f"{what} must be positive, got {value}")
    return value


@dataclass(frozen=True, eq=False)
class WeightedRootedTree:
    """
    Finite tree with positive integer vertex and edge weights and a root.

    The undirected structure is shared between re-rooted views; the
    parent/child orientation is derived from the root on demand.

    Args:
        vertex_weights: weight of vertex i at position i (ids are 0..n-1)
        edge_weights: mapping of undirected edge (a, b) to its weight
        root: id of the root vertex
        provenance: optional map from vertex id to a label tuple
            describing where the vertex came from in a transformation
    """

    vertex_weights: Tuple[int, ...]
    edge_weights: Mapping[Edge, int]
    root: int
    provenance: Optional[Mapping[int, Tuple]] = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.vertex_weights)
        if n == 0:
            raise InvalidTreeError("A tree needs at least one vertex")
        for v, w in enumerate(self.vertex_weights):
            _check_weight(w, f"Weight of vertex {v}")
        if not isinstance(self.root, int) or not 0 <= self.root < n:
            raise InvalidTreeError(f"Root {self.root!r} is not a vertex of the tree")
        if len(self.edge_weights) != n - 1:
            raise InvalidTreeError(
                f"A tree on {n} vertices has {n - 1} edges, got {len(self.edge_weights)}"
            )
        for (a, b), w in self.edge_weights.items():
            if a == b:
                raise InvalidTreeError(f"Self-loop at vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidTreeError(f"Edge ({a}, {b}) references an unknown vertex")
            if a > b:
                raise InvalidTreeError(f"Edge key ({a}, {b}) is not normalized")
            _check_weight(w, f"Weight of edge ({a}, {b})")
        if n > 1 and not nx.is_tree(self.graph):
            raise InvalidTreeError("Edges do not form a connected acyclic graph")
        total = sum(self.vertex_weights) + sum(self.edge_weights.values())
        if total > MAX_TOTAL_WEIGHT:
            raise WeightOverflowError(
                f"Total weight {total} exceeds the unsigned 64-bit range"
            )

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_edges(cls, vertex_weights: Sequence[int],
                   edges: Iterable[Tuple[int, int, int]], root: int = 0,
                   provenance: Optional[Mapping[int, Tuple]] = None) -> "WeightedRootedTree":
        """
        Build a tree from (u, v, weight) triples in any orientation

        Raises:
            InvalidTreeError: on duplicate edges or structural problems
        """
        weights: Dict[Edge, int] = {}
        for u, v, w in edges:
            key = edge_key(u, v)
            if key in weights:
                raise InvalidTreeError(f"Duplicate edge {key}")
            weights[key] = w
        return cls(tuple(vertex_weights), weights, root,
                   dict(provenance) if provenance is not None else None)

    @classmethod
    def from_networkx(cls, graph: nx.Graph, root: int = 0,
                      default_weight: int = 1) -> "WeightedRootedTree":
        """Build a tree from a networkx graph labelled 0..n-1 with optional 'weight' attributes"""
        n = graph.number_of_nodes()
        if sorted(graph.nodes) != list(range(n)):
            raise InvalidTreeError("networkx graph nodes must be labelled 0..n-1")
        vertex_weights = [graph.nodes[v].get('weight', default_weight) for v in range(n)]
        edges = [(a, b, data.get('weight', default_weight)) for a, b, data in graph.edges(data=True)]
        return cls.from_edges(vertex_weights, edges, root)

    def reroot(self, v: int) -> "WeightedRootedTree":
        """Same undirected tree viewed from a different root"""
        self._require(v)
        return WeightedRootedTree(self.vertex_weights, self.edge_weights, v, self.provenance)

    def with_weights(self, vertex_weights: Optional[Sequence[int]] = None,
                     edge_weights: Optional[Mapping[Edge, int]] = None) -> "WeightedRootedTree":
        """Copy with replaced weights, structure and root unchanged"""
        return WeightedRootedTree(
            tuple(vertex_weights) if vertex_weights is not None else self.vertex_weights,
            dict(edge_weights) if edge_weights is not None else dict(self.edge_weights),
            self.root,
            self.provenance,
        )

    # ------------------------------------------------------------------
    # Undirected structure
    # ------------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertex_weights)

    @property
    def vertices(self) -> range:
        return range(self.n)

    @cached_property
    def graph(self) -> nx.Graph:
        """networkx view with 'weight' attributes on vertices and edges"""
        g = nx.Graph()
        for v, w in enumerate(self.vertex_weights):
            g.add_node(v, weight=w)
        for (a, b), w in self.edge_weights.items():
            g.add_edge(a, b, weight=w)
        return g

    @cached_property
    def _adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        adj: List[List[int]] = [[] for _ in range(self.n)]
        for a, b in self.edge_weights:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(nbrs)) for nbrs in adj)

    @cached_property
    def edge_keys(self) -> Tuple[Edge, ...]:
        """All undirected edges in sorted order"""
        return tuple(sorted(self.edge_weights))

    @cached_property
    def edge_index(self) -> Dict[Edge, int]:
        """Position of each edge in edge_keys, used for bitmask encodings"""
        return {e: i for i, e in enumerate(self.edge_keys)}

    def weight(self, v: int) -> int:
        self._require(v)
        return self.vertex_weights[v]

    def edge_weight(self, u: int, v: int) -> int:
        key = edge_key(u, v)
        if key not in self.edge_weights:
            raise InvalidTreeError(f"({u}, {v}) is not an edge")
        return self.edge_weights[key]

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self.edge_weights

    def neighbors(self, v: int) -> Tuple[int, ...]:
        self._require(v)
        return self._adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def is_leaf(self, v: int) -> bool:
        """Degree at most one; a lone root counts as a leaf"""
        return self.degree(v) <= 1

    def max_degree(self) -> int:
        return max((len(nbrs) for nbrs in self._adjacency), default=0)

    @property
    def total_weight(self) -> int:
        return sum(self.vertex_weights) + sum(self.edge_weights.values())

    @property
    def has_unit_edges(self) -> bool:
        return all(w == 1 for w in self.edge_weights.values())

    # ------------------------------------------------------------------
    # Rooted orientation
    # ------------------------------------------------------------------

    @cached_property
    def _orientation(self) -> Tuple[Tuple[Optional[int], ...], Tuple[int, ...]]:
        parents: List[Optional[int]] = [None] * self.n
        order = [self.root]
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            u = queue.popleft()
            for v in self._adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    parents[v] = u
                    order.append(v)
                    queue.append(v)
        return tuple(parents), tuple(order)

    def parent(self, v: int) -> Optional[int]:
        self._require(v)
        return self._orientation[0][v]

    def children(self, v: int) -> List[int]:
        """Children of v in ascending id order"""
        parent = self.parent(v)
        return [c for c in self._adjacency[v] if c != parent]

    def child_edges(self, v: int) -> List[Edge]:
        return [edge_key(v, c) for c in self.children(v)]

    @property
    def bfs_order(self) -> Tuple[int, ...]:
        return self._orientation[1]

    def postorder(self) -> List[int]:
        """Vertices with every child listed before its parent"""
        return list(reversed(self.bfs_order))

    @property
    def edges(self) -> List[Tuple[int, int, int]]:
        """Edges oriented parent to child as (parent, child, weight), BFS order"""
        parents = self._orientation[0]
        return [
            (parents[v], v, self.edge_weights[edge_key(parents[v], v)])
            for v in self.bfs_order[1:]
        ]

    def subtree_vertices(self, v: int) -> List[int]:
        """Vertices of the subtree rooted at v, v first"""
        result = [v]
        stack = self.children(v)[::-1]
        while stack:
            u = stack.pop()
            result.append(u)
            stack.extend(self.children(u)[::-1])
        return result

    def subtree_edges(self, v: int) -> FrozenSet[Edge]:
        return frozenset(
            edge_key(self.parent(u), u) for u in self.subtree_vertices(v)[1:]
        )

    def depth(self, v: int) -> int:
        d = 0
        while (v := self.parent(v)) is not None:
            d += 1
        return d

    # ------------------------------------------------------------------
    # Misc
    # ------------------------------------------------------------------

    def canonical_form(self, v: Optional[int] = None) -> str:
        """
        Weighted canonical string of the subtree rooted at v (default: root).

        Two rooted weighted trees are isomorphic iff their forms are equal.
        """
        v = self.root if v is None else v
        forms: Dict[int, str] = {}
        for u in reversed(self.subtree_vertices(v)):
            parts = sorted(
                f"{self.edge_weight(u, c)}:{forms[c]}" for c in self.children(u)
            )
            forms[u] = f"{self.vertex_weights[u]}({','.join(parts)})"
        return forms[v]

    def describe(self) -> str:
        return (f"tree(n={self.n}, root={self.root}, max_degree={self.max_degree()}, "
                f"total_weight={self.total_weight})")

    def _require(self, v: int) -> None:
        if not isinstance(v, int) or not 0 <= v < len(self.vertex_weights):
            raise UnknownVertexError(v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedRootedTree):
            return NotImplemented
        return (self.vertex_weights == other.vertex_weights
                and dict(self.edge_weights) == dict(other.edge_weights)
                and self.root == other.root)

    def __hash__(self) -> int:
        return hash((self.vertex_weights, tuple(sorted(self.edge_weights.items())), self.root))


@dataclass(frozen=True)
class SubtreeRef:
    """Handle on the rooted subtree T_v hanging below vertex head"""

    tree: WeightedRootedTree
    head: int

    def __post_init__(self):
        self.tree._require(self.head)

    @property
    def edges(self) -> FrozenSet[Edge]:
        return self.tree.subtree_edges(self.head)

    @property
    def vertices(self) -> List[int]:
        return self.tree.subtree_vertices(self.head)

    @property
    def children(self) -> List[int]:
        return self.tree.children(self.head)


def children(t: WeightedRootedTree, v: int) -> List[int]:
    return t.children(v)


def subtree_edges(t: WeightedRootedTree, v: int) -> FrozenSet[Edge]:
    return t.subtree_edges(v)


def max_degree(t: WeightedRootedTree) -> int:
    return t.max_degree()


def reroot(t: WeightedRootedTree, v: int) -> WeightedRootedTree:
    return t.reroot(v)
