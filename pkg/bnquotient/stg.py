"""
State transition graphs of Boolean networks, stored as successor arrays, and the
weighted digraphs produced by quotients and shrinking.
"""

#  bnquotient: invariant dual subspaces and observability of Boolean networks
#  Copyright (c) 2026. bnquotient developers
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.

from __future__ import annotations

import logging
import math
import numbers
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import graphviz
import networkx as nx
import numpy as np

from bnquotient.errors import BnSemanticError, DimensionError
from bnquotient.stp import LogicalMatrix

logger = logging.getLogger(__name__)

INFINITY = math.inf
"""Distance to an unreachable vertex, and the ``k`` that asks :py:func:`n_in_k` for unreachable vertices"""

Distance = Union[int, float]
VertexSet = FrozenSet[int]

palette = ['lightblue', 'lightpink', 'palegreen', 'khaki', 'plum', 'lightsalmon', 'paleturquoise', 'wheat',
           'lightgray', 'thistle', 'lightcoral', 'aquamarine', 'navajowhite', 'lavender', 'yellowgreen', 'peachpuff']


def _format_label(label: VertexSet) -> str:
    if len(label) == 1:
        return str(next(iter(label)))
    return '{' + ','.join(str(v) for v in sorted(label)) + '}'


class Stg:
    """
    A functional digraph on vertices ``1..n``: every vertex has exactly one out-edge.

    Vertices carry labels, the set of original states they stand for. A freshly built graph labels
    vertex ``v`` with ``{v}``; graphs produced by :py:func:`shrink_stg` carry the merged sets.
    """

    def __init__(self, succ: Sequence[int], labels: Optional[Sequence[Iterable[int]]] = None):
        self.succ: Tuple[int, ...] = tuple(int(s) for s in succ)
        """Successor of each vertex, 1-based: ``succ[v - 1]`` is the out-neighbour of ``v``"""

        if not self.succ:
            raise DimensionError('a state transition graph needs at least one vertex')
        for v, s in enumerate(self.succ, start=1):
            if not 1 <= s <= len(self.succ):
                raise DimensionError(f'successor {s} of vertex {v} outside [1..{len(self.succ)}]')

        if labels is None:
            self.labels: Tuple[VertexSet, ...] = tuple(frozenset((v,)) for v in self.vertices())
        else:
            self.labels = tuple(frozenset(label) for label in labels)
            if len(self.labels) != len(self.succ):
                raise DimensionError(f'{len(self.labels)} labels for {len(self.succ)} vertices')

    @property
    def n_vertices(self) -> int:
        return len(self.succ)

    def vertices(self) -> range:
        return range(1, len(self.succ) + 1)

    def successor(self, v: int) -> int:
        return self.succ[v - 1]

    @cached_property
    def predecessors(self) -> Tuple[Tuple[int, ...], ...]:
        """Reverse index: ``predecessors[v - 1]`` lists the in-neighbours of ``v`` in increasing order"""
        reverse: List[List[int]] = [[] for _ in self.succ]
        for v, s in enumerate(self.succ, start=1):
            reverse[s - 1].append(v)
        return tuple(tuple(r) for r in reverse)

    def edges(self) -> List[Tuple[int, int]]:
        return [(v, self.successor(v)) for v in self.vertices()]

    def __eq__(self, other):
        if not isinstance(other, Stg):
            return NotImplemented
        return self.succ == other.succ and self.labels == other.labels

    def __hash__(self):
        return hash((self.succ, self.labels))

    def __repr__(self):
        return f'Stg(succ={list(self.succ)})'


class WeightedDigraph:
    """
    A digraph with positive integer edge weights. Parallel edges are merged by adding their weights.
    """

    def __init__(self, n_vertices: int, edges: Iterable[Tuple[int, int, int]] = (),
                 labels: Optional[Sequence[Iterable[int]]] = None):
        if n_vertices < 1:
            raise DimensionError('a digraph needs at least one vertex')
        self.n_vertices = n_vertices

        self.weights: Dict[Tuple[int, int], int] = {}
        """Weight of every edge, keyed by ``(tail, head)``"""

        for tail, head, weight in edges:
            for v in (tail, head):
                if not 1 <= v <= n_vertices:
                    raise DimensionError(f'edge endpoint {v} outside [1..{n_vertices}]')
            if weight < 1:
                raise DimensionError(f'edge ({tail}, {head}) has non-positive weight {weight}')
            self.weights[(tail, head)] = self.weights.get((tail, head), 0) + weight

        if labels is None:
            labels = [(v,) for v in range(1, n_vertices + 1)]
        self.labels: Tuple[VertexSet, ...] = tuple(frozenset(label) for label in labels)
        if len(self.labels) != n_vertices:
            raise DimensionError(f'{len(self.labels)} labels for {n_vertices} vertices')

    @classmethod
    def from_stg(cls, g: Stg) -> WeightedDigraph:
        return cls(g.n_vertices, ((v, s, 1) for v, s in g.edges()), g.labels)

    def vertices(self) -> range:
        return range(1, self.n_vertices + 1)

    def edges(self) -> List[Tuple[int, int, int]]:
        """All edges as ``(tail, head, weight)``, sorted"""
        return sorted((tail, head, w) for (tail, head), w in self.weights.items())

    def out_weights(self, v: int) -> Dict[int, int]:
        return {head: w for (tail, head), w in self.weights.items() if tail == v}

    def total_weight(self) -> int:
        return sum(self.weights.values())

    def adjacency(self):
        """
        Dense adjacency matrix ``A`` with ``A[i, j]`` the weight of the edge from ``j`` to ``i``,
        so that a state transition graph's adjacency matrix is its transition matrix

        :return: an n x n int64 numpy array
        """
        a = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        for (tail, head), w in self.weights.items():
            a[head - 1, tail - 1] = w
        return a

    def as_stg(self) -> Optional[Stg]:
        """The same graph as an :py:class:`Stg`, or None if some vertex does not have exactly one unit out-edge"""
        succ = [0] * self.n_vertices
        for (tail, head), w in self.weights.items():
            if succ[tail - 1] or w != 1:
                return None
            succ[tail - 1] = head
        if not all(succ):
            return None
        return Stg(succ, self.labels)

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return (self.n_vertices, self.weights, self.labels) == (other.n_vertices, other.weights, other.labels)

    def __repr__(self):
        return f'WeightedDigraph(n_vertices={self.n_vertices}, edges={self.edges()})'


def stg_from_matrix(m: LogicalMatrix) -> Stg:
    """
    The state transition graph whose adjacency matrix is ``m``: ``succ[v] = m.col_index[v]``

    :raises DimensionError: if ``m`` is not square
    """
    if m.rows != m.cols:
        raise DimensionError(f'transition matrix must be square, got {m.rows}x{m.cols}')
    return Stg(m.col_index)


def to_matrix(g: Stg) -> LogicalMatrix:
    return LogicalMatrix(g.n_vertices, g.succ)


def to_networkx(g: Union[Stg, WeightedDigraph]) -> nx.DiGraph:
    """A networkx view of the graph, with ``weight`` edge attributes"""
    graph = nx.DiGraph()
    graph.add_nodes_from(g.vertices())
    if isinstance(g, Stg):
        graph.add_edges_from(g.edges(), weight=1)
    else:
        graph.add_weighted_edges_from(g.edges())
    return graph


def components(g: Stg) -> List[VertexSet]:
    """Weakly connected components, ordered by their smallest vertex"""
    found = nx.weakly_connected_components(to_networkx(g))
    return sorted((frozenset(c) for c in found), key=min)


def cycle_of(g: Stg, component: Iterable[int]) -> List[int]:
    """
    The unique cycle of a component, in successor order, starting from its smallest vertex.
    A loop gives a one-element list.
    """
    start = min(component)
    seen = set()
    v = start
    while v not in seen:
        seen.add(v)
        v = g.successor(v)
    cycle = [v]
    u = g.successor(v)
    while u != v:
        cycle.append(u)
        u = g.successor(u)
    i = cycle.index(min(cycle))
    return cycle[i:] + cycle[:i]


def attractors(g: Stg) -> List[List[int]]:
    """The cycle of every component, ordered like :py:func:`components`"""
    return [cycle_of(g, c) for c in components(g)]


def in_neighbors(g: Stg, v: int) -> FrozenSet[int]:
    return frozenset(g.predecessors[v - 1])


def _as_set(target: Union[int, Iterable[int]]) -> VertexSet:
    if isinstance(target, numbers.Integral):
        return frozenset((int(target),))
    return frozenset(target)


def in_layers(g: Stg, target: Union[int, Iterable[int]]) -> List[VertexSet]:
    """
    Breadth-first layers towards ``target``: layer ``k`` is ``N_in(target, k)``.
    Only the vertices that reach ``target`` appear.
    """
    current = _as_set(target)
    seen = set(current)
    layers = [current] if current else []
    while current:
        nxt = set()
        for v in current:
            for u in g.predecessors[v - 1]:
                if u not in seen:
                    seen.add(u)
                    nxt.add(u)
        current = frozenset(nxt)
        if current:
            layers.append(current)
    return layers


def n_in_k(g: Stg, target: Union[int, Iterable[int]], k: Distance) -> VertexSet:
    """
    Vertices whose distance to ``target`` is exactly ``k``. The distance to a set is the smallest
    distance to one of its members; pass :py:data:`INFINITY` for the vertices that never reach it.
    """
    if k == INFINITY:
        return n_in_infinity(g, _as_set(target))
    layers = in_layers(g, target)
    return layers[k] if 0 <= k < len(layers) else frozenset()


def n_in_infinity(g: Stg, c: Iterable[int]) -> VertexSet:
    """Vertices from which no path leads into ``c``"""
    reaching = set().union(*in_layers(g, c))
    return frozenset(v for v in g.vertices() if v not in reaching)


def dist_in(g: Stg, target: Union[int, Iterable[int]]) -> int:
    """Largest finite distance from a vertex to ``target``"""
    return len(in_layers(g, target)) - 1


def dist(g: Stg, u: int, v: int) -> Distance:
    """Length of the shortest path from ``u`` to ``v``, or :py:data:`INFINITY`"""
    w = u
    for steps in range(g.n_vertices):
        if w == v:
            return steps
        w = g.successor(w)
    return INFINITY


def dist_out(g: Stg, v: int) -> int:
    """Number of distinct vertices reachable from ``v`` in at least one step"""
    seen = set()
    w = g.successor(v)
    while w not in seen:
        seen.add(w)
        w = g.successor(w)
    return len(seen)


def n_out(g: Stg, v: int, k: int) -> VertexSet:
    """Vertices at out-distance exactly ``k`` from ``v``: in a functional graph, at most one"""
    w = v
    for steps in range(k):
        w = g.successor(w)
    return frozenset((w,)) if dist(g, v, w) == k else frozenset()


def spanning_branching(g: Stg, component: Iterable[int]) -> Tuple[int, FrozenSet[Tuple[int, int]]]:
    """
    Drop the out-edge of the smallest cycle vertex of a component. What remains is a branching
    rooted at that vertex, through which every vertex of the component reaches the root.

    :return: the root and the remaining edges
    """
    component = frozenset(component)
    root = cycle_of(g, component)[0]
    return root, frozenset((v, g.successor(v)) for v in sorted(component) if v != root)


def shrink(g: WeightedDigraph, c: Iterable[int]) -> WeightedDigraph:
    """
    Merge the vertices of ``c`` into one vertex.

    The merged vertex takes the place of the smallest member of ``c`` and the remaining vertices keep
    their order. Edges inside ``c`` become a loop and parallel edges are merged by adding weights.

    :raises DimensionError: if ``c`` is empty or the whole vertex set
    """
    c = frozenset(c)
    if not c or len(c) == g.n_vertices:
        raise DimensionError('can only shrink a nonempty proper subset of the vertices')
    if not c <= frozenset(g.vertices()):
        raise DimensionError(f'vertices {sorted(c - frozenset(g.vertices()))} are not in the graph')

    anchor = min(c)
    renumber: Dict[int, int] = {}
    for v in g.vertices():
        if v in c and v != anchor:
            continue
        renumber[v] = len(renumber) + 1
    for v in c:
        renumber[v] = renumber[anchor]

    labels: List[set] = [set() for _ in range(g.n_vertices - len(c) + 1)]
    for v in g.vertices():
        labels[renumber[v] - 1] |= g.labels[v - 1]
    edges = ((renumber[tail], renumber[head], w) for tail, head, w in g.edges())
    return WeightedDigraph(len(labels), edges, labels)


def shrink_stg(g: Stg, cell_of: Sequence[int]) -> Stg:
    """
    Collapse each block of a congruence to a single vertex

    :param g: the graph
    :param cell_of: block number ``1..k`` of every vertex;
        vertices of one block must share the block of their successors
    :return: the k-vertex graph whose labels are the unions of the merged labels
    :raises DimensionError: if ``cell_of`` is not a congruence
    """
    if len(cell_of) != g.n_vertices:
        raise DimensionError(f'{len(cell_of)} block numbers for {g.n_vertices} vertices')
    k = max(cell_of)
    succ = [0] * k
    labels: List[set] = [set() for _ in range(k)]
    for v in g.vertices():
        block = cell_of[v - 1]
        image = cell_of[g.successor(v) - 1]
        if succ[block - 1] not in (0, image):
            raise DimensionError(f'block {block} has successors in blocks {succ[block - 1]} and {image}')
        succ[block - 1] = image
        labels[block - 1] |= g.labels[v - 1]
    return Stg(succ, labels)


def to_dot(g: Union[Stg, WeightedDigraph], name: str = 'stg', colors: Optional[Mapping[int, int]] = None) -> str:
    """
    Render a graph in the DOT language

    :param g: the graph to render
    :param name: name of the digraph
    :param colors: optional color class of each vertex, e.g. an output symbol; classes map onto a fixed palette
    :return: the DOT source
    """
    dot = graphviz.Digraph(name)
    for v in g.vertices():
        attrs = {'label': _format_label(g.labels[v - 1])}
        if colors is not None:
            symbol = colors[v]
            attrs.update(style='filled', fillcolor=palette[(symbol - 1) % len(palette)],
                         xlabel=f'y={symbol}')
        dot.node(str(v), **attrs)
    edges = [(tail, head, 1) for tail, head in g.edges()] if isinstance(g, Stg) else g.edges()
    for tail, head, w in edges:
        if w > 1:
            dot.edge(str(tail), str(head), label=str(w))
        else:
            dot.edge(str(tail), str(head))
    return dot.source


def to_json(g: Stg, out: Optional[Sequence[int]] = None) -> dict:
    """JSON form ``{"n": ..., "succ": [...]}``, with the output symbols under ``"out"`` when given"""
    obj = {'n': g.n_vertices, 'succ': list(g.succ)}
    if out is not None:
        obj['out'] = list(out)
    return obj


def from_json(obj: Mapping) -> Tuple[Stg, Optional[List[int]]]:
    """
    Read a graph written by :py:func:`to_json`

    :return: the graph and its output symbols, or None when the document has none
    :raises BnSemanticError: if a field is missing or has the wrong type
    :raises DimensionError: if the sizes disagree
    """
    if not isinstance(obj, Mapping) or 'succ' not in obj:
        raise BnSemanticError('graph JSON must be an object with a "succ" list')
    succ = obj['succ']
    if not isinstance(succ, list) or not all(isinstance(s, int) for s in succ):
        raise BnSemanticError('"succ" must be a list of integers')
    n = obj.get('n', len(succ))
    if n != len(succ):
        raise DimensionError(f'"n" is {n} but "succ" has {len(succ)} entries')

    out = obj.get('out')
    if out is not None:
        if not isinstance(out, list) or not all(isinstance(y, int) and y >= 1 for y in out):
            raise BnSemanticError('"out" must be a list of positive integers')
        if len(out) != len(succ):
            raise DimensionError(f'"out" has {len(out)} entries for {len(succ)} states')
    return Stg(succ), out
