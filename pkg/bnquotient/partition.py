"""
Partitions of the vertex set ``1..n``: the refinement lattice, equitable partitions and
quotient digraphs.

A partition is finer than another when each of its cells lies inside a cell of the other.
The *join* of two partitions is their coarsest common refinement and the *meet* their finest
common coarsening.
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

import functools
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
from networkx.utils import UnionFind

from bnquotient.errors import DimensionError, NotEquitableError
from bnquotient.stg import Stg, WeightedDigraph
from bnquotient.stp import LogicalMatrix


class Partition:
    """
    A partition of ``1..n``, held in canonical form: cells are numbered ``1..k`` in order of their
    smallest element, so two partitions are equal exactly when their ``cell_of`` sequences are.
    """

    def __init__(self, cell_of: Iterable):
        renumber: Dict = {}
        canonical = []
        for label in cell_of:
            canonical.append(renumber.setdefault(label, len(renumber) + 1))
        if not canonical:
            raise DimensionError('a partition needs at least one element')

        self.cell_of: Tuple[int, ...] = tuple(canonical)
        """Cell number of each element: ``cell_of[v - 1]`` is the cell of ``v``"""

        self.k = len(renumber)
        """Number of cells"""

    @classmethod
    def from_cells(cls, cells: Iterable[Iterable[int]], n: int) -> Partition:
        """
        Build a partition from its cells

        :raises DimensionError: if the cells are not disjoint, or do not cover ``1..n``
        """
        cell_of = [0] * n
        for i, cell in enumerate(cells, start=1):
            for v in cell:
                if not 1 <= v <= n:
                    raise DimensionError(f'element {v} outside [1..{n}]')
                if cell_of[v - 1]:
                    raise DimensionError(f'element {v} appears in two cells')
                cell_of[v - 1] = i
        if 0 in cell_of:
            raise DimensionError(f'element {cell_of.index(0) + 1} is in no cell')
        return cls(cell_of)

    @classmethod
    def one_cell(cls, n: int) -> Partition:
        return cls([1] * n)

    @classmethod
    def singletons(cls, n: int) -> Partition:
        return cls(range(n))

    @property
    def n_elements(self) -> int:
        return len(self.cell_of)

    def cells(self) -> List[Tuple[int, ...]]:
        """Cells in canonical order, each sorted"""
        cells: List[List[int]] = [[] for _ in range(self.k)]
        for v, c in enumerate(self.cell_of, start=1):
            cells[c - 1].append(v)
        return [tuple(cell) for cell in cells]

    def cell(self, v: int) -> Tuple[int, ...]:
        """The cell containing ``v``"""
        return self.cells()[self.cell_of[v - 1] - 1]

    def is_singletons(self) -> bool:
        """True for the finest partition, where every element is alone in its cell"""
        return self.k == self.n_elements

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.cell_of == other.cell_of

    def __hash__(self):
        return hash(self.cell_of)

    def __str__(self):
        return '{' + ', '.join('{' + ','.join(str(v) for v in cell) + '}' for cell in self.cells()) + '}'

    def __repr__(self):
        return f'Partition.from_cells({[list(c) for c in self.cells()]}, {self.n_elements})'


def _check_sizes(p1: Partition, p2: Partition):
    if p1.n_elements != p2.n_elements:
        raise DimensionError(f'partitions of {p1.n_elements} and {p2.n_elements} elements')


def to_characteristic(p: Partition) -> LogicalMatrix:
    """The k x n logical matrix whose column ``v`` is δ_k^{cell of v}, i.e. the transposed characteristic matrix"""
    return LogicalMatrix(p.k, p.cell_of)


def from_characteristic(m: LogicalMatrix) -> Partition:
    """Group the columns of a logical matrix by equality"""
    return Partition(m.col_index)


def is_finer(p1: Partition, p2: Partition) -> bool:
    """True if every cell of ``p1`` lies inside a cell of ``p2``"""
    _check_sizes(p1, p2)
    image: Dict[int, int] = {}
    for c1, c2 in zip(p1.cell_of, p2.cell_of):
        if image.setdefault(c1, c2) != c2:
            return False
    return True


def join(p1: Partition, p2: Partition) -> Partition:
    """Coarsest common refinement: two elements share a cell iff they share a cell in both"""
    _check_sizes(p1, p2)
    return Partition(zip(p1.cell_of, p2.cell_of))


def join_all(partitions: Iterable[Partition]) -> Partition:
    return functools.reduce(join, partitions)


def meet(p1: Partition, p2: Partition) -> Partition:
    """Finest common coarsening: the connected components of the cell overlap relation"""
    _check_sizes(p1, p2)
    groups = UnionFind()
    for c1, c2 in zip(p1.cell_of, p2.cell_of):
        groups.union((1, c1), (2, c2))
    return Partition(groups[(1, c1)] for c1 in p1.cell_of)


def _as_weighted(g: Union[Stg, WeightedDigraph]) -> WeightedDigraph:
    return WeightedDigraph.from_stg(g) if isinstance(g, Stg) else g


def _weights_into_cells(g: WeightedDigraph, p: Partition) -> List[Dict[int, int]]:
    weights: List[Dict[int, int]] = [{} for _ in g.vertices()]
    for (tail, head), w in g.weights.items():
        into = weights[tail - 1]
        cell = p.cell_of[head - 1]
        into[cell] = into.get(cell, 0) + w
    return weights


def is_equitable(g: Union[Stg, WeightedDigraph], p: Partition) -> bool:
    """
    True if, for every pair of cells, all members of the first send the same total weight into the second

    :raises DimensionError: if ``p`` does not partition the vertices of ``g``
    """
    if p.n_elements != g.n_vertices:
        raise DimensionError(f'partition of {p.n_elements} elements for a graph of {g.n_vertices} vertices')
    if isinstance(g, Stg):
        image: Dict[int, int] = {}
        for v in g.vertices():
            if image.setdefault(p.cell_of[v - 1], p.cell_of[g.successor(v) - 1]) != p.cell_of[g.successor(v) - 1]:
                return False
        return True

    profile: Dict[int, Dict[int, int]] = {}
    for v, into in enumerate(_weights_into_cells(g, p), start=1):
        if profile.setdefault(p.cell_of[v - 1], into) != into:
            return False
    return True


def quotient(g: Union[Stg, WeightedDigraph], p: Partition) -> Tuple[WeightedDigraph, np.ndarray]:
    """
    Quotient digraph of an equitable partition

    Cell ``i`` has an edge to cell ``j`` weighted by the total weight any member of ``i`` sends into ``j``.

    :return: the quotient and its adjacency matrix ``H``, which satisfies ``Pᵀ A = H Pᵀ``
    :raises NotEquitableError: if ``p`` is not equitable on ``g``
    """
    if not is_equitable(g, p):
        raise NotEquitableError(f'partition {p} is not equitable')
    weighted = _as_weighted(g)
    into = _weights_into_cells(weighted, p)
    representatives = [cell[0] for cell in p.cells()]

    edges = [(i, j, w) for i, rep in enumerate(representatives, start=1) for j, w in into[rep - 1].items()]
    labels = [frozenset().union(*(weighted.labels[v - 1] for v in cell)) for cell in p.cells()]
    q = WeightedDigraph(p.k, edges, labels)
    return q, q.adjacency()


def quotient_matrix(g: Stg, p: Partition) -> LogicalMatrix:
    """
    Transition matrix of the quotient of a state transition graph, as a logical matrix

    :raises NotEquitableError: if ``p`` is not equitable on ``g``
    """
    if not is_equitable(g, p):
        raise NotEquitableError(f'partition {p} is not equitable')
    return LogicalMatrix(p.k, tuple(p.cell_of[g.successor(cell[0]) - 1] for cell in p.cells()))


def partition_from_subset(c: Iterable[int], *, n: int) -> Partition:
    """
    The partition ``{c, complement}``; the one-cell partition when ``c`` is empty or everything

    :raises DimensionError: if ``c`` holds an element outside ``1..n``
    """
    c = frozenset(c)
    for v in c:
        if not 1 <= v <= n:
            raise DimensionError(f'element {v} outside [1..{n}]')
    return Partition(v in c for v in range(1, n + 1))


def compose(p: Partition, block_of: Sequence[int]) -> Partition:
    """
    Lift a partition of blocks back to the elements the blocks were made of

    :param p: partition of ``1..k``
    :param block_of: block number in ``1..k`` of every original element
    :return: the partition putting two elements together iff their blocks share a cell of ``p``
    """
    if max(block_of) > p.n_elements:
        raise DimensionError(f'block {max(block_of)} outside a partition of {p.n_elements} elements')
    return Partition(p.cell_of[b - 1] for b in block_of)


def to_json(p: Partition) -> dict:
    return {'n': p.n_elements, 'cells': [list(c) for c in p.cells()]}


def from_json(obj: Mapping) -> Partition:
    return Partition.from_cells(obj['cells'], obj['n'])
