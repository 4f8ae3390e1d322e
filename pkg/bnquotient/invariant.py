"""
Invariant dual subspaces of a Boolean network and the equivalent coarsest equitable
partitions of its state transition graph.

Three engines compute the same answer: the algebraic one grows the Khatri-Rao stack
``G0 * G0M * G0M^2 * ...`` until its rank stops growing, the refinement one splits cells by the
cell of their successors, and the structural one (see :py:mod:`bnquotient.structural`) works
through the shape of the graph.
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
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from bnquotient.errors import DimensionError, EngineMismatchError
from bnquotient.network import BoolExpr, structure_matrix_of
from bnquotient.partition import Partition, join, to_characteristic
from bnquotient.stg import Stg, components, stg_from_matrix, to_matrix
from bnquotient.stp import LogicalMatrix
from bnquotient.structural import divisors, structural_refinement

logger = logging.getLogger(__name__)

STRUCTURAL_VERTEX_LIMIT = 1024
"""Largest graph the structural engine joins by default in :py:func:`cross_check`"""


def dense_rank(keys: np.ndarray) -> np.ndarray:
    """1-based rank of every key among the distinct keys, in increasing order"""
    _, inverse = np.unique(keys, return_inverse=True)
    return inverse.reshape(-1).astype(np.int64) + 1


def pair_rank(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Ranks of the pairs ``(a, b)`` in lexicographic order, i.e. the compacted Khatri-Rao numbering"""
    return dense_rank(a * (int(b.max()) + 1) + b)


def _sequence_labels(succ: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, int]:
    """
    Label states by their value sequences ``(g(x), g(Mx), g(M²x), ...)`` until the number of labels stops growing

    :param succ: 0-based successor of every state
    :param values: value of every state
    :return: the labels, numbered in lexicographic order of the sequences,
        and the number of extensions that added labels
    """
    g1 = dense_rank(values)
    g2 = g1[succ]
    rank = int(g1.max())
    k = 0
    while True:
        combined = pair_rank(g1, g2)
        grown = int(combined.max())
        logger.debug('step %d: rank %d -> %d', k, rank, grown)
        if grown == rank:
            return g1, k
        g1, rank = combined, grown
        g2 = g2[succ]
        k += 1


@dataclass(frozen=True)
class DualSubspace:
    """
    The dual subspace generated by some functions of the state, given by the logical matrix ``G``
    whose column ``x`` is the joint value of the functions at state ``x``
    """

    structure: LogicalMatrix

    @property
    def n_states(self) -> int:
        return self.structure.cols

    @property
    def partition(self) -> Partition:
        return partition_of_dual(self.structure)

    @classmethod
    def from_subset(cls, c: Iterable[int], n_states: int) -> DualSubspace:
        """The indicator of ``c``: δ2^1 on members and δ2^2 elsewhere"""
        c = frozenset(c)
        for v in c:
            if not 1 <= v <= n_states:
                raise DimensionError(f'state {v} outside [1..{n_states}]')
        return cls(LogicalMatrix(2, tuple(1 if v in c else 2 for v in range(1, n_states + 1))))

    @classmethod
    def from_function(cls, e: BoolExpr, var_names: Sequence[str]) -> DualSubspace:
        return cls(structure_matrix_of(e, var_names))

    @classmethod
    def from_partition(cls, p: Partition) -> DualSubspace:
        return cls(to_characteristic(p))

    @classmethod
    def from_functions(cls, structures: Sequence[LogicalMatrix]) -> DualSubspace:
        """
        Several functions at once. The result is the Khatri-Rao product of their structure matrices
        with unused rows dropped, which induces the join of their partitions.
        """
        if not structures:
            raise DimensionError('need at least one function')
        labels = np.array(structures[0].col_index, dtype=np.int64)
        for s in structures[1:]:
            if s.cols != structures[0].cols:
                raise DimensionError(f'functions over {structures[0].cols} and {s.cols} states')
            labels = pair_rank(labels, np.array(s.col_index, dtype=np.int64))
        labels = dense_rank(labels)
        return cls(LogicalMatrix(int(labels.max()), tuple(labels.tolist())))


@dataclass(frozen=True)
class InvariantResult:
    """The smallest invariant dual subspace containing a given one"""

    partition: Partition
    """Cells of the subspace: the coarsest equitable refinement of the starting partition"""

    structure: LogicalMatrix
    """Generator ``G`` of the subspace, rows numbered by the value sequences of the starting functions"""

    quotient_h: LogicalMatrix
    """The ``H`` with ``GM = HG``: the transition matrix of the quotient graph"""

    iterations: Optional[int]
    """How many times the Khatri-Rao stack grew before its rank settled; None for unions"""

    @property
    def dual_dim(self) -> int:
        return self.partition.k

    def to_json(self) -> dict:
        return {
            'cells': [list(c) for c in self.partition.cells()],
            'H': str(self.quotient_h),
            'k': self.iterations,
            'dual_dim': self.dual_dim,
        }


def partition_of_dual(g_struct: LogicalMatrix) -> Partition:
    """States share a cell iff their columns in ``g_struct`` are equal"""
    return Partition(g_struct.col_index)


def is_invariant(m: LogicalMatrix, g_struct: LogicalMatrix) -> Optional[LogicalMatrix]:
    """
    Find the logical ``H`` with ``GM = HG``

    Rows of ``G`` that no state uses are mapped to themselves.

    :param m: square transition matrix
    :param g_struct: the generator ``G``
    :return: ``H``, or None when the subspace is not invariant
    :raises DimensionError: if the sizes do not fit
    """
    if m.rows != m.cols:
        raise DimensionError(f'transition matrix must be square, got {m.rows}x{m.cols}')
    if g_struct.cols != m.cols:
        raise DimensionError(f'generator has {g_struct.cols} columns for {m.cols} states')
    h = list(range(1, g_struct.rows + 1))
    assigned = [False] * g_struct.rows
    for x, row in enumerate(g_struct.col_index, start=1):
        image = g_struct.col_index[m.col_index[x - 1] - 1]
        if assigned[row - 1] and h[row - 1] != image:
            return None
        h[row - 1] = image
        assigned[row - 1] = True
    return LogicalMatrix(g_struct.rows, tuple(h))


def _as_graph(m: Union[Stg, LogicalMatrix]) -> Tuple[Stg, LogicalMatrix]:
    if isinstance(m, Stg):
        return m, to_matrix(m)
    return stg_from_matrix(m), m


def _as_structure(p0: Union[Partition, LogicalMatrix, DualSubspace]) -> LogicalMatrix:
    if isinstance(p0, DualSubspace):
        return p0.structure
    if isinstance(p0, Partition):
        return to_characteristic(p0)
    return p0


def _finish(g: Stg, m: LogicalMatrix, g0: LogicalMatrix, partition: Partition) -> InvariantResult:
    """Number the cells of a finished partition by their value sequences, and read off ``H``"""
    cells = partition.cells()
    succ = np.array([partition.cell_of[g.successor(cell[0]) - 1] - 1 for cell in cells], dtype=np.int64)
    values = np.array([g0.col_index[cell[0] - 1] for cell in cells], dtype=np.int64)
    order, k = _sequence_labels(succ, values)
    structure = LogicalMatrix(int(order.max()), tuple(int(order[c - 1]) for c in partition.cell_of))
    h = is_invariant(m, structure)
    if h is None:
        raise EngineMismatchError(f'partition {partition} is not equitable')
    return InvariantResult(partition, structure, h, k)


def _check_columns(g: Stg, g0: LogicalMatrix):
    if g0.cols != g.n_vertices:
        raise DimensionError(f'generator has {g0.cols} columns for {g.n_vertices} states')


def smallest_invariant_algebraic(m: Union[LogicalMatrix, Stg],
                                 g0: Union[LogicalMatrix, DualSubspace, Partition]) -> InvariantResult:
    """
    Smallest invariant dual subspace containing the one generated by ``g0``.

    Starting from ``G1 = G0`` and ``G2 = G0M``, replace ``G1`` by ``G1 * G2`` and ``G2`` by ``G2M`` for as
    long as the rank of ``G1`` grows. ``G1`` is kept as a vector of row numbers rather than as a matrix.

    :param m: transition matrix or state transition graph
    :param g0: generator of the starting subspace
    """
    g, m = _as_graph(m)
    g0 = _as_structure(g0)
    _check_columns(g, g0)
    succ = np.array(m.col_index, dtype=np.int64) - 1
    labels, k = _sequence_labels(succ, np.array(g0.col_index, dtype=np.int64))
    structure = LogicalMatrix(int(labels.max()), tuple(labels.tolist()))
    h = is_invariant(m, structure)
    logger.info('algebraic engine: %d cells after %d steps', structure.rows, k)
    return InvariantResult(partition_of_dual(structure), structure, h, k)


def _refine(g: Stg, cell_of: Sequence[int]) -> Tuple[List[int], int]:
    """Split cells by the cells of successors, Hopcroft style, until every cell maps into one cell"""
    cell_of = list(cell_of)
    members: Dict[int, set] = {}
    for v in g.vertices():
        members.setdefault(cell_of[v - 1], set()).add(v)
    next_id = max(members) + 1
    pending = deque(sorted(members))
    splits = 0

    while pending:
        splitter = pending.popleft()
        touched: Dict[int, set] = {}
        for v in list(members[splitter]):
            for u in g.predecessors[v - 1]:
                touched.setdefault(cell_of[u - 1], set()).add(u)

        for c, hit in sorted(touched.items()):
            if len(hit) == len(members[c]):
                continue
            rest = members[c] - hit
            small, large = (hit, rest) if len(hit) <= len(rest) else (rest, hit)
            members[c] = large
            members[next_id] = small
            for u in small:
                cell_of[u - 1] = next_id
            pending.append(next_id)
            next_id += 1
            splits += 1

    return cell_of, splits


def coarsest_equitable_refinement(g: Union[Stg, LogicalMatrix],
                                  p0: Union[Partition, LogicalMatrix, DualSubspace]) -> InvariantResult:
    """
    Coarsest equitable partition finer than ``p0``, found by splitting cells until each one maps
    into a single cell

    :param g: state transition graph or transition matrix
    :param p0: starting partition, or a generator whose partition to start from
    """
    g, m = _as_graph(g)
    g0 = _as_structure(p0)
    _check_columns(g, g0)
    cell_of, splits = _refine(g, g0.col_index)
    logger.info('refinement engine: %d splits', splits)
    return _finish(g, m, g0, Partition(cell_of))


def smallest_invariant_structural(g: Union[Stg, LogicalMatrix],
                                  p0: Union[Partition, LogicalMatrix, DualSubspace]) -> InvariantResult:
    """
    The structural engine behind the same interface as the others. Only connected graphs are supported.

    :raises DisconnectedGraphError: if the graph is not connected
    """
    g, m = _as_graph(g)
    g0 = _as_structure(p0)
    _check_columns(g, g0)
    partition = structural_refinement(g, partition_of_dual(g0))
    logger.info('structural engine: %d cells', partition.k)
    return _finish(g, m, g0, partition)


ENGINES: Dict[str, Callable[..., InvariantResult]] = {
    'algebraic': smallest_invariant_algebraic,
    'refine': coarsest_equitable_refinement,
    'structural': smallest_invariant_structural,
}


def smallest_invariant(g: Union[Stg, LogicalMatrix], p0: Union[Partition, LogicalMatrix, DualSubspace],
                       engine: str = 'refine') -> InvariantResult:
    """
    Run one engine by name

    :raises KeyError: for an unknown engine name
    """
    try:
        solve = ENGINES[engine]
    except KeyError:
        raise KeyError(f'unknown engine {engine!r}, expected one of {", ".join(ENGINES)}') from None
    return solve(g, p0)


def smallest_invariant_for_functions(g: Union[Stg, LogicalMatrix], structures: Sequence[LogicalMatrix],
                                     engine: str = 'refine') -> InvariantResult:
    """Smallest invariant dual subspace containing several functions, found with a single run"""
    return smallest_invariant(g, DualSubspace.from_functions(structures), engine)


def cross_check(g: Union[Stg, LogicalMatrix], p0: Union[Partition, LogicalMatrix, DualSubspace],
                engines: Optional[Iterable[str]] = None) -> Dict[str, InvariantResult]:
    """
    Run several engines side by side and make sure they agree

    Unless engines are named, the structural engine is left out for disconnected graphs
    and for graphs with more than :py:data:`STRUCTURAL_VERTEX_LIMIT` vertices.

    :return: the result of each engine that ran
    :raises EngineMismatchError: if two engines disagree
    """
    g, _ = _as_graph(g)
    if engines is None:
        engines = list(ENGINES)
        if len(components(g)) > 1:
            logger.info('graph is disconnected, leaving out the structural engine')
            engines.remove('structural')
        elif g.n_vertices > STRUCTURAL_VERTEX_LIMIT:
            logger.info('graph has %d vertices, leaving out the structural engine', g.n_vertices)
            engines.remove('structural')
    engines = list(engines)

    with ThreadPoolExecutor(max_workers=len(engines)) as pool:
        futures = {name: pool.submit(smallest_invariant, g, p0, name) for name in engines}
        results = {name: future.result() for name, future in futures.items()}

    first, *others = engines
    for name in others:
        if results[name].partition != results[first].partition:
            raise EngineMismatchError(f'{first} engine found {results[first].partition}, '
                                      f'{name} engine found {results[name].partition}')
    return results


def cycle_equitable_partitions(l: int) -> List[Partition]:
    """
    Every equitable partition of the directed ``l``-cycle ``1 -> 2 -> ... -> l -> 1``: one for each
    divisor ``q`` of ``l``, grouping vertices by their distance to vertex 1 modulo ``q``
    """
    if l < 1:
        raise DimensionError(f'cycle length must be positive, got {l}')
    return [Partition((l - i) % l % q for i in range(l)) for q in divisors(l)]


def union_invariant(r1: InvariantResult, r2: InvariantResult) -> InvariantResult:
    """
    Smallest subspace containing two invariant ones. Its generator is ``G1 * G2`` and its ``H`` is
    ``H1 ⊗ H2``, both with unused rows dropped.

    :raises DimensionError: if the results are over different state counts
    """
    if r1.structure.cols != r2.structure.cols:
        raise DimensionError(f'results over {r1.structure.cols} and {r2.structure.cols} states')
    a = np.array(r1.structure.col_index, dtype=np.int64)
    b = np.array(r2.structure.col_index, dtype=np.int64)
    labels = pair_rank(a, b)

    # row of each used pair, and where H1 ⊗ H2 sends it
    row_of: Dict[Tuple[int, int], int] = {}
    for i, j, label in zip(a.tolist(), b.tolist(), labels.tolist()):
        row_of[(i, j)] = label
    h = [0] * len(row_of)
    for (i, j), label in row_of.items():
        h[label - 1] = row_of[(r1.quotient_h[i], r2.quotient_h[j])]

    structure = LogicalMatrix(len(row_of), tuple(labels.tolist()))
    return InvariantResult(join(r1.partition, r2.partition), structure, LogicalMatrix(len(h), tuple(h)), None)
