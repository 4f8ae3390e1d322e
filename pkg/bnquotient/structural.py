"""
Structural computation of the coarsest equitable partition generated by a vertex set,
by case analysis on the shape of a connected state transition graph.

Every step either shrinks a congruence whose blocks are known to lie inside cells of the
answer, or splits the vertex set into parts that are unions of cells and joins the answers
for the parts. Steps go on a worklist rather than the call stack: each pending part remembers
which of its vertices every original vertex was merged into, and the answer is the join of the
finished parts lifted back with :py:func:`partition.compose`.
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
from typing import Callable, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from bnquotient.errors import DimensionError, DisconnectedGraphError, EnginePreconditionError
from bnquotient.partition import Partition, compose, join
from bnquotient.stg import Stg, components, cycle_of, in_layers, in_neighbors, n_in_infinity, shrink_stg

logger = logging.getLogger(__name__)

VertexSet = FrozenSet[int]


class _Part(NamedTuple):
    """A pending subproblem: the partition generated by ``c0`` on ``g``, solved by ``step``"""

    g: Stg
    c0: VertexSet
    step: Step
    block_of: Optional[Tuple[int, ...]] = None
    """Vertex of ``g`` holding each vertex of the graph this part came from, or None for the same vertices"""


Outcome = Union[Partition, List[_Part]]
Step = Callable[[Stg, VertexSet], Outcome]


def divisors(l: int) -> List[int]:
    """Divisors of ``l`` in increasing order"""
    return [q for q in range(1, l + 1) if l % q == 0]


def _check_connected(g: Stg):
    found = components(g)
    if len(found) > 1:
        raise DisconnectedGraphError(len(found))


def _checked_set(g: Stg, c0: Iterable[int]) -> VertexSet:
    c0 = frozenset(c0)
    for v in c0:
        if not 1 <= v <= g.n_vertices:
            raise DimensionError(f'vertex {v} outside [1..{g.n_vertices}]')
    return c0


def _run(g: Stg, parts: Iterable[_Part]) -> Partition:
    """Work through ``parts`` and everything they split into, joining the finished partitions"""
    result = Partition.one_cell(g.n_vertices)
    identity = tuple(g.vertices())
    work = [(part, identity) for part in parts]
    while work:
        part, label = work.pop()
        outcome = part.step(part.g, part.c0)
        if isinstance(outcome, Partition):
            result = join(result, compose(outcome, label))
            continue
        for sub in outcome:
            work.append((sub, label if sub.block_of is None else tuple(sub.block_of[v - 1] for v in label)))
    return result


def _cycle(g: Stg) -> List[int]:
    return cycle_of(g, (1,))


def _shrink(g: Stg, blocks: Iterable[Iterable[int]]) -> Tuple[Stg, Tuple[int, ...]]:
    """Merge each block into one vertex. Blocks must be disjoint and together form a congruence."""
    label = list(g.vertices())
    for block in blocks:
        anchor = min(block)
        for v in block:
            label[v - 1] = anchor
    block_of = Partition(label).cell_of
    shrunk = shrink_stg(g, block_of)
    logger.debug('shrunk %d vertices to %d', g.n_vertices, shrunk.n_vertices)
    return shrunk, block_of


def _image(block_of: Sequence[int], vertices: Iterable[int]) -> VertexSet:
    return frozenset(block_of[v - 1] for v in vertices)


def _lifted(g: Stg, blocks: Iterable[Iterable[int]], c0: VertexSet, step: Step) -> _Part:
    shrunk, block_of = _shrink(g, blocks)
    return _Part(shrunk, _image(block_of, c0), step, block_of)


def _period(cycle: Sequence[int], c0: VertexSet) -> int:
    """Smallest q dividing the cycle length such that membership in ``c0`` repeats every q steps"""
    marks = [v in c0 for v in cycle]
    l = len(cycle)
    for q in divisors(l):
        if all(marks[i] == marks[i % q] for i in range(l)):
            return q
    return l


def _residue_blocks(cycle: Sequence[int], q: int) -> List[List[int]]:
    return [list(cycle[i::q]) for i in range(q)]


def _dispatch(g: Stg, c0: VertexSet) -> Outcome:
    if not c0 or len(c0) == g.n_vertices:
        return Partition.one_cell(g.n_vertices)
    cycle = _cycle(g)
    if len(cycle) == 1:
        return _partition1(g, c0)
    if c0 <= frozenset(cycle):
        return _partition2(g, c0, cycle)
    return _partition3(g, c0, cycle)


def _partition1(g: Stg, c0: VertexSet) -> Outcome:
    n = g.n_vertices
    if not c0 or len(c0) == n:
        return Partition.one_cell(n)
    root = _cycle(g)[0]
    unreaching = n_in_infinity(g, c0)

    if len(c0) == 1:
        # cells are the distance layers to the single vertex, plus the vertices that never reach it
        (target,) = c0
        labels = [0] * n
        for d, layer in enumerate(in_layers(g, target), start=1):
            for v in layer:
                labels[v - 1] = d
        logger.debug('partition1: single vertex %d, %d vertices never reach it', target, len(unreaching))
        return Partition(labels)

    if not unreaching:
        # the root is in c0, and so are the in-neighbours merged with it
        adjacent = (in_neighbors(g, root) - {root}) & c0
        if adjacent:
            logger.debug('partition1: merging root %d with %d in-neighbours', root, len(adjacent))
            return [_lifted(g, [adjacent | {root}], c0, _partition1)]
        logger.debug('partition1: root %d is a cell by itself', root)
        return [_Part(g, c0 - {root}, _partition1), _Part(g, frozenset((root,)), _partition1)]

    entering = frozenset(u for v in unreaching for u in g.predecessors[v - 1] if u not in unreaching)
    shrunk, block_of = _shrink(g, [unreaching])
    if entering == c0:
        logger.debug('partition1: every vertex of the set leaves it for good')
        return [_Part(shrunk, _image(block_of, unreaching), _partition1, block_of)]
    logger.debug('partition1: splitting off %d vertices that leave the set for good', len(entering))
    return [_Part(shrunk, _image(block_of, c0 - entering), _partition1, block_of),
            _Part(shrunk, _image(block_of, entering), _partition1, block_of)]


def _partition2(g: Stg, c0: VertexSet, cycle: List[int]) -> Outcome:
    n = g.n_vertices
    l = len(cycle)
    if not c0 or len(c0) == n:
        return Partition.one_cell(n)
    if l == 1:
        return _partition1(g, c0)

    # on the cycle alone, the cells generated by c0 are the residues modulo its period
    q = _period(cycle, c0)
    if n == l:
        if q == l:
            return Partition.singletons(n)
        logger.debug('partition2: %d-cycle folds onto a %d-cycle', l, q)
        return [_lifted(g, _residue_blocks(cycle, q), c0, _dispatch)]

    if len(c0) == 1:
        (v,) = c0
        succ = list(g.succ)
        succ[v - 1] = v
        logger.debug('partition2: replacing the out-edge of %d by a loop', v)
        return [_Part(Stg(succ), c0, _partition1)]

    if q < l:
        logger.debug('partition2: cycle folds into %d cells', q)
        return [_lifted(g, _residue_blocks(cycle, q), c0, _dispatch)]

    logger.debug('partition2: every vertex of the set is a cell, joining %d parts', len(c0))
    return [_Part(g, frozenset((v,)), _dispatch) for v in sorted(c0)]
def _last_marked(g: Stg, off_cycle: VertexSet, cycle_set: VertexSet) -> List[int]:
    """Vertices of ``off_cycle`` whose forward path meets no other vertex of ``off_cycle``"""
    last = []
    for u in sorted(off_cycle):
        w = g.successor(u)
        while w not in cycle_set and w not in off_cycle:
            w = g.successor(w)
        if w in cycle_set:
            last.append(u)
    return last


def _cycle_partner(g: Stg, u: int, on_cycle: VertexSet, cycle: List[int]) -> Optional[Tuple[List[int], int]]:
    """
    The cycle vertex whose output sequence matches that of the off-cycle vertex ``u``, if there is one

    :return: the path from ``u`` up to the cycle, and the position of the partner on the cycle
    """
    cycle_set = frozenset(cycle)
    l = len(cycle)
    path = []
    w = u
    while w not in cycle_set:
        path.append(w)
        w = g.successor(w)
    d = len(path)
    if d > l:
        return None
    start = (cycle.index(w) - d) % l
    if cycle[start] not in on_cycle:
        return None
    if any(cycle[(start + k) % l] in on_cycle for k in range(1, d)):
        return None
    return path, start


def _partition3(g: Stg, c0: VertexSet, cycle: List[int]) -> Outcome:
    cycle_set = frozenset(cycle)
    on_cycle = c0 & cycle_set
    off_cycle = c0 - cycle_set
    l = len(cycle)

    if not on_cycle:
        unreaching = n_in_infinity(g, c0)
        logger.debug('partition3: collapsing the %d vertices that never reach the set', len(unreaching))
        return [_lifted(g, [unreaching], c0, _dispatch)]

    if len(on_cycle) >= 2:
        q = _period(cycle, on_cycle)
        if q < l:
            logger.debug('partition3: %d-cycle folds onto a %d-cycle', l, q)
            return [_lifted(g, _residue_blocks(cycle, q), c0, _dispatch)]

    for u in _last_marked(g, off_cycle, cycle_set):
        partner = _cycle_partner(g, u, on_cycle, cycle)
        if partner is not None:
            path, start = partner
            blocks = [[w, cycle[(start + i) % l]] for i, w in enumerate(path)]
            logger.debug('partition3: %d shares its cell with cycle vertex %d', u, cycle[start])
            return [_lifted(g, blocks, c0, _dispatch)]

    logger.debug('partition3: cycle and off-cycle parts are unions of cells')
    return [_Part(g, on_cycle, _dispatch), _Part(g, off_cycle, _dispatch)]


def partition1(g: Stg, c0: Iterable[int]) -> Partition:
    """
    Coarsest equitable partition generated by ``c0`` on a connected graph whose cycle is a loop

    :raises DisconnectedGraphError: if ``g`` is not connected
    :raises EnginePreconditionError: if the cycle of ``g`` is longer than a loop
    """
    c0 = _checked_set(g, c0)
    _check_connected(g)
    if len(_cycle(g)) != 1:
        raise EnginePreconditionError('partition1 requires the cycle of the STG to be a loop')
    return _run(g, [_Part(g, c0, _partition1)])


def partition2(g: Stg, c0: Iterable[int]) -> Partition:
    """
    Coarsest equitable partition generated by a set ``c0`` of cycle vertices on a connected graph

    :raises DisconnectedGraphError: if ``g`` is not connected
    :raises EnginePreconditionError: if ``c0`` has a vertex off the cycle
    """
    c0 = _checked_set(g, c0)
    _check_connected(g)
    cycle = _cycle(g)
    if not c0 <= frozenset(cycle):
        raise EnginePreconditionError('partition2 requires every vertex of the set to lie on the cycle')
    return _run(g, [_Part(g, c0, _dispatch)])


def partition3(g: Stg, c0: Iterable[int]) -> Partition:
    """
    Coarsest equitable partition generated by any vertex set on a connected graph.
    Sets inside the cycle are handed to :py:func:`partition2`, loops to :py:func:`partition1`.

    :raises DisconnectedGraphError: if ``g`` is not connected
    """
    c0 = _checked_set(g, c0)
    _check_connected(g)
    return _run(g, [_Part(g, c0, _dispatch)])


def structural_refinement(g: Stg, p0: Partition) -> Partition:
    """
    Coarsest equitable refinement of any partition, as the join of the partitions generated by its cells

    :raises DisconnectedGraphError: if ``g`` is not connected
    """
    if p0.n_elements != g.n_vertices:
        raise DimensionError(f'partition of {p0.n_elements} elements for a graph of {g.n_vertices} vertices')
    _check_connected(g)
    if p0.k == 1:
        return p0
    return _run(g, [_Part(g, frozenset(cell), _dispatch) for cell in p0.cells()])
