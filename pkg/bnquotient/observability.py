"""
Observability of Boolean networks with outputs.

Two states are indistinguishable when they produce the same output sequence. The classes of
indistinguishable states are the cells of the smallest invariant dual subspace containing the
output functions, so every engine in :py:mod:`bnquotient.invariant` answers observability questions.
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

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from bnquotient.errors import DimensionError
from bnquotient.invariant import coarsest_equitable_refinement, dense_rank, pair_rank, smallest_invariant
from bnquotient.network import BooleanNetwork, output_matrix, transition_matrix
from bnquotient.partition import Partition
from bnquotient.stg import Stg, components, cycle_of, stg_from_matrix, to_matrix
from bnquotient.stp import LogicalMatrix, identity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ObservedBn:
    """A network in algebraic form, ``x(t+1) = M x(t)`` and ``y(t) = E x(t)``"""

    m: LogicalMatrix
    """Square transition matrix"""

    e: LogicalMatrix
    """Output matrix; its row count is the size of the output alphabet"""

    def __post_init__(self):
        if self.m.rows != self.m.cols:
            raise DimensionError(f'transition matrix must be square, got {self.m.rows}x{self.m.cols}')
        if self.e.cols != self.m.cols:
            raise DimensionError(f'output matrix has {self.e.cols} columns for {self.m.cols} states')

    @property
    def n_states(self) -> int:
        return self.m.cols

    @property
    def stg(self) -> Stg:
        return stg_from_matrix(self.m)

    @classmethod
    def from_network(cls, net: BooleanNetwork) -> ObservedBn:
        """
        :raises BnSemanticError: if the network has no outputs
        """
        return cls(transition_matrix(net), output_matrix(net))

    @classmethod
    def from_stg(cls, g: Stg, out: Sequence[int]) -> ObservedBn:
        """A graph with the output symbol of every state"""
        return cls(to_matrix(g), LogicalMatrix(max(out), tuple(out)))


@dataclass(frozen=True)
class ObservabilityReport:
    index_r0: int
    """Number of outputs after which further outputs tell no states apart"""

    observable: bool

    classes: Partition
    """Classes of mutually indistinguishable states"""

    quotient_h: LogicalMatrix
    """Transition matrix of the quotient by the classes"""

    def to_json(self) -> dict:
        return {
            'r0': self.index_r0,
            'observable': self.observable,
            'classes': [list(c) for c in self.classes.cells()],
            'H': str(self.quotient_h),
        }


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of :py:func:`check_observability_conditions`"""

    holds: bool

    condition: Optional[str] = None
    """Which condition failed: ``loop``, ``cycle``, ``components`` or ``in-neighbours``"""

    vertex: Optional[int] = None
    """The loop vertex, or the vertex whose in-neighbours clash"""

    pair: Optional[Tuple[int, int]] = None
    """Two vertices that should be told apart but are not"""

    notes: List[str] = field(default_factory=list)

    def __str__(self):
        if self.holds:
            return 'conditions hold'
        first, second = self.pair
        return f'{self.condition} condition fails at vertex {self.vertex}: {first} and {second} share a cell'


def observability_matrix(bn: ObservedBn, r: int) -> LogicalMatrix:
    """
    The stack ``E * EM * ... * EM^{r-1}`` of the first r outputs, with unused rows dropped and rows kept in
    Khatri-Rao order. For ``r = 1`` this is ``E`` itself.

    :raises DimensionError: if ``r < 1``
    """
    if r < 1:
        raise DimensionError(f'observability matrix needs r >= 1, got {r}')
    if r == 1:
        return bn.e
    succ = np.array(bn.m.col_index, dtype=np.int64) - 1
    values = dense_rank(np.array(bn.e.col_index, dtype=np.int64))
    labels = values
    ahead = values
    for _ in range(r - 1):
        ahead = ahead[succ]
        labels = pair_rank(labels, ahead)
    return LogicalMatrix(int(labels.max()), tuple(labels.tolist()))


def analyze(bn: ObservedBn, engine: str = 'refine') -> ObservabilityReport:
    """Full observability report, with the classes computed by the chosen invariant engine"""
    result = smallest_invariant(bn.m, bn.e, engine)
    logger.info('%d states in %d classes', bn.n_states, result.partition.k)
    return ObservabilityReport(index_r0=result.iterations + 1,
                               observable=result.partition.is_singletons(),
                               classes=result.partition,
                               quotient_h=result.quotient_h)


def observability_index(bn: ObservedBn) -> int:
    """The smallest r at which adding the (r+1)-th output no longer splits any class"""
    return smallest_invariant(bn.m, bn.e, 'algebraic').iterations + 1


def unobservable_partition(bn: ObservedBn) -> Partition:
    """Classes of indistinguishable states"""
    return coarsest_equitable_refinement(bn.stg, bn.e).partition


def is_observable(bn: ObservedBn) -> bool:
    """True if no two columns of the observability matrix at the observability index are equal"""
    o = observability_matrix(bn, observability_index(bn))
    return len(set(o.col_index)) == bn.n_states


def distinguishable(bn: ObservedBn, x0: int, x1: int) -> bool:
    """
    True if the two states give different output sequences. A state is never distinguishable from itself.

    :raises DimensionError: for a state out of range
    """
    for x in (x0, x1):
        if not 1 <= x <= bn.n_states:
            raise DimensionError(f'state {x} outside [1..{bn.n_states}]')
    if x0 == x1:
        return False
    o = observability_matrix(bn, observability_index(bn))
    return o[x0] != o[x1]


def _clash(vertices: Sequence[int], p: Partition) -> Optional[Tuple[int, int]]:
    seen = {}
    for v in vertices:
        cell = p.cell_of[v - 1]
        if cell in seen:
            return seen[cell], v
        seen[cell] = v
    return None


def check_observability_conditions(bn: ObservedBn) -> Tuple[bool, ConditionReport]:
    """
    Check graph conditions that guarantee observability:

    * in each component with a loop, the loop vertex and its in-neighbours give distinct outputs;
      in each component with a longer cycle, the cycle vertices are pairwise distinguishable;
    * cycle vertices of different components are distinguishable;
    * the in-neighbours of every vertex give distinct outputs.

    Together the conditions guarantee observability. States sharing a successor share every later output,
    so on a state transition graph each condition is also necessary, and a failure names the states at fault.

    :return: whether they hold, and which one fails first
    """
    g = bn.stg
    outputs = Partition(bn.e.col_index)
    classes: Optional[Partition] = None
    notes = ['loop and cycle conditions are checked per component']

    found = components(g)
    cycles = [cycle_of(g, c) for c in found]
    for cycle in cycles:
        if len(cycle) == 1:
            (v,) = cycle
            group = [v] + [u for u in g.predecessors[v - 1] if u != v]
            clash = _clash(group, outputs)
            if clash:
                return False, ConditionReport(False, 'loop', v, clash, notes)
        else:
            classes = classes or unobservable_partition(bn)
            clash = _clash(cycle, classes)
            if clash:
                return False, ConditionReport(False, 'cycle', cycle[0], clash, notes)

    if len(cycles) > 1:
        classes = classes or unobservable_partition(bn)
        for first, second in itertools.combinations(cycles, 2):
            for u, v in itertools.product(first, second):
                if classes.cell_of[u - 1] == classes.cell_of[v - 1]:
                    return False, ConditionReport(False, 'components', u, (u, v), notes)

    for v in g.vertices():
        clash = _clash(g.predecessors[v - 1], outputs)
        if clash:
            return False, ConditionReport(False, 'in-neighbours', v, clash, notes)

    return True, ConditionReport(True, notes=notes)


class _Palette:
    """Colors used in one group of mutually conflicting states, with the smallest free one"""

    def __init__(self):
        self.used = set()
        self.free = 0

    def add(self, color: int):
        self.used.add(color)
        while self.free in self.used:
            self.free += 1


def conflict_degrees(g: Stg) -> List[int]:
    """
    Number of states each state must not share an output with: its siblings (states with the same
    successor) and, for a cycle vertex, every other cycle vertex. Two cycle vertices never share a successor,
    so the two groups only meet in the state itself.
    """
    on_cycles = {v for c in components(g) for v in cycle_of(g, c)}
    return [len(g.predecessors[g.successor(v) - 1]) - 1 + (len(on_cycles) - 1 if v in on_cycles else 0)
            for v in g.vertices()]


def greedy_output(g: Stg) -> List[int]:
    """
    Color the states greedily, largest conflict degree first and ties by state index, giving each the smallest
    color free in its sibling group and, on a cycle, among the cycle vertices. Colors start at 1.
    """
    on_cycles = {v for c in components(g) for v in cycle_of(g, c)}
    degrees = conflict_degrees(g)
    siblings = [_Palette() for _ in g.vertices()]
    cycle_palette = _Palette()
    colors = [0] * g.n_vertices

    for v in sorted(g.vertices(), key=lambda v: (-degrees[v - 1], v)):
        palette = siblings[g.successor(v) - 1]
        color = palette.free
        if v in on_cycles:
            color = max(color, cycle_palette.free)
            while color in palette.used or color in cycle_palette.used:
                color += 1
            cycle_palette.add(color)
        palette.add(color)
        colors[v - 1] = color + 1
    return colors


def construct_observable_output(m: LogicalMatrix) -> LogicalMatrix:
    """
    Build an output matrix that makes the network observable, by greedily coloring the states so that
    siblings and cycle vertices differ (see :py:func:`greedy_output`). Colors become output symbols.
    Fewest symbols is not guaranteed.
    """
    g = stg_from_matrix(m)
    colors = greedy_output(g)
    e = LogicalMatrix(max(colors), tuple(colors))
    logger.info('constructed an output with %d symbols', e.rows)

    bn = ObservedBn(m, e)
    if not (check_observability_conditions(bn)[0] and is_observable(bn)):
        logger.warning('greedy output failed the checks, falling back to the full state')
        return identity(m.cols)
    return e
