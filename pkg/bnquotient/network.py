"""
Boolean network definitions: a small expression language, its parser, and the
compilation of networks into structure matrices and transition matrices.
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
import operator
import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from bnquotient.errors import BnSemanticError, BnSyntaxError, DimensionError
from bnquotient.stp import LogicalMatrix, khatri_rao

logger = logging.getLogger(__name__)

DEFAULT_MAX_VARS = 20

comment_regex = re.compile(r'#.*$')
vars_regex = re.compile(r'^\s*vars\s*:(?P<names>.*)$')
update_regex = re.compile(r"^\s*(?P<name>[A-Za-z_]\w*)\s*'\s*=(?P<expr>.*)$")
output_regex = re.compile(r'^\s*out\s+(?P<name>[A-Za-z_]\w*)\s*=(?P<expr>.*)$')
name_regex = re.compile(r'[A-Za-z_]\w*')
token_regex = re.compile(r'(?P<ws>\s+)|(?P<op><->|->|[&|^!()])|(?P<const>(?:true|false)\b)|(?P<name>[A-Za-z_]\w*)')

keywords = {'vars', 'out', 'true', 'false'}


class BoolExpr:
    """Base class of the expression tree"""

    def variables(self) -> List[str]:
        """Free variables, in order of first appearance"""
        seen: Dict[str, None] = {}
        self._collect(seen)
        return list(seen)

    def _collect(self, seen: Dict[str, None]):
        raise NotImplementedError

    def __str__(self):
        return format_expr(self)


@dataclass(frozen=True)
class Var(BoolExpr):
    name: str

    def _collect(self, seen):
        seen.setdefault(self.name)


@dataclass(frozen=True)
class Const(BoolExpr):
    value: bool

    def _collect(self, seen):
        pass


@dataclass(frozen=True)
class Not(BoolExpr):
    operand: BoolExpr

    def _collect(self, seen):
        self.operand._collect(seen)


@dataclass(frozen=True)
class Binary(BoolExpr):
    left: BoolExpr
    right: BoolExpr

    symbol = '?'

    def _collect(self, seen):
        self.left._collect(seen)
        self.right._collect(seen)


class And(Binary):
    symbol = '&'


class Or(Binary):
    symbol = '|'


class Xor(Binary):
    symbol = '^'


class Iff(Binary):
    symbol = '<->'


class Implies(Binary):
    symbol = '->'


binary_ops: Dict[type, Callable[[bool, bool], bool]] = {
    And: lambda a, b: a and b,
    Or: lambda a, b: a or b,
    Xor: operator.ne,
    Iff: operator.eq,
    Implies: lambda a, b: (not a) or b,
}

vector_ops: Dict[type, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    And: np.logical_and,
    Or: np.logical_or,
    Xor: np.logical_xor,
    Iff: np.equal,
    Implies: lambda a, b: np.logical_or(np.logical_not(a), b),
}


@dataclass(frozen=True)
class BooleanNetwork:
    """A synchronous Boolean network with optional output functions"""

    var_names: Tuple[str, ...]
    """Variables in declaration order, which is also the order of the state vector"""

    updates: Tuple[BoolExpr, ...]
    """Update function of each variable, aligned with :py:attr:`var_names`"""

    outputs: Tuple[BoolExpr, ...] = ()
    """Output functions, possibly none"""

    output_names: Tuple[str, ...] = ()
    """Names given to the outputs, aligned with :py:attr:`outputs`"""

    @property
    def n(self) -> int:
        return len(self.var_names)

    @property
    def n_states(self) -> int:
        return 2 ** self.n

    def text(self) -> str:
        """Render the network back into its text format"""
        lines = ['vars: ' + ' '.join(self.var_names)]
        lines += [f"{name}' = {format_expr(e)}" for name, e in zip(self.var_names, self.updates)]
        lines += [f'out {name} = {format_expr(e)}' for name, e in zip(self.output_names, self.outputs)]
        return '\n'.join(lines) + '\n'


def format_expr(e: BoolExpr) -> str:
    """
    Render an expression with every binary operation parenthesized, so that parsing the result
    gives back the same tree.
    """
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return 'true' if e.value else 'false'
    if isinstance(e, Not):
        return '!' + format_expr(e.operand)
    if isinstance(e, Binary):
        return f'({format_expr(e.left)} {e.symbol} {format_expr(e.right)})'
    raise TypeError(f'not an expression: {e!r}')


class _Token:
    def __init__(self, kind: str, text: str, column: int):
        self.kind = kind
        self.text = text
        self.column = column


def _tokenize(text: str, line_no: int, column_offset: int) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = token_regex.match(text, pos)
        if match is None:
            raise BnSyntaxError(f'unexpected character {text[pos]!r}', line_no, column_offset + pos)
        if match.lastgroup != 'ws':
            tokens.append(_Token(match.lastgroup, match.group(), column_offset + pos))
        pos = match.end()
    return tokens


class _ExprParser:
    """
    Recursive descent over one expression. Binding strength, tightest first:
    ``!``, ``&``, ``^``, ``|``, then ``->`` and ``<->`` which associate to the right.
    """

    levels = [('|', Or), ('^', Xor), ('&', And)]

    def __init__(self, tokens: List[_Token], line_no: int, end_column: int):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no
        self.end_column = end_column

    def parse(self) -> BoolExpr:
        if not self.tokens:
            raise BnSyntaxError('expected an expression', self.line_no, self.end_column)
        expr = self._implication()
        if self.pos < len(self.tokens):
            token = self.tokens[self.pos]
            raise BnSyntaxError(f'unexpected {token.text!r}', self.line_no, token.column)
        return expr

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _accept(self, text: str) -> Optional[_Token]:
        token = self._peek()
        if token is not None and token.kind == 'op' and token.text == text:
            self.pos += 1
            return token
        return None

    def _implication(self) -> BoolExpr:
        left = self._binary(0)
        for symbol, node in (('->', Implies), ('<->', Iff)):
            if self._accept(symbol):
                return node(left, self._implication())
        return left

    def _binary(self, level: int) -> BoolExpr:
        if level == len(self.levels):
            return self._unary()
        symbol, node = self.levels[level]
        expr = self._binary(level + 1)
        while self._accept(symbol):
            expr = node(expr, self._binary(level + 1))
        return expr

    def _unary(self) -> BoolExpr:
        if self._accept('!'):
            return Not(self._unary())
        return self._atom()

    def _atom(self) -> BoolExpr:
        token = self._peek()
        if token is None:
            last = self.tokens[-1]
            raise BnSyntaxError(f'expected an operand after {last.text!r}', self.line_no, last.column)
        self.pos += 1
        if token.kind == 'const':
            return Const(token.text == 'true')
        if token.kind == 'name':
            return Var(token.text)
        if token.text == '(':
            expr = self._implication()
            if not self._accept(')'):
                closing = self._peek()
                column = closing.column if closing else self.end_column
                raise BnSyntaxError("expected ')'", self.line_no, column)
            return expr
        raise BnSyntaxError(f'unexpected {token.text!r}', self.line_no, token.column)


def parse_expr(text: str, line_no: int = 1, column_offset: int = 1) -> BoolExpr:
    """
    Parse a single Boolean expression

    :param text: expression source
    :param line_no: line number to report in errors
    :param column_offset: column of the first character of ``text``
    :return: the expression tree
    """
    tokens = _tokenize(text, line_no, column_offset)
    return _ExprParser(tokens, line_no, column_offset + len(text.rstrip())).parse()


def _check_declared(expr: BoolExpr, declared: Mapping[str, int], line_no: Optional[int]):
    for name in expr.variables():
        if name not in declared:
            raise BnSemanticError(f'undeclared variable {name!r}', line_no)


def parse_network(text: str, max_vars: Optional[int] = DEFAULT_MAX_VARS) -> BooleanNetwork:
    """
    Parse a Boolean network definition

    :param text: the network source, one statement per line
    :param max_vars: largest accepted variable count, or None for no limit
    :return: the parsed network
    :raises BnSyntaxError: on malformed input, with line and column
    :raises BnSemanticError: on undeclared, duplicated or missing definitions
    """
    declared: Dict[str, int] = {}
    updates: Dict[str, BoolExpr] = {}
    outputs: List[Tuple[str, BoolExpr]] = []

    for line_no, raw_line in enumerate(text.split('\n'), start=1):
        line = comment_regex.sub('', raw_line.rstrip('\r'))
        if not line.strip():
            continue

        if match := vars_regex.match(line):
            column = match.start('names') + 1
            for name_match in re.finditer(r'\S+', match['names']):
                name = name_match.group()
                if not name_regex.fullmatch(name) or name in keywords:
                    raise BnSyntaxError(f'invalid variable name {name!r}', line_no, column + name_match.start())
                if name in declared:
                    raise BnSemanticError(f'duplicate variable declaration {name!r}', line_no)
                declared[name] = line_no

        elif match := output_regex.match(line):
            if any(name == match['name'] for name, _ in outputs):
                raise BnSemanticError(f'duplicate output {match["name"]!r}', line_no)
            expr = parse_expr(match['expr'], line_no, match.start('expr') + 1)
            _check_declared(expr, declared, line_no)
            outputs.append((match['name'], expr))

        elif match := update_regex.match(line):
            name = match['name']
            if name not in declared:
                raise BnSemanticError(f'update for undeclared variable {name!r}', line_no)
            if name in updates:
                raise BnSemanticError(f'duplicate update for {name!r}', line_no)
            expr = parse_expr(match['expr'], line_no, match.start('expr') + 1)
            _check_declared(expr, declared, line_no)
            updates[name] = expr

        else:
            column = len(line) - len(line.lstrip()) + 1
            raise BnSyntaxError('expected a vars declaration, an update or an output', line_no, column)

    if not declared:
        raise BnSemanticError('network declares no variables')
    if max_vars is not None and len(declared) > max_vars:
        raise BnSemanticError(f'network has {len(declared)} variables, more than the limit of {max_vars}')
    missing = [name for name in declared if name not in updates]
    if missing:
        raise BnSemanticError(f'no update given for {", ".join(missing)}')

    var_names = tuple(declared)
    logger.debug('parsed network with %d variables and %d outputs', len(var_names), len(outputs))
    return BooleanNetwork(var_names=var_names,
                          updates=tuple(updates[name] for name in var_names),
                          outputs=tuple(e for _, e in outputs),
                          output_names=tuple(name for name, _ in outputs))


def eval_expr(e: BoolExpr, assignment: Mapping[str, bool]) -> bool:
    """
    Evaluate an expression

    :param e: expression to evaluate
    :param assignment: value of every free variable of ``e``
    :raises BnSemanticError: if a variable has no value
    """
    if isinstance(e, Var):
        try:
            return bool(assignment[e.name])
        except KeyError:
            raise BnSemanticError(f'variable {e.name!r} is not assigned') from None
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Not):
        return not eval_expr(e.operand, assignment)
    if isinstance(e, Binary):
        return bool(binary_ops[type(e)](eval_expr(e.left, assignment), eval_expr(e.right, assignment)))
    raise TypeError(f'not an expression: {e!r}')


def state_index(bits: Sequence[bool]) -> int:
    """
    Index of a state in Δ_{2^n}: true is δ2^1 and false is δ2^2, so all-true is 1 and all-false is 2^n
    """
    n = len(bits)
    return 1 + sum((0 if b else 1) << (n - k) for k, b in enumerate(bits, start=1))


def index_to_state(index: int, n: int) -> Tuple[bool, ...]:
    """Inverse of :py:func:`state_index`"""
    if not 1 <= index <= 2 ** n:
        raise DimensionError(f'state {index} outside [1..{2 ** n}]')
    return tuple(not ((index - 1) >> (n - k)) & 1 for k in range(1, n + 1))


def _state_bits(n: int) -> np.ndarray:
    """n x 2^n boolean array, row k holding variable k over every state"""
    offsets = np.arange(2 ** n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((offsets[np.newaxis, :] >> shifts[:, np.newaxis]) & 1) == 0


def _eval_vector(e: BoolExpr, columns: Mapping[str, np.ndarray], size: int) -> np.ndarray:
    if isinstance(e, Var):
        return columns[e.name]
    if isinstance(e, Const):
        return np.full(size, e.value, dtype=bool)
    if isinstance(e, Not):
        return np.logical_not(_eval_vector(e.operand, columns, size))
    if isinstance(e, Binary):
        return vector_ops[type(e)](_eval_vector(e.left, columns, size), _eval_vector(e.right, columns, size))
    raise TypeError(f'not an expression: {e!r}')


def _truth_vector(e: BoolExpr, var_order: Sequence[str]) -> np.ndarray:
    _check_declared(e, {name: 0 for name in var_order}, None)
    bits = _state_bits(len(var_order))
    columns = {name: bits[k] for k, name in enumerate(var_order)}
    return _eval_vector(e, columns, 2 ** len(var_order))


def structure_matrix_of(e: BoolExpr, var_order: Sequence[str]) -> LogicalMatrix:
    """
    Structure matrix of a Boolean function: the 2 x 2^n logical matrix sending each state to
    δ2^1 where the function is true and δ2^2 where it is false

    :param e: the function
    :param var_order: the variables, in state vector order
    """
    truth = _truth_vector(e, var_order)
    return LogicalMatrix(2, tuple(np.where(truth, 1, 2).tolist()))


def _khatri_rao_all(structures: Sequence[LogicalMatrix]) -> LogicalMatrix:
    result = structures[0]
    for s in structures[1:]:
        result = khatri_rao(result, s)
    return result


def transition_matrix(net: BooleanNetwork) -> LogicalMatrix:
    """
    Transition matrix ``M = M_1 * M_2 * ... * M_n`` of a network, the Khatri-Rao product of the
    structure matrices of its update functions
    """
    logger.debug('compiling %d structure matrices over %d states', net.n, net.n_states)
    # the Khatri-Rao index recurrence (i - 1) * 2 + k, vectorized over all columns
    index = np.ones(net.n_states, dtype=np.int64)
    for e in net.updates:
        index = (index - 1) * 2 + np.where(_truth_vector(e, net.var_names), 1, 2)
    return LogicalMatrix(net.n_states, tuple(index.tolist()))


def simulate_transition_matrix(net: BooleanNetwork) -> LogicalMatrix:
    """
    Transition matrix built state by state, by evaluating every update on every state.
    Independent of the structure matrix route; meant for checking.
    """
    col_index = []
    for j in range(1, net.n_states + 1):
        assignment = dict(zip(net.var_names, index_to_state(j, net.n)))
        col_index.append(state_index([eval_expr(e, assignment) for e in net.updates]))
    return LogicalMatrix(net.n_states, tuple(col_index))


def output_matrix(net: BooleanNetwork) -> LogicalMatrix:
    """
    Output matrix ``E`` of a network: the Khatri-Rao product of the structure matrices of its outputs,
    a 2^p x 2^n logical matrix for p outputs

    :raises BnSemanticError: if the network has no outputs
    """
    if not net.outputs:
        raise BnSemanticError('network has no outputs')
    return _khatri_rao_all([structure_matrix_of(e, net.var_names) for e in net.outputs])
