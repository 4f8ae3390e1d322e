"""
Exact semi-tensor product calculus over logical and small dense integer matrices.

Logical matrices are stored by column index and written in delta notation,
e.g. ``δ4[1,3,2,4]`` is the 4x4 matrix whose j-th column is the basis vector
selected by the j-th index. All indices are 1-based.
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

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from bnquotient.errors import DimensionError

DenseMatrix = np.ndarray
"""A dense integer matrix, always a 2-D numpy array of dtype int64"""


@dataclass(frozen=True)
class LogicalMatrix:
    """
    A matrix whose every column is a standard basis vector.

    :param rows: number of rows
    :param col_index: for each column, the 1-based row holding its single 1
    """

    rows: int
    col_index: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'col_index', tuple(int(i) for i in self.col_index))
        if self.rows < 1:
            raise DimensionError(f'logical matrix needs at least one row, got {self.rows}')
        if len(self.col_index) < 1:
            raise DimensionError('logical matrix needs at least one column')
        for j, i in enumerate(self.col_index, start=1):
            if not 1 <= i <= self.rows:
                raise DimensionError(f'column {j} points at row {i}, outside [1..{self.rows}]')

    @property
    def cols(self) -> int:
        return len(self.col_index)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, j: int) -> int:
        """Row index of the 1-based column ``j``"""
        if not 1 <= j <= self.cols:
            raise DimensionError(f'column {j} outside [1..{self.cols}]')
        return self.col_index[j - 1]

    def __str__(self):
        return f'δ{self.rows}[{",".join(str(i) for i in self.col_index)}]'

    def column(self, j: int) -> LogicalMatrix:
        """The 1-based column ``j`` as a logical column vector"""
        return LogicalMatrix(self.rows, (self[j],))

    def to_dense(self) -> DenseMatrix:
        """
        Expand to a dense 0/1 matrix

        :return: a rows x cols int64 numpy array
        """
        dense = np.zeros((self.rows, self.cols), dtype=np.int64)
        dense[np.array(self.col_index) - 1, np.arange(self.cols)] = 1
        return dense

    @classmethod
    def from_dense(cls, dense) -> LogicalMatrix:
        """
        Compress a dense 0/1 matrix

        :param dense: any 2-D array-like with exactly one 1 per column and zeros elsewhere
        :return: the equivalent logical matrix
        :raises DimensionError: if the matrix is not logical
        """
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise DimensionError(f'expected a 2-D matrix, got {dense.ndim} dimensions')
        ones = dense == 1
        if not np.all(ones | (dense == 0)) or not np.all(ones.sum(axis=0) == 1):
            raise DimensionError('matrix is not logical: every column needs exactly one 1')
        return cls(dense.shape[0], tuple(int(i) + 1 for i in ones.argmax(axis=0)))

    @classmethod
    def from_columns(cls, rows: int, col_index: Iterable[int]) -> LogicalMatrix:
        return cls(rows, tuple(col_index))


Matrix = Union[LogicalMatrix, DenseMatrix]


def identity(n: int) -> LogicalMatrix:
    """The n x n identity as a logical matrix"""
    return LogicalMatrix(n, tuple(range(1, n + 1)))


def delta(n: int, i: int) -> LogicalMatrix:
    """The basis column vector δ_n^i"""
    return LogicalMatrix(n, (i,))


def as_dense(m: Matrix) -> DenseMatrix:
    """Dense view of either matrix kind"""
    if isinstance(m, LogicalMatrix):
        return m.to_dense()
    dense = np.asarray(m, dtype=np.int64)
    if dense.ndim != 2:
        raise DimensionError(f'expected a 2-D matrix, got {dense.ndim} dimensions')
    return dense


def kron(a: Matrix, b: Matrix) -> Matrix:
    """
    Kronecker product. The product of two logical matrices stays logical.

    :param a: left factor
    :param b: right factor
    :return: a logical matrix when both factors are logical, otherwise a dense matrix
    """
    if isinstance(a, LogicalMatrix) and isinstance(b, LogicalMatrix):
        # column (j-1)*q + s holds row (a_j - 1)*p + b_s
        return LogicalMatrix(a.rows * b.rows,
                             tuple((i - 1) * b.rows + k for i in a.col_index for k in b.col_index))
    return np.kron(as_dense(a), as_dense(b))


def compose_logical(a: LogicalMatrix, b: LogicalMatrix) -> LogicalMatrix:
    """
    Ordinary product ``a·b`` of two logical matrices, computed by index composition

    :raises DimensionError: if ``a.cols != b.rows``
    """
    if a.cols != b.rows:
        raise DimensionError(f'cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}')
    return LogicalMatrix(a.rows, tuple(a.col_index[j - 1] for j in b.col_index))


def stp(a: Matrix, b: Matrix) -> Matrix:
    """
    Left semi-tensor product ``(a ⊗ I_{t/n})(b ⊗ I_{t/p})`` with ``t = lcm(n, p)``,
    where ``n`` is the column count of ``a`` and ``p`` the row count of ``b``.

    When the inner dimensions agree this is the ordinary matrix product.

    :param a: left factor
    :param b: right factor
    :return: a logical matrix when both factors are logical, otherwise a dense matrix
    """
    n = a.cols if isinstance(a, LogicalMatrix) else as_dense(a).shape[1]
    p = b.rows if isinstance(b, LogicalMatrix) else as_dense(b).shape[0]
    t = math.lcm(n, p)

    if isinstance(a, LogicalMatrix) and isinstance(b, LogicalMatrix):
        return compose_logical(kron(a, identity(t // n)), kron(b, identity(t // p)))

    left = np.kron(as_dense(a), np.eye(t // n, dtype=np.int64))
    right = np.kron(as_dense(b), np.eye(t // p, dtype=np.int64))
    return left @ right


def stp_chain(factors: Sequence[Matrix]) -> Matrix:
    """Left-to-right semi-tensor product of several factors"""
    if not factors:
        raise DimensionError('stp_chain needs at least one factor')
    result = factors[0]
    for factor in factors[1:]:
        result = stp(result, factor)
    return result


def khatri_rao(a: LogicalMatrix, b: LogicalMatrix) -> LogicalMatrix:
    """
    Column-wise semi-tensor product of two logical matrices with the same column count

    :raises DimensionError: on a column count mismatch
    """
    if a.cols != b.cols:
        raise DimensionError(f'Khatri-Rao product needs equal column counts, got {a.cols} and {b.cols}')
    return LogicalMatrix(a.rows * b.rows,
                         tuple((i - 1) * b.rows + k for i, k in zip(a.col_index, b.col_index)))


def swap_matrix(m: int, n: int) -> LogicalMatrix:
    """
    The swap matrix W[m,n], which satisfies ``W[m,n] ⋉ x ⋉ y = y ⋉ x`` for x in Δ_m, y in Δ_n

    :param m: dimension of the first factor
    :param n: dimension of the second factor
    """
    if m < 1 or n < 1:
        raise DimensionError(f'swap matrix dimensions must be positive, got {m} and {n}')
    # column (i-1)*n + j holds row (j-1)*m + i
    return LogicalMatrix(m * n, tuple((j - 1) * m + i for i in range(1, m + 1) for j in range(1, n + 1)))


def logical_rank(a: LogicalMatrix) -> int:
    """Rank of a logical matrix: the number of distinct columns"""
    return len(set(a.col_index))
