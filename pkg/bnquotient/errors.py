"""
Exception types raised by bnquotient.
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

from typing import Optional


class BnError(Exception):
    """Base class for every error raised by this package."""


class BnSyntaxError(BnError):
    """A Boolean network definition could not be tokenized or parsed."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f'line {line}, column {column}: {message}')
        self.line = line
        """1-based line number of the offending token"""

        self.column = column
        """1-based column number of the offending token"""


class BnSemanticError(BnError, ValueError):
    """A syntactically valid network that is not meaningful, e.g. an undeclared variable."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)
        self.line = line


class DimensionError(BnError, ValueError):
    """Matrices, partitions or states whose sizes do not fit together."""


class NotEquitableError(BnError, ValueError):
    """A quotient was requested for a partition that is not equitable."""


class EnginePreconditionError(BnError):
    """The structural engine was given a graph or vertex set it cannot handle."""


class DisconnectedGraphError(EnginePreconditionError):
    """The structural engine requires a connected state transition graph."""

    def __init__(self, n_components: int):
        super().__init__(f'structural engine requires connected STG (found {n_components} components)')
        self.n_components = n_components


class EngineMismatchError(BnError):
    """Two invariant engines returned different partitions for the same input."""
