"""
Invariant dual subspaces, coarsest equitable partitions and observability of Boolean networks.
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

import json
import os
from dataclasses import dataclass
from typing import Optional

from bnquotient.errors import BnSemanticError, BnSyntaxError
from bnquotient.network import DEFAULT_MAX_VARS, BooleanNetwork, output_matrix, parse_network, transition_matrix
from bnquotient.stg import Stg, from_json, stg_from_matrix, to_matrix
from bnquotient.stp import LogicalMatrix


@dataclass(frozen=True)
class Model:
    """A loaded input: either a Boolean network or a bare state transition graph"""

    path: Optional[str]
    """Where the model was read from"""

    stg: Stg
    """The state transition graph"""

    network: Optional[BooleanNetwork] = None
    """The network the graph was compiled from, if the input was a network"""

    e: Optional[LogicalMatrix] = None
    """Output matrix, if the input declares outputs"""

    @property
    def m(self) -> LogicalMatrix:
        """Transition matrix"""
        return to_matrix(self.stg)


def loads(text: str, path: Optional[str] = None, max_vars: Optional[int] = DEFAULT_MAX_VARS) -> Model:
    """
    Load a model from text: a JSON object is read as a state transition graph, anything else as a network

    :param text: the input text
    :param path: where it came from, for reference
    :param max_vars: largest accepted network size
    :return: the loaded model
    """
    if text.lstrip().startswith('{'):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as err:
            raise BnSyntaxError(err.msg, err.lineno, err.colno) from err
        g, out = from_json(obj)
        e = LogicalMatrix(max(out), tuple(out)) if out else None
        return Model(path, g, None, e)

    net = parse_network(text, max_vars=max_vars)
    e = output_matrix(net) if net.outputs else None
    return Model(path, stg_from_matrix(transition_matrix(net)), net, e)


def read(path, max_vars: Optional[int] = DEFAULT_MAX_VARS) -> Model:
    """
    Read a model from a file

    :param path: a path to a network definition or a graph JSON file
    :param max_vars: largest accepted network size
    :return: the loaded model
    """
    with open(path, 'r', encoding='utf-8') as fp:
        return loads(fp.read(), os.fspath(path), max_vars)
