import functools
import json
import random
import textwrap
from typing import Tuple

from bnquotient.network import And, BoolExpr, Const, Iff, Implies, Not, Or, Var, Xor, format_expr
from bnquotient.partition import Partition
from bnquotient.stg import Stg

example_text = textwrap.dedent('''\
    # four variables, sixteen states
    vars: x1 x2 x3 x4
    x1' = (x1 & x2 & !x4) | (!x1 & x2)
    x2' = x2 | (x3 <-> x4)
    x3' = (x1 & !x4) | (!x1 & x2) | (!x1 & !x2 & x4)
    x4' = x1 | !x2 | x4
    ''')

example_m = [11, 1, 11, 1, 11, 13, 15, 9, 1, 2, 1, 2, 9, 15, 13, 11]

# the same network, observed through the indicator of state 16 (all variables false)
example_observed_text = example_text + 'out y = !x1 & !x2 & !x3 & !x4\n'

phage_text = textwrap.dedent('''\
    vars: N cI cII cIII cro
    N' = !cI & !cro
    cI' = !cro & (cI | cII)
    cII' = !cI & (N | cIII)
    cIII' = !cI & N
    cro' = !cI & !cII
    ''')

phage_m = [32, 24, 32, 24, 32, 24, 32, 24, 26, 2, 26, 2, 25, 9, 25, 9,
           32, 24, 32, 24, 32, 24, 32, 24, 28, 4, 32, 8, 27, 11, 31, 15]

phage_e = [9, 2, 2, 3, 3, 4, 4, 5, 1, 1, 2, 2, 2, 2, 1, 1,
           5, 6, 6, 7, 7, 8, 8, 1, 1, 1, 1, 1, 1, 1, 2, 1]

identity_text = "vars: x1\nx1' = x1\n"
negation_text = "vars: x1\nx1' = !x1\n"

# graphs given by their successor lists
short_tree = [1, 1, 1, 3]
rooted_tree = [1, 1, 1, 1, 3, 5, 5, 7]
ring8 = [2, 3, 4, 5, 6, 7, 8, 1]
ring6_tail = [2, 3, 4, 5, 6, 1, 4, 7]
ring2_tail = [2, 1, 2, 3]


def stg_json(succ, out=None) -> str:
    obj = {'n': len(succ), 'succ': list(succ)}
    if out is not None:
        obj['out'] = list(out)
    return json.dumps(obj)


def cells(*groups) -> Partition:
    """Shorthand for a partition given by all of its cells"""
    return Partition.from_cells(groups, sum(len(g) for g in groups))


@functools.lru_cache(maxsize=None)
def set_partitions(n: int) -> Tuple[Partition, ...]:
    """Every partition of 1..n, as restricted growth strings"""
    def grow(prefix, top):
        if len(prefix) == n:
            yield Partition(prefix)
            return
        for label in range(top + 2):
            yield from grow(prefix + [label], max(top, label))

    return tuple(grow([0], 0))


def brute_equitable(succ, p: Partition) -> bool:
    image = {}
    for v, s in enumerate(succ, start=1):
        if image.setdefault(p.cell_of[v - 1], p.cell_of[s - 1]) != p.cell_of[s - 1]:
            return False
    return True


def random_stg(rng: random.Random, n: int) -> Stg:
    return Stg([rng.randint(1, n) for _ in range(n)])


def random_connected_stg(rng: random.Random, n: int) -> Stg:
    """A random functional graph with a single component: a random cycle with random trees hanging off it"""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    l = rng.randint(1, n)
    succ = [0] * n
    for i in range(l):
        succ[order[i] - 1] = order[(i + 1) % l]
    for i in range(l, n):
        succ[order[i] - 1] = order[rng.randrange(i)]
    return Stg(succ)


def sequence_classes(succ, values) -> Partition:
    """States grouped by their full value sequences, by direct simulation"""
    n = len(succ)
    signatures = []
    for v in range(1, n + 1):
        seq = []
        w = v
        for _ in range(2 * n):
            seq.append(values[w - 1])
            w = succ[w - 1]
        signatures.append(tuple(seq))
    return Partition(signatures)


def random_expr(rng: random.Random, names, depth: int) -> BoolExpr:
    if depth == 0 or rng.random() < 0.3:
        return Var(rng.choice(names)) if rng.random() < 0.9 else Const(rng.random() < 0.5)
    if rng.random() < 0.2:
        return Not(random_expr(rng, names, depth - 1))
    op = rng.choice([And, Or, Xor, Iff, Implies])
    return op(random_expr(rng, names, depth - 1), random_expr(rng, names, depth - 1))


def random_network_text(rng: random.Random, n: int, n_outputs: int = 0) -> str:
    """A random network over ``x1..xn``, with ``n_outputs`` outputs ``y1..``"""
    names = [f'x{i}' for i in range(1, n + 1)]
    lines = ['vars: ' + ' '.join(names)]
    lines += [f"{v}' = {format_expr(random_expr(rng, names, 3))}" for v in names]
    lines += [f'out y{i} = {format_expr(random_expr(rng, names, 2))}' for i in range(1, n_outputs + 1)]
    return '\n'.join(lines) + '\n'
