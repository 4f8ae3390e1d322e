import random
import unittest

import numpy as np

from bnquotient.errors import DimensionError, NotEquitableError
from bnquotient.partition import (Partition, compose, from_characteristic, from_json, is_equitable, is_finer, join,
                                  join_all, meet, partition_from_subset, quotient, quotient_matrix,
                                  to_characteristic, to_json)
from bnquotient.stg import Stg, WeightedDigraph, shrink
from bnquotient.stp import LogicalMatrix, identity
from tests.common import brute_equitable, cells, example_m, random_stg, rooted_tree, set_partitions, short_tree

pi1 = cells([1, 2], [3], [4])
pi2 = cells([1, 2, 3], [4])
pi3 = cells([1, 3], [2], [4])


def random_partition(rng: random.Random, n: int) -> Partition:
    return Partition(rng.randint(1, rng.randint(1, n)) for _ in range(n))


class TestPartition(unittest.TestCase):
    def test_canonical(self):
        """Test that cells are numbered by their smallest element"""
        p = Partition(['b', 'a', 'b', 'c'])
        self.assertEqual((1, 2, 1, 3), p.cell_of)
        self.assertEqual(3, p.k)
        self.assertEqual([(1, 3), (2,), (4,)], p.cells())
        self.assertEqual(Partition([7, 7, 2]), Partition([1, 1, 5]))
        self.assertEqual('{{1,3}, {2}, {4}}', str(p))

    def test_from_cells(self):
        """Test building from cells, and rejecting cells that do not partition"""
        self.assertEqual(Partition([1, 2, 1]), Partition.from_cells([[2], [3, 1]], 3))
        with self.assertRaises(DimensionError):
            Partition.from_cells([[1, 2], [2, 3]], 3)
        with self.assertRaises(DimensionError):
            Partition.from_cells([[1]], 2)
        with self.assertRaises(DimensionError):
            Partition.from_cells([[1, 4]], 2)

    def test_extremes(self):
        """Test the one-cell and singleton partitions"""
        self.assertEqual(1, Partition.one_cell(5).k)
        self.assertTrue(Partition.singletons(5).is_singletons())
        self.assertFalse(Partition.one_cell(2).is_singletons())

    def test_characteristic(self):
        """Test characteristic matrices"""
        self.assertEqual(identity(3), to_characteristic(Partition.singletons(3)))
        g = LogicalMatrix(2, (2,) * 15 + (1,))
        self.assertEqual(LogicalMatrix(2, (1,) * 15 + (2,)), to_characteristic(from_characteristic(g)))
        self.assertEqual(cells([1, 2], [3, 4]), from_characteristic(LogicalMatrix(2, (1, 1, 2, 2))))

    def test_json(self):
        """Test the JSON form"""
        self.assertEqual({'n': 4, 'cells': [[1, 2], [3], [4]]}, to_json(pi1))
        self.assertEqual(pi1, from_json(to_json(pi1)))


class TestLattice(unittest.TestCase):
    def test_order(self):
        """Test the refinement order on the four vertex example"""
        self.assertTrue(is_finer(pi1, pi2))
        self.assertTrue(is_finer(pi3, pi2))
        self.assertFalse(is_finer(pi2, pi1))
        self.assertTrue(is_finer(pi1, pi1))
        with self.assertRaises(DimensionError):
            is_finer(pi1, Partition.one_cell(3))

    def test_join_meet(self):
        """Test join and meet on the four vertex example"""
        self.assertEqual(Partition.singletons(4), join(pi1, pi3))
        self.assertEqual(pi2, meet(pi1, pi3))
        self.assertEqual(Partition.singletons(4), join(pi1, Partition.singletons(4)))
        self.assertEqual(Partition.one_cell(4), meet(pi1, Partition.one_cell(4)))
        self.assertEqual(pi1, join_all([pi1, pi2, pi1]))

    def test_lattice_laws(self):
        """Test the lattice laws on random partitions"""
        rng = random.Random(17)
        for _ in range(200):
            n = rng.randint(1, 10)
            p, q, r = (random_partition(rng, n) for _ in range(3))
            self.assertEqual(p, join(p, p))
            self.assertEqual(p, meet(p, p))
            self.assertEqual(join(p, q), join(q, p))
            self.assertEqual(meet(p, q), meet(q, p))
            self.assertEqual(join(join(p, q), r), join(p, join(q, r)))
            self.assertEqual(meet(meet(p, q), r), meet(p, meet(q, r)))
            self.assertEqual(p, join(p, meet(p, q)))
            self.assertEqual(p, meet(p, join(p, q)))
            self.assertTrue(is_finer(join(p, q), p))
            self.assertTrue(is_finer(p, meet(p, q)))


class TestEquitable(unittest.TestCase):
    def test_example(self):
        """Test the equitable partitions of the four vertex example"""
        g = Stg(short_tree)
        for p in (pi1, pi2, pi3, Partition.singletons(4), Partition.one_cell(4)):
            self.assertTrue(is_equitable(g, p), str(p))
        self.assertFalse(is_equitable(g, cells([1, 2], [3, 4])))

    def test_weighted_matches_functional(self):
        """Test that the weighted test agrees with the successor test"""
        rng = random.Random(23)
        for _ in range(200):
            g = random_stg(rng, rng.randint(1, 8))
            p = random_partition(rng, g.n_vertices)
            expected = brute_equitable(g.succ, p)
            self.assertEqual(expected, is_equitable(g, p))
            self.assertEqual(expected, is_equitable(WeightedDigraph.from_stg(g), p))

    def test_weighted(self):
        """Test weighted sums on a shrunk graph"""
        g = shrink(WeightedDigraph.from_stg(Stg(rooted_tree)), {1, 4})
        self.assertTrue(is_equitable(g, Partition.singletons(7)))
        self.assertTrue(is_equitable(g, Partition([1, 2, 2, 3, 4, 4, 5])))
        self.assertFalse(is_equitable(g, Partition([1, 1, 2, 3, 4, 4, 5])))

    def test_size_mismatch(self):
        """Test that the partition must cover the graph"""
        with self.assertRaises(DimensionError):
            is_equitable(Stg(short_tree), Partition.one_cell(3))


class TestQuotient(unittest.TestCase):
    def test_example(self):
        """Test the quotient of the sixteen state example by the cell of state 16"""
        g = Stg(example_m)
        p = partition_from_subset({16}, n=16)
        q, h = quotient(g, p)
        self.assertEqual(2, q.n_vertices)
        self.assertEqual(LogicalMatrix(2, (1, 1)), quotient_matrix(g, p))
        self.assertTrue(np.array_equal(np.array([[1, 1], [0, 0]]), h))

    def test_merged_loop(self):
        """Test a quotient with a merged loop"""
        q, h = quotient(Stg(short_tree), pi2)
        self.assertEqual([(1, 1, 1), (2, 1, 1)], q.edges())
        self.assertEqual(frozenset({1, 2, 3}), q.labels[0])

    def test_singletons(self):
        """Test that the finest quotient is the graph itself"""
        g = Stg(rooted_tree)
        q, _ = quotient(g, Partition.singletons(8))
        self.assertEqual(g, q.as_stg())

    def test_not_equitable(self):
        """Test that quotients need equitable partitions"""
        with self.assertRaises(NotEquitableError):
            quotient(Stg(short_tree), cells([1, 2], [3, 4]))
        with self.assertRaises(NotEquitableError):
            quotient_matrix(Stg(short_tree), cells([1, 2], [3, 4]))

    def test_quotient_identity(self):
        """Test that P^T A = H P^T for every equitable partition of small random graphs"""
        rng = random.Random(29)
        for _ in range(30):
            g = random_stg(rng, rng.randint(1, 6))
            a = WeightedDigraph.from_stg(g).adjacency()
            for p in set_partitions(g.n_vertices):
                if not is_equitable(g, p):
                    continue
                q, h = quotient(g, p)
                pt = to_characteristic(p).to_dense()
                self.assertTrue(np.array_equal(pt @ a, h @ pt))
                self.assertIsNotNone(q.as_stg())

    def test_equitable_iff_solvable(self):
        """Test that a partition is equitable exactly when some H solves P^T A = H P^T"""
        rng = random.Random(31)
        for _ in range(20):
            g = random_stg(rng, rng.randint(1, 5))
            a = WeightedDigraph.from_stg(g).adjacency()
            for p in set_partitions(g.n_vertices):
                pt = to_characteristic(p).to_dense()
                # P^T has orthogonal rows, so the only candidate is H = P^T A P (P^T P)^-1
                sizes = np.diag(pt @ pt.T)
                h = (pt @ a @ pt.T) // sizes[np.newaxis, :]
                solvable = np.array_equal(pt @ a, h @ pt)
                self.assertEqual(solvable, is_equitable(g, p))


class TestHelpers(unittest.TestCase):
    def test_partition_from_subset(self):
        """Test two-cell partitions"""
        self.assertEqual(cells(range(1, 16), [16]), partition_from_subset({16}, n=16))
        self.assertEqual(Partition.one_cell(5), partition_from_subset(set(), n=5))
        self.assertEqual(Partition.one_cell(5), partition_from_subset(range(1, 6), n=5))
        self.assertEqual(cells([1, 4, 5], [2, 3, 6, 7, 8]), partition_from_subset({1, 4, 5}, n=8))
        with self.assertRaises(DimensionError):
            partition_from_subset({9}, n=8)
        with self.assertRaises(TypeError):
            partition_from_subset(8, {1})

    def test_compose(self):
        """Test lifting a partition of blocks to the original elements"""
        lifted = compose(cells([1], [2, 3]), [1, 2, 1, 3, 2])
        self.assertEqual(Partition([1, 2, 1, 2, 2]), lifted)
        with self.assertRaises(DimensionError):
            compose(cells([1], [2]), [1, 3])


if __name__ == '__main__':
    unittest.main()
