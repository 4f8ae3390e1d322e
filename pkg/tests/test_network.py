import itertools
import random
import unittest

from bnquotient.errors import BnSemanticError, BnSyntaxError
from bnquotient.network import (And, Const, Iff, Implies, Not, Or, Var, Xor, eval_expr, index_to_state,
                                output_matrix, parse_expr, parse_network, simulate_transition_matrix, state_index,
                                structure_matrix_of, transition_matrix)
from bnquotient.stp import LogicalMatrix
from tests.common import (example_m, example_observed_text, example_text, negation_text, phage_m, phage_text,
                          random_network_text)


class TestParser(unittest.TestCase):
    def test_negation_network(self):
        """Test the smallest network"""
        net = parse_network(negation_text)
        self.assertEqual(('x1',), net.var_names)
        self.assertEqual((Not(Var('x1')),), net.updates)
        self.assertEqual((), net.outputs)

    def test_precedence(self):
        """Test operator binding, tightest first: ! & ^ | then -> and <->"""
        self.assertEqual(Or(Var('a'), And(Var('b'), Var('c'))), parse_expr('a | b & c'))
        self.assertEqual(Or(Xor(Var('a'), And(Var('b'), Not(Var('c')))), Var('d')), parse_expr('a ^ b & !c | d'))
        self.assertEqual(Implies(Or(Var('a'), Var('b')), Var('c')), parse_expr('a | b -> c'))
        self.assertEqual(Implies(Var('a'), Iff(Var('b'), Var('c'))), parse_expr('a -> b <-> c'))
        self.assertEqual(And(Or(Var('a'), Var('b')), Var('c')), parse_expr('(a | b) & c'))
        self.assertEqual(And(And(Var('a'), Var('b')), Var('c')), parse_expr('a & b & c'))
        self.assertEqual(Not(Not(Const(True))), parse_expr('!!true'))

    def test_roundtrip_text(self):
        """Test that rendering a network and parsing it again gives the same network"""
        net = parse_network(example_observed_text)
        self.assertEqual(net, parse_network(net.text()))

    def test_comments_and_blank_lines(self):
        """Test that comments and empty lines are skipped"""
        net = parse_network("# a comment\n\nvars: a b  # two\na' = b\n\nb' = a # swap\n")
        self.assertEqual(('a', 'b'), net.var_names)
        self.assertEqual((Var('b'), Var('a')), net.updates)

    def test_outputs(self):
        """Test output declarations"""
        net = parse_network(example_observed_text)
        self.assertEqual(('y',), net.output_names)
        self.assertEqual(1, len(net.outputs))

    def test_trailing_operator(self):
        """Test that a dangling operator is reported where it stands"""
        with self.assertRaises(BnSyntaxError) as cm:
            parse_network("vars: x1 x2\nx1' = x1 & x2 &\nx2' = x1\n")
        self.assertEqual(2, cm.exception.line)
        self.assertEqual(len("x1' = x1 & x2 &"), cm.exception.column)
        self.assertIn('line 2, column 15', str(cm.exception))

    def test_syntax_errors(self):
        """Test malformed lines and expressions"""
        for text in ["vars: x\nx' = (x\n",
                     "vars: x\nx' = x y\n",
                     "vars: x\nx' = x $ x\n",
                     "vars: x\nx' =\n",
                     "vars: x\nthis is not a statement\n",
                     "vars: 1x\n"]:
            with self.subTest(text=text), self.assertRaises(BnSyntaxError):
                parse_network(text)

    def test_semantic_errors(self):
        """Test undeclared, duplicated and missing definitions"""
        cases = {
            "vars: x\nx' = y\n": 'undeclared',
            "vars: x x\nx' = x\n": 'duplicate variable',
            "vars: x\ny' = x\n": 'undeclared',
            "vars: x\nx' = x\nx' = !x\n": 'duplicate update',
            "vars: x\nx' = x\nout y = x\nout y = !x\n": 'duplicate output',
            "vars: x y\nx' = y\n": 'no update given for y',
            "# nothing\n": 'no variables',
        }
        for text, message in cases.items():
            with self.subTest(text=text), self.assertRaises(BnSemanticError) as cm:
                parse_network(text)
            self.assertIn(message, str(cm.exception))

    def test_variable_limit(self):
        """Test the cap on the number of variables"""
        names = [f'v{i}' for i in range(4)]
        text = 'vars: ' + ' '.join(names) + '\n' + ''.join(f"{v}' = {v}\n" for v in names)
        with self.assertRaises(BnSemanticError) as cm:
            parse_network(text, max_vars=3)
        self.assertIn('limit of 3', str(cm.exception))
        self.assertEqual(4, parse_network(text, max_vars=None).n)


class TestEvaluation(unittest.TestCase):
    def test_operators(self):
        """Test each operator's truth table"""
        for a, b in itertools.product([True, False], repeat=2):
            env = {'a': a, 'b': b}
            self.assertEqual(a and b, eval_expr(parse_expr('a & b'), env))
            self.assertEqual(a or b, eval_expr(parse_expr('a | b'), env))
            self.assertEqual(a != b, eval_expr(parse_expr('a ^ b'), env))
            self.assertEqual(a == b, eval_expr(parse_expr('a <-> b'), env))
            self.assertEqual((not a) or b, eval_expr(parse_expr('a -> b'), env))

    def test_examples(self):
        """Test a few hand-evaluated expressions"""
        self.assertTrue(eval_expr(Iff(Const(True), Const(True)), {}))
        for x in (True, False):
            self.assertTrue(eval_expr(Implies(Const(False), Var('x')), {'x': x}))

        net = parse_network(example_text)
        state = dict(zip(net.var_names, (True, False, True, True)))
        self.assertTrue(eval_expr(net.updates[1], state))

    def test_unassigned(self):
        """Test that a missing variable is an error"""
        with self.assertRaises(BnSemanticError):
            eval_expr(parse_expr('a & b'), {'a': True})


class TestStates(unittest.TestCase):
    def test_state_index(self):
        """Test the numbering of states"""
        self.assertEqual(1, state_index([True, True]))
        self.assertEqual(3, state_index([False, True]))
        self.assertEqual(4, state_index([False, False]))
        self.assertEqual(16, state_index([False] * 4))

    def test_index_to_state(self):
        """Test that the two conversions are inverse"""
        for n in range(1, 6):
            for j in range(1, 2 ** n + 1):
                self.assertEqual(j, state_index(index_to_state(j, n)))


class TestCompilation(unittest.TestCase):
    def test_structure_matrices(self):
        """Test structure matrices of small functions"""
        self.assertEqual(LogicalMatrix(2, (2, 1)), structure_matrix_of(parse_expr('!x1'), ['x1']))
        self.assertEqual(LogicalMatrix(2, (1, 2, 2, 2)), structure_matrix_of(parse_expr('x1 & x2'), ['x1', 'x2']))
        self.assertEqual(LogicalMatrix(2, (1, 2, 2, 1)), structure_matrix_of(parse_expr('x1 <-> x2'), ['x1', 'x2']))
        self.assertEqual(LogicalMatrix(2, (1, 1, 1, 1)), structure_matrix_of(parse_expr('true'), ['x1', 'x2']))

    def test_structure_matrix_columns(self):
        """Test that every column of a structure matrix is the value at that state"""
        net = parse_network(example_text)
        for e in net.updates:
            s = structure_matrix_of(e, net.var_names)
            for j in range(1, net.n_states + 1):
                value = eval_expr(e, dict(zip(net.var_names, index_to_state(j, net.n))))
                self.assertEqual(1 if value else 2, s[j])

    def test_example_network(self):
        """Test the sixteen state example"""
        net = parse_network(example_text)
        self.assertEqual(LogicalMatrix(16, example_m), transition_matrix(net))

    def test_phage_network(self):
        """Test the five gene example"""
        net = parse_network(phage_text)
        self.assertEqual(('N', 'cI', 'cII', 'cIII', 'cro'), net.var_names)
        self.assertEqual(LogicalMatrix(32, phage_m), transition_matrix(net))

    def test_simulation_agrees(self):
        """Test that compiling and simulating give the same matrix on random networks"""
        rng = random.Random(7)
        for _ in range(50):
            net = parse_network(random_network_text(rng, rng.randint(1, 5)))
            self.assertEqual(simulate_transition_matrix(net), transition_matrix(net))

    def test_output_matrix(self):
        """Test the output matrix of the indicator of the all-false state"""
        net = parse_network(example_observed_text)
        self.assertEqual(LogicalMatrix(2, (2,) * 15 + (1,)), output_matrix(net))
        with self.assertRaises(BnSemanticError):
            output_matrix(parse_network(example_text))


if __name__ == '__main__':
    unittest.main()
