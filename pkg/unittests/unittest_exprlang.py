import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import cmath
import unittest
import numpy as np
from src.autodiff import lift_point
from src.errors import DomainError, ExpressionSyntaxError, UnboundVariable
from src.exprlang import (TRUE, Var, add, const, differentiate, eval_jet, evaluate, mul, parse, parse_guard,
                          power, render)


class TestParse(unittest.TestCase):

    def test_precedence(self):
        self.assertEqual(evaluate(parse("1 + 2*3"), {}), 7)
        self.assertEqual(evaluate(parse("(1 + 2)*3"), {}), 9)
        self.assertEqual(evaluate(parse("8/2/2"), {}), 2)

    def test_power_is_right_associative(self):
        self.assertEqual(evaluate(parse("2^3^2"), {}), 512)

    def test_unary_minus_binds_looser_than_power(self):
        self.assertEqual(evaluate(parse("-2^2"), {}), -4)
        self.assertEqual(evaluate(parse("2^-1"), {}), 0.5)

    def test_constants_and_functions(self):
        self.assertEqual(evaluate(parse("i*i"), {}), -1)
        self.assertAlmostEqual(evaluate(parse("cos(pi)"), {}), -1)
        self.assertAlmostEqual(evaluate(parse("abs(3 + 4*i)"), {}), 5)
        self.assertAlmostEqual(evaluate(parse("conj(u)"), {"u": 1 + 2j}), 1 - 2j)
        self.assertAlmostEqual(evaluate(parse("re(u) + im(u)"), {"u": 1 + 2j}), 3)
        self.assertAlmostEqual(evaluate(parse("1.5e-1"), {}), 0.15)

    def test_render_reparses(self):
        for source in ("-x^2", "(x - y)*(x + y)/2", "sqrt(1 + x^2)^(-1)", "exp(-(x*y))", "x - (y - 1)"):
            e = parse(source)
            env = {"x": 0.7, "y": -1.3}
            self.assertAlmostEqual(evaluate(parse(render(e)), env), evaluate(e, env), places=12)
            self.assertEqual(parse(render(e)), e)

    def test_render_keeps_constants_whole(self):
        x = Var("x")
        for e in (const(-1.5), mul(-2.0, x), add(x, -0.25), power(add(x, const(-1.0)), 2), const(2 - 3j),
                  mul(const(0.5j), x)):
            self.assertEqual(parse(render(e)), e, render(e))
        self.assertEqual(parse("(-1.5)"), const(-1.5))
        # sem parênteses o menos continua sendo operador
        self.assertNotEqual(parse("-1.5"), const(-1.5))
        self.assertEqual(evaluate(parse("-1.5"), {}), -1.5)

    def test_syntax_errors(self):
        with self.assertRaises(ExpressionSyntaxError) as context:
            parse("1 + * 2")
        self.assertEqual(context.exception.offset, 4)
        self.assertIn("number", context.exception.expected)

        with self.assertRaises(ExpressionSyntaxError) as context:
            parse("sin(x")
        self.assertEqual(context.exception.offset, 5)
        self.assertEqual(context.exception.expected, ("')'",))

        with self.assertRaises(ExpressionSyntaxError):
            parse("x^y")
        with self.assertRaises(ExpressionSyntaxError):
            parse("x^1.5")
        with self.assertRaises(ExpressionSyntaxError):
            parse("x $ 1")
        with self.assertRaises(ExpressionSyntaxError):
            parse("sin x")

    def test_offsets_are_bytes(self):
        # "é" ocupa dois bytes em UTF-8
        with self.assertRaises(ExpressionSyntaxError) as context:
            parse("x + é")
        self.assertEqual(context.exception.offset, 4)
        with self.assertRaises(ExpressionSyntaxError) as context:
            parse_guard("x > 0 and y ≠ 0 and )")
        self.assertGreater(context.exception.offset, len("x > 0 and y ≠ 0 and "))


class TestEvaluate(unittest.TestCase):

    def test_unbound_variable(self):
        with self.assertRaises(UnboundVariable) as context:
            evaluate(parse("x + y"), {"x": 1.0})
        self.assertEqual(context.exception.name, "y")

    def test_domain_errors(self):
        with self.assertRaises(DomainError):
            evaluate(parse("1/0"), {})
        with self.assertRaises(DomainError):
            evaluate(parse("log(x)"), {"x": 0.0})
        with self.assertRaises(DomainError):
            evaluate(parse("x^(-2)"), {"x": 0.0})

    def test_jets_agree_with_symbolic_derivatives(self):
        e = parse("sin(x*y) + x^3/(1 + y^2) + sqrt(2 + x)")
        p = [0.4, -0.9]
        jet = eval_jet(e, dict(zip(("x", "y"), lift_point(p))))
        env = {"x": p[0], "y": p[1]}
        self.assertAlmostEqual(complex(jet.grad[0]), evaluate(differentiate(e, "x"), env), places=12)
        self.assertAlmostEqual(complex(jet.grad[1]), evaluate(differentiate(e, "y"), env), places=12)
        dxy = differentiate(differentiate(e, "x"), "y")
        self.assertAlmostEqual(complex(jet.hess[0, 1]), evaluate(dxy, env), places=12)

    def test_abs_derivative(self):
        e = parse("abs(x + i*y)")
        env = {"x": 3.0, "y": 4.0}
        self.assertAlmostEqual(evaluate(differentiate(e, "x"), env), 0.6)
        self.assertAlmostEqual(evaluate(differentiate(e, "y"), env), 0.8)

    def test_constant_expression_jet(self):
        jet = eval_jet(parse("2*pi"), {}, 3)
        self.assertAlmostEqual(jet.value, 2 * cmath.pi)
        np.testing.assert_array_equal(jet.grad, np.zeros(3))
        with self.assertRaises(ValueError):
            eval_jet(parse("1"), {})

    def test_builders_fold_constants(self):
        x = Var("x")
        self.assertEqual(render(add(x, 0)), "x")
        self.assertEqual(render(mul(1, x)), "x")
        self.assertEqual(evaluate(mul(const(0), x), {}), 0)
        self.assertEqual(evaluate(power(x, 0), {}), 1)

    def test_substitute(self):
        e = parse("x^2 + y").substitute({"x": parse("a + b")})
        self.assertEqual(e.variables(), frozenset({"a", "b", "y"}))
        self.assertEqual(evaluate(e, {"a": 1.0, "b": 2.0, "y": 1.0}), 10)


class TestGuard(unittest.TestCase):

    def test_conjunction(self):
        guard = parse_guard("x3 > 0 and x1^2 + x2^2 < 4")
        self.assertTrue(guard.holds({"x1": 1.0, "x2": 1.0, "x3": 0.5}))
        self.assertFalse(guard.holds({"x1": 1.0, "x2": 1.0, "x3": -0.5}))
        failing = guard.failing({"x1": 2.0, "x2": 1.0, "x3": 0.5})
        self.assertEqual(failing.op, "<")
        self.assertEqual(guard.variables(), frozenset({"x1", "x2", "x3"}))

    def test_empty_guard(self):
        self.assertIs(parse_guard(None), TRUE)
        self.assertIs(parse_guard("  "), TRUE)
        self.assertTrue(TRUE.holds({}))

    def test_conjoin_skips_duplicates(self):
        a = parse_guard("r > 0")
        b = parse_guard("r > 0 and r < 1")
        self.assertEqual(len(a.conjoin(b).clauses), 2)

    def test_missing_comparison(self):
        with self.assertRaises(ExpressionSyntaxError):
            parse_guard("x + 1")


if __name__ == "__main__":
    unittest.main()
