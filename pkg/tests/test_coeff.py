"""
Unit Tests for the exact coefficient ring
"""

import unittest
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.coeff import Scalar, div_exact, squarefree_split
from src.core.errors import NotDivisible, NotEpsDivisible, ParseError


class TestSquarefree(unittest.TestCase):
    """Test squarefree splitting"""

    def test_split(self):
        """n = e^2 d with d squarefree"""
        self.assertEqual(squarefree_split(1), (1, 1))
        self.assertEqual(squarefree_split(12), (2, 3))
        self.assertEqual(squarefree_split(72), (6, 2))
        self.assertEqual(squarefree_split(30), (1, 30))

    def test_rejects_non_positive(self):
        """Zero has no split"""
        with self.assertRaises(ValueError):
            squarefree_split(0)


class TestScalarArithmetic(unittest.TestCase):
    """Test ring operations"""

    def setUp(self):
        self.eps = Scalar.eps()
        self.rh = Scalar.rhat()

    def test_sqrt_canonical(self):
        """Surds are reduced to squarefree radicands"""
        self.assertEqual(Scalar.sqrt(8), Scalar.sqrt(2) * 2)
        self.assertEqual(Scalar.sqrt(Fraction(1, 2)), Scalar.sqrt(2) * Fraction(1, 2))
        self.assertEqual(Scalar.sqrt(4), Scalar.rational(2))
        self.assertTrue(Scalar.sqrt(0).is_zero())

    def test_surd_product(self):
        """sqrt(6) sqrt(10) = 2 sqrt(15)"""
        self.assertEqual(Scalar.sqrt(6) * Scalar.sqrt(10), Scalar.sqrt(15) * 2)
        self.assertEqual(Scalar.sqrt(3) * Scalar.sqrt(3), Scalar.rational(3))

    def test_gaussian(self):
        """i^2 = -1 and conjugation flips the imaginary part"""
        i = Scalar.i()
        self.assertEqual(i * i, Scalar.rational(-1))
        z = Scalar.gaussian(1, 2)
        self.assertEqual(z * z.conjugate(), Scalar.rational(5))

    def test_cancellation(self):
        """Terms that cancel leave no entry"""
        value = (self.eps + self.rh) - self.rh - self.eps
        self.assertTrue(value.is_zero())
        self.assertEqual(len(value), 0)

    def test_power_and_inverse(self):
        """Monomials invert; negative powers use the inverse"""
        m = Scalar.sqrt(2) * self.eps * 3
        self.assertEqual(m * m.inverse(), Scalar.one())
        self.assertEqual(self.rh ** -2 * self.rh ** 2, Scalar.one())
        with self.assertRaises(NotDivisible):
            (self.eps + self.rh).inverse()

    def test_divide_eps(self):
        """Exact division by eps powers"""
        value = self.eps * self.rh + self.eps ** 2
        self.assertEqual(value.divide_eps(2), self.rh + self.eps)
        with self.assertRaises(NotEpsDivisible):
            (self.rh + self.eps).divide_eps(2)

    def test_eps_order(self):
        """Minimum doubled exponent"""
        self.assertEqual((self.eps ** 2 + Scalar.eps(3)).eps_order(), 3)
        self.assertEqual(Scalar.zero().eps_order(), float("inf"))


class TestScalarEvaluation(unittest.TestCase):
    """Test substitution of eps and Rh"""

    def test_evaluate_rational_point(self):
        """2 Rh + eps at eps = 1, Rh = 3/2"""
        value = Scalar.rhat() * 2 + Scalar.eps()
        self.assertEqual(value.evaluate(1, Fraction(3, 2)), Scalar.rational(4))

    def test_half_power_of_eps(self):
        """eps^(1/2) at eps = 2 is sqrt(2)"""
        self.assertEqual(Scalar.eps(1).evaluate(2), Scalar.sqrt(2))

    def test_drop_eps(self):
        """eps -> 0 keeps Rh"""
        value = Scalar.rhat() + Scalar.eps() * 5
        self.assertEqual(value.drop_eps(), Scalar.rhat())

    def test_partial_evaluation(self):
        """Substituting Rh only keeps eps symbolic"""
        value = Scalar.rhat() * Scalar.eps()
        self.assertEqual(value.subs_rhat(2), Scalar.eps() * 2)

    def test_float(self):
        """Floating evaluation matches the exact value"""
        value = Scalar.sqrt(2) * Scalar.eps() + Scalar.rhat() ** 2
        self.assertAlmostEqual(value.evaluate_float(eps=0.5, rhat=2.0).real, 2 ** 0.5 * 0.5 + 4.0)


class TestDivExact(unittest.TestCase):
    """Test exact division"""

    def test_monomial_divisor(self):
        """q * y == x"""
        x = Scalar.eps() * Scalar.rhat() * 6
        y = Scalar.rhat() * 2
        self.assertEqual(div_exact(x, y), Scalar.eps() * 3)

    def test_multi_term_needs_point(self):
        """2 Rh + eps is not a unit of the ring"""
        y = Scalar.rhat() * 2 + Scalar.eps()
        with self.assertRaises(NotDivisible):
            div_exact(Scalar.one(), y)
        self.assertEqual(div_exact(Scalar.one(), y, (1, 1)), Scalar.rational(Fraction(1, 3)))

    def test_zero_divisor(self):
        """Division by zero"""
        with self.assertRaises(ZeroDivisionError):
            div_exact(Scalar.one(), Scalar.zero())


class TestScalarText(unittest.TestCase):
    """Test canonical text and parsing"""

    def test_format(self):
        """Canonical rendering"""
        self.assertEqual(str(Scalar.zero()), "0")
        self.assertEqual(str(Scalar.rational(Fraction(-1, 2)) * Scalar.eps()), "-(1/2)*eps")
        self.assertEqual(str(Scalar.sqrt(3) * Scalar.rhat(2)), "sqrt(3)*Rh^2")

    def test_parse_inverts_format(self):
        """parse(str(x)) == x for mixed values"""
        samples = [
            Scalar.rational(Fraction(7, 3)),
            Scalar.gaussian(Fraction(1, 2), Fraction(-3, 2)) * Scalar.sqrt(5),
            Scalar.eps(3) * Scalar.rhat(-1) - Scalar.i() * 2,
            Scalar.rhat() * 2 + Scalar.eps() + Scalar.sqrt(6) * Fraction(1, 4),
        ]
        for value in samples:
            with self.subTest(value=str(value)):
                self.assertEqual(Scalar.parse(str(value)), value)

    def test_parse_error(self):
        """Bad input raises ParseError"""
        with self.assertRaises(ParseError):
            Scalar.parse("eps^^2")
        with self.assertRaises(ParseError):
            Scalar.parse("x + 1")


if __name__ == '__main__':
    unittest.main()
