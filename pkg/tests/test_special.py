"""
Unit Tests for special functions, closed forms and the classical limit
"""

import math
import random
import unittest
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.special import eval_jacobi
from sympy import S
from sympy.physics.wigner import clebsch_gordan as sympy_clebsch_gordan

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.coeff import Scalar
from src.core.errors import InvalidCoupling, NonTerminating
from src.core.psi import ParamPoint, ReducedSector, labels_up_to
from src.modules.hilbert import norm_at_level
from src.modules.special import (
    EulerAngles,
    HahnSpec,
    classical_generators,
    clebsch_gordan,
    closed_form_case,
    hahn,
    hahn_coefficients,
    hahn_eps0_form,
    hahn_eps0_poly,
    hahn_leading,
    hahn_norm_sq,
    hahn_weight,
    hyp2f1_terminating,
    jacobi,
    norm_sq_hypergeometric,
    pipeline_reduced,
    poly_value,
    triangle,
    wigner_small_d,
    xi_classical,
    xi_closed_form,
)


class TestHypergeometric(unittest.TestCase):
    """Test terminating hypergeometric sums"""

    def test_chu_vandermonde(self):
        """2F1(-n, b; c; 1) = (c-b)_n / (c)_n"""
        self.assertEqual(hyp2f1_terminating(-3, 2, 5), Scalar.rational(Fraction(2, 7)))
        self.assertEqual(hyp2f1_terminating(-2, Fraction(1, 2), 3), Scalar.rational(Fraction(35, 48)))

    def test_non_terminating(self):
        """No non-positive integer numerator"""
        with self.assertRaises(NonTerminating):
            hyp2f1_terminating(1, 2, 3)

    def test_denominator_hits_zero(self):
        """A vanishing denominator before termination"""
        with self.assertRaises(NonTerminating):
            hyp2f1_terminating(-3, 1, -1)

    def test_norm_chain(self):
        """The 2F1 form of the norm equals the product form at every level"""
        for n2, r2 in [(1, 1), (1, -1), (2, 0), (2, 2), (3, -1), (4, 0), (4, -2)]:
            for k2 in range(1, 6):
                with self.subTest(n2=n2, r2=r2, k2=k2):
                    self.assertEqual(norm_sq_hypergeometric(n2, r2, k2), norm_at_level(n2, r2, k2))


class TestHahn(unittest.TestCase):
    """Test Hahn polynomials in the Nikiforov normalization"""

    def test_degree_zero(self):
        """h_0 = 1"""
        self.assertEqual(hahn(HahnSpec(0, 1, 2, 3, 5)), Scalar.one())

    def test_leading_coefficient(self):
        """(alpha+beta+n+1)_n / n!"""
        coeffs = hahn_coefficients(3, 1, 2, 7)
        self.assertEqual(len(coeffs), 4)
        self.assertEqual(coeffs[-1], Scalar.rational(hahn_leading(3, 1, 2)))

    def test_value_matches_coefficients(self):
        """hahn() and the coefficient list agree"""
        coeffs = hahn_coefficients(2, 0, 1, 6)
        for x in range(6):
            self.assertEqual(hahn(HahnSpec(2, 0, 1, x, 6)), poly_value(coeffs, x))

    def test_orthogonality(self):
        """sum_x weight(x) h_n(x) h_m(x) = delta_nm ||h_n||^2"""
        alpha, beta, N = 1, 2, 5
        for n in range(4):
            for m in range(4):
                with self.subTest(n=n, m=m):
                    total = Scalar.zero()
                    for x in range(N):
                        weight = hahn_weight(x, alpha, beta, N)
                        total = total + hahn(HahnSpec(n, alpha, beta, x, N)) * hahn(HahnSpec(m, alpha, beta, x, N)) * weight
                    if n == m:
                        self.assertEqual(total, Scalar.rational(hahn_norm_sq(n, alpha, beta, N)))
                    else:
                        self.assertTrue(total.is_zero())

    def test_invalid_parameters(self):
        """Negative degree or parameters"""
        with self.assertRaises(ValueError):
            HahnSpec(-1, 0, 0, 0, 3)
        with self.assertRaises(ValueError):
            HahnSpec(1, -1, 0, 0, 3)


class TestClosedForm(unittest.TestCase):
    """Test the Hahn closed form of the basis against the ladder construction"""

    def test_cases(self):
        """The four orderings of -r, r, -m, m"""
        self.assertEqual(closed_form_case(4, 2, 0), 1)
        self.assertEqual(closed_form_case(4, 0, 2), 2)
        self.assertEqual(closed_form_case(4, 0, -2), 3)
        self.assertEqual(closed_form_case(4, -2, 0), 4)

    def test_matches_pipeline(self):
        """Closed form == reduced form of xi, symbolic in eps and Rh"""
        for label in labels_up_to(4):
            with self.subTest(label=str(label)):
                self.assertEqual(xi_closed_form(*label), pipeline_reduced(*label))

    def test_matches_pipeline_at_point(self):
        """The same after evaluation"""
        point = ParamPoint.at_level(3, Fraction(1, 2))
        for label in labels_up_to(3):
            with self.subTest(label=str(label)):
                self.assertEqual(xi_closed_form(*label, point=point), pipeline_reduced(*label, point=point))

    @pytest.mark.slow
    def test_matches_pipeline_larger_n(self):
        """Up to n = 3"""
        for label in labels_up_to(6):
            with self.subTest(label=str(label)):
                self.assertEqual(xi_closed_form(*label), pipeline_reduced(*label))

    def test_eps0_limit(self):
        """The Jacobi form is the closed form at eps = 0"""
        at_zero = ParamPoint(eps=0)
        for label in labels_up_to(4):
            with self.subTest(label=str(label)):
                expected = pipeline_reduced(*label, point=at_zero)
                self.assertEqual(ReducedSector.trimmed(label.r2, label.m2, hahn_eps0_poly(*label)), expected)


class TestJacobi(unittest.TestCase):
    """Test Jacobi polynomials against scipy"""

    def test_exact_values(self):
        """P_2^(0,0)(1/2) = -1/8"""
        self.assertEqual(jacobi(2, 0, 0, Fraction(1, 2)), Scalar.rational(Fraction(-1, 8)))
        self.assertEqual(jacobi(3, 2, 1, 1), Scalar.rational(10))

    def test_against_scipy(self):
        """Float evaluation matches eval_jacobi"""
        for degree, alpha, beta in [(1, 0, 0), (2, 1, 0), (3, 1, 2), (4, 0, 3)]:
            for z in np.linspace(-1.0, 1.0, 7):
                with self.subTest(degree=degree, alpha=alpha, beta=beta, z=z):
                    self.assertAlmostEqual(jacobi(degree, alpha, beta, float(z)), eval_jacobi(degree, alpha, beta, z))


class TestWigner(unittest.TestCase):
    """Test rotation matrices and Clebsch-Gordan coefficients"""

    def test_spin_half(self):
        """d^(1/2) in the standard convention"""
        beta = 0.7
        self.assertAlmostEqual(wigner_small_d(1, 1, 1, beta), math.cos(beta / 2))
        self.assertAlmostEqual(wigner_small_d(1, 1, -1, beta), -math.sin(beta / 2))
        self.assertAlmostEqual(wigner_small_d(1, -1, 1, beta), math.sin(beta / 2))

    def test_unitarity(self):
        """Rows of d^j are unit vectors"""
        for j2 in (2, 3, 4):
            for mp2 in range(-j2, j2 + 1, 2):
                total = sum(wigner_small_d(j2, mp2, m2, 1.1) ** 2 for m2 in range(-j2, j2 + 1, 2))
                self.assertAlmostEqual(total, 1.0)

    def test_invalid_projection(self):
        """m beyond j"""
        with self.assertRaises(InvalidCoupling):
            wigner_small_d(2, 4, 0, 0.3)

    def test_cg_against_sympy(self):
        """Exact CG coefficients match sympy"""
        cases = [(1, 1, 2, 1, 1, 2), (1, 1, 0, 1, -1, 0), (2, 2, 2, 2, 0, 2), (2, 1, 3, 0, 1, 1), (4, 2, 4, 2, -2, 0)]
        for j1, j2, j, m1, m2, m in cases:
            with self.subTest(case=(j1, j2, j, m1, m2, m)):
                reference = sympy_clebsch_gordan(S(j1) / 2, S(j2) / 2, S(j) / 2, S(m1) / 2, S(m2) / 2, S(m) / 2)
                value = clebsch_gordan(j1, j2, j, m1, m2, m).to_complex().real
                self.assertAlmostEqual(value, float(reference))

    def test_cg_orthonormal(self):
        """sum_{m1,m2} <j1 m1 j2 m2|j m>^2 = 1"""
        j1, j2, j, m = 2, 3, 3, 1
        total = Scalar.zero()
        for m1 in range(-j1, j1 + 1, 2):
            m2 = m - m1
            if abs(m2) <= j2:
                value = clebsch_gordan(j1, j2, j, m1, m2, m)
                total = total + value * value
        self.assertEqual(total, Scalar.one())

    def test_selection_rules(self):
        """Triangle rule and m1 + m2 = m"""
        self.assertTrue(triangle(2, 2, 4))
        self.assertFalse(triangle(2, 2, 6))
        self.assertFalse(triangle(2, 1, 2))
        self.assertTrue(clebsch_gordan(2, 2, 2, 2, 0, 0).is_zero())
        with self.assertRaises(InvalidCoupling):
            clebsch_gordan(2, 2, 6, 0, 0, 0)


class TestClassicalLimit(unittest.TestCase):
    """Test the eps = 0 limit under the Euler-angle substitution"""

    def setUp(self):
        rng = random.Random(5)
        self.samples = [EulerAngles.random(rng) for _ in range(4)]
        self.radius = 1.5

    def test_generators(self):
        """J0 = R cos(beta), |J+|^2 = R^2 sin(beta)^2"""
        for angles in self.samples:
            j0, jp, jm = classical_generators(self.radius, angles)
            self.assertAlmostEqual(j0.real, self.radius * math.cos(angles.beta))
            self.assertAlmostEqual(abs(jp), self.radius * abs(math.sin(angles.beta)))
            self.assertAlmostEqual(jm, jp.conjugate())

    def test_jacobi_form(self):
        """xi at eps = 0 equals the Jacobi closed form"""
        for angles in self.samples:
            for label in labels_up_to(4):
                with self.subTest(label=str(label)):
                    direct = xi_classical(*label, self.radius, angles)
                    self.assertLess(abs(direct - hahn_eps0_form(*label, self.radius, angles)), 1e-9)

    def test_finite_angles(self):
        """Angles must be finite"""
        with self.assertRaises(ValueError):
            EulerAngles(float("nan"), 0.0, 0.0)


if __name__ == '__main__':
    unittest.main()
