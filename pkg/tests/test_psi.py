"""
Unit Tests for the Psi basis and the projections rho, rho*
"""

import random
import unittest
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.coeff import Scalar
from src.core.errors import InvalidLabel, SymbolicPointUnsupported
from src.core.psi import (
    SYMBOLIC,
    XI_CACHE,
    BasisLabel,
    ParamPoint,
    PsiElement,
    ad_J0,
    ad_Jm,
    ad_Jp,
    ad_K0,
    associativity_defect,
    dagger_label,
    hermiticity_check,
    inner,
    labels_up_to,
    norm_sign,
    norm_sq,
    pi0,
    product_rho,
    random_psi_element,
    restricted_associativity_residual,
    rho,
    rho_star,
    xi,
    xi_eps0,
)
from src.core.weil import WElement, ad, generator


class TestLabels(unittest.TestCase):
    """Test doubled basis labels and points"""

    def test_validation(self):
        """n - r and n - m must be integers with |r|, |m| <= n"""
        self.assertTrue(BasisLabel(2, 0, -2).is_valid())
        self.assertFalse(BasisLabel(2, 1, 0).is_valid())
        self.assertFalse(BasisLabel(1, 3, 1).is_valid())
        with self.assertRaises(InvalidLabel):
            BasisLabel.checked(2, 1, 0)

    def test_text(self):
        """Half-integers print as fractions"""
        self.assertEqual(str(BasisLabel(3, -1, 1)), "Xi(3/2,-1/2,1/2)")

    def test_labels_up_to(self):
        """1 + 4 + 9 labels with n <= 1"""
        self.assertEqual(len(labels_up_to(2)), 14)
        self.assertTrue(all(label.r2 == 0 for label in labels_up_to(4, 0)))

    def test_points(self):
        """Rh = eps (k + 1/2) and R^2 = Rh^2 - eps^2/4"""
        point = ParamPoint.at_level(2, 1)
        self.assertEqual(point.rhat, Scalar.rational(Fraction(3, 2)))
        self.assertEqual(point.r_squared(), Scalar.rational(2))
        self.assertTrue(SYMBOLIC.is_symbolic)
        with self.assertRaises(SymbolicPointUnsupported):
            SYMBOLIC.require_numeric("test")
        with self.assertRaises(ValueError):
            ParamPoint.numeric(1, Fraction(1, 4))


class TestXiBasis(unittest.TestCase):
    """Test normal forms of the basis elements"""

    def test_low_labels(self):
        """Xi(0,0,0) = 1, Xi(1/2,1/2,1/2) = a+, Xi(1/2,1/2,-1/2) = b+, Xi(1,0,1) = J+"""
        self.assertEqual(xi(0, 0, 0), WElement.one())
        self.assertEqual(xi(1, 1, 1), WElement.a_plus())
        self.assertEqual(xi(1, 1, -1), WElement.b_plus())
        self.assertEqual(xi(1, -1, -1), -WElement.a_minus())
        self.assertEqual(xi(2, 0, 2), generator("Jp"))
        self.assertEqual(xi(2, 2, 2), WElement.a_plus() ** 2)

    def test_xi_one_zero_zero(self):
        """Xi(1,0,0) = -sqrt(2) J0"""
        self.assertEqual(xi(2, 0, 0), generator("J0").scale(-Scalar.sqrt(2)))

    def test_single_sector(self):
        """Every monomial of Xi(n,r,m) carries the sector (r, m)"""
        for label in labels_up_to(4):
            with self.subTest(label=str(label)):
                self.assertTrue(all(m.sector2 == (label.r2, label.m2) for m in xi(*label).monomials()))

    def test_eps0_construction(self):
        """The eps -> 0 ladder agrees with xi at eps = 0"""
        for label in labels_up_to(4):
            with self.subTest(label=str(label)):
                self.assertEqual(xi(*label).evaluate(eps=0), xi_eps0(*label).evaluate(eps=0))

    def test_cache(self):
        """warm_up builds every label"""
        XI_CACHE.clear()
        self.assertEqual(XI_CACHE.warm_up(2), 14)
        self.assertGreater(len(XI_CACHE), 0)


class TestRho(unittest.TestCase):
    """Test the projection along the right ideal W(K0 - Rh)"""

    def setUp(self):
        self.k0_minus_rh = generator("K0") - WElement.scalar(Scalar.rhat())

    def test_constants(self):
        """rho(1) = Xi(0,0,0), rho(K0) = Rh"""
        self.assertEqual(rho(WElement.one()), PsiElement.unit())
        self.assertEqual(rho(generator("K0")), PsiElement.basis(0, 0, 0, Scalar.rhat()))
        self.assertEqual(pi0(rho(generator("K0") + generator("J0"))), Scalar.rhat())

    def test_j0(self):
        """rho(J0) = -Xi(1,0,0)/sqrt(2)"""
        self.assertEqual(rho(generator("J0")), PsiElement.basis(2, 0, 0, Scalar.sqrt(2) * Fraction(-1, 2)))

    def test_fixes_basis(self):
        """rho(Xi(n,r,m)) = Xi(n,r,m)"""
        for label in labels_up_to(4):
            with self.subTest(label=str(label)):
                self.assertEqual(rho(xi(*label)), PsiElement.basis(*label))

    def test_kills_right_ideal(self):
        """rho(w (K0 - Rh)) = 0"""
        for w in [WElement.a_plus(), generator("Jm"), WElement({(2, 1, 0, 1): 1, (0, 0, 1, 0): 3})]:
            with self.subTest(element=str(w)):
                self.assertFalse(rho(w * self.k0_minus_rh))

    def test_rho_star_kills_left_ideal(self):
        """rho*((K0 - Rh) w) = 0"""
        for w in [WElement.a_plus(), WElement.b_minus() ** 2, generator("Kp")]:
            with self.subTest(element=str(w)):
                self.assertFalse(rho_star(self.k0_minus_rh * w))

    def test_numeric_point(self):
        """Evaluation at a point happens after projection"""
        point = ParamPoint.at_level(2, 1)
        self.assertEqual(rho(generator("K0"), point), PsiElement.basis(0, 0, 0, Fraction(3, 2)))

    def test_lift_inverts_rho(self):
        """rho(x.lift()) == x"""
        rng = random.Random(7)
        for _ in range(5):
            x = random_psi_element(rng, 3)
            self.assertEqual(rho(x.lift()), x)


class TestInnerProduct(unittest.TestCase):
    """Test orthogonality and norms"""

    def test_norms_match_closed_form(self):
        """<Xi, Xi> = ||Xi(n,r,m)||^2"""
        for label in [(1, 1, 1), (1, -1, 1), (2, 0, 0), (2, 2, -2), (3, 1, -1), (4, 0, 2)]:
            with self.subTest(label=label):
                x = PsiElement.basis(*label)
                self.assertEqual(inner(x, x), norm_sq(label[0], label[1]))

    def test_low_norms(self):
        """||a+||^2 = Rh + eps/2, ||Xi(1,0,0)||^2 = (4Rh^2 - eps^2)/6"""
        self.assertEqual(norm_sq(1, 1), Scalar.rhat() + Scalar.eps() * Fraction(1, 2))
        expected = (Scalar.rhat(2) * 4 - Scalar.eps(4)) * Fraction(1, 6)
        self.assertEqual(norm_sq(2, 0), expected)

    def test_orthogonality(self):
        """Distinct labels are orthogonal"""
        labels = [(0, 0, 0), (2, 0, 0), (2, 0, 2), (4, 0, 0), (2, 2, 0)]
        for i, first in enumerate(labels):
            for second in labels[i + 1:]:
                with self.subTest(first=first, second=second):
                    self.assertTrue(inner(PsiElement.basis(*first), PsiElement.basis(*second)).is_zero())

    def test_norm_sign(self):
        """Sign of the norm follows 2Rh/eps"""
        level = ParamPoint.at_level(2, 1)  # 2Rh/eps = 3
        self.assertEqual(norm_sign(2, 0, level), 1)
        self.assertEqual(norm_sign(8, 0, level), 0)
        for point in (ParamPoint.numeric(1, Fraction(5, 4)), ParamPoint.numeric(1, Fraction(7, 3))):
            for n2, r2 in [(2, 0), (4, 0), (6, 0), (8, 0), (6, -2), (5, 1)]:
                with self.subTest(point=str(point), n2=n2, r2=r2):
                    value = norm_sq(n2, r2, point).as_fraction()
                    expected = (value > 0) - (value < 0)
                    self.assertEqual(norm_sign(n2, r2, point), expected)

    def test_hermiticity(self):
        """rho and rho* agree on sector 0 of x^dagger y"""
        self.assertTrue(hermiticity_check(PsiElement.basis(2, 0, 2), PsiElement.basis(2, 0, 2)))
        self.assertTrue(hermiticity_check(PsiElement.basis(1, 1, 1), PsiElement.basis(3, 1, 1)))


class TestProducts(unittest.TestCase):
    """Test the rho product and its (non)associativity"""

    def setUp(self):
        self.a_plus = PsiElement.basis(1, 1, 1)
        self.a_minus = PsiElement.basis(1, -1, -1, -1)

    def test_nonassociativity_witness(self):
        """rho(rho(a+ a-) a-) - rho(a+ rho(a- a-)) = (eps/2) a-"""
        left = product_rho(product_rho(self.a_plus, self.a_minus), self.a_minus)
        right = product_rho(self.a_plus, product_rho(self.a_minus, self.a_minus))
        self.assertEqual(left - right, self.a_minus.scale(Scalar.eps() * Fraction(1, 2)))
        self.assertTrue(associativity_defect(self.a_plus, self.a_minus, self.a_minus))

    def test_restricted_associativity(self):
        """rho(x rho(y z)) = rho(x y z)"""
        rng = random.Random(11)
        for _ in range(4):
            x, y, z = (random_psi_element(rng, 2, terms=2) for _ in range(3))
            self.assertFalse(restricted_associativity_residual(x, y, z))

    def test_dagger_label(self):
        """Xi(n,r,m)^dagger = (-1)^(r+m) Xi(n,-r,-m)"""
        for label in labels_up_to(4):
            with self.subTest(label=str(label)):
                x = PsiElement.basis(*label)
                self.assertEqual(dagger_label(x).lift(), x.lift().dagger())

    def test_json(self):
        """Coefficient strings survive to_json/from_json"""
        x = PsiElement({(2, 0, 0): Scalar.sqrt(2) * Scalar.eps(), (1, 1, -1): Scalar.i()})
        self.assertEqual(PsiElement.from_json(x.to_json()), x)


class TestAdjointActions(unittest.TestCase):
    """Test the label-level adjoint actions against the commutators in W"""

    def test_against_commutators(self):
        """rho([T, Xi]) equals the label formula for J0, J+, J-, K0"""
        actions = {"J0": ad_J0, "Jp": ad_Jp, "Jm": ad_Jm, "K0": ad_K0}
        for name, action in actions.items():
            for label in labels_up_to(4):
                with self.subTest(generator=name, label=str(label)):
                    expected = action(PsiElement.basis(*label))
                    self.assertEqual(rho(ad(generator(name), xi(*label))), expected)

    @pytest.mark.slow
    def test_against_commutators_larger_n(self):
        """The same up to n = 3"""
        for label in labels_up_to(6):
            if label.n2 <= 4:
                continue
            with self.subTest(label=str(label)):
                self.assertEqual(rho(ad(generator("Jm"), xi(*label))), ad_Jm(PsiElement.basis(*label)))


if __name__ == '__main__':
    unittest.main()
