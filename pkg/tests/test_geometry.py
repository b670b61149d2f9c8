"""
Unit Tests for contractions, forms, vector fields and spinors
"""

import unittest
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.coeff import Scalar
from src.core.errors import MixedParity, SectorMismatch
from src.core.psi import ParamPoint, PsiElement
from src.modules.geometry import (
    FieldSector,
    SpinorColumn,
    bracket_eps_limit,
    coordinate_vector_sums,
    coordinates,
    d_coefficient_report,
    delta_N,
    exact_forms_report,
    exterior_d,
    metric,
    metric_unit_report,
    omega,
    spinor_column,
    spinor_membership,
    two_pi_rotation_sign,
    vector_fields,
)


class TestOmega(unittest.TestCase):
    """Test the contraction maps"""

    def test_right_nesting_matches_single(self):
        """Projecting the inner right pair first gives the same result"""
        for label in [(0, 0, 0), (2, 0, 2), (2, 0, 0), (4, 0, -2)]:
            with self.subTest(label=label):
                x = PsiElement.basis(*label)
                self.assertEqual(omega(0, 2, 2, x, nesting="right"), omega(0, 2, 2, x))

    def test_sector_shift(self):
        """omega^{r1 r2} moves sector r to r + r1 - r2"""
        image = omega(0, 2, 2, PsiElement.basis(2, 0, 2))
        self.assertEqual(image.sectors(), [-2])

    def test_unknown_nesting(self):
        """Only single, right and left"""
        with self.assertRaises(ValueError):
            omega(0, 2, 2, PsiElement.unit(), nesting="middle")


class TestExteriorDerivative(unittest.TestCase):
    """Test d on scalar functions"""

    def setUp(self):
        self.point = ParamPoint.at_level(2, 1)

    def test_eigenvalue_normalization(self):
        """(2Rh + eps) d Xi(1,0,m) = 2(Rh + eps/2) Xi(1,-1,m)"""
        row = d_coefficient_report(2)[0]
        self.assertTrue(row["proportional"])
        self.assertTrue(row["m_independent"])
        self.assertTrue(row["matches_2R_plus_eps"])

    def test_basis_one_forms_are_exact(self):
        """Every Xi(n,-1,m) is a nonzero multiple of d Xi(n,0,m)"""
        report = exact_forms_report(4, self.point)
        self.assertEqual(len(report["rows"]), 3 + 5)
        self.assertTrue(report["all_exact"])

    def test_constant_is_closed(self):
        """d 1 = 0"""
        self.assertFalse(exterior_d(PsiElement.unit(), self.point))

    def test_sector_zero_only(self):
        """d is defined on functions"""
        with self.assertRaises(SectorMismatch):
            exterior_d(PsiElement.basis(1, 1, 1), self.point)


class TestVectorFields(unittest.TestCase):
    """Test coordinates, vector fields and the metric"""

    def setUp(self):
        self.point = ParamPoint.at_level(2, 1)  # 2Rh + eps = 4

    def test_coordinate_normalization(self):
        """x^m = Xi(1,0,m)/2 at 2Rh + eps = 4"""
        xs = coordinates(self.point)
        self.assertEqual(xs[1], PsiElement.basis(2, 0, 0, Fraction(1, 2)))

    def test_fields_in_sector_one(self):
        """X_m lies in Psi^1"""
        for X in vector_fields(self.point):
            self.assertEqual(X.sectors(), [2])

    def test_coordinate_vector_sums(self):
        """sum_m x^m X_m and sum_m X_m x^m vanish"""
        left, right = coordinate_vector_sums(self.point)
        self.assertFalse(left)
        self.assertFalse(right)

    def test_metric_unit_part(self):
        """pi0 g(X_i, X_j) = delta_ij (2Rh + 2eps)/3"""
        report = metric_unit_report(self.point)
        self.assertEqual(len(report["entries"]), 9)
        self.assertTrue(report["all_match"])

    def test_metric_sector_check(self):
        """The metric pairs sector-1 elements"""
        with self.assertRaises(SectorMismatch):
            metric(PsiElement.unit(), PsiElement.basis(2, 2, 0))

    def test_field_sector(self):
        """Kinds by sector"""
        self.assertEqual(FieldSector(2, PsiElement.basis(2, 2, 0)).kind, "vector")
        self.assertEqual(FieldSector(-2, PsiElement.basis(2, -2, 0)).kind, "one-form")
        self.assertEqual(FieldSector(4, PsiElement.basis(4, 4, 0)).kind, "tensor")
        with self.assertRaises(SectorMismatch):
            FieldSector(0, PsiElement.basis(1, 1, 1))


class TestBracket(unittest.TestCase):
    """Test the eps -> 0 bracket and the grading operator"""

    def test_bracket_with_j0(self):
        """{Xi(1,0,0), Xi(1,0,1)} = i sqrt(2) Xi(1,0,1)"""
        value = bracket_eps_limit(PsiElement.basis(2, 0, 0), PsiElement.basis(2, 0, 2))
        self.assertEqual(value, PsiElement.basis(2, 0, 2, Scalar.i() * Scalar.sqrt(2)))

    def test_bracket_antisymmetric(self):
        """{x, y} = -{y, x}"""
        x, y = PsiElement.basis(2, 0, -2), PsiElement.basis(3, 1, 1)
        self.assertEqual(bracket_eps_limit(x, y), -bracket_eps_limit(y, x))

    def test_delta_n(self):
        """delta_N scales Xi(n,r,m) by n"""
        x = PsiElement.basis(3, 1, 1) + PsiElement.basis(2, 0, 0, 4)
        self.assertEqual(delta_N(x), PsiElement.basis(3, 1, 1, Fraction(3, 2)) + PsiElement.basis(2, 0, 0, 4))


class TestSpinors(unittest.TestCase):
    """Test spinor columns and the 2 pi rotation"""

    def setUp(self):
        self.point = ParamPoint.at_level(2, 1)

    def test_built_column_is_member(self):
        """(a+, b+) f1 + (a-, b-) f2 lies in the spinor set"""
        column = spinor_column(PsiElement.unit(), PsiElement.basis(2, 0, 0), self.point)
        self.assertTrue(spinor_membership(column, self.point).member)

    def test_lone_entry_is_not_member(self):
        """(a+, 0) is not of the form above"""
        column = SpinorColumn(PsiElement.basis(1, 1, 1), PsiElement.zero())
        self.assertFalse(spinor_membership(column, self.point).member)

    def test_column_sectors(self):
        """Entries live in sectors +-1/2"""
        with self.assertRaises(SectorMismatch):
            SpinorColumn(PsiElement.unit(), PsiElement.zero())

    def test_two_pi_rotation(self):
        """Half-integer n flips sign"""
        self.assertEqual(two_pi_rotation_sign(PsiElement.basis(1, 1, 1)), -1)
        self.assertEqual(two_pi_rotation_sign(PsiElement.basis(2, 0, 0)), 1)
        self.assertEqual(two_pi_rotation_sign(PsiElement.zero()), 1)
        with self.assertRaises(MixedParity):
            two_pi_rotation_sign(PsiElement.basis(1, 1, 1) + PsiElement.basis(2, 0, 0))


if __name__ == '__main__':
    unittest.main()
