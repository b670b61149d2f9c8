"""
Geometry on the fuzzy sphere built from Psi

Contractions omega, the exterior derivative, coordinates, 1-forms,
vector fields, the metric, the eps -> 0 bracket and the spinor column.
Prefactors such as (2Rh + eps)^(-1/2) are not polynomial, so everything
that carries one wants a numeric ParamPoint; the *_symbolic variants keep
the prefactor cleared and stay in the polynomial ring.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from src.core.coeff import Scalar, div_exact
from src.core.errors import MixedParity, NotDivisible, SectorMismatch
from src.core.psi import (
    SYMBOLIC,
    BasisLabel,
    ParamPoint,
    PsiElement,
    pi0,
    rho,
    xi,
)
from src.core.weil import WElement
from src.utils.logger import PsiLogger

NESTINGS = ("single", "right", "left")
FIELD_KINDS = {0: "scalar", 2: "vector", -2: "one-form", 1: "spinor", -1: "spinor"}

logger = PsiLogger("geometry")


@dataclass(frozen=True)
class FieldSector:
    """An element of Psi^r together with its sector r = r2/2"""
    r2: int
    element: PsiElement

    def __post_init__(self):
        stray = [r for r in self.element.sectors() if r != self.r2]
        if stray:
            raise SectorMismatch(f"element has sectors {stray} outside r2={self.r2}")

    @property
    def kind(self) -> str:
        return FIELD_KINDS.get(self.r2, "tensor")


def _two_rhat_plus(eps_multiple: int) -> Scalar:
    return Scalar.rhat() * 2 + Scalar.eps() * eps_multiple


def _inverse_at(point: ParamPoint, value: Scalar) -> Scalar:
    return div_exact(Scalar.one(), value, point.as_tuple())


def _inverse_sqrt_at(point: ParamPoint, value: Scalar) -> Scalar:
    number = point.evaluate(value)
    if not number.is_rational():
        raise NotDivisible(f"{value} is not rational at {point}; its square root has no exact surd")
    q = number.as_fraction()
    if q <= 0:
        raise ZeroDivisionError(f"{value} = {q} at {point}")
    return Scalar.sqrt(1 / q)


def _require_sector(x: PsiElement, r2: int, what: str):
    stray = [r for r in x.sectors() if r != r2]
    if stray:
        raise SectorMismatch(f"{what} must lie in sector r2={r2}, found {stray}")


# -------------------------------------------------------------------- contractions


def omega(
    r1_2: int, r2_2: int, n2: int, x: PsiElement, point: ParamPoint = SYMBOLIC, nesting: str = "single"
) -> PsiElement:
    """
    omega^{r1 r2}_n(x) = sum_m rho(Xi(n,r2,m)^dagger x Xi(n,r1,m))

    Args:
        r1_2, r2_2, n2: Doubled labels
        x: Element of Psi
        point: Evaluation point, applied once at the end
        nesting: "single" projects the triple product once; "right" and
            "left" project the inner pair first

    Returns:
        Element shifted from sector r to r + r1 - r2
    """
    if nesting not in NESTINGS:
        raise ValueError(f"nesting must be one of {NESTINGS}, got {nesting!r}")
    BasisLabel.checked(n2, r1_2, n2)
    BasisLabel.checked(n2, r2_2, n2)
    lifted = x.lift()
    total = PsiElement.zero()
    for m2 in range(-n2, n2 + 1, 2):
        left = xi(n2, r2_2, m2).dagger()
        right = xi(n2, r1_2, m2)
        if nesting == "single":
            term = rho(left * lifted * right)
        elif nesting == "right":
            term = rho(left * rho(lifted * right).lift())
        else:
            term = rho(rho(left * lifted).lift() * right)
        total = total + term
    return total.evaluate(point)


# -------------------------------------------------------------------- forms and derivative


def coordinates(point: ParamPoint) -> List[PsiElement]:
    """x^m = (2Rh + eps)^(-1/2) Xi(1,0,m) for m = -1, 0, 1"""
    point.require_numeric("coordinates")
    factor = _inverse_sqrt_at(point, _two_rhat_plus(1))
    return [PsiElement.basis(2, 0, m2, factor) for m2 in (-2, 0, 2)]


def one_forms(point: ParamPoint) -> List[PsiElement]:
    """dx^m = (2Rh + eps)^(-1/2) Xi(1,-1,m) for m = -1, 0, 1"""
    point.require_numeric("one_forms")
    factor = _inverse_sqrt_at(point, _two_rhat_plus(1))
    return [PsiElement.basis(2, -2, m2, factor) for m2 in (-2, 0, 2)]


def exterior_d_symbolic(f: PsiElement) -> PsiElement:
    """eps^(-1) omega^{01}_1(f), i.e. (2Rh + eps) df"""
    return omega(0, 2, 2, f).map_coefficients(lambda c: c.divide_eps(2))


def extended_d(f: PsiElement, point: ParamPoint) -> PsiElement:
    """The derivative formula applied on any sector: Psi^r -> Psi^(r-1)"""
    point.require_numeric("exterior derivative")
    return exterior_d_symbolic(f).evaluate(point).scale(_inverse_at(point, _two_rhat_plus(1)))


def exterior_d(f: PsiElement, point: ParamPoint) -> PsiElement:
    """df = (2Rh + eps)^(-1) eps^(-1) omega^{01}_1(f) for f in sector 0"""
    _require_sector(f, 0, "exterior_d argument")
    return extended_d(f, point)


def d_coefficient_report(n_max2: int) -> List[Dict]:
    """
    Eigenvalue of (2Rh + eps) d on Xi(n,0,m) against both printed coefficients

    The "2Rh+eps" candidate reads d Xi(n,0,m) = 2n(Rh + eps n/2)(2Rh + eps)^(-1) Xi(n,-1,m);
    the "Rh+eps" candidate replaces the denominator by (Rh + eps).
    """
    rows = []
    for n2 in range(2, n_max2 + 1, 2):
        numerator = (Scalar.rhat() + Scalar.eps() * Fraction(n2, 4)) * n2
        values = []
        proportional = True
        for m2 in range(-n2, n2 + 1, 2):
            image = exterior_d_symbolic(PsiElement.basis(n2, 0, m2))
            proportional = proportional and image.labels() == [BasisLabel(n2, -2, m2)]
            values.append(image.coefficient(n2, -2, m2))
        value = values[0]
        rows.append(
            {
                "n2": n2,
                "eigenvalue": str(value),
                "proportional": proportional,
                "m_independent": all(v == value for v in values),
                "matches_2R_plus_eps": value == numerator,
                "matches_R_plus_eps": value * (Scalar.rhat() + Scalar.eps()) == numerator * _two_rhat_plus(1),
            }
        )
    return rows


def exact_forms_report(n_max2: int, point: ParamPoint) -> Dict:
    """Every basis 1-form Xi(n,-1,m) with n <= n_max is a multiple of d Xi(n,0,m)"""
    rows = []
    for n2 in range(2, n_max2 + 1, 2):
        for m2 in range(-n2, n2 + 1, 2):
            image = exterior_d(PsiElement.basis(n2, 0, m2), point)
            target = BasisLabel(n2, -2, m2)
            coefficient = image.coefficient(*target)
            rows.append(
                {
                    "label": str(target),
                    "coefficient": str(coefficient),
                    "exact": image.labels() == [target] and not coefficient.is_zero(),
                }
            )
    return {"rows": rows, "all_exact": all(row["exact"] for row in rows)}


def d_squared_witness(point: ParamPoint, n_max2: int = 6) -> Optional[Dict]:
    """First Xi(n,0,0) with d(d f) != 0 under the extended derivative"""
    for n2 in range(4, n_max2 + 1, 2):
        f = PsiElement.basis(n2, 0, 0)
        df = exterior_d(f, point)
        ddf = extended_d(df, point)
        if ddf:
            logger.log_event("d_squared_witness", {"f": str(f), "point": str(point)})
            return {"f": str(f), "df": str(df), "ddf": str(ddf)}
    return None


# -------------------------------------------------------------------- vector fields and metric


def vector_fields(point: ParamPoint) -> List[PsiElement]:
    """X_m = (dx^m)^dagger = (-1)^(m+1) (2Rh + eps)^(-1/2) Xi(1,1,-m), m = -1, 0, 1"""
    point.require_numeric("vector_fields")
    factor = _inverse_sqrt_at(point, _two_rhat_plus(1))
    fields = []
    for m2 in (-2, 0, 2):
        sign = 1 if (m2 // 2 + 1) % 2 == 0 else -1
        fields.append(PsiElement.basis(2, 2, -m2, factor * sign))
    return fields


def vector_action(X: PsiElement, f: PsiElement, point: ParamPoint) -> PsiElement:
    """X(f) = rho((df) X)"""
    _require_sector(X, 2, "vector field")
    return rho(exterior_d(f, point).lift() * X.lift(), point)


def coordinate_vector_sums(point: ParamPoint) -> Tuple[PsiElement, PsiElement]:
    """(sum_m rho(x^m X_m), sum_m rho(X_m x^m)); both vanish"""
    xs = coordinates(point)
    fields = vector_fields(point)
    left = PsiElement.zero()
    right = PsiElement.zero()
    for x, X in zip(xs, fields):
        left = left + rho(x.lift() * X.lift(), point)
        right = right + rho(X.lift() * x.lift(), point)
    return left, right


def leibniz_defect(f: PsiElement, g: PsiElement, vector_m2: Optional[int] = None) -> PsiElement:
    """
    Leibniz defect with the (2Rh + eps) prefactors cleared, symbolic in eps and Rh

    vector_m2=None measures D(fg) - D(f)g - fD(g) for D = (2Rh + eps) d;
    otherwise the same for f -> rho(D(f) Xi(1,1,-m)), the unnormalized X_m.
    """
    _require_sector(f, 0, "Leibniz argument")
    _require_sector(g, 0, "Leibniz argument")

    def derivation(h: PsiElement) -> PsiElement:
        dh = exterior_d_symbolic(h)
        if vector_m2 is None:
            return dh
        return rho(dh.lift() * xi(2, 2, -vector_m2))

    fg = rho(f.lift() * g.lift())
    return derivation(fg) - rho(derivation(f).lift() * g.lift()) - rho(f.lift() * derivation(g).lift())


def metric(X: PsiElement, Y: PsiElement, point: ParamPoint = SYMBOLIC) -> PsiElement:
    """g(X, Y) = rho(X^dagger Y) for X, Y in sector 1"""
    _require_sector(X, 2, "metric argument")
    _require_sector(Y, 2, "metric argument")
    return rho(X.lift().dagger() * Y.lift(), point)


def metric_unit_report(point: ParamPoint) -> Dict:
    """pi0(g(X_i, X_j)) against delta_ij (2Rh + 2eps)/3 and the off-diagonal g(X_i, X_j)"""
    fields = vector_fields(point)
    expected_diagonal = point.evaluate(_two_rhat_plus(2) * Fraction(1, 3))
    entries = []
    off_diagonal_nonzero = False
    for i, X in zip((-1, 0, 1), fields):
        for j, Y in zip((-1, 0, 1), fields):
            g = metric(X, Y, point)
            value = pi0(g)
            expected = expected_diagonal if i == j else Scalar.zero()
            if i != j and g:
                off_diagonal_nonzero = True
            entries.append({"i": i, "j": j, "pi0": str(value), "expected": str(expected), "matches": value == expected})
    return {
        "entries": entries,
        "all_match": all(entry["matches"] for entry in entries),
        "off_diagonal_nonzero": off_diagonal_nonzero,
    }


# -------------------------------------------------------------------- bracket


def bracket_eps_limit(x: PsiElement, y: PsiElement) -> PsiElement:
    """{x, y} = lim_{eps -> 0} (1/(i eps)) rho([x, y]), Rh kept symbolic"""
    lx, ly = x.lift(), y.lift()
    commutator = rho(lx * ly - ly * lx)
    minus_i = -Scalar.i()
    return commutator.map_coefficients(lambda c: (c.divide_eps(2) * minus_i).drop_eps())


def delta_N(x: PsiElement) -> PsiElement:
    """delta_N Xi(n,r,m) = n Xi(n,r,m)"""
    return PsiElement({tuple(label): c * Fraction(label.n2, 2) for label, c in x.items()})


# -------------------------------------------------------------------- spinors


@dataclass(frozen=True)
class SpinorColumn:
    """Column (upper, lower) of elements in sectors +-1/2"""
    upper: PsiElement
    lower: PsiElement

    def __post_init__(self):
        for entry in (self.upper, self.lower):
            stray = [r for r in entry.sectors() if r not in (-1, 1)]
            if stray:
                raise SectorMismatch(f"spinor entries live in sectors +-1/2, found r2 in {stray}")

    def __str__(self) -> str:
        return f"({self.upper}; {self.lower})"


@dataclass
class SpinorMembership:
    member: bool
    f1: PsiElement
    f2: PsiElement


def spinor_column(f1: PsiElement, f2: PsiElement, point: ParamPoint = SYMBOLIC) -> SpinorColumn:
    """(a+, b+)^T f1 + (a-, b-)^T f2 for f1, f2 in sector 0"""
    _require_sector(f1, 0, "spinor coefficient f1")
    _require_sector(f2, 0, "spinor coefficient f2")
    l1, l2 = f1.lift(), f2.lift()
    upper = rho(WElement.a_plus() * l1 + WElement.a_minus() * l2, point)
    lower = rho(WElement.b_plus() * l1 + WElement.b_minus() * l2, point)
    return SpinorColumn(upper, lower)


def spinor_membership(column: SpinorColumn, point: ParamPoint) -> SpinorMembership:
    """
    Decide whether a column lies in the spinor set

    a- a+ + b- b+ = 2K0 + eps and a+ a- + b+ b- = 2K0 - eps, so
    f1 = (2Rh + eps)^(-1) rho(a- u_+ + b- l_+) and f2 = (2Rh - eps)^(-1) rho(a+ u_- + b+ l_-);
    the column is a member iff these rebuild it.
    """
    point.require_numeric("spinor_membership")
    upper_plus, upper_minus = column.upper.restrict_sector(1), column.upper.restrict_sector(-1)
    lower_plus, lower_minus = column.lower.restrict_sector(1), column.lower.restrict_sector(-1)
    f1 = rho(WElement.a_minus() * upper_plus.lift() + WElement.b_minus() * lower_plus.lift(), point)
    f2 = rho(WElement.a_plus() * upper_minus.lift() + WElement.b_plus() * lower_minus.lift(), point)
    f1 = f1.scale(_inverse_at(point, _two_rhat_plus(1)))
    f2 = f2.scale(_inverse_at(point, _two_rhat_plus(-1)))
    rebuilt = spinor_column(f1, f2, point)
    member = rebuilt.upper == column.upper.evaluate(point) and rebuilt.lower == column.lower.evaluate(point)
    return SpinorMembership(member, f1, f2)


def two_pi_rotation_sign(x: PsiElement) -> int:
    """(-1)^(2n) over the support; the zero element counts as even"""
    parities = {label.n2 % 2 for label in x.labels()}
    if len(parities) > 1:
        raise MixedParity(f"{x} mixes integer and half-integer n")
    return -1 if parities == {1} else 1
