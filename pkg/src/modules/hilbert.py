"""
Truncated Hilbert-space representation and rectangular matrix maps

The kets |k, j> (2k, k + j integers) carry the action

    a+|k,j> = eps^(1/2) (k+j+1)^(1/2) |k+1/2, j+1/2>
    a-|k,j> = eps^(1/2) (k+j)^(1/2)   |k-1/2, j-1/2>
    b+|k,j> = eps^(1/2) (k-j+1)^(1/2) |k+1/2, j-1/2>
    b-|k,j> = eps^(1/2) (k-j)^(1/2)   |k-1/2, j+1/2>

on which K0 acts as eps (k + 1/2).  Symbolic Rh inside coefficients is
replaced by the level value eps (k + 1/2) of the ket being acted on.
"""

import random
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

from src.core.coeff import Number, Scalar
from src.core.errors import SectorMismatch
from src.core.psi import ParamPoint, PsiElement, norm_sq, rho
from src.core.weil import NormalMonomial, WElement, format_combination
from src.utils.helpers import format_half
from src.utils.logger import PsiLogger

logger = PsiLogger("hilbert")

Ket = Tuple[int, int]


class FuzzyLevel(NamedTuple):
    """Level k = k2/2 with Rh = eps (k + 1/2) and R^2 = eps^2 k (k + 1)"""

    k2: int

    @classmethod
    def checked(cls, k2: int) -> "FuzzyLevel":
        if k2 < 0:
            raise ValueError(f"fuzzy level must be non-negative, got k2={k2}")
        return cls(int(k2))

    @property
    def dimension(self) -> int:
        return self.k2 + 1

    def rhat(self) -> Scalar:
        """Rh as a Scalar in the symbol eps"""
        return Scalar.eps() * Fraction(self.k2 + 1, 2)

    def r_squared(self) -> Scalar:
        return Scalar.eps(4) * Fraction(self.k2 * (self.k2 + 2), 4)

    def point(self, eps: Number) -> ParamPoint:
        return ParamPoint.at_level(self.k2, eps)

    def __str__(self) -> str:
        return f"k={format_half(self.k2)}"


def _check_ket(k2: int, j2: int):
    if k2 < 0 or abs(j2) > k2 or (k2 + j2) % 2:
        raise ValueError(f"|{format_half(k2)},{format_half(j2)}> is not a valid ket")


class KetVector:
    """Sparse combination of kets |k, j>, possibly across several levels"""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Dict[Ket, Union[Scalar, Number]]] = None):
        clean: Dict[Ket, Scalar] = {}
        for (k2, j2), coeff in (coeffs or {}).items():
            _check_ket(k2, j2)
            value = Scalar.coerce(coeff)
            clean[(k2, j2)] = clean[(k2, j2)] + value if (k2, j2) in clean else value
        self._coeffs = {k: c for k, c in clean.items() if c}

    @classmethod
    def basis(cls, k2: int, j2: int) -> "KetVector":
        return cls({(k2, j2): 1})

    def items(self) -> List[Tuple[Ket, Scalar]]:
        return sorted(self._coeffs.items())

    def coefficient(self, k2: int, j2: int) -> Scalar:
        return self._coeffs.get((k2, j2), Scalar.zero())

    def levels(self) -> List[int]:
        return sorted({k2 for k2, _ in self._coeffs})

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __add__(self, other: "KetVector") -> "KetVector":
        acc = dict(self._coeffs)
        for key, coeff in other._coeffs.items():
            acc[key] = acc[key] + coeff if key in acc else coeff
        return KetVector(acc)

    def __sub__(self, other: "KetVector") -> "KetVector":
        return self + other.scale(-1)

    def scale(self, factor: Union[Scalar, Number]) -> "KetVector":
        factor = Scalar.coerce(factor)
        return KetVector({k: c * factor for k, c in self._coeffs.items()})

    def evaluate(self, eps: Optional[Number]) -> "KetVector":
        if eps is None:
            return self
        return KetVector({k: c.evaluate(eps) for k, c in self._coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, KetVector):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __str__(self) -> str:
        return format_combination((f"|{format_half(k2)},{format_half(j2)}>", c) for (k2, j2), c in self.items())


def level_kets(k2: int) -> List[KetVector]:
    """Basis |k, -k>, ..., |k, k> of one level"""
    FuzzyLevel.checked(k2)
    return [KetVector.basis(k2, j2) for j2 in range(-k2, k2 + 1, 2)]


# letter -> (delta k2, delta j2, weight numerator as a function of (k2, j2)) with weight = value / 2
_LETTERS = {
    "a+": (1, 1, lambda k2, j2: k2 + j2 + 2),
    "a-": (-1, -1, lambda k2, j2: k2 + j2),
    "b+": (1, -1, lambda k2, j2: k2 - j2 + 2),
    "b-": (-1, 1, lambda k2, j2: k2 - j2),
}


@lru_cache(maxsize=65536)
def _word_on_ket(monomial: NormalMonomial, k2: int, j2: int) -> Optional[Tuple[int, int, Scalar]]:
    """a+^s a-^t b+^u b-^v |k, j>, applied right to left"""
    product = 1
    for letter, power in (("b-", monomial.v), ("b+", monomial.u), ("a-", monomial.t), ("a+", monomial.s)):
        dk, dj, weight = _LETTERS[letter]
        for _ in range(power):
            factor = weight(k2, j2) // 2
            if factor <= 0:
                return None
            product *= factor
            k2, j2 = k2 + dk, j2 + dj
    return k2, j2, Scalar.sqrt(product) * Scalar.eps(monomial.degree)


def apply(element: WElement, vector: KetVector, eps: Optional[Number] = None) -> KetVector:
    """
    Act with a W element on a ket vector

    Args:
        element: Normal-ordered element; any Rh in its coefficients takes the
            value eps (k + 1/2) of the ket it acts on
        vector: Kets, possibly on several levels
        eps: Rational value for eps, or None to keep it symbolic

    Returns:
        The image ket vector
    """
    acc: Dict[Ket, Scalar] = {}
    level_values: Dict[int, Scalar] = {}
    for (k2, j2), ket_coeff in vector.items():
        if k2 not in level_values:
            level_values[k2] = FuzzyLevel(k2).rhat()
        for monomial, coeff in element.items():
            image = _word_on_ket(monomial, k2, j2)
            if image is None:
                continue
            k_out, j_out, weight = image
            value = coeff.subs_rhat(level_values[k2]) * weight * ket_coeff
            key = (k_out, j_out)
            acc[key] = acc[key] + value if key in acc else value
    return KetVector(acc).evaluate(eps)


def pi0_trace(element: WElement, k2: int, eps: Optional[Number] = None) -> Scalar:
    """(1/(2k+1)) sum_j <k,j| w |k,j>"""
    total = Scalar.zero()
    for j2 in range(-k2, k2 + 1, 2):
        total = total + apply(element, KetVector.basis(k2, j2)).coefficient(k2, j2)
    total = total * Fraction(1, k2 + 1)
    return total if eps is None else total.evaluate(eps)


class RectMatrix:
    """Dense matrix of exact Scalars"""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[List[List[Scalar]]] = None):
        self.rows = rows
        self.cols = cols
        if entries is None:
            entries = [[Scalar.zero() for _ in range(cols)] for _ in range(rows)]
        if len(entries) != rows or any(len(row) != cols for row in entries):
            raise ValueError(f"entries do not match the shape {rows}x{cols}")
        self.entries = entries

    @classmethod
    def identity(cls, size: int) -> "RectMatrix":
        return cls(size, size, [[Scalar.one() if i == j else Scalar.zero() for j in range(size)] for i in range(size)])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: Tuple[int, int]) -> Scalar:
        return self.entries[index[0]][index[1]]

    def __matmul__(self, other: "RectMatrix") -> "RectMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        entries = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                total = Scalar.zero()
                for k in range(self.cols):
                    if self.entries[i][k] and other.entries[k][j]:
                        total = total + self.entries[i][k] * other.entries[k][j]
                row.append(total)
            entries.append(row)
        return RectMatrix(self.rows, other.cols, entries)

    def dagger(self) -> "RectMatrix":
        return RectMatrix(
            self.cols, self.rows, [[self.entries[i][j].conjugate() for i in range(self.rows)] for j in range(self.cols)]
        )

    def frobenius_sq(self) -> Scalar:
        total = Scalar.zero()
        for row in self.entries:
            for value in row:
                if value:
                    total = total + value * value.conjugate()
        return total

    def evaluate(self, eps: Optional[Number]) -> "RectMatrix":
        if eps is None:
            return self
        return RectMatrix(self.rows, self.cols, [[v.evaluate(eps) for v in row] for row in self.entries])

    def is_zero(self) -> bool:
        return not any(value for row in self.entries for value in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RectMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def to_rows(self, precision: Optional[int] = None, eps: float = 1.0) -> List[Dict[str, Any]]:
        """Entries as rows with 1-based (mu, nu); zeros omitted"""
        rows = []
        for i, row in enumerate(self.entries):
            for j, value in enumerate(row):
                if not value:
                    continue
                record: Dict[str, Any] = {"mu": i + 1, "nu": j + 1, "coeff": str(value)}
                if precision is not None:
                    record["float"] = round(value.evaluate_float(eps=eps).real, precision)
                rows.append(record)
        return rows


def _single_sector(element: PsiElement) -> int:
    sectors = element.sectors()
    if len(sectors) > 1:
        raise SectorMismatch(f"phi_matrix needs a single Ad K0 sector, got r2 in {sectors}")
    return sectors[0] if sectors else 0


def phi_matrix(element: PsiElement, k2: int, eps: Optional[Number] = None, r2: Optional[int] = None) -> RectMatrix:
    """
    (phi^r_k(xi))_{mu nu} = <k+r, mu-k-r-1| xi |k, nu-k-1>, 1-based mu, nu

    Args:
        element: Element of a single sector r
        k2: Doubled source level
        eps: Optional rational value for eps
        r2: Sector of the zero element (ignored otherwise)
    """
    sector = _single_sector(element) if element else (r2 or 0)
    target = k2 + sector
    if target < 0:
        raise SectorMismatch(f"level k+r is negative for k2={k2}, r2={sector}")
    matrix = RectMatrix(target + 1, k2 + 1)
    lifted = element.lift()
    for column, ket in enumerate(level_kets(k2)):
        for (k_out, j_out), value in apply(lifted, ket).items():
            if k_out != target:
                raise SectorMismatch(f"image left level {format_half(target)}: {format_half(k_out)}")
            matrix.entries[(j_out + target) // 2][column] = value
    return matrix.evaluate(eps)


def rho_consistency(element: WElement, k2: int, eps: Optional[Number] = None) -> Dict[str, Any]:
    """Check rho(w)|k,j> = w|k,j> on every ket of the level"""
    projected = rho(element).lift()
    mismatches = []
    for ket in level_kets(k2):
        left = apply(projected, ket, eps)
        right = apply(element, ket, eps)
        if left != right:
            mismatches.append({"ket": str(ket), "rho": str(left), "direct": str(right)})
    return {"level": format_half(k2), "kets": k2 + 1, "passed": not mismatches, "mismatches": mismatches}


def norm_from_matrix(n2: int, r2: int, k2: int, eps: Optional[Number] = None) -> Scalar:
    """(1/(2k+1)) sum |phi entries|^2 of phi^r_k(Xi(n, r, n))"""
    matrix = phi_matrix(PsiElement.basis(n2, r2, n2), k2)
    value = matrix.frobenius_sq() * Fraction(1, k2 + 1)
    return value if eps is None else value.evaluate(eps)


def norm_at_level(n2: int, r2: int, k2: int) -> Scalar:
    """Closed-form norm with Rh = eps (k + 1/2), in the symbol eps"""
    return norm_sq(n2, r2).subs_rhat(FuzzyLevel(k2).rhat())


def nullity_report(element: WElement, k_max2: Optional[int] = None, margin: int = 2) -> Dict[str, Any]:
    """
    Randomized separation test: does w vanish on every ket and under rho?

    Levels 0 <= k <= deg(w) + margin are tested unless k_max2 is given; the
    conclusion holds only on that range.
    """
    degree = max(element.degree(), 0)
    bound2 = k_max2 if k_max2 is not None else 2 * (degree + margin)
    vanishes_on_kets = True
    rho_vanishes = True
    projected = rho(element)
    for k2 in range(bound2 + 1):
        if any(apply(element, ket) for ket in level_kets(k2)):
            vanishes_on_kets = False
        if any(c.subs_rhat(FuzzyLevel(k2).rhat()) for _, c in projected.items()):
            rho_vanishes = False
    is_zero = not element
    report = {
        "degree": degree,
        "level_bound": format_half(bound2),
        "margin": margin,
        "vanishes_on_kets": vanishes_on_kets,
        "rho_vanishes": rho_vanishes,
        "is_zero": is_zero,
        "consistent": (vanishes_on_kets and rho_vanishes) == is_zero,
    }
    logger.log_event("nullity_report", report)
    return report


def random_welement(rng: random.Random, max_degree: int = 3, terms: int = 4) -> WElement:
    """Small-integer random normal-ordered element"""
    coeffs: Dict[Tuple[int, int, int, int], int] = {}
    for _ in range(terms):
        exponents = [0, 0, 0, 0]
        for _ in range(rng.randint(0, max_degree)):
            exponents[rng.randrange(4)] += 1
        key = tuple(exponents)
        coeffs[key] = coeffs.get(key, 0) + rng.choice([-2, -1, 1, 2])
    return WElement(coeffs)

