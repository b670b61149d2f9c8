"""
The space Psi = ker(tr) with its Xi(n, r, m) basis and the projections rho, rho*

Labels are doubled integers throughout: BasisLabel(n2, r2, m2) is Xi(n2/2, r2/2, m2/2).
"""

import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, floor
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Tuple, Union

from src.core.coeff import Number, Scalar, div_exact
from src.core.errors import InvalidLabel, SectorMismatch, SymbolicPointUnsupported
from src.core.weil import (
    WElement,
    ad,
    ad_eps0,
    format_combination,
    generator,
    reduced_form,
    sector_decompose,
)
from src.utils.helpers import format_half


class BasisLabel(NamedTuple):
    """Doubled labels (2n, 2r, 2m) of Xi(n, r, m)"""

    n2: int
    r2: int
    m2: int

    @classmethod
    def checked(cls, n2: int, r2: int, m2: int) -> "BasisLabel":
        label = cls(int(n2), int(r2), int(m2))
        label.validate()
        return label

    def validate(self):
        n2, r2, m2 = self
        if n2 < 0 or abs(r2) > n2 or abs(m2) > n2 or (n2 + r2) % 2 or (n2 + m2) % 2:
            raise InvalidLabel(f"Xi({format_half(n2)},{format_half(r2)},{format_half(m2)}) is not a valid label")

    def is_valid(self) -> bool:
        try:
            self.validate()
        except InvalidLabel:
            return False
        return True

    def __str__(self) -> str:
        return f"Xi({format_half(self.n2)},{format_half(self.r2)},{format_half(self.m2)})"


def labels_up_to(n_max2: int, r2: Optional[int] = None) -> List[BasisLabel]:
    """Every valid label with n2 <= n_max2 (optionally in one sector), in sorted order"""
    labels = []
    for n2 in range(n_max2 + 1):
        r_values = [r2] if r2 is not None else range(-n2, n2 + 1, 2)
        for r in r_values:
            for m2 in range(-n2, n2 + 1, 2):
                label = BasisLabel(n2, r, m2)
                if label.is_valid():
                    labels.append(label)
    return labels


@dataclass(frozen=True)
class ParamPoint:
    """
    Evaluation point (eps, Rh); either coordinate may stay symbolic (None)
    """

    eps: Optional[Fraction] = None
    rhat: Optional[Scalar] = None

    def __post_init__(self):
        if self.eps is not None:
            object.__setattr__(self, "eps", Fraction(self.eps))
            if self.eps < 0:
                raise ValueError(f"eps must be non-negative, got {self.eps}")
        if self.rhat is not None:
            rhat = Scalar.coerce(self.rhat)
            object.__setattr__(self, "rhat", rhat)
            if not rhat.is_numeric() or not rhat.is_real() or rhat.evaluate_float().real <= 0:
                raise ValueError(f"Rh must be a positive number, got {rhat}")
            if self.eps is not None and self.r_squared().evaluate_float().real < -1e-12:
                raise ValueError(f"R^2 = Rh^2 - eps^2/4 is negative at eps={self.eps}, Rh={rhat}")

    @classmethod
    def symbolic(cls) -> "ParamPoint":
        return cls()

    @classmethod
    def numeric(cls, eps: Number, rhat: Union[Scalar, Number]) -> "ParamPoint":
        return cls(Fraction(eps), Scalar.coerce(rhat))

    @classmethod
    def at_level(cls, k2: int, eps: Number = 1) -> "ParamPoint":
        """Fuzzy level k = k2/2: Rh = eps (k + 1/2)"""
        if k2 < 0:
            raise ValueError(f"fuzzy level must be non-negative, got k2={k2}")
        eps = Fraction(eps)
        return cls(eps, Scalar.rational(eps * Fraction(k2 + 1, 2)))

    @property
    def is_symbolic(self) -> bool:
        return self.eps is None and self.rhat is None

    @property
    def is_numeric(self) -> bool:
        return self.eps is not None and self.rhat is not None

    def require_numeric(self, operation: str):
        if not self.is_numeric:
            raise SymbolicPointUnsupported(f"{operation} needs a numeric (eps, Rh) point, got {self}")

    def evaluate(self, value: Scalar) -> Scalar:
        return value.evaluate(self.eps, self.rhat)

    def as_tuple(self) -> Tuple[Optional[Fraction], Optional[Scalar]]:
        return self.eps, self.rhat

    def r_squared(self) -> Scalar:
        rhat = self.rhat if self.rhat is not None else Scalar.rhat()
        eps = Scalar.rational(self.eps) if self.eps is not None else Scalar.eps()
        return rhat * rhat - eps * eps * Fraction(1, 4)

    def __str__(self) -> str:
        eps = "eps" if self.eps is None else str(Scalar.rational(self.eps))
        rhat = "Rh" if self.rhat is None else str(self.rhat)
        return f"eps={eps},Rh={rhat}"


SYMBOLIC = ParamPoint()


class PsiElement:
    """Sparse combination of basis elements Xi(n, r, m)"""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Mapping[Tuple[int, int, int], Union[Scalar, Number]]] = None):
        clean: Dict[BasisLabel, Scalar] = {}
        for label, coeff in (coeffs or {}).items():
            label = BasisLabel.checked(*label)
            value = Scalar.coerce(coeff)
            clean[label] = clean[label] + value if label in clean else value
        self._coeffs = {k: c for k, c in clean.items() if c}

    @classmethod
    def _make(cls, coeffs: Dict[BasisLabel, Scalar]) -> "PsiElement":
        obj = object.__new__(cls)
        obj._coeffs = {k: c for k, c in coeffs.items() if c}
        return obj

    @classmethod
    def zero(cls) -> "PsiElement":
        return cls._make({})

    @classmethod
    def basis(cls, n2: int, r2: int, m2: int, coeff: Union[Scalar, Number] = 1) -> "PsiElement":
        return cls._make({BasisLabel.checked(n2, r2, m2): Scalar.coerce(coeff)})

    @classmethod
    def unit(cls) -> "PsiElement":
        return cls.basis(0, 0, 0)

    def items(self) -> List[Tuple[BasisLabel, Scalar]]:
        return sorted(self._coeffs.items())

    def labels(self) -> List[BasisLabel]:
        return sorted(self._coeffs)

    def coefficient(self, n2: int, r2: int, m2: int) -> Scalar:
        return self._coeffs.get(BasisLabel(n2, r2, m2), Scalar.zero())

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __add__(self, other: "PsiElement") -> "PsiElement":
        if not isinstance(other, PsiElement):
            return NotImplemented
        acc = dict(self._coeffs)
        for label, coeff in other._coeffs.items():
            acc[label] = acc[label] + coeff if label in acc else coeff
        return PsiElement._make(acc)

    def __neg__(self) -> "PsiElement":
        return PsiElement._make({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: "PsiElement") -> "PsiElement":
        if not isinstance(other, PsiElement):
            return NotImplemented
        return self + (-other)

    def scale(self, factor: Union[Scalar, Number]) -> "PsiElement":
        factor = Scalar.coerce(factor)
        return PsiElement._make({k: c * factor for k, c in self._coeffs.items()})

    def __mul__(self, other) -> "PsiElement":
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def map_coefficients(self, func) -> "PsiElement":
        return PsiElement._make({k: func(c) for k, c in self._coeffs.items()})

    def evaluate(self, point: ParamPoint) -> "PsiElement":
        return self.map_coefficients(point.evaluate)

    def eps_order(self):
        return min((c.eps_order() for c in self._coeffs.values()), default=float("inf"))

    def sectors(self) -> List[int]:
        return sorted({label.r2 for label in self._coeffs})

    def restrict_sector(self, r2: int) -> "PsiElement":
        return PsiElement._make({k: c for k, c in self._coeffs.items() if k.r2 == r2})

    def lift(self) -> WElement:
        """Representative in W: sum of c * xi(label)"""
        total = WElement.zero()
        for label, coeff in self.items():
            total = total + xi(*label).scale(coeff)
        return total

    def to_json(self) -> List[Dict[str, Union[int, str]]]:
        return [{"n2": k.n2, "r2": k.r2, "m2": k.m2, "coeff": str(c)} for k, c in self.items()]

    @classmethod
    def from_json(cls, rows: Iterable[Mapping]) -> "PsiElement":
        return cls({(row["n2"], row["r2"], row["m2"]): Scalar.parse(row["coeff"]) for row in rows})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PsiElement):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def __str__(self) -> str:
        return format_combination((str(k), c) for k, c in self.items())

    def __repr__(self) -> str:
        return f"PsiElement({str(self)!r})"


class ReducedSector(NamedTuple):
    """a_pm^(r+m) b_pm^(r-m) * q(J0) with q given by ascending J0 coefficients"""

    r2: int
    m2: int
    q: Tuple[Scalar, ...]

    @classmethod
    def trimmed(cls, r2: int, m2: int, q: Iterable[Scalar]) -> "ReducedSector":
        q = list(q)
        while q and not q[-1]:
            q.pop()
        return cls(r2, m2, tuple(q))

    def evaluate(self, point: ParamPoint) -> "ReducedSector":
        return ReducedSector.trimmed(self.r2, self.m2, (point.evaluate(c) for c in self.q))


# -------------------------------------------------------------------- the Xi cache


class XiCache:
    """
    Lazily built normal forms of Xi(n, r, m)

    For each (n, r) the chain (Ad J-)^k (a+^(n+r) b-^(n-r)) / eps^k is kept, so
    every m costs at most one extra commutator.
    """

    def __init__(self):
        self._chains: Dict[Tuple[int, int], List[WElement]] = {}
        self._chains_eps0: Dict[Tuple[int, int], List[WElement]] = {}
        self._lock = threading.RLock()

    @staticmethod
    def _start(n2: int, r2: int) -> WElement:
        return WElement.monomial(s=(n2 + r2) // 2, v=(n2 - r2) // 2)

    def _chain(self, store: Dict, n2: int, r2: int, steps: int, at_eps0: bool) -> WElement:
        with self._lock:
            chain = store.setdefault((n2, r2), [self._start(n2, r2)])
            lowering = generator("Jm")
            while len(chain) <= steps:
                if at_eps0:
                    chain.append(ad_eps0("Jm", chain[-1]))
                else:
                    chain.append(ad(lowering, chain[-1]).map_coefficients(lambda c: c.divide_eps(2)))
            return chain[steps]

    @staticmethod
    def _prefactor(label: BasisLabel) -> Scalar:
        n2, _, m2 = label
        steps = (n2 - m2) // 2
        return Scalar.sqrt(Fraction(factorial((n2 + m2) // 2), factorial(n2) * factorial(steps)))

    def get(self, label: BasisLabel) -> WElement:
        steps = (label.n2 - label.m2) // 2
        return self._chain(self._chains, label.n2, label.r2, steps, False).scale(self._prefactor(label))

    def get_eps0(self, label: BasisLabel) -> WElement:
        steps = (label.n2 - label.m2) // 2
        return self._chain(self._chains_eps0, label.n2, label.r2, steps, True).scale(self._prefactor(label))

    def warm_up(self, n_max2: int) -> int:
        """Build every label up to n_max2; returns the number of labels"""
        labels = labels_up_to(n_max2)
        for label in labels:
            self.get(label)
            _basis_poly(label)
        return len(labels)

    def clear(self):
        with self._lock:
            self._chains.clear()
            self._chains_eps0.clear()
        _basis_poly.cache_clear()

    def __len__(self) -> int:
        with self._lock:
            return sum(len(chain) for chain in self._chains.values())


XI_CACHE = XiCache()


def xi(n2: int, r2: int, m2: int) -> WElement:
    """
    Normal form of the basis element Xi(n, r, m)

        eps^(m-n) ((n+m)!/((2n)!(n-m)!))^(1/2) (Ad J-)^(n-m) (a+^(n+r) b-^(n-r))

    Raises:
        InvalidLabel: if the doubled labels are inconsistent
    """
    return XI_CACHE.get(BasisLabel.checked(n2, r2, m2))


def xi_eps0(n2: int, r2: int, m2: int) -> WElement:
    """Xi(n, r, m) built with the eps -> 0 adjoint; agrees with xi at eps = 0"""
    return XI_CACHE.get_eps0(BasisLabel.checked(n2, r2, m2))


# -------------------------------------------------------------------- projections


@lru_cache(maxsize=None)
def _basis_poly(label: BasisLabel) -> Tuple[Scalar, ...]:
    """q_n(J0) of Xi(n, r, m) with K0 -> Rh, ascending in J0"""
    reduced = reduced_form(xi(*label))
    return tuple(reduced.poly.subs_k(Scalar.rhat()))


def _decompose_symbolic(r2: int, m2: int, q: List[Scalar], rhat: Optional[Scalar] = None) -> Dict[BasisLabel, Scalar]:
    """rhat, when given, replaces Rh inside the basis polynomials"""
    base_n2 = max(abs(r2), abs(m2))
    result: Dict[BasisLabel, Scalar] = {}
    q = list(q)
    while q and not q[-1]:
        q.pop()
    for degree in range(len(q) - 1, -1, -1):
        if not q[degree]:
            continue
        label = BasisLabel(base_n2 + 2 * degree, r2, m2)
        basis = _basis_poly(label)
        if rhat is not None:
            basis = tuple(c.subs_rhat(rhat) for c in basis)
        coeff = div_exact(q[degree], basis[degree])
        result[label] = coeff
        for power in range(degree + 1):
            q[power] = q[power] - basis[power] * coeff
    return result


def decompose_reduced(sector: ReducedSector, point: ParamPoint = SYMBOLIC) -> PsiElement:
    """
    Expand prefix * q(J0) in the Xi(., r, m) basis

    Back-substitution from the top J0 degree; the leading coefficients of
    the basis polynomials are Rh-independent numbers.
    """
    coeffs = _decompose_symbolic(sector.r2, sector.m2, list(sector.q))
    return PsiElement._make(coeffs).evaluate(point)


def _rho_symbolic(element: WElement, left_ideal: bool = False) -> Dict[BasisLabel, Scalar]:
    result: Dict[BasisLabel, Scalar] = {}
    for r2, m2, part in sector_decompose(element):
        # (K0 - Rh) u = u (K0 - (Rh - eps r)) for u in sector r
        rhat = Scalar.rhat() - Scalar.eps() * Fraction(r2, 2) if left_ideal and r2 else None
        q = reduced_form(part).poly.subs_k(rhat if rhat is not None else Scalar.rhat())
        result.update(_decompose_symbolic(r2, m2, q, rhat))
    return result


def rho(element: WElement, point: ParamPoint = SYMBOLIC) -> PsiElement:
    """Projection onto Psi along the right ideal W (K0 - Rh)"""
    return PsiElement._make(_rho_symbolic(element)).evaluate(point)


def rho_star(element: WElement, point: ParamPoint = SYMBOLIC) -> PsiElement:
    """
    Projection onto Psi along the left ideal (K0 - Rh) W

    In sector r the left ideal is the right ideal for the level Rh - eps r.
    """
    return PsiElement._make(_rho_symbolic(element, left_ideal=True)).evaluate(point)


def product_rho(x: PsiElement, y: PsiElement, point: ParamPoint = SYMBOLIC) -> PsiElement:
    """xi * zeta -> rho(xi zeta)"""
    return rho(x.lift() * y.lift(), point)


def product_rho_star(x: PsiElement, y: PsiElement, point: ParamPoint = SYMBOLIC) -> PsiElement:
    return rho_star(x.lift() * y.lift(), point)


def pi_n(x: PsiElement, n2: int) -> PsiElement:
    return PsiElement._make({k: c for k, c in x.items() if k.n2 == n2})


def pi0(x: PsiElement) -> Scalar:
    return x.coefficient(0, 0, 0)


def inner(x: PsiElement, y: PsiElement, point: ParamPoint = SYMBOLIC) -> Scalar:
    """<xi, zeta> = pi0(rho(xi^dagger zeta)), conjugate-linear in xi"""
    return pi0(rho(x.lift().dagger() * y.lift(), point))


# -------------------------------------------------------------------- norms


def norm_sq(n2: int, r2: int, point: ParamPoint = SYMBOLIC) -> Scalar:
    """
    ||Xi(n, r, m)||^2 =
        (n+r)!(n-r)!/(2n+1)! prod_{s<=n-r} (2Rh - eps s) prod_{s<=n+r} (2Rh + eps s)
    """
    BasisLabel.checked(n2, r2, n2)
    lower, upper = (n2 - r2) // 2, (n2 + r2) // 2
    value = Scalar.rational(Fraction(factorial(upper) * factorial(lower), factorial(n2 + 1)))
    two_rhat = Scalar.rhat() * 2
    for s in range(1, lower + 1):
        value = value * (two_rhat - Scalar.eps() * s)
    for s in range(1, upper + 1):
        value = value * (two_rhat + Scalar.eps() * s)
    return point.evaluate(value)


def norm_sign(n2: int, r2: int, point: ParamPoint) -> int:
    """
    Sign of ||Xi(n, r, m)||^2 at a numeric point

    1 if 2Rh/eps > n-r, 0 on the degenerate levels 2Rh/eps in {1..n-r},
    otherwise (-1)^(n-r-floor(2Rh/eps)).
    """
    point.require_numeric("norm_sign")
    BasisLabel.checked(n2, r2, n2)
    lower = (n2 - r2) // 2
    if point.eps == 0:
        return 1
    if point.rhat.is_rational():
        ratio = 2 * point.rhat.as_fraction() / point.eps
        whole = floor(ratio)
        is_integer = ratio.denominator == 1
    else:
        ratio = 2 * point.rhat.evaluate_float().real / float(point.eps)
        whole = floor(ratio)
        is_integer = False
    if ratio > lower:
        return 1
    if is_integer and 1 <= ratio <= lower:
        return 0
    return -1 if (lower - whole) % 2 else 1


# -------------------------------------------------------------------- label-level actions


def _ladder(x: PsiElement, step: int) -> PsiElement:
    acc: Dict[BasisLabel, Scalar] = {}
    for (n2, r2, m2), coeff in x.items():
        if step > 0:
            weight = Fraction((n2 - m2) * (n2 + m2 + 2), 4)
        else:
            weight = Fraction((n2 + m2) * (n2 - m2 + 2), 4)
        if weight == 0:
            continue
        label = BasisLabel(n2, r2, m2 + 2 * step)
        value = coeff * Scalar.eps() * Scalar.sqrt(weight)
        acc[label] = acc[label] + value if label in acc else value
    return PsiElement._make(acc)


def ad_J0(x: PsiElement) -> PsiElement:
    return PsiElement._make({k: c * Scalar.eps() * Fraction(k.m2, 2) for k, c in x.items()})


def ad_Jp(x: PsiElement) -> PsiElement:
    """Ad J+ Xi(n,r,m) = eps ((n-m)(n+m+1))^(1/2) Xi(n,r,m+1)"""
    return _ladder(x, 1)


def ad_Jm(x: PsiElement) -> PsiElement:
    """Ad J- Xi(n,r,m) = eps ((n+m)(n-m+1))^(1/2) Xi(n,r,m-1)"""
    return _ladder(x, -1)


def ad_K0(x: PsiElement) -> PsiElement:
    return PsiElement._make({k: c * Scalar.eps() * Fraction(k.r2, 2) for k, c in x.items()})


def laplacian(x: PsiElement) -> PsiElement:
    return PsiElement._make({k: c * Scalar.eps(4) * Fraction(k.n2 * (k.n2 + 2), 4) for k, c in x.items()})


def dagger_label(x: PsiElement) -> PsiElement:
    """Xi(n,r,m)^dagger = (-1)^(r+m) Xi(n,-r,-m), coefficients conjugated"""
    acc = {}
    for (n2, r2, m2), coeff in x.items():
        sign = -1 if ((r2 + m2) // 2) % 2 else 1
        acc[BasisLabel(n2, -r2, -m2)] = coeff.conjugate() * sign
    return PsiElement._make(acc)


# -------------------------------------------------------------------- consistency helpers


def hermiticity_check(x: PsiElement, y: PsiElement, point: ParamPoint = SYMBOLIC) -> bool:
    """rho*(x^dagger y) and rho(x^dagger y) agree on the sector-0 part"""
    product = x.lift().dagger() * y.lift()
    return rho(product, point).restrict_sector(0) == rho_star(product, point).restrict_sector(0)


def associativity_defect(x: PsiElement, y: PsiElement, z: PsiElement, point: ParamPoint = SYMBOLIC) -> PsiElement:
    """rho(rho(x y) z) - rho(x y z)"""
    triple = x.lift() * y.lift() * z.lift()
    return rho(product_rho(x, y).lift() * z.lift(), point) - rho(triple, point)


def restricted_associativity_residual(
    x: PsiElement, y: PsiElement, z: PsiElement, point: ParamPoint = SYMBOLIC
) -> PsiElement:
    """rho(x rho(y z)) - rho(x y z); vanishes identically"""
    triple = x.lift() * y.lift() * z.lift()
    return rho(x.lift() * product_rho(y, z).lift(), point) - rho(triple, point)


def random_psi_element(
    rng: random.Random, n_max2: int, sector: Optional[int] = None, terms: int = 3, integer_only: bool = False
) -> PsiElement:
    """Small-integer combination of random basis elements"""
    candidates = labels_up_to(n_max2, sector)
    if integer_only:
        candidates = [label for label in candidates if label.n2 % 2 == 0]
    if not candidates:
        raise SectorMismatch(f"no labels with n2 <= {n_max2} in sector r2={sector}")
    acc: Dict[BasisLabel, Scalar] = {}
    for _ in range(terms):
        label = rng.choice(candidates)
        value = Scalar.rational(rng.choice([-3, -2, -1, 1, 2, 3]))
        acc[label] = acc[label] + value if label in acc else value
    return PsiElement._make(acc)
