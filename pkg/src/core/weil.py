"""
The algebra W(eps) of two commuting Heisenberg-Weyl pairs

Elements are kept in normal order a+^s a-^t b+^u b-^v with

    [a-, a+] = eps,   [b-, b+] = eps,   a-letters commute with b-letters.

Also provides the totally symmetric basis S(s,t,u,v) (s = #a-, t = #a+,
u = #b-, v = #b+), the formal trace on it, and the decomposition of an
element into Ad K0 / Ad J0 eigensectors written as prefix * q(J0, K0).
"""

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Dict, Iterable, List, Mapping, NamedTuple, Optional, Tuple, Union

from sympy.utilities.iterables import multiset_permutations

from src.core.coeff import Number, Scalar
from src.core.errors import SectorMismatch, UnsupportedGenerator

Coefficient = Union[Scalar, int, Fraction]


class NormalMonomial(NamedTuple):
    """Exponents of the normal-ordered word a+^s a-^t b+^u b-^v"""

    s: int
    t: int
    u: int
    v: int

    @property
    def degree(self) -> int:
        return self.s + self.t + self.u + self.v

    @property
    def sector2(self) -> Tuple[int, int]:
        """Doubled (r, m): r + m = s - t and r - m = u - v"""
        a_charge = self.s - self.t
        b_charge = self.u - self.v
        return a_charge + b_charge, a_charge - b_charge

    def __str__(self) -> str:
        letters = []
        for name, power in (("a+", self.s), ("a-", self.t), ("b+", self.u), ("b-", self.v)):
            if power == 1:
                letters.append(name)
            elif power > 1:
                letters.append(f"{name}^{power}")
        return "*".join(letters) if letters else "1"


UNIT = NormalMonomial(0, 0, 0, 0)


def format_combination(items: Iterable[Tuple[str, Scalar]]) -> str:
    """Render sum(c * label) with the Scalar text form; '1' labels print bare coefficients"""
    pieces: List[str] = []
    for label, coeff in items:
        text = str(coeff)
        negative = False
        if coeff.is_monomial() and text.startswith("-"):
            negative, text = True, text[1:]
        elif not coeff.is_monomial():
            text = f"({text})"
        if label == "1":
            body = text
        elif text == "1":
            body = label
        else:
            body = f"{text}*{label}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces) if pieces else "0"


@lru_cache(maxsize=None)
def _reorder(lower: int, upper: int) -> Tuple[Tuple[int, int], ...]:
    """lowering^lower * raising^upper = sum_i C(lower,i) C(upper,i) i! eps^i raising^(upper-i) lowering^(lower-i)"""
    return tuple((i, comb(lower, i) * comb(upper, i) * factorial(i)) for i in range(min(lower, upper) + 1))


@lru_cache(maxsize=65536)
def monomial_product(left: NormalMonomial, right: NormalMonomial) -> Tuple[Tuple[NormalMonomial, Scalar], ...]:
    """Normal-ordered product of two normal-ordered words"""
    terms = []
    for i, a_weight in _reorder(left.t, right.s):
        for j, b_weight in _reorder(left.v, right.u):
            monomial = NormalMonomial(
                left.s + right.s - i,
                left.t + right.t - i,
                left.u + right.u - j,
                left.v + right.v - j,
            )
            terms.append((monomial, Scalar.eps(2 * (i + j)) * (a_weight * b_weight)))
    return tuple(terms)


class WElement:
    """
    Sparse normal-ordered polynomial in a+, a-, b+, b-
    """

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Optional[Mapping[Tuple[int, int, int, int], Coefficient]] = None):
        clean: Dict[NormalMonomial, Scalar] = {}
        for monomial, coeff in (coeffs or {}).items():
            monomial = NormalMonomial(*monomial)
            if min(monomial) < 0:
                raise ValueError(f"Negative exponent in {monomial}")
            value = Scalar.coerce(coeff)
            if monomial in clean:
                value = clean[monomial] + value
            clean[monomial] = value
        self._coeffs = {m: c for m, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _make(cls, coeffs: Dict[NormalMonomial, Scalar]) -> "WElement":
        obj = object.__new__(cls)
        obj._coeffs = {m: c for m, c in coeffs.items() if c}
        obj._hash = None
        return obj

    # ---------------------------------------------------------------- constructors

    @classmethod
    def zero(cls) -> "WElement":
        return cls._make({})

    @classmethod
    def scalar(cls, value: Coefficient) -> "WElement":
        return cls._make({UNIT: Scalar.coerce(value)})

    @classmethod
    def one(cls) -> "WElement":
        return cls.scalar(1)

    @classmethod
    def monomial(cls, s: int = 0, t: int = 0, u: int = 0, v: int = 0, coeff: Coefficient = 1) -> "WElement":
        return cls._make({NormalMonomial(s, t, u, v): Scalar.coerce(coeff)})

    @classmethod
    def a_plus(cls) -> "WElement":
        return cls.monomial(s=1)

    @classmethod
    def a_minus(cls) -> "WElement":
        return cls.monomial(t=1)

    @classmethod
    def b_plus(cls) -> "WElement":
        return cls.monomial(u=1)

    @classmethod
    def b_minus(cls) -> "WElement":
        return cls.monomial(v=1)

    # ---------------------------------------------------------------- inspection

    def items(self) -> List[Tuple[NormalMonomial, Scalar]]:
        return sorted(self._coeffs.items())

    def coefficient(self, monomial: Tuple[int, int, int, int]) -> Scalar:
        return self._coeffs.get(NormalMonomial(*monomial), Scalar.zero())

    def monomials(self) -> List[NormalMonomial]:
        return sorted(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def degree(self) -> int:
        return max((m.degree for m in self._coeffs), default=-1)

    def eps_order(self):
        return min((c.eps_order() for c in self._coeffs.values()), default=float("inf"))

    # ---------------------------------------------------------------- arithmetic

    def __add__(self, other: "WElement") -> "WElement":
        if not isinstance(other, WElement):
            return NotImplemented
        acc = dict(self._coeffs)
        for monomial, coeff in other._coeffs.items():
            acc[monomial] = acc[monomial] + coeff if monomial in acc else coeff
        return WElement._make(acc)

    def __neg__(self) -> "WElement":
        return WElement._make({m: -c for m, c in self._coeffs.items()})

    def __sub__(self, other: "WElement") -> "WElement":
        if not isinstance(other, WElement):
            return NotImplemented
        return self + (-other)

    def scale(self, factor: Coefficient) -> "WElement":
        factor = Scalar.coerce(factor)
        if not factor:
            return WElement.zero()
        return WElement._make({m: c * factor for m, c in self._coeffs.items()})

    def __mul__(self, other) -> "WElement":
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        if not isinstance(other, WElement):
            return NotImplemented
        acc: Dict[NormalMonomial, Scalar] = {}
        for left, c_left in self._coeffs.items():
            for right, c_right in other._coeffs.items():
                weight = c_left * c_right
                for monomial, factor in monomial_product(left, right):
                    value = weight * factor
                    acc[monomial] = acc[monomial] + value if monomial in acc else value
        return WElement._make(acc)

    def __rmul__(self, other) -> "WElement":
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, exponent: int) -> "WElement":
        result = WElement.one()
        for _ in range(exponent):
            result = result * self
        return result

    def map_coefficients(self, func: Callable[[Scalar], Scalar]) -> "WElement":
        return WElement._make({m: func(c) for m, c in self._coeffs.items()})

    def evaluate(self, eps: Optional[Number] = None, rhat=None) -> "WElement":
        return self.map_coefficients(lambda c: c.evaluate(eps, rhat))

    def dagger(self) -> "WElement":
        """
        Conjugation: reverse words, swap +/-, conjugate coefficients

        The reversed word b+^v b-^u a+^t a-^s is already normal ordered after
        moving the commuting a-block to the front.
        """
        return WElement._make(
            {NormalMonomial(m.t, m.s, m.v, m.u): c.conjugate() for m, c in self._coeffs.items()}
        )

    # ---------------------------------------------------------------- comparison / text

    def __eq__(self, other) -> bool:
        if isinstance(other, (Scalar, int, Fraction)):
            other = WElement.scalar(other)
        if not isinstance(other, WElement):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def __str__(self) -> str:
        return format_combination((str(m), c) for m, c in self.items())

    def __repr__(self) -> str:
        return f"WElement({str(self)!r})"


# -------------------------------------------------------------------- generators

_HALF = Fraction(1, 2)

GENERATOR_ALIASES = {"J+": "Jp", "J-": "Jm", "K+": "Kp", "K-": "Km"}


@lru_cache(maxsize=None)
def generator(name: str) -> WElement:
    """
    The quadratic generators J0, Jp, Jm, K0, Kp, Km

    Args:
        name: One of J0, Jp, Jm, K0, Kp, Km (J+, J-, K+, K- accepted)
    """
    name = GENERATOR_ALIASES.get(name, name)
    if name == "J0":
        return WElement({(1, 1, 0, 0): _HALF, (0, 0, 1, 1): -_HALF})
    if name == "Jp":
        return WElement.monomial(s=1, v=1)
    if name == "Jm":
        return WElement.monomial(t=1, u=1)
    if name == "K0":
        return WElement({(1, 1, 0, 0): _HALF, (0, 0, 1, 1): _HALF, (0, 0, 0, 0): Scalar.eps() * _HALF})
    if name == "Kp":
        return WElement.monomial(s=1, u=1)
    if name == "Km":
        return WElement.monomial(t=1, v=1)
    raise UnsupportedGenerator(f"Unknown generator {name!r}")


def ad(operator: WElement, element: WElement) -> WElement:
    """Ad_T(w) = [T, w]"""
    return operator * element - element * operator


# Coupling matrices T^{mu nu} with mu over (a+, b+) and nu over (a-, b-), at eps = 0
_EPS0_MATRICES = {
    "J0": {("a", "a"): _HALF, ("b", "b"): -_HALF},
    "Jp": {("a", "b"): Fraction(1)},
    "Jm": {("b", "a"): Fraction(1)},
    "K0": {("a", "a"): _HALF, ("b", "b"): _HALF},
}

# index of chi_+^letter and chi_-^letter inside NormalMonomial
_RAISING = {"a": 0, "b": 2}
_LOWERING = {"a": 1, "b": 3}


def _resolve_quadratic(operator: Union[str, WElement]) -> str:
    if isinstance(operator, str):
        name = GENERATOR_ALIASES.get(operator, operator)
        if name in _EPS0_MATRICES:
            return name
        raise UnsupportedGenerator(f"ad_eps0 is defined for J0, J+, J-, K0 only, got {operator!r}")
    for name in _EPS0_MATRICES:
        if operator == generator(name):
            return name
    raise UnsupportedGenerator(f"ad_eps0 is defined for J0, J+, J-, K0 only, got {operator}")


def _derivative(monomial: NormalMonomial, index: int) -> Tuple[int, Optional[List[int]]]:
    power = monomial[index]
    if power == 0:
        return 0, None
    exponents = list(monomial)
    exponents[index] -= 1
    return power, exponents


def ad_eps0(operator: Union[str, WElement], element: WElement) -> WElement:
    """
    The eps -> 0 limit of (1/eps) Ad_T acting on w read as a commutative polynomial

        sum T^{mu nu} (chi_+^mu dw/dchi_+^nu - chi_-^nu dw/dchi_-^mu)

    Args:
        operator: J0, J+, J- or K0 (name or element)
        element: Polynomial to differentiate
    """
    matrix = _EPS0_MATRICES[_resolve_quadratic(operator)]
    acc: Dict[NormalMonomial, Scalar] = {}

    def add_term(exponents: List[int], weight: Scalar):
        monomial = NormalMonomial(*exponents)
        acc[monomial] = acc[monomial] + weight if monomial in acc else weight

    for monomial, coeff in element.items():
        for (mu, nu), t_value in matrix.items():
            power, exponents = _derivative(monomial, _RAISING[nu])
            if exponents is not None:
                exponents[_RAISING[mu]] += 1
                add_term(exponents, coeff * (t_value * power))
            power, exponents = _derivative(monomial, _LOWERING[mu])
            if exponents is not None:
                exponents[_LOWERING[nu]] += 1
                add_term(exponents, coeff * (-t_value * power))
    return WElement._make(acc)


def casimir_defects() -> Tuple[WElement, WElement]:
    """Residuals of the su(2) and su(1,1) Casimir identities; both vanish"""
    j0, jp, jm = generator("J0"), generator("Jp"), generator("Jm")
    k0, kp, km = generator("K0"), generator("Kp"), generator("Km")
    quarter_eps_sq = WElement.scalar(Scalar.eps(4) * Fraction(1, 4))
    su2 = j0 * j0 + (jp * jm).scale(_HALF) + (jm * jp).scale(_HALF) - (k0 * k0 - quarter_eps_sq)
    su11 = k0 * k0 - (kp * km).scale(_HALF) - (km * kp).scale(_HALF) - (j0 * j0 - quarter_eps_sq)
    return su2, su11


# -------------------------------------------------------------------- symmetric basis


@lru_cache(maxsize=None)
def _symmetric_half(lower: int, upper: int, letter: str) -> WElement:
    """S_A(s,t) (letter 'a') or S_B(u,v) (letter 'b') via the first-letter recurrence"""
    if lower == 0 and upper == 0:
        return WElement.one()
    lowering = WElement.a_minus() if letter == "a" else WElement.b_minus()
    raising = WElement.a_plus() if letter == "a" else WElement.b_plus()
    total = WElement.zero()
    if lower:
        total = total + lowering * _symmetric_half(lower - 1, upper, letter)
    if upper:
        total = total + raising * _symmetric_half(lower, upper - 1, letter)
    return total


@lru_cache(maxsize=None)
def sym_basis(s: int, t: int, u: int, v: int) -> WElement:
    """
    Totally symmetric polynomial S(s,t,u,v)

    Sum of every distinct word in a-^s a+^t b-^u b+^v, each with coefficient 1.
    """
    if min(s, t, u, v) < 0:
        raise ValueError(f"S({s},{t},{u},{v}) needs non-negative indices")
    weight = comb(s + t + u + v, s + t)
    return (_symmetric_half(s, t, "a") * _symmetric_half(u, v, "b")).scale(weight)


def sym_basis_bruteforce(s: int, t: int, u: int, v: int) -> WElement:
    """S(s,t,u,v) by explicit enumeration of the distinct words"""
    letters = {"A": WElement.a_minus(), "a": WElement.a_plus(), "B": WElement.b_minus(), "b": WElement.b_plus()}
    multiset = ["A"] * s + ["a"] * t + ["B"] * u + ["b"] * v
    total = WElement.zero()
    for word in multiset_permutations(multiset):
        product = WElement.one()
        for letter in word:
            product = product * letters[letter]
        total = total + product
    return total


class SymElement:
    """Element written as sum c * S(s,t,u,v)"""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Mapping[Tuple[int, int, int, int], Coefficient]] = None):
        clean: Dict[Tuple[int, int, int, int], Scalar] = {}
        for label, coeff in (coeffs or {}).items():
            label = tuple(int(x) for x in label)
            if min(label) < 0:
                raise ValueError(f"Negative S index {label}")
            value = Scalar.coerce(coeff)
            clean[label] = clean[label] + value if label in clean else value
        self._coeffs = {k: c for k, c in clean.items() if c}

    def items(self) -> List[Tuple[Tuple[int, int, int, int], Scalar]]:
        return sorted(self._coeffs.items())

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __add__(self, other: "SymElement") -> "SymElement":
        acc = dict(self._coeffs)
        for label, coeff in other._coeffs.items():
            acc[label] = acc[label] + coeff if label in acc else coeff
        return SymElement(acc)

    def __sub__(self, other: "SymElement") -> "SymElement":
        return self + other.scale(-1)

    def scale(self, factor: Coefficient) -> "SymElement":
        factor = Scalar.coerce(factor)
        return SymElement({k: c * factor for k, c in self._coeffs.items()})

    def dagger(self) -> "SymElement":
        # word reversal maps the symmetric sum to itself, swapping the letter counts
        return SymElement({(t, s, v, u): c.conjugate() for (s, t, u, v), c in self._coeffs.items()})

    def to_welement(self) -> WElement:
        return from_sym_basis(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymElement):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __str__(self) -> str:
        return format_combination((f"S({s},{t},{u},{v})", c) for (s, t, u, v), c in self.items())

    def __repr__(self) -> str:
        return f"SymElement({str(self)!r})"


def from_sym_basis(element: SymElement) -> WElement:
    total = WElement.zero()
    for label, coeff in element.items():
        total = total + sym_basis(*label).scale(coeff)
    return total


def to_sym_basis(element: WElement) -> SymElement:
    """
    Rewrite a normal-ordered element in the symmetric basis

    The top normal-order term of S(s,t,u,v) is
    (s+t+u+v)!/(s!t!u!v!) a+^t a-^s b+^v b-^u, so the basis change is
    triangular in total degree.
    """
    remaining = element
    result: Dict[Tuple[int, int, int, int], Scalar] = {}
    while remaining:
        monomial = max(remaining.monomials(), key=lambda m: (m.degree, m))
        s, t, u, v = monomial.t, monomial.s, monomial.v, monomial.u
        leading = factorial(s + t + u + v) // (factorial(s) * factorial(t) * factorial(u) * factorial(v))
        coeff = remaining.coefficient(monomial) * Fraction(1, leading)
        label = (s, t, u, v)
        result[label] = result[label] + coeff if label in result else coeff
        remaining = remaining - sym_basis(*label).scale(coeff)
    return SymElement(result)


def formal_trace(element: SymElement) -> SymElement:
    """tr S(s,t,u,v) = 2 S(s-1,t-1,u,v) + 2 S(s,t,u-1,v-1), negative indices dropped"""
    acc: Dict[Tuple[int, int, int, int], Scalar] = {}
    for (s, t, u, v), coeff in element.items():
        for label, ok in (((s - 1, t - 1, u, v), s and t), ((s, t, u - 1, v - 1), u and v)):
            if ok:
                value = coeff * 2
                acc[label] = acc[label] + value if label in acc else value
    return SymElement(acc)


def symmetric_identity_report(max_degree: int = 4) -> Dict[str, bool]:
    """
    Check anticommutator/commutator identities of a+ with S_A(s,t)

    Returns which forms hold on every (s, t) with s + t <= max_degree:
    the index-corrected forms
        [a+, S_A(s,t)]_+ = 2(t+1)/(s+t+1) S_A(s,t+1)
        [a+, S_A(s,t)]   = -eps (s+t) S_A(s-1,t)
    and the variants with the shifted index on t
        [a+, S_A(s,t)]_+ = 2s/(s+t+1) S_A(s,t-1)
        [a+, S_A(s,t)]   = -eps (s+t) S_A(s,t-1)
    """
    a_plus = WElement.a_plus()

    def half(s: int, t: int) -> WElement:
        return _symmetric_half(s, t, "a") if s >= 0 and t >= 0 else WElement.zero()

    report = {
        "anticommutator_corrected": True,
        "commutator_corrected": True,
        "anticommutator_shifted": True,
        "commutator_shifted": True,
    }
    for total in range(max_degree + 1):
        for s in range(total + 1):
            t = total - s
            base = half(s, t)
            anti = a_plus * base + base * a_plus
            comm = a_plus * base - base * a_plus
            if anti != half(s, t + 1).scale(Fraction(2 * (t + 1), s + t + 1)):
                report["anticommutator_corrected"] = False
            if comm != half(s - 1, t).scale(Scalar.eps() * -(s + t)):
                report["commutator_corrected"] = False
            if anti != half(s, t - 1).scale(Fraction(2 * s, s + t + 1)):
                report["anticommutator_shifted"] = False
            if comm != half(s, t - 1).scale(Scalar.eps() * -(s + t)):
                report["commutator_shifted"] = False
    return report


# -------------------------------------------------------------------- sectors and reduced forms


def sector_decompose(element: WElement) -> List[Tuple[int, int, WElement]]:
    """
    Split w into Ad K0 / Ad J0 eigensectors

    Returns:
        Sorted list of (r2, m2, part) with doubled labels
    """
    parts: Dict[Tuple[int, int], Dict[NormalMonomial, Scalar]] = {}
    for monomial, coeff in element.items():
        parts.setdefault(monomial.sector2, {})[monomial] = coeff
    return [(r2, m2, WElement._make(coeffs)) for (r2, m2), coeffs in sorted(parts.items())]


class JKPolynomial:
    """Polynomial in the commuting pair J0, K0 with Scalar coefficients; keys are (J0 power, K0 power)"""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Mapping[Tuple[int, int], Scalar]] = None):
        self._coeffs = {k: c for k, c in (coeffs or {}).items() if c}

    @classmethod
    def constant(cls, value: Coefficient) -> "JKPolynomial":
        return cls({(0, 0): Scalar.coerce(value)})

    @classmethod
    def linear(cls, constant: Scalar, j_coeff: Number, k_coeff: Number) -> "JKPolynomial":
        return cls({(0, 0): constant, (1, 0): Scalar.rational(j_coeff), (0, 1): Scalar.rational(k_coeff)})

    def items(self) -> List[Tuple[Tuple[int, int], Scalar]]:
        return sorted(self._coeffs.items())

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __add__(self, other: "JKPolynomial") -> "JKPolynomial":
        acc = dict(self._coeffs)
        for key, coeff in other._coeffs.items():
            acc[key] = acc[key] + coeff if key in acc else coeff
        return JKPolynomial(acc)

    def __mul__(self, other) -> "JKPolynomial":
        if isinstance(other, (Scalar, int, Fraction)):
            factor = Scalar.coerce(other)
            return JKPolynomial({k: c * factor for k, c in self._coeffs.items()})
        acc: Dict[Tuple[int, int], Scalar] = {}
        for (i1, j1), c1 in self._coeffs.items():
            for (i2, j2), c2 in other._coeffs.items():
                key = (i1 + i2, j1 + j2)
                value = c1 * c2
                acc[key] = acc[key] + value if key in acc else value
        return JKPolynomial(acc)

    __rmul__ = __mul__

    def subs_k(self, value: Scalar) -> List[Scalar]:
        """Substitute K0 -> value; returns J0 coefficients from degree 0 upward"""
        degree = max((i for (i, _) in self._coeffs), default=-1)
        result = [Scalar.zero() for _ in range(degree + 1)]
        powers: Dict[int, Scalar] = {}
        for (i, j), coeff in self._coeffs.items():
            if j not in powers:
                powers[j] = value ** j
            result[i] = result[i] + coeff * powers[j]
        while result and not result[-1]:
            result.pop()
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, JKPolynomial):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __str__(self) -> str:
        def label(i: int, j: int) -> str:
            parts = [f"J0^{i}" if i > 1 else "J0"] if i else []
            parts += [f"K0^{j}" if j > 1 else "K0"] if j else []
            return "*".join(parts) if parts else "1"

        return format_combination((label(i, j), c) for (i, j), c in self.items())


class ReducedForm(NamedTuple):
    """Sector part written as a_pm^(r+m) b_pm^(r-m) * poly(J0, K0)"""

    r2: int
    m2: int
    poly: JKPolynomial


def _falling(count: int, shift: int, j_coeff: int, k_coeff: int) -> JKPolynomial:
    """prod_{i<count} (N - (shift + i) eps) with N = j_coeff*J0 + k_coeff*K0 - eps/2"""
    result = JKPolynomial.constant(1)
    for i in range(count):
        constant = Scalar.eps() * Fraction(-(2 * (shift + i) + 1), 2)
        result = result * JKPolynomial.linear(constant, j_coeff, k_coeff)
    return result


@lru_cache(maxsize=65536)
def _reduce_monomial(monomial: NormalMonomial) -> JKPolynomial:
    s, t, u, v = monomial
    # a+ a- = J0 + K0 - eps/2; moving a-^(t-s) to the front shifts it by (t-s) eps
    a_part = _falling(min(s, t), max(t - s, 0), 1, 1)
    # b+ b- = K0 - J0 - eps/2
    b_part = _falling(min(u, v), max(v - u, 0), -1, 1)
    return a_part * b_part


def reduced_form(part: WElement) -> ReducedForm:
    """
    Write a single-sector element as prefix * q(J0, K0), with J0 and K0 to the right

    Raises:
        SectorMismatch: if the element spans several sectors
    """
    sectors = {m.sector2 for m in part.monomials()}
    if len(sectors) > 1:
        raise SectorMismatch(f"reduced_form needs a single sector, got {sorted(sectors)}")
    r2, m2 = sectors.pop() if sectors else (0, 0)
    poly = JKPolynomial()
    for monomial, coeff in part.items():
        poly = poly + _reduce_monomial(monomial) * coeff
    return ReducedForm(r2, m2, poly)


def sector_prefix(r2: int, m2: int) -> NormalMonomial:
    """The monomial a_pm^(r+m) b_pm^(r-m)"""
    a_charge = (r2 + m2) // 2
    b_charge = (r2 - m2) // 2
    return NormalMonomial(max(a_charge, 0), max(-a_charge, 0), max(b_charge, 0), max(-b_charge, 0))
