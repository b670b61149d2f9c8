"""
Exact special functions and closed forms

Terminating hypergeometric sums, Hahn and Jacobi polynomials, the
four-case Hahn closed form of the Xi basis, Clebsch-Gordan coefficients,
Wigner rotation matrices and the eps = 0 (classical) limit.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.special import binom

from src.core.coeff import Number, Scalar
from src.core.errors import InvalidCoupling, NonTerminating
from src.core.psi import SYMBOLIC, BasisLabel, ParamPoint, ReducedSector, xi, xi_eps0
from src.core.weil import NormalMonomial, WElement, reduced_form, sector_prefix

Poly = List[Scalar]


# -------------------------------------------------------------------- polynomial helpers


def _poly_add(p: Poly, q: Poly) -> Poly:
    size = max(len(p), len(q))
    return [(p[i] if i < len(p) else Scalar.zero()) + (q[i] if i < len(q) else Scalar.zero()) for i in range(size)]


def _poly_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return []
    out = [Scalar.zero() for _ in range(len(p) + len(q) - 1)]
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] = out[i + j] + a * b
    return out


def _poly_scale(p: Poly, factor: Union[Scalar, Number]) -> Poly:
    return [c * factor for c in p]


def _poly_trim(p: Poly) -> Poly:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def poly_value(p: Sequence[Scalar], x: Union[Scalar, Number]) -> Scalar:
    """Horner evaluation of an ascending coefficient list"""
    x = Scalar.coerce(x)
    total = Scalar.zero()
    for coeff in reversed(p):
        total = total * x + coeff
    return total


# -------------------------------------------------------------------- hypergeometric sums


def pochhammer(a: Union[Scalar, Number], k: int) -> Union[Scalar, Fraction]:
    """Rising factorial (a)_k"""
    result = Scalar.one() if isinstance(a, Scalar) else Fraction(1)
    for i in range(k):
        result = result * (a + i)
    return result


def hyp_terminating(numerators: Sequence[Number], denominators: Sequence[Number], z: Number = 1) -> Scalar:
    """
    Terminating pFq(numerators; denominators; z) as an exact rational

    The sum runs until a numerator Pochhammer vanishes.  A denominator
    factor reaching zero earlier means the series has no finite value.

    Raises:
        NonTerminating: no numerator is a non-positive integer, or a
            denominator vanishes before the series stops
    """
    numerators = [Fraction(a) for a in numerators]
    denominators = [Fraction(b) for b in denominators]
    z = Fraction(z)
    if not any(a <= 0 and a.denominator == 1 for a in numerators):
        raise NonTerminating(f"series {list(map(str, numerators))}; {list(map(str, denominators))} does not terminate")
    total = Fraction(0)
    term = Fraction(1)
    j = 0
    while True:
        total += term
        if any(a + j == 0 for a in numerators):
            return Scalar.rational(total)
        if any(b + j == 0 for b in denominators):
            raise NonTerminating(f"denominator parameter {[str(b) for b in denominators]} hits zero at term {j + 1}")
        for a in numerators:
            term *= a + j
        for b in denominators:
            term /= b + j
        term = term * z / (j + 1)
        j += 1


def hyp2f1_terminating(a: Number, b: Number, c: Number, z: Number = 1) -> Scalar:
    return hyp_terminating([a, b], [c], z)


def norm_sq_hypergeometric(n2: int, r2: int, k2: int) -> Scalar:
    """
    ||Xi(n, r, m)||^2 at Rh = eps (k + 1/2) through the 2F1 chain

        eps^(2n) (r+n)! (2k)! / ((2k+1) (2k-n+r)!) F(r+n+1, n-r-2k; -2k; 1)
    """
    BasisLabel.checked(n2, r2, n2)
    upper, lower = (n2 + r2) // 2, (n2 - r2) // 2
    bottom = k2 - lower
    if bottom < 0:
        return Scalar.zero()
    prefactor = Fraction(factorial(upper) * factorial(k2), (k2 + 1) * factorial(bottom))
    series = hyp2f1_terminating(upper + 1, lower - k2, -k2)
    return series * prefactor * Scalar.eps(2 * n2)


# -------------------------------------------------------------------- Hahn polynomials


@dataclass(frozen=True)
class HahnSpec:
    """h^(alpha, beta)_degree(x, N)"""
    degree: int
    alpha: int
    beta: int
    x: Scalar
    N: Scalar

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"Hahn degree must be non-negative, got {self.degree}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError(f"Hahn parameters must be non-negative, got ({self.alpha}, {self.beta})")
        object.__setattr__(self, "x", Scalar.coerce(self.x))
        object.__setattr__(self, "N", Scalar.coerce(self.N))


def _hahn_sum(degree: int, alpha: int, beta: int, scaled_x: Poly, scaled_n: Scalar, unit: Scalar) -> Poly:
    """
    unit^degree * h^(alpha,beta)_degree as a polynomial

    scaled_x is unit * x as a polynomial in the output variable, scaled_n is
    unit * N.  Every term carries exactly `degree` linear factors.
    """
    n = degree
    result: Poly = []
    head = Fraction((-1) ** n) * pochhammer(Fraction(beta + 1), n) / factorial(n)
    for k in range(n + 1):
        weight = (
            pochhammer(Fraction(-n), k)
            * pochhammer(Fraction(alpha + beta + n + 1), k)
            / (pochhammer(Fraction(beta + 1), k) * factorial(k))
        )
        if weight == 0:
            continue
        term: Poly = [Scalar.rational(head * weight * (-1) ** k)]
        for i in range(k + 1, n + 1):
            term = _poly_mul(term, [scaled_n - unit * i])
        for j in range(k):
            term = _poly_mul(term, _poly_add(_poly_scale(scaled_x, -1), [unit * j]))
        result = _poly_add(result, term)
    return _poly_trim(result)


def hahn_coefficients(degree: int, alpha: int, beta: int, N: Union[Scalar, Number]) -> Poly:
    """Coefficients of h^(alpha,beta)_degree(x, N) in x, ascending"""
    return _hahn_sum(degree, alpha, beta, [Scalar.zero(), Scalar.one()], Scalar.coerce(N), Scalar.one())


def hahn(spec: HahnSpec) -> Scalar:
    """
    Value of the Hahn polynomial

        h_n = (-1)^n (N-n)_n (beta+1)_n / n! 3F2(-n, alpha+beta+n+1, -x; beta+1, 1-N; 1)

    written without the 1/(1-N)_k so that N may be symbolic.
    Leading coefficient (alpha+beta+n+1)_n / n!, h_0 = 1.
    """
    value = _hahn_sum(spec.degree, spec.alpha, spec.beta, [spec.x], spec.N, Scalar.one())
    return value[0] if value else Scalar.zero()


def hahn_leading(degree: int, alpha: int, beta: int) -> Fraction:
    return pochhammer(Fraction(alpha + beta + degree + 1), degree) / factorial(degree)


def hahn_weight(x: int, alpha: int, beta: int, N: int) -> Fraction:
    """(N+alpha-x-1)! (beta+x)! / (x! (N-x-1)!) on x = 0..N-1"""
    if x < 0 or x > N - 1:
        return Fraction(0)
    return Fraction(factorial(N + alpha - x - 1) * factorial(beta + x), factorial(x) * factorial(N - x - 1))


def hahn_norm_sq(degree: int, alpha: int, beta: int, N: int) -> Fraction:
    """
    sum_x weight(x) h_n(x)^2 in closed form

        (alpha+n)! (beta+n)! (alpha+beta+n+1)_N / ((alpha+beta+2n+1) n! (N-n-1)!)
    """
    n = degree
    if n > N - 1:
        return Fraction(0)
    return (
        Fraction(factorial(alpha + n) * factorial(beta + n), (alpha + beta + 2 * n + 1) * factorial(n))
        * pochhammer(Fraction(alpha + beta + n + 1), N)
        / factorial(N - n - 1)
    )


# -------------------------------------------------------------------- closed form of Xi


def _surd_binomial(top: int, bottom: int, power: Fraction) -> Scalar:
    value = Fraction(comb(top, bottom))
    if power == Fraction(1, 2):
        return Scalar.sqrt(value)
    if power == Fraction(-1, 2):
        return Scalar.sqrt(1 / value)
    return Scalar.rational(value ** int(power))


def closed_form_case(n2: int, r2: int, m2: int) -> int:
    """Which of the four regions (ordering of -r, r, -m, m) the label falls in"""
    r2_abs, m2_abs = abs(r2), abs(m2)
    if m2_abs <= r2 and r2 >= 0:
        return 1
    if r2_abs <= m2:
        return 2
    if r2_abs <= -m2:
        return 3
    return 4


def xi_closed_form(n2: int, r2: int, m2: int, point: ParamPoint = SYMBOLIC) -> ReducedSector:
    """
    Reduced form of Xi(n, r, m) from the Hahn closed form

    With x = (J0 + Rh)/eps - 1/2 and N = 2 Rh/eps the J0-polynomial is
        case 1 (-r <= m <= r): (-1)^(n-r) C(2n,n+m)^(1/2) C(2n,n+r)^-1 eps^(n-r) h^(r-m,r+m)_(n-r)(x, N)
        case 2 (-m <= r <= m): (-1)^(n-m) C(2n,n+m)^(-1/2) eps^(n-m) h^(m-r,r+m)_(n-m)(x, N+r-m)
        case 3 (m <= r <= -m): (-1)^(n-r) C(2n,n+m)^(-1/2) eps^(n+m) h^(r-m,-r-m)_(n+m)(x+r+m, N+r+m)
        case 4 (r <= m <= -r): (-1)^(n-m) C(2n,n+m)^(1/2) C(2n,n+r)^-1 eps^(n+r) h^(m-r,-r-m)_(n+r)(x+r+m, N+2r)
    """
    label = BasisLabel.checked(n2, r2, m2)
    case = closed_form_case(*label)
    a_sum = (r2 + m2) // 2  # r + m
    a_diff = (r2 - m2) // 2  # r - m
    top = n2
    upper_m = (n2 + m2) // 2  # n + m
    upper_r = (n2 + r2) // 2  # n + r
    if case == 1:
        sign_exp, degree, alpha, beta = (n2 - r2) // 2, (n2 - r2) // 2, a_diff, a_sum
        factor = _surd_binomial(top, upper_m, Fraction(1, 2)) * Fraction(1, comb(top, upper_r))
        x_shift, n_shift = 0, 0
    elif case == 2:
        sign_exp, degree, alpha, beta = (n2 - m2) // 2, (n2 - m2) // 2, -a_diff, a_sum
        factor = _surd_binomial(top, upper_m, Fraction(-1, 2))
        x_shift, n_shift = 0, a_diff
    elif case == 3:
        sign_exp, degree, alpha, beta = (n2 - r2) // 2, (n2 + m2) // 2, a_diff, -a_sum
        factor = _surd_binomial(top, upper_m, Fraction(-1, 2))
        x_shift, n_shift = a_sum, a_sum
    else:
        sign_exp, degree, alpha, beta = (n2 - m2) // 2, (n2 + r2) // 2, -a_diff, -a_sum
        factor = _surd_binomial(top, upper_m, Fraction(1, 2)) * Fraction(1, comb(top, upper_r))
        x_shift, n_shift = a_sum, r2
    eps = Scalar.eps()
    rhat = Scalar.rhat()
    # eps * (x + x_shift) = J0 + Rh - eps/2 + x_shift eps, eps * (N + n_shift) = 2 Rh + n_shift eps
    scaled_x = [rhat + eps * (Fraction(-1, 2) + x_shift), Scalar.one()]
    scaled_n = rhat * 2 + eps * n_shift
    poly = _hahn_sum(degree, alpha, beta, scaled_x, scaled_n, eps)
    poly = _poly_scale(poly, factor * (-1) ** sign_exp)
    return ReducedSector.trimmed(r2, m2, poly).evaluate(point)


def pipeline_reduced(n2: int, r2: int, m2: int, point: ParamPoint = SYMBOLIC) -> ReducedSector:
    """Reduced form of the ladder-built xi(n, r, m) with K0 -> Rh"""
    label = BasisLabel.checked(n2, r2, m2)
    q = reduced_form(xi(*label)).poly.subs_k(Scalar.rhat())
    return ReducedSector.trimmed(r2, m2, q).evaluate(point)


# -------------------------------------------------------------------- Jacobi polynomials


def jacobi_coefficients(degree: int, alpha: int, beta: int) -> List[Fraction]:
    """P^(alpha,beta)_n(z) as ascending coefficients in z"""
    coeffs = [Fraction(0)] * (degree + 1)
    for s in range(degree + 1):
        weight = Fraction(comb(degree + alpha, degree - s) * comb(degree + beta, s), 2 ** degree)
        # (z - 1)^s (z + 1)^(n - s)
        for i in range(s + 1):
            for j in range(degree - s + 1):
                coeffs[i + j] += weight * comb(s, i) * (-1) ** (s - i) * comb(degree - s, j)
    return coeffs


def jacobi(degree: int, alpha: int, beta: int, z):
    """
    P^(alpha,beta)_n(z) = sum_s C(n+alpha, n-s) C(n+beta, s) ((z-1)/2)^s ((z+1)/2)^(n-s)

    Exact for Scalar or Fraction z, floating point for float or complex z.
    """
    if isinstance(z, (int, Fraction, Scalar)):
        return poly_value([Scalar.rational(c) for c in jacobi_coefficients(degree, alpha, beta)], z)
    total = 0.0
    for s in range(degree + 1):
        total += comb(degree + alpha, degree - s) * comb(degree + beta, s) * ((z - 1) / 2) ** s * ((z + 1) / 2) ** (
            degree - s
        )
    return total


def hahn_eps0_poly(n2: int, r2: int, m2: int) -> Poly:
    """
    eps = 0 reduced polynomial of Xi(n, r, m) from the Jacobi limit

        (-1)^(n - max(r,m)) (2Rh)^(n-M) C(2n,n+m)^(1/2) C(2n,n-M)^-1 P^(|r-m|,|r+m|)_(n-M)(J0/Rh)

    with M = max(|r|, |m|), ascending in J0.
    """
    BasisLabel.checked(n2, r2, m2)
    big2 = max(abs(r2), abs(m2))
    degree = (n2 - big2) // 2
    sign = (-1) ** ((n2 - max(r2, m2)) // 2)
    factor = _surd_binomial(n2, (n2 + m2) // 2, Fraction(1, 2)) * Fraction(sign, comb(n2, degree))
    poly = []
    for power, coeff in enumerate(jacobi_coefficients(degree, abs(r2 - m2) // 2, abs(r2 + m2) // 2)):
        # (2 Rh)^degree * (J0 / Rh)^power
        poly.append(factor * coeff * 2 ** degree * Scalar.rhat(degree - power))
    return _poly_trim(poly)


# -------------------------------------------------------------------- rotation matrices


@dataclass(frozen=True)
class EulerAngles:
    """Euler angles in radians"""
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.alpha, self.beta, self.gamma])):
            raise ValueError(f"Euler angles must be finite, got {self}")

    @classmethod
    def random(cls, rng) -> "EulerAngles":
        return cls(rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))


def classical_letters(radius: float, angles: EulerAngles) -> Dict[str, complex]:
    """
    a+ = sqrt(2R) cos(b/2) e^(-i(a+g)/2),  a- its conjugate,
    b+ = -i sqrt(2R) sin(b/2) e^(i(a-g)/2), b- its conjugate
    """
    scale = np.sqrt(2 * radius)
    cos_half, sin_half = np.cos(angles.beta / 2), np.sin(angles.beta / 2)
    a_plus = scale * cos_half * np.exp(-0.5j * (angles.alpha + angles.gamma))
    b_plus = -1j * scale * sin_half * np.exp(0.5j * (angles.alpha - angles.gamma))
    return {"a+": a_plus, "a-": np.conj(a_plus), "b+": b_plus, "b-": np.conj(b_plus)}


def evaluate_classical(element: WElement, radius: float, angles: EulerAngles) -> complex:
    """Value of a W element at eps = 0, Rh = R under the Euler-angle substitution"""
    letters = classical_letters(radius, angles)
    total = 0j
    for monomial, coeff in element.items():
        value = coeff.evaluate_float(eps=0.0, rhat=radius)
        value *= letters["a+"] ** monomial.s * letters["a-"] ** monomial.t
        value *= letters["b+"] ** monomial.u * letters["b-"] ** monomial.v
        total += value
    return complex(total)


def classical_generators(radius: float, angles: EulerAngles) -> Tuple[complex, complex, complex]:
    """(J0, J+, J-) = (R cos b, i R sin b e^(-ia), -i R sin b e^(ia))"""
    letters = classical_letters(radius, angles)
    j0 = 0.5 * (letters["a+"] * letters["a-"] - letters["b+"] * letters["b-"])
    return complex(j0), complex(letters["a+"] * letters["b-"]), complex(letters["a-"] * letters["b+"])


def xi_classical(n2: int, r2: int, m2: int, radius: float, angles: EulerAngles) -> complex:
    """Xi(n, r, m) at eps = 0 under the Euler-angle substitution"""
    return evaluate_classical(xi_eps0(n2, r2, m2), radius, angles)


@lru_cache(maxsize=None)
def _factorial_half(doubled: int) -> int:
    return factorial(doubled // 2)


def wigner_small_d(j2: int, mp2: int, m2: int, beta: float) -> float:
    """
    d^j_{m' m}(beta) by the factorial sum

        sum_s (-1)^(m'-m+s) sqrt((j+m')!(j-m')!(j+m)!(j-m)!)
              / ((j+m-s)! s! (m'-m+s)! (j-m'-s)!) cos(b/2)^(2j+m-m'-2s) sin(b/2)^(m'-m+2s)
    """
    if abs(mp2) > j2 or abs(m2) > j2 or (j2 + mp2) % 2 or (j2 + m2) % 2:
        raise InvalidCoupling(f"d^{j2}/2 with m'={mp2}/2, m={m2}/2 is not defined")
    jpm, jmm = (j2 + mp2) // 2, (j2 - mp2) // 2
    jpn, jmn = (j2 + m2) // 2, (j2 - m2) // 2
    diff = (mp2 - m2) // 2
    root = np.sqrt(float(factorial(jpm) * factorial(jmm) * factorial(jpn) * factorial(jmn)))
    cos_half, sin_half = np.cos(beta / 2), np.sin(beta / 2)
    total = 0.0
    for s in range(max(0, -diff), min(jpn, jmm) + 1):
        denominator = factorial(jpn - s) * factorial(s) * factorial(diff + s) * factorial(jmm - s)
        total += (
            (-1) ** (diff + s)
            * root
            / denominator
            * cos_half ** (j2 - diff - 2 * s)
            * sin_half ** (diff + 2 * s)
        )
    return float(total)


def wigner_D(n2: int, m2: int, r2: int, angles: EulerAngles) -> complex:
    """D^n_{m r}(alpha, beta, gamma) = e^(-i m alpha) d^n_{m r}(beta) e^(-i r gamma)"""
    phase = np.exp(-0.5j * (m2 * angles.alpha + r2 * angles.gamma))
    return complex(phase * wigner_small_d(n2, m2, r2, angles.beta))


BINOMIAL_INDICES = ("r", "n+r")


def classical_rotation_form(
    n2: int, r2: int, m2: int, radius: float, angles: EulerAngles, binomial_index: str = "n+r"
) -> complex:
    """
    i^(m-r) (-1)^(n-r) (2R)^n C(2n, index)^(-1/2) D^n_{m r}

    binomial_index selects C(2n, r) or C(2n, n+r); binom is the real-argument
    binomial so half-integer r is allowed.
    """
    if binomial_index not in BINOMIAL_INDICES:
        raise ValueError(f"binomial_index must be one of {BINOMIAL_INDICES}")
    n, r = n2 / 2, r2 / 2
    bottom = r if binomial_index == "r" else n + r
    weight = binom(2 * n, bottom)
    phase = 1j ** ((m2 - r2) // 2) * (-1) ** ((n2 - r2) // 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = (2 * radius) ** n / np.sqrt(complex(weight))
    return complex(phase * scale * wigner_D(n2, m2, r2, angles))


def hahn_eps0_form(n2: int, r2: int, m2: int, radius: float, angles: EulerAngles) -> complex:
    """Jacobi-limit closed form evaluated at the Euler-angle substitution"""
    letters = classical_letters(radius, angles)
    prefix: NormalMonomial = sector_prefix(r2, m2)
    j0, _, _ = classical_generators(radius, angles)
    value = 0j
    for power, coeff in enumerate(hahn_eps0_poly(n2, r2, m2)):
        value += coeff.evaluate_float(eps=0.0, rhat=radius) * j0 ** power
    value *= letters["a+"] ** prefix.s * letters["a-"] ** prefix.t
    value *= letters["b+"] ** prefix.u * letters["b-"] ** prefix.v
    return complex(value)


# -------------------------------------------------------------------- Clebsch-Gordan


def triangle(j1_2: int, j2_2: int, j_2: int) -> bool:
    """|j1 - j2| <= j <= j1 + j2 and j1 + j2 + j integer"""
    return abs(j1_2 - j2_2) <= j_2 <= j1_2 + j2_2 and (j1_2 + j2_2 + j_2) % 2 == 0


def _check_projection(j2: int, m2: int):
    if j2 < 0 or abs(m2) > j2 or (j2 + m2) % 2:
        raise InvalidCoupling(f"projection {m2}/2 is not allowed for j = {j2}/2")


@lru_cache(maxsize=65536)
def clebsch_gordan(j1_2: int, j2_2: int, j_2: int, m1_2: int, m2_2: int, m_2: int) -> Scalar:
    """
    <j1 m1; j2 m2 | j m> by the Racah formula, exact; arguments doubled

    Raises:
        InvalidCoupling: triangle or projection constraints fail
    """
    if not triangle(j1_2, j2_2, j_2):
        raise InvalidCoupling(f"({j1_2}/2, {j2_2}/2, {j_2}/2) violates the triangle rule")
    for j, m in ((j1_2, m1_2), (j2_2, m2_2), (j_2, m_2)):
        _check_projection(j, m)
    if m1_2 + m2_2 != m_2:
        return Scalar.zero()

    def f(doubled: int) -> int:
        return _factorial_half(doubled)

    delta = Fraction(
        (j_2 + 1) * f(j1_2 + j2_2 - j_2) * f(j1_2 - j2_2 + j_2) * f(-j1_2 + j2_2 + j_2),
        f(j1_2 + j2_2 + j_2 + 2),
    )
    projections = f(j_2 + m_2) * f(j_2 - m_2) * f(j1_2 - m1_2) * f(j1_2 + m1_2) * f(j2_2 - m2_2) * f(j2_2 + m2_2)
    total = Fraction(0)
    for k in range(0, (j1_2 + j2_2 - j_2) // 2 + 1):
        args = (
            j1_2 + j2_2 - j_2 - 2 * k,
            j1_2 - m1_2 - 2 * k,
            j2_2 + m2_2 - 2 * k,
            j_2 - j2_2 + m1_2 + 2 * k,
            j_2 - j1_2 - m2_2 + 2 * k,
        )
        if min(args) < 0:
            continue
        denominator = factorial(k)
        for arg in args:
            denominator *= f(arg)
        total += Fraction((-1) ** k, denominator)
    return Scalar.sqrt(delta * projections) * total
