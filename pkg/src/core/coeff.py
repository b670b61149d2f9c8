"""
Exact coefficient ring

A Scalar is a finite sum of terms

    (re + i*im) * sqrt(d) * eps^(p/2) * Rh^h

with rational re, im, squarefree d >= 1 and integer p (doubled eps exponent)
and h.  eps and Rh are independent symbols; the relation Rh^2 = R^2 + eps^2/4
is only used by callers that evaluate at a concrete point.
"""

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple, Union

from sympy import factorint

from src.core.errors import NotDivisible, NotEpsDivisible, ParseError

Key = Tuple[int, int, int]
Value = Tuple[Fraction, Fraction]
Number = Union[int, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@lru_cache(maxsize=8192)
def squarefree_split(n: int) -> Tuple[int, int]:
    """
    Split a positive integer as n = e**2 * d with d squarefree

    Args:
        n: Positive integer

    Returns:
        Tuple (e, d)
    """
    if n <= 0:
        raise ValueError(f"squarefree_split needs a positive integer, got {n}")
    e, d = 1, 1
    for prime, power in factorint(n).items():
        e *= prime ** (power // 2)
        if power % 2:
            d *= prime
    return e, d


def _accumulate(acc: Dict[Key, List[Fraction]], key: Key, re_part: Fraction, im_part: Fraction):
    slot = acc.get(key)
    if slot is None:
        acc[key] = [re_part, im_part]
    else:
        slot[0] += re_part
        slot[1] += im_part


class Scalar:
    """
    Immutable exact coefficient

    Terms are stored canonically: one entry per key (d, p, h), no zero values.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Dict[Key, Tuple[Number, Number]]] = None):
        acc: Dict[Key, List[Fraction]] = {}
        for (d, p, h), (re_part, im_part) in (terms or {}).items():
            e, sqf = squarefree_split(int(d))
            _accumulate(acc, (sqf, int(p), int(h)), Fraction(re_part) * e, Fraction(im_part) * e)
        self._terms = {key: (v[0], v[1]) for key, v in acc.items() if v[0] or v[1]}
        self._hash = None

    @classmethod
    def _make(cls, acc: Dict[Key, List[Fraction]]) -> "Scalar":
        obj = object.__new__(cls)
        obj._terms = {key: (v[0], v[1]) for key, v in acc.items() if v[0] or v[1]}
        obj._hash = None
        return obj

    # ------------------------------------------------------------------ constructors

    @classmethod
    def zero(cls) -> "Scalar":
        return cls._make({})

    @classmethod
    def one(cls) -> "Scalar":
        return cls.rational(1)

    @classmethod
    def rational(cls, value: Number) -> "Scalar":
        return cls._make({(1, 0, 0): [Fraction(value), _ZERO]})

    @classmethod
    def i(cls) -> "Scalar":
        return cls._make({(1, 0, 0): [_ZERO, _ONE]})

    @classmethod
    def gaussian(cls, re_part: Number, im_part: Number) -> "Scalar":
        return cls._make({(1, 0, 0): [Fraction(re_part), Fraction(im_part)]})

    @classmethod
    def eps(cls, p: int = 2) -> "Scalar":
        """eps^(p/2); the default p = 2 is eps itself"""
        return cls._make({(1, p, 0): [_ONE, _ZERO]})

    @classmethod
    def rhat(cls, h: int = 1) -> "Scalar":
        return cls._make({(1, 0, h): [_ONE, _ZERO]})

    @classmethod
    def sqrt(cls, value: Number) -> "Scalar":
        """
        Square root of a non-negative rational as an exact surd

        Uses sqrt(a/b) = sqrt(a*b)/b.
        """
        q = Fraction(value)
        if q < 0:
            raise ValueError(f"sqrt of a negative rational: {q}")
        if q == 0:
            return cls.zero()
        e, d = squarefree_split(q.numerator * q.denominator)
        return cls._make({(d, 0, 0): [Fraction(e, q.denominator), _ZERO]})

    @classmethod
    def coerce(cls, value: Union["Scalar", Number]) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        raise TypeError(f"Cannot use {type(value).__name__} as a Scalar")

    # ------------------------------------------------------------------ inspection

    def items(self) -> List[Tuple[Key, Value]]:
        """Terms in canonical order: by eps exponent, then Rh exponent, then surd"""
        return sorted(self._terms.items(), key=lambda item: (item[0][1], item[0][2], item[0][0]))

    def keys(self) -> Iterable[Key]:
        return self._terms.keys()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_numeric(self) -> bool:
        """No symbolic eps or Rh left"""
        return all(p == 0 and h == 0 for (_, p, h) in self._terms)

    def is_rational(self) -> bool:
        if not self._terms:
            return True
        if len(self._terms) != 1 or (1, 0, 0) not in self._terms:
            return False
        return self._terms[(1, 0, 0)][1] == 0

    def is_real(self) -> bool:
        return all(im_part == 0 for (_, im_part) in self._terms.values())

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational number")
        return self._terms.get((1, 0, 0), (_ZERO, _ZERO))[0]

    def eps_order(self) -> Union[int, float]:
        """Minimum doubled eps exponent; math.inf for zero"""
        if not self._terms:
            return math.inf
        return min(p for (_, p, _) in self._terms)

    def rhat_degree(self) -> Union[int, float]:
        if not self._terms:
            return -math.inf
        return max(h for (_, _, h) in self._terms)

    # ------------------------------------------------------------------ arithmetic

    def __add__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = {key: [v[0], v[1]] for key, v in self._terms.items()}
        for key, (re_part, im_part) in other._terms.items():
            _accumulate(acc, key, re_part, im_part)
        return Scalar._make(acc)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._make({key: [-v[0], -v[1]] for key, v in self._terms.items()})

    def __sub__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Scalar.zero()
            factor = Fraction(other)
            return Scalar._make({key: [v[0] * factor, v[1] * factor] for key, v in self._terms.items()})
        if not isinstance(other, Scalar):
            return NotImplemented
        acc: Dict[Key, List[Fraction]] = {}
        for (d1, p1, h1), (a1, b1) in self._terms.items():
            for (d2, p2, h2), (a2, b2) in other._terms.items():
                if d1 == 1 or d2 == 1:
                    e, d = 1, d1 * d2
                else:
                    # product of two squarefree numbers: gcd**2 times a squarefree cofactor
                    g = math.gcd(d1, d2)
                    e, d = g, (d1 // g) * (d2 // g)
                re_part = (a1 * a2 - b1 * b2) * e
                im_part = (a1 * b2 + b1 * a2) * e
                _accumulate(acc, (d, p1 + p2, h1 + h2), re_part, im_part)
        return Scalar._make(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("Scalar division by zero")
            return self * (1 / Fraction(other))
        if isinstance(other, Scalar):
            return div_exact(self, other)
        return NotImplemented

    def __pow__(self, exponent: int) -> "Scalar":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Scalar.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> "Scalar":
        """Inverse of a monomial"""
        if not self.is_monomial():
            raise NotDivisible(f"Only monomials are invertible in the ring, got {self}")
        ((d, p, h), (a, b)), = self._terms.items()
        norm = (a * a + b * b) * d
        return Scalar._make({(d, -p, -h): [a / norm, -b / norm]})

    def conjugate(self) -> "Scalar":
        return Scalar._make({key: [v[0], -v[1]] for key, v in self._terms.items()})

    def divide_eps(self, p: int) -> "Scalar":
        """Exact division by eps^(p/2); every term must have eps order >= p"""
        if self.eps_order() < p:
            raise NotEpsDivisible(f"{self} has eps order {self.eps_order()} < {p}")
        return Scalar._make({(d, q - p, h): [v[0], v[1]] for (d, q, h), v in self._terms.items()})

    # ------------------------------------------------------------------ evaluation

    def evaluate(self, eps: Optional[Number] = None, rhat: Union["Scalar", Number, None] = None) -> "Scalar":
        """
        Substitute numbers (or, for Rh, any Scalar) for the symbols

        Args:
            eps: Non-negative rational, or None to keep eps symbolic
            rhat: Rational or Scalar value, or None to keep Rh symbolic

        Returns:
            Scalar with the substituted symbols folded in
        """
        if eps is None and rhat is None:
            return self
        rhat_value = None if rhat is None else Scalar.coerce(rhat)
        eps_value = None if eps is None else Fraction(eps)
        if eps_value is not None and eps_value < 0:
            raise ValueError(f"eps must be non-negative, got {eps_value}")
        eps_cache: Dict[int, Scalar] = {}
        rhat_cache: Dict[int, Scalar] = {}
        result = Scalar.zero()
        for (d, p, h), (a, b) in self._terms.items():
            key = (d, 0 if eps_value is not None else p, 0 if rhat_value is not None else h)
            term = Scalar._make({key: [a, b]})
            if eps_value is not None and p:
                if p not in eps_cache:
                    eps_cache[p] = _eps_power(eps_value, p)
                term = term * eps_cache[p]
            if rhat_value is not None and h:
                if h not in rhat_cache:
                    rhat_cache[h] = rhat_value ** h
                term = term * rhat_cache[h]
            result = result + term
        return result

    def subs_rhat(self, value: Union["Scalar", Number]) -> "Scalar":
        return self.evaluate(rhat=value)

    def drop_eps(self) -> "Scalar":
        """Value at eps = 0 with Rh kept symbolic"""
        return self.evaluate(eps=0)

    def evaluate_float(self, eps: float = 0.0, rhat: float = 1.0) -> complex:
        total = 0j
        for (d, p, h), (a, b) in self._terms.items():
            if eps == 0.0:
                if p < 0:
                    raise ZeroDivisionError(f"negative power of eps at eps = 0 in {self}")
                eps_factor = 1.0 if p == 0 else 0.0
            else:
                eps_factor = eps ** (p / 2)
            total += complex(float(a), float(b)) * math.sqrt(d) * eps_factor * rhat ** h
        return total

    def to_complex(self) -> complex:
        if not self.is_numeric():
            raise ValueError(f"{self} still depends on eps or Rh")
        return self.evaluate_float()

    # ------------------------------------------------------------------ comparison

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar.rational(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # ------------------------------------------------------------------ text

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for index, (key, value) in enumerate(self.items()):
            negative, body = _format_term(key, value)
            if index == 0:
                out.append(f"-{body}" if negative else body)
            else:
                out.append(f" - {body}" if negative else f" + {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Parse the canonical text form"""
        return _Parser(text).parse()


PointTuple = Tuple[Optional[Number], Union[Scalar, Number, None]]


def div_exact(x: Scalar, y: Scalar, point: Optional[PointTuple] = None) -> Scalar:
    """
    Exact quotient x / y

    Args:
        x: Dividend
        y: Divisor
        point: Optional (eps, rhat) at which both sides are evaluated when y is not a monomial

    Returns:
        q with q * y == x (at the point, when one was used)
    """
    x = Scalar.coerce(x)
    y = Scalar.coerce(y)
    if y.is_zero():
        raise ZeroDivisionError("division by the zero Scalar")
    if y.is_monomial():
        return x * y.inverse()
    if point is None:
        raise NotDivisible(f"cannot divide by multi-term {y} without a numeric point")
    eps, rhat = point
    x_value = x.evaluate(eps, rhat)
    y_value = y.evaluate(eps, rhat)
    if y_value.is_zero():
        raise ZeroDivisionError(f"{y} vanishes at eps={eps}, Rh={rhat}")
    if not y_value.is_monomial():
        raise NotDivisible(f"{y} evaluates to the multi-term {y_value}")
    return x_value * y_value.inverse()


def _eps_power(eps: Fraction, p: int) -> Scalar:
    if eps == 0:
        if p < 0:
            raise ZeroDivisionError("negative power of eps at eps = 0")
        return Scalar.one() if p == 0 else Scalar.zero()
    whole, half = divmod(p, 2)
    value = Scalar.rational(eps ** whole)
    if half:
        value = value * Scalar.sqrt(eps)
    return value


def _format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_factor(q: Fraction) -> str:
    text = _format_fraction(q)
    return f"({text})" if q.denominator != 1 else text


def _format_term(key: Key, value: Value) -> Tuple[bool, str]:
    d, p, h = key
    a, b = value
    symbols = []
    if d != 1:
        symbols.append(f"sqrt({d})")
    if p:
        if p == 2:
            symbols.append("eps")
        elif p % 2 == 0:
            symbols.append(f"eps^{p // 2}")
        else:
            symbols.append(f"eps^({p}/2)")
    if h:
        symbols.append("Rh" if h == 1 else f"Rh^{h}")

    negative = False
    if b == 0:
        negative = a < 0
        coeff = "" if abs(a) == 1 and symbols else _format_factor(abs(a))
    elif a == 0:
        negative = b < 0
        coeff = "i" if abs(b) == 1 else f"{_format_factor(abs(b))}*i"
    else:
        sign = "-" if b < 0 else "+"
        imag = "i" if abs(b) == 1 else f"{_format_fraction(abs(b))}*i"
        coeff = f"({_format_fraction(a)} {sign} {imag})"
    parts = [coeff] if coeff else []
    parts.extend(symbols)
    return negative, "*".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt|eps|Rh|i)|([-+*/^()]))")


class _Parser:
    """Recursive descent parser for the canonical Scalar grammar"""

    def __init__(self, text: str):
        self.text = text
        self.tokens: List[str] = []
        position = 0
        stripped = text.strip()
        while position < len(stripped):
            match = _TOKEN.match(stripped, position)
            if not match or match.end() == position:
                raise ParseError(f"Unexpected character at {position} in {text!r}")
            self.tokens.append(match.group(1) or match.group(2) or match.group(3))
            position = match.end()
        self.index = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> str:
        token = self.peek()
        if token is None or (expected is not None and token != expected):
            raise ParseError(f"Expected {expected or 'a token'} in {self.text!r}")
        self.index += 1
        return token

    def parse(self) -> Scalar:
        value = self.expression()
        if self.peek() is not None:
            raise ParseError(f"Trailing input in {self.text!r}")
        return value

    def expression(self) -> Scalar:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        value = self.term() * sign
        while self.peek() in ("+", "-"):
            op = self.take()
            value = value + self.term() if op == "+" else value - self.term()
        return value

    def term(self) -> Scalar:
        value = self.factor()
        while self.peek() == "*":
            self.take("*")
            value = value * self.factor()
        return value

    def factor(self) -> Scalar:
        token = self.peek()
        if token == "(":
            self.take("(")
            value = self.expression()
            self.take(")")
            return value
        if token == "i":
            self.take()
            return Scalar.i()
        if token == "sqrt":
            self.take()
            self.take("(")
            value = Scalar.sqrt(self.fraction())
            self.take(")")
            return value
        if token == "eps":
            self.take()
            exponent = self.exponent() if self.peek() == "^" else Fraction(1)
            if (exponent * 2).denominator != 1:
                raise ParseError(f"eps exponent must be a half-integer in {self.text!r}")
            return Scalar.eps(int(exponent * 2))
        if token == "Rh":
            self.take()
            exponent = self.exponent() if self.peek() == "^" else Fraction(1)
            if exponent.denominator != 1:
                raise ParseError(f"Rh exponent must be an integer in {self.text!r}")
            return Scalar.rhat(int(exponent))
        if token is not None and token.isdigit():
            return Scalar.rational(self.fraction())
        raise ParseError(f"Unexpected token {token!r} in {self.text!r}")

    def integer(self) -> int:
        token = self.take()
        if not token.isdigit():
            raise ParseError(f"Expected a number, got {token!r} in {self.text!r}")
        return int(token)

    def fraction(self) -> Fraction:
        numerator = self.integer()
        if self.peek() == "/":
            self.take("/")
            denominator = self.integer()
            if denominator == 0:
                raise ParseError(f"Zero denominator in {self.text!r}")
            return Fraction(numerator, denominator)
        return Fraction(numerator)

    def exponent(self) -> Fraction:
        self.take("^")
        wrapped = self.peek() == "("
        if wrapped:
            self.take("(")
        sign = 1
        if self.peek() == "-":
            self.take("-")
            sign = -1
        value = sign * self.fraction()
        if wrapped:
            self.take(")")
        return value
