"""Exact arithmetic in the cyclotomic fields Q(zeta_r).

A :class:`Scalar` is an element of Q(zeta_r) stored as a coefficient
vector over the power basis 1, z, ..., z^(d-1), where z = zeta_r is a
primitive r-th root of unity and d = deg Phi_r.  All arithmetic is exact
(``fractions.Fraction`` coefficients, reduction modulo the cyclotomic
polynomial Phi_r); floating point never enters any computation, it is
only offered as a diagnostic embedding via :meth:`Scalar.to_complex`.

For r = 1 the basis is just {1}, so scalars are plain rationals.

>>> z = zeta(3)
>>> print(z * z)
-z - 1
>>> print(z * z * z)
1
>>> print(parse_scalar("-z - 2*z^2", 3))
z + 2
"""

from __future__ import annotations

import cmath
import functools
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "Scalar",
    "ScalarParseError",
    "cyclotomic_polynomial",
    "one",
    "parse_scalar",
    "rational",
    "zero",
    "zeta",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _poly_divmod(num: list[Fraction], den: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    """Quotient and remainder of univariate polynomials (ascending coeffs)."""
    num = list(num)
    qdeg = len(num) - len(den)
    if qdeg < 0:
        return [], num
    lead = den[-1]
    quot = [_ZERO] * (qdeg + 1)
    for i in range(qdeg, -1, -1):
        c = num[i + len(den) - 1] / lead
        quot[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    while num and not num[-1]:
        num.pop()
    return quot, num


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(order: int) -> tuple[int, ...]:
    """Coefficients of Phi_order, ascending, as plain integers.

    >>> cyclotomic_polynomial(1)
    (-1, 1)
    >>> cyclotomic_polynomial(3)
    (1, 1, 1)
    >>> cyclotomic_polynomial(4)
    (1, 0, 1)
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    # x^order - 1 divided by Phi_d for every proper divisor d.
    num = [_ZERO] * (order + 1)
    num[0] = Fraction(-1)
    num[order] = _ONE
    rem: list[Fraction]
    for d in range(1, order):
        if order % d == 0:
            phi_d = [Fraction(c) for c in cyclotomic_polynomial(d)]
            num, rem = _poly_divmod(num, phi_d)
            assert not rem
    assert all(c.denominator == 1 for c in num)
    return tuple(int(c) for c in num)


@functools.lru_cache(maxsize=None)
def _reduction_data(order: int) -> tuple[int, tuple[Fraction, ...]]:
    """Degree of Phi_order and its lower coefficients as Fractions."""
    phi = cyclotomic_polynomial(order)
    degree = len(phi) - 1
    return degree, tuple(Fraction(c) for c in phi[:-1])


def _reduce(order: int, raw: list[Fraction]) -> tuple[Fraction, ...]:
    degree, low = _reduction_data(order)
    if len(raw) < degree:
        raw = raw + [_ZERO] * (degree - len(raw))
    for i in range(len(raw) - 1, degree - 1, -1):
        c = raw[i]
        if c:
            base = i - degree
            for j in range(degree):
                if low[j]:
                    raw[base + j] -= c * low[j]
    return tuple(raw[:degree])


@dataclass(frozen=True, slots=True)
class Scalar:
    """An element of Q(zeta_order), reduced modulo Phi_order.

    ``coeffs[j]`` is the coefficient of zeta^j; the tuple always has
    length deg Phi_order.  Instances are immutable and hashable, and two
    scalars are equal iff they have the same order and coefficients
    (operations between different orders are rejected, they are elements
    of different fields).
    """

    order: int
    coeffs: tuple[Fraction, ...]

    def _check(self, other: Scalar) -> None:
        if self.order != other.order:
            raise ValueError(f"mixed scalar orders: {self.order} and {other.order}")

    @staticmethod
    def of(value: int | Fraction, order: int) -> Scalar:
        degree, _ = _reduction_data(order)
        coeffs = (Fraction(value),) + (_ZERO,) * (degree - 1)
        return Scalar(order, coeffs)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __add__(self, other: Scalar | int | Fraction) -> Scalar:
        if not isinstance(other, Scalar):
            other = Scalar.of(other, self.order)
        self._check(other)
        return Scalar(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other: Scalar | int | Fraction) -> Scalar:
        if not isinstance(other, Scalar):
            other = Scalar.of(other, self.order)
        self._check(other)
        return Scalar(self.order, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other: int | Fraction) -> Scalar:
        return Scalar.of(other, self.order) - self

    def __neg__(self) -> Scalar:
        return Scalar(self.order, tuple(-a for a in self.coeffs))

    def __mul__(self, other: Scalar | int | Fraction) -> Scalar:
        if not isinstance(other, Scalar):
            q = Fraction(other)
            return Scalar(self.order, tuple(a * q for a in self.coeffs))
        self._check(other)
        a, b = self.coeffs, other.coeffs
        raw = [_ZERO] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        raw[i + j] += ai * bj
        return Scalar(self.order, _reduce(self.order, raw))

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        """Multiplicative inverse via the extended Euclidean algorithm.

        Phi_order is irreducible over Q, so every nonzero residue is a
        unit.
        """
        if self.is_zero():
            raise ZeroDivisionError("scalar inverse of zero")
        phi = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        # Extended Euclid on (Phi, self); track only the self-cofactor t:
        # invariant r_i = (...) * Phi + t_i * self.
        r0, r1 = phi, list(self.coeffs)
        while r1 and not r1[-1]:
            r1.pop()
        t0: list[Fraction] = []
        t1: list[Fraction] = [_ONE]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            prod = [_ZERO] * (len(q) + len(t1) - 1) if q and t1 else []
            for i, qi in enumerate(q):
                if qi:
                    for j, tj in enumerate(t1):
                        if tj:
                            prod[i + j] += qi * tj
            width = max(len(t0), len(prod))
            t_new = [(t0[i] if i < len(t0) else _ZERO) - (prod[i] if i < len(prod) else _ZERO) for i in range(width)]
            while t_new and not t_new[-1]:
                t_new.pop()
            r0, r1 = r1, r
            t0, t1 = t1, t_new
        # Phi_r is irreducible and deg(self) < deg(Phi_r), so the gcd is a
        # nonzero constant.
        assert r1, "gcd with the irreducible Phi_r cannot vanish"
        c = r1[0]
        inv = [ti / c for ti in t1]
        return Scalar(self.order, _reduce(self.order, inv))

    def __truediv__(self, other: Scalar | int | Fraction) -> Scalar:
        if not isinstance(other, Scalar):
            q = Fraction(other)
            if not q:
                raise ZeroDivisionError("scalar division by zero")
            return Scalar(self.order, tuple(a / q for a in self.coeffs))
        self._check(other)
        return self * other.inverse()

    def __rtruediv__(self, other: int | Fraction) -> Scalar:
        return Scalar.of(other, self.order) / self

    def __pow__(self, exponent: int) -> Scalar:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = one(self.order)
        base = self
        k = exponent
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sort_key(self) -> tuple[Fraction, ...]:
        """A total order on scalars of one field, for canonical sorting."""
        return self.coeffs

    def to_complex(self) -> complex:
        """Numeric embedding (diagnostics only, never used in math paths)."""
        root = cmath.exp(2j * cmath.pi / self.order)
        return sum((complex(c) * root**j for j, c in enumerate(self.coeffs)), 0j)

    def __str__(self) -> str:
        terms: list[str] = []
        for p in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[p]
            if not c:
                continue
            mag = abs(c)
            if p == 0:
                body = str(mag)
            else:
                zpart = "z" if p == 1 else f"z^{p}"
                body = zpart if mag == 1 else f"{mag}*{zpart}"
            if not terms:
                terms.append(body if c > 0 else f"-{body}")
            else:
                terms.append(f" + {body}" if c > 0 else f" - {body}")
        return "".join(terms) if terms else "0"

    def __repr__(self) -> str:
        return f"Scalar({self.order}, {self})"


@functools.lru_cache(maxsize=None)
def zero(order: int) -> Scalar:
    return Scalar.of(0, order)


@functools.lru_cache(maxsize=None)
def one(order: int) -> Scalar:
    return Scalar.of(1, order)


@functools.lru_cache(maxsize=None)
def zeta(order: int, power: int = 1) -> Scalar:
    """zeta_order^power as a Scalar.

    >>> print(zeta(4) * zeta(4))
    -1
    >>> zeta(1)
    Scalar(1, 1)
    """
    if power < 0:
        raise ValueError("power must be >= 0")
    raw = [_ZERO] * (power + 1)
    raw[power] = _ONE
    return Scalar(order, _reduce(order, raw))


def rational(value: int | Fraction, order: int = 1) -> Scalar:
    return Scalar.of(value, order)


class ScalarParseError(ValueError):
    """Raised on malformed scalar text; carries the offending position."""

    def __init__(self, text: str, pos: int, message: str) -> None:
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


class _Parser:
    """Recursive descent for the scalar grammar.

    expr     := term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := rational | 'z' ('^' nat)? | '(' expr ')' | '-' factor
    rational := int ('/' nat)?
    """

    def __init__(self, text: str, order: int) -> None:
        self.text = text
        self.order = order
        self.pos = 0

    def error(self, message: str) -> ScalarParseError:
        return ScalarParseError(self.text, self.pos, message)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def nat(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise self.error("expected a number")
        return int(self.text[start : self.pos])

    def factor(self) -> Scalar:
        ch = self.peek()
        if ch == "-":
            self.take()
            return -self.factor()
        if ch == "(":
            self.take()
            value = self.expr()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.take()
            return value
        if ch == "z":
            self.take()
            power = 1
            if self.peek() == "^":
                self.take()
                power = self.nat()
            return zeta(self.order, power)
        if ch.isdigit():
            num = self.nat()
            if self.peek() == "/":
                self.take()
                den = self.nat()
                if den == 0:
                    raise self.error("zero denominator")
                return Scalar.of(Fraction(num, den), self.order)
            return Scalar.of(num, self.order)
        raise self.error("expected a factor")

    def term(self) -> Scalar:
        value = self.factor()
        while self.peek() == "*":
            self.take()
            value = value * self.factor()
        return value

    def expr(self) -> Scalar:
        value = self.term()
        while True:
            ch = self.peek()
            if ch == "+":
                self.take()
                value = value + self.term()
            elif ch == "-":
                self.take()
                value = value - self.term()
            else:
                return value


def parse_scalar(text: str, order: int) -> Scalar:
    """Parse scalar text over Q(zeta_order).

    >>> parse_scalar("z^2", 3).coeffs
    (Fraction(-1, 1), Fraction(-1, 1))
    >>> print(parse_scalar("1/2 + z", 4))
    z + 1/2
    >>> print(parse_scalar("(1 - z)*(1 - z^2)", 3))
    3
    """
    parser = _Parser(text, order)
    value = parser.expr()
    parser.skip_ws()
    if parser.pos != len(text):
        raise parser.error("unexpected trailing input")
    return value
