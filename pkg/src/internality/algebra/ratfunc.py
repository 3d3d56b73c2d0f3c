"""Reduced rational functions over Q."""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .gcd import poly_gcd
from .poly import DimensionError, MultiPoly


class RationalFunction:
    """num/den with gcd(num, den) = 1 and den monic in graded-lex order."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: Optional[MultiPoly] = None, reduced: bool = False):
        if den is None:
            den = MultiPoly.const(num.nvars, 1)
        if num.nvars != den.nvars:
            raise DimensionError("nvars mismatch")
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @classmethod
    def const(cls, nvars: int, c) -> "RationalFunction":
        return cls(MultiPoly.const(nvars, c), reduced=True)

    @classmethod
    def var(cls, nvars: int, i: int) -> "RationalFunction":
        return cls(MultiPoly.var(nvars, i), reduced=True)

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_coeff() / self.den.constant_coeff()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.nvars != self.nvars:
                raise DimensionError("nvars mismatch")
            return other
        if isinstance(other, MultiPoly):
            return RationalFunction(other, reduced=True).normalized()
        if isinstance(other, (int, Fraction)):
            return RationalFunction.const(self.nvars, other)
        return NotImplemented

    def normalized(self):
        if self.den == 1:
            return self
        return RationalFunction(self.num, self.den)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        if self.den == 1 or other.den == 1:
            return _lc_normal(self.num * other.den + other.num * self.den, self.den * other.den)
        # Henrici: only factors of gcd(b, d) can cancel in a/b + c/d
        g = poly_gcd(self.den, other.den)
        b, d = self.den.exquo(g), other.den.exquo(g)
        t = self.num * d + other.num * b
        if not t:
            return RationalFunction.const(self.nvars, 0)
        g2 = poly_gcd(t, g) if not g.is_constant() else g
        if not g2.is_constant():
            t, g = t.exquo(g2), g.exquo(g2)
        return _lc_normal(t, b * d * g)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == 1 and other.den == 1:
            return RationalFunction(self.num * other.num, self.den, reduced=True)
        if not self.num or not other.num:
            return RationalFunction.const(self.nvars, 0)
        # Henrici: cross gcds suffice when both factors are reduced
        a, b, c, d = self.num, self.den, other.num, other.den
        g1 = poly_gcd(a, d) if not d.is_constant() else None
        if g1 is not None and not g1.is_constant():
            a, d = a.exquo(g1), d.exquo(g1)
        g2 = poly_gcd(c, b) if not b.is_constant() else None
        if g2 is not None and not g2.is_constant():
            c, b = c.exquo(g2), b.exquo(g2)
        return _lc_normal(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return RationalFunction(self.den ** (-n), self.num ** (-n))
        return RationalFunction(self.num ** n, self.den ** n, reduced=True)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = self._coerce(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def diff(self, i: int) -> "RationalFunction":
        n, d = self.num, self.den
        if d.is_constant():
            return RationalFunction(n.diff(i).scale(1 / d.constant_coeff()), reduced=True).normalized()
        return RationalFunction(n.diff(i) * d - n * d.diff(i), d * d)

    def evaluate(self, point: Sequence) -> Fraction:
        d = self.den.evaluate(point)
        if not d:
            raise ZeroDivisionError("pole at evaluation point")
        return self.num.evaluate(point) / d

    def to_str(self, names=None) -> str:
        if not self.den.is_constant() and self.num:
            # show integer coefficients when the numerator carries fractions
            L = self.num.content().denominator
            if L > 1:
                num, den = self.num.scale(L), self.den.scale(L)
                return RationalFunction(num, den, reduced=True)._fmt(names)
        return self._fmt(names)

    def _fmt(self, names) -> str:
        n = self.num.to_str(names)
        if self.den == 1:
            return n
        d = self.den.to_str(names)
        if len(self.num.terms) > 1:
            n = "(%s)" % n
        if len(self.den.terms) > 1 or (self.den.leading_monomial() != (0,) * self.nvars
                                        and (self.den.leading_coeff() != 1 or sum(self.den.leading_monomial()) > 1
                                             or len(self.den.variables()) > 1)):
            d = "(%s)" % d
        return "%s/%s" % (n, d)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return "RationalFunction(%s)" % self.to_str()


def _reduce(num: MultiPoly, den: MultiPoly):
    if not num:
        return num, MultiPoly.const(num.nvars, 1)
    if not den.is_constant():
        g = poly_gcd(num, den)
        if not g.is_constant():
            num = num.exquo(g)
            den = den.exquo(g)
    lc = den.leading_coeff()
    return num.scale(1 / lc), den.scale(1 / lc)


def _lc_normal(num: MultiPoly, den: MultiPoly) -> RationalFunction:
    lc = den.leading_coeff()
    return RationalFunction(num.scale(1 / lc), den.scale(1 / lc), reduced=True)


def rf_reduce(num: MultiPoly, den: MultiPoly) -> RationalFunction:
    return RationalFunction(num, den)
