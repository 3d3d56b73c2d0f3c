"""Sparse multivariate polynomials with exact rational coefficients.

Terms are stored as a dict mapping exponent tuples to nonzero Fractions.
The monomial order is graded lexicographic with x0 > x1 > ... everywhere.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

Exp = Tuple[int, ...]
Scalar = Union[int, Fraction]


class DimensionError(ValueError):
    pass


def grlex_key(e: Exp) -> Tuple[int, Exp]:
    return (sum(e), e)


def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class MultiPoly:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Dict[Exp, Scalar]] = None):
        self.nvars = nvars
        clean: Dict[Exp, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if c:
                    if len(e) != nvars:
                        raise DimensionError("exponent %r does not have %d entries" % (e, nvars))
                    clean[tuple(e)] = _frac(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exp, Fraction]) -> "MultiPoly":
        # trusted constructor: terms already clean
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c: Scalar) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MultiPoly":
        if not 0 <= i < nvars:
            raise DimensionError("variable index %d out of range" % i)
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, e: Sequence[int], c: Scalar = 1) -> "MultiPoly":
        return cls(len(e), {tuple(e): c})

    @classmethod
    def univariate(cls, coeffs: Sequence[Scalar]) -> "MultiPoly":
        """Build a one-variable polynomial from ascending coefficients."""
        return cls(1, {(i,): c for i, c in enumerate(coeffs)})

    # -- basic queries --------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_coeff(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coeff(self, e: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def variables(self) -> set:
        return {i for e in self.terms for i in range(self.nvars) if e[i]}

    def sorted_terms(self):
        """Terms in decreasing graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_monomial(self) -> Exp:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=grlex_key)

    def leading_coeff(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return self.terms[self.leading_monomial()]

    def homogeneous_part(self, d: int) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise DimensionError("nvars mismatch: %d vs %d" % (self.nvars, other.nvars))
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        res = dict(self.terms)
        for e, c in other.terms.items():
            v = res.get(e, 0) + c
            if v:
                res[e] = v
            else:
                res.pop(e, None)
        return MultiPoly._raw(self.nvars, res)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "MultiPoly":
        c = _frac(c)
        if not c:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        res: Dict[Exp, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = res.get(e, 0) + c1 * c2
                if v:
                    res[e] = v
                else:
                    del res[e]
        return MultiPoly._raw(self.nvars, res)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = MultiPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(Fraction(1) / _frac(c))
        return NotImplemented

    def mul_monomial(self, e: Exp, c: Scalar = 1) -> "MultiPoly":
        c = _frac(c)
        if not c:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(self.nvars, {tuple(a + b for a, b in zip(m, e)): v * c
                                           for m, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_coeff() == other
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and evaluation ----------------------------------------

    def diff(self, i: int) -> "MultiPoly":
        if not 0 <= i < self.nvars:
            raise DimensionError("variable index %d out of range" % i)
        res = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                res[tuple(ne)] = c * e[i]
        return MultiPoly._raw(self.nvars, res)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t *= _frac(x) ** k
            total += t
        return total

    def substitute(self, i: int, value) -> "MultiPoly":
        """Replace x_i by a scalar or a polynomial in the same ring."""
        if isinstance(value, (int, Fraction)):
            value = _frac(value)
            res: Dict[Exp, Fraction] = {}
            for e, c in self.terms.items():
                ne = e[:i] + (0,) + e[i + 1:]
                v = res.get(ne, 0) + c * value ** e[i]
                if v:
                    res[ne] = v
                else:
                    res.pop(ne, None)
            return MultiPoly._raw(self.nvars, res)
        out = MultiPoly.zero(self.nvars)
        for k, cf in self.coeffs_in(i).items():
            out = out + cf * value ** k
        return out

    def coeffs_in(self, i: int) -> Dict[int, "MultiPoly"]:
        """View as a polynomial in x_i: {power: coefficient free of x_i}."""
        groups: Dict[int, Dict[Exp, Fraction]] = {}
        for e, c in self.terms.items():
            groups.setdefault(e[i], {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: MultiPoly._raw(self.nvars, t) for k, t in groups.items()}

    def extend(self, nvars: int, positions: Sequence[int]) -> "MultiPoly":
        """Embed into a ring with nvars variables, sending x_j to x_positions[j]."""
        res = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for j, k in enumerate(e):
                ne[positions[j]] += k
            res[tuple(ne)] = c
        return MultiPoly._raw(nvars, res)

    # -- normalization --------------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c such that self / c has coprime integer coefficients."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "MultiPoly":
        """Integer coefficients, coprime, positive graded-lex leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading_coeff() < 0:
            c = -c
        return self.scale(1 / c)

    def monic(self) -> "MultiPoly":
        if not self.terms:
            return self
        return self.scale(1 / self.leading_coeff())

    # -- division -------------------------------------------------------

    def divmod(self, other: "MultiPoly"):
        """Graded-lex multivariate division: self = q*other + r."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lm = other.leading_monomial()
        lc = other.terms[lm]
        rest = dict(self.terms)
        q: Dict[Exp, Fraction] = {}
        r: Dict[Exp, Fraction] = {}
        while rest:
            m = max(rest, key=grlex_key)
            c = rest[m]
            if all(a >= b for a, b in zip(m, lm)):
                qe = tuple(a - b for a, b in zip(m, lm))
                qc = c / lc
                q[qe] = q.get(qe, 0) + qc
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(qe, e2))
                    v = rest.get(e, 0) - qc * c2
                    if v:
                        rest[e] = v
                    else:
                        rest.pop(e, None)
            else:
                r[m] = c
                del rest[m]
        return MultiPoly(self.nvars, q), MultiPoly._raw(self.nvars, r)

    def exquo(self, other: "MultiPoly") -> "MultiPoly":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def divides(self, other: "MultiPoly") -> bool:
        """True if self divides other."""
        return not other.divmod(self)[1]

    # -- printing -------------------------------------------------------

    def to_str(self, names: Optional[Sequence[str]] = None) -> str:
        if names is None:
            names = ["x%d" % i for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(n if k == 1 else "%s^%d" % (n, k) for n, k in zip(names, e) if k)
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = "%s*%s" % (a, mono)
            parts.append(("-" if c < 0 else "+", body))
        s = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
        for sign, body in parts[1:]:
            s += " %s %s" % (sign, body)
        return s

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return "MultiPoly(%d, %s)" % (self.nvars, self.to_str())


def poly_arith(op: str, a: MultiPoly, b) -> MultiPoly:
    if op == "add":
        return a + a._coerce(b)
    if op == "sub":
        return a - a._coerce(b)
    if op == "mul":
        return a * a._coerce(b)
    if op == "pow":
        return a ** b
    raise ValueError("unknown op %r" % op)


def partial_derivative(p: MultiPoly, i: int) -> MultiPoly:
    return p.diff(i)


def monomials_upto(nvars: int, d: int) -> list:
    """All exponent vectors of total degree <= d, decreasing graded-lex."""
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(tuple(prefix + [left]))
            return
        for k in range(left, -1, -1):
            rec(prefix + [k], left - k, slots - 1)

    for deg in range(d, -1, -1):
        if nvars == 0:
            if deg == 0:
                out.append(())
            continue
        rec([], deg, nvars)
    return out


def product(polys: Iterable[MultiPoly], nvars: int) -> MultiPoly:
    out = MultiPoly.const(nvars, 1)
    for p in polys:
        out = out * p
    return out
