"""Autonomous rational vector fields, Lie derivatives and candidate integrals."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .algebra import DimensionError, MultiPoly, RationalFunction, poly_gcd, poly_lcm
from .algebra.linalg import poly_matrix_rank

FIRST_INTEGRAL = "FirstIntegral"
EXPONENTIAL = "Exponential"
PRIMITIVE = "Primitive"


class VectorField:
    """The system x_i' = f_i(x_0, ..., x_{k-1})."""

    def __init__(self, f: Sequence, names: Optional[Sequence[str]] = None):
        if not f:
            raise ValueError("a vector field needs at least one component")
        k = len(f)
        comps = []
        for c in f:
            if isinstance(c, MultiPoly):
                c = RationalFunction(c, reduced=True).normalized()
            elif isinstance(c, (int, Fraction)):
                c = RationalFunction.const(k, c)
            if c.nvars != k:
                raise DimensionError("component has %d variables, expected %d" % (c.nvars, k))
            comps.append(c)
        self.k = k
        self.f = comps
        self.names = list(names) if names else ["x%d" % i for i in range(k)]

    def __repr__(self):
        return "VectorField(%s)" % ", ".join(c.to_str(self.names) for c in self.f)


@dataclass(frozen=True)
class ClearedField:
    """f_i = F_i / h with h the lcm of the denominators."""
    h: MultiPoly
    F: tuple

    @property
    def k(self) -> int:
        return len(self.F)

    def degree(self) -> int:
        return max(p.degree() for p in self.F)

    def lie(self, p: MultiPoly) -> MultiPoly:
        out = MultiPoly.zero(p.nvars)
        for i, Fi in enumerate(self.F):
            if Fi:
                d = p.diff(i)
                if d:
                    out = out + d * Fi
        return out


class IntegralCandidate:
    """A nonconstant g with L(g) = 0, L(g) = lam*g or L(g) = 1."""

    __slots__ = ("g", "kind", "lam")

    def __init__(self, g: RationalFunction, kind: str, lam: Fraction = Fraction(0)):
        if kind not in (FIRST_INTEGRAL, EXPONENTIAL, PRIMITIVE):
            raise ValueError("unknown kind %r" % kind)
        if is_constant(g):
            raise ValueError("integral candidate must be nonconstant")
        lam = Fraction(lam)
        if kind == EXPONENTIAL and lam == 0:
            kind = FIRST_INTEGRAL
        if kind != EXPONENTIAL:
            lam = Fraction(0)
        self.g = g
        self.kind = kind
        self.lam = lam

    def __eq__(self, other):
        return (isinstance(other, IntegralCandidate) and self.g == other.g
                and self.kind == other.kind and self.lam == other.lam)

    def __hash__(self):
        return hash((self.g, self.kind, self.lam))

    def __repr__(self):
        tag = "%s(%s)" % (self.kind, self.lam) if self.kind == EXPONENTIAL else self.kind
        return "IntegralCandidate(%s, %s)" % (self.g, tag)


def is_constant(g: RationalFunction) -> bool:
    return all(not g.diff(i) for i in range(g.nvars))


def lie_derivative(X: VectorField, g) -> RationalFunction:
    if isinstance(g, MultiPoly):
        g = RationalFunction(g, reduced=True).normalized()
    if g.nvars != X.k:
        raise DimensionError("g has %d variables, field has %d" % (g.nvars, X.k))
    out = RationalFunction.const(X.k, 0)
    for i, fi in enumerate(X.f):
        if fi:
            d = g.diff(i)
            if d:
                out = out + d * fi
    return out


def clear_denominators(X: VectorField) -> ClearedField:
    h = MultiPoly.const(X.k, 1)
    for fi in X.f:
        h = poly_lcm(h, fi.den)
    F = tuple(fi.num * h.exquo(fi.den) for fi in X.f)
    return ClearedField(h, F)


def jacobian_independent(gs: Sequence[RationalFunction], k: int) -> bool:
    if not gs:
        return True
    rows = []
    for g in gs:
        if isinstance(g, MultiPoly):
            g = RationalFunction(g, reduced=True).normalized()
        if g.nvars != k:
            raise DimensionError("nvars mismatch")
        ders = [g.diff(j) for j in range(k)]
        den = MultiPoly.const(k, 1)
        for d in ders:
            den = poly_lcm(den, d.den)
        rows.append([d.num * den.exquo(d.den) for d in ders])
    return poly_matrix_rank(rows, k) == len(gs)


def verify_candidate(X: VectorField, c: IntegralCandidate) -> bool:
    L = lie_derivative(X, c.g)
    if c.kind == FIRST_INTEGRAL:
        return L.is_zero()
    if c.kind == EXPONENTIAL:
        return L == c.g * c.lam
    return L == RationalFunction.const(X.k, 1)
