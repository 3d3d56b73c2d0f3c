"""Squarefree factorization, rational roots and resultants."""
from __future__ import annotations

from fractions import Fraction
from math import isqrt, lcm
from typing import List, Tuple

from .gcd import poly_gcd
from .poly import MultiPoly


def _check_uni(u: MultiPoly) -> int:
    used = u.variables()
    if len(used) > 1:
        raise ValueError("expected a univariate polynomial")
    return next(iter(used)) if used else 0


def squarefree_factorization(u: MultiPoly) -> List[Tuple[MultiPoly, int]]:
    """Yun's algorithm. Factors are monic; u = lc(u) * prod f^m."""
    if not u:
        raise ValueError("squarefree factorization of zero")
    v = _check_uni(u)
    out = []
    a = u.monic()
    if a.is_constant():
        return out
    b = a.diff(v)
    c = poly_gcd(a, b)
    w = a.exquo(c)
    y = b.exquo(c)
    z = y - w.diff(v)
    i = 1
    while not w.is_constant():
        g = poly_gcd(w, z)
        if not g.is_constant():
            out.append((g, i))
        w = w.exquo(g)
        y = z.exquo(g)
        z = y - w.diff(v)
        i += 1
    return out


def squarefree_part(u: MultiPoly) -> MultiPoly:
    v = _check_uni(u)
    return u.exquo(poly_gcd(u, u.diff(v))).monic()


def _divisors(n: int) -> List[int]:
    n = abs(n)
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def integer_coeffs(u: MultiPoly, v: int) -> List[int]:
    """Ascending integer coefficients of a primitive multiple of u."""
    d = u.degree_in(v)
    den = 1
    for c in u.terms.values():
        den = lcm(den, c.denominator)
    coeffs = [0] * (d + 1)
    for e, c in u.terms.items():
        coeffs[e[v]] = int(c * den)
    return coeffs


def rational_roots(u: MultiPoly) -> List[Fraction]:
    """Distinct rational roots, ordered by absolute value (positive first)."""
    if not u:
        raise ValueError("rational roots of zero")
    v = _check_uni(u)
    if u.is_constant():
        return []
    s = squarefree_part(u)
    coeffs = integer_coeffs(s, v)
    roots = []
    low = 0
    while coeffs[low] == 0:
        low += 1
    if low:
        roots.append(Fraction(0))
    coeffs = coeffs[low:]
    if len(coeffs) == 1:
        return roots
    cands = set()
    for p in _divisors(coeffs[0]):
        for q in _divisors(coeffs[-1]):
            cands.add(Fraction(p, q))
            cands.add(Fraction(-p, q))
    for r in sorted(cands, key=lambda t: (abs(t), t < 0)):
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * r + c
        if acc == 0:
            roots.append(r)
    return roots


def det_bareiss(mat: List[List[MultiPoly]], nvars: int) -> MultiPoly:
    """Fraction-free determinant of a square matrix of polynomials."""
    n = len(mat)
    if n == 0:
        return MultiPoly.const(nvars, 1)
    m = [row[:] for row in mat]
    sign = 1
    prev = MultiPoly.const(nvars, 1)
    for k in range(n - 1):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return MultiPoly.zero(nvars)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                t = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = t.exquo(prev) if not prev.is_constant() else t.scale(1 / prev.constant_coeff())
        prev = m[k][k]
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def sylvester_matrix(u: MultiPoly, w: MultiPoly, var: int) -> List[List[MultiPoly]]:
    m, n = u.degree_in(var), w.degree_in(var)
    cu, cw = u.coeffs_in(var), w.coeffs_in(var)
    zero = MultiPoly.zero(u.nvars)
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for k in range(m + 1):
            row[i + m - k] = cu.get(k, zero)
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k in range(n + 1):
            row[i + n - k] = cw.get(k, zero)
        rows.append(row)
    return rows


def resultant(u: MultiPoly, w: MultiPoly, var: int) -> MultiPoly:
    """Determinant of the Sylvester matrix of u and w in x_var."""
    if u.nvars != w.nvars:
        from .poly import DimensionError
        raise DimensionError("nvars mismatch")
    if not u or not w:
        raise ValueError("resultant of a zero polynomial")
    m, n = u.degree_in(var), w.degree_in(var)
    if m == 0 and n == 0:
        raise ValueError("both inputs are constant in the eliminated variable")
    return det_bareiss(sylvester_matrix(u, w, var), u.nvars)
