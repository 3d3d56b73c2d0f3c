"""Polynomial gcd over Q by the primitive pseudo-remainder sequence.

The work is done on integer-coefficient dictionaries; over Q a gcd is only
defined up to a unit, so inputs are first scaled to primitive integer form.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Tuple

from .poly import MultiPoly

IntPoly = Dict[Tuple[int, ...], int]


def _to_int(p: MultiPoly) -> IntPoly:
    return {e: int(c) for e, c in p.primitive().terms.items()}


def _int_content(a: IntPoly) -> int:
    g = 0
    for c in a.values():
        g = gcd(g, c)
        if g == 1:
            break
    return g


def _mul(a: IntPoly, b: IntPoly) -> IntPoly:
    out: IntPoly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def _sub(a: IntPoly, b: IntPoly) -> IntPoly:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) - c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _shift(a: IntPoly, v: int, k: int) -> IntPoly:
    if not k:
        return a
    out = {}
    for e, c in a.items():
        e = list(e)
        e[v] += k
        out[tuple(e)] = c
    return out


def _deg(a: IntPoly, v: int) -> int:
    return max(e[v] for e in a)


def _coeffs(a: IntPoly, v: int) -> Dict[int, IntPoly]:
    out: Dict[int, IntPoly] = {}
    for e, c in a.items():
        f = list(e)
        f[v] = 0
        out.setdefault(e[v], {})[tuple(f)] = c
    return out


def _primitive(a: IntPoly) -> IntPoly:
    if not a:
        return a
    g = _int_content(a)
    lead = max(a)
    if a[lead] < 0:
        g = -g
    return a if g == 1 else {e: c // g for e, c in a.items()}


def _exquo(a: IntPoly, b: IntPoly) -> IntPoly:
    """Exact quotient a / b over Z (lex order division)."""
    if len(b) == 1:
        (eb, cb), = b.items()
        return {tuple(x - y for x, y in zip(e, eb)): c // cb for e, c in a.items()}
    lb = max(b)
    cb = b[lb]
    q: IntPoly = {}
    r = dict(a)
    while r:
        lr = max(r)
        t = tuple(x - y for x, y in zip(lr, lb))
        if min(t) < 0 or r[lr] % cb:
            raise ArithmeticError("inexact division")
        c = r[lr] // cb
        q[t] = c
        for e, cc in b.items():
            e2 = tuple(x + y for x, y in zip(e, t))
            v = r.get(e2, 0) - c * cc
            if v:
                r[e2] = v
            else:
                r.pop(e2, None)
    return q


def _prem(a: IntPoly, b: IntPoly, v: int) -> IntPoly:
    db = _deg(b, v)
    lcb = _coeffs(b, v)[db]
    while a and _deg(a, v) >= db:
        da = _deg(a, v)
        lca = _coeffs(a, v)[da]
        a = _sub(_mul(lcb, a), _shift(_mul(lca, b), v, da - db))
    return a


def _variables(a: IntPoly) -> set:
    return {i for e in a for i, x in enumerate(e) if x}


def _content_in(a: IntPoly, v: int) -> IntPoly:
    g: IntPoly = {}
    for c in _coeffs(a, v).values():
        g = _igcd(g, c)
        if len(g) == 1 and not any(next(iter(g))):
            break
    return g


def _one(n: int) -> IntPoly:
    return {(0,) * n: 1}


def _igcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd with positive leading coefficient; gcd(0, 0) = {}."""
    if not a:
        return _primitive(b)
    if not b:
        return _primitive(a)
    n = len(next(iter(a)))
    va, vb = _variables(a), _variables(b)
    used = va | vb
    if not used:
        return _one(n)
    v = max(used)
    if v not in va:
        return _igcd(a, _content_in(b, v))
    if v not in vb:
        return _igcd(_content_in(a, v), b)
    ca = _content_in(a, v)
    cb = _content_in(b, v)
    pa = _exquo(a, ca)
    pb = _exquo(b, cb)
    c = _igcd(ca, cb)
    if _deg(pa, v) < _deg(pb, v):
        pa, pb = pb, pa
    while True:
        r = _prem(pa, pb, v)
        if not r:
            g = pb
            break
        if _deg(r, v) == 0:
            g = _one(n)
            break
        r = _primitive(r)
        if len(used) > 1:
            r = _exquo(r, _content_in(r, v))
        pa, pb = pb, r
    if len(used) > 1:
        g = _exquo(g, _content_in(g, v))
    return _primitive(_mul(c, g))


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic (graded-lex) greatest common divisor; gcd(0, 0) = 0."""
    if a.nvars != b.nvars:
        from .poly import DimensionError
        raise DimensionError("nvars mismatch")
    if not a and not b:
        return MultiPoly.zero(a.nvars)
    if a.is_constant() and a or b.is_constant() and b:
        return MultiPoly.const(a.nvars, 1)
    g = _igcd(_to_int(a) if a else {}, _to_int(b) if b else {})
    return MultiPoly(a.nvars, {e: Fraction(c) for e, c in g.items()}).monic()


def poly_lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if not a or not b:
        return MultiPoly.zero(a.nvars)
    return (a * b).exquo(poly_gcd(a, b)).monic()
