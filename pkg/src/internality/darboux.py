"""Darboux polynomials of a cleared field and the integrals they generate."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import MultiPoly, RationalFunction, integer_vector, monomials_upto, nullspace, rref
from .algebra import poly_gcd, resultant
from .algebra.univariate import rational_roots, squarefree_part
from .vectorfield import (EXPONENTIAL, FIRST_INTEGRAL, PRIMITIVE, ClearedField, IntegralCandidate)

ZERO = "Zero"
CONSTANT_TIMES_H = "ConstantTimesH"
H = "H"

ALGEBRAIC_COFACTOR = "algebraic-cofactor branch encountered"
UNRESOLVED_COFACTOR = "nonlinear cofactor constraint left unresolved"


@dataclass(frozen=True)
class DarbouxElement:
    P: MultiPoly
    K: MultiPoly


@dataclass(frozen=True)
class CofactorRelation:
    n: Tuple[int, ...]
    lam: Fraction
    target: str


@dataclass
class DarbouxSearch:
    elements: List[DarbouxElement]
    caveats: List[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# branch elimination over Q[kappa]
#
# A row is (coeffs, rhs): sum coeffs[c] * p_c + rhs = 0, entries polynomials
# in the cofactor unknowns kappa.

class _Solver:
    def __init__(self, nk: int, branch_cap: int = 4000):
        self.nk = nk
        self.caveats = set()
        self.budget = branch_cap
        self._res_cache = {}
        self._posdim = False

    def _tick(self) -> bool:
        self.budget -= 1
        if self.budget < 0:
            self.caveats.add(UNRESOLVED_COFACTOR)
            return False
        return True

    def run(self, rows, ineqs, subs, pending=()) -> List[Dict[int, Fraction]]:
        if not self._tick():
            return []
        pending = list(pending)
        while True:
            keep = []
            for r in rows:
                if r[0]:
                    keep.append(r)
                elif r[1]:
                    pending.append(r[1])
            rows = keep
            pending = _dedupe(pending)
            if any(c.is_constant() for c in pending):
                return []
            easy = self._easy(pending)
            if easy is not None:
                out = []
                for j, val in easy:
                    out += self.run(_subst_rows(rows, j, val),
                                    [q.substitute(j, val) for q in ineqs],
                                    subs + [(j, val)],
                                    [q.substitute(j, val) for q in pending])
                return out
            if any(q.is_constant() and not q for q in ineqs):
                return []
            points = self._eager(pending) if rows else None
            if points is not None:
                out = []
                for pt in points:
                    r2, i2, s2, p2 = rows, ineqs, subs, pending
                    for j, v in pt.items():
                        val = MultiPoly.const(self.nk, v)
                        r2 = _subst_rows(r2, j, val)
                        i2 = [q.substitute(j, val) for q in i2]
                        p2 = [q.substitute(j, val) for q in p2]
                        s2 = s2 + [(j, val)]
                    out += self.run(r2, i2, s2, p2)
                return out
            if not rows:
                out = []
                for part in self._system(pending):
                    out += self._finish(ineqs, subs, part)
                return out
            piv = None
            for ri, (co, _) in enumerate(rows):
                for col, e in co.items():
                    if e.is_constant():
                        if piv is None or len(co) < len(rows[piv[0]][0]):
                            piv = (ri, col)
                        break
            if piv is not None:
                ri, col = piv
                prow = rows[ri]
                a = prow[0][col].constant_coeff()
                new = []
                for i, r in enumerate(rows):
                    if i == ri:
                        continue
                    f = r[0].get(col)
                    if f is None:
                        new.append(r)
                    else:
                        new.append(_combine(r, prow, f.scale(-1 / a), col))
                rows = new
                continue
            # every pivot candidate is a nonconstant polynomial in kappa: fork
            best = None
            for ri, (co, _) in enumerate(rows):
                for col, e in co.items():
                    key = (len(e.variables()), e.degree(), len(e.terms), len(co))
                    if best is None or key < best[0]:
                        best = (key, ri, col, e)
            _, ri, col, e = best
            em = e.monic()
            zeroed = [({c: v for c, v in co.items() if v.monic() != em}, rhs) for co, rhs in rows]
            out = self.run(zeroed, ineqs, subs, pending + [e])
            prow = rows[ri]
            new = []
            for i, r in enumerate(rows):
                if i == ri:
                    continue
                f = r[0].get(col)
                if f is None:
                    new.append(r)
                else:
                    new.append(_combine_ff(r, prow, e, f, col))
            out += self.run(new, ineqs + [e], subs, pending)
            return out

    def _easy(self, polys):
        """Substitutions solving one linear or univariate constraint, else None."""
        for c in polys:
            for j in sorted(c.variables()):
                if c.degree_in(j) == 1:
                    parts = c.coeffs_in(j)
                    if parts[1].is_constant():
                        rest = parts.get(0, MultiPoly.zero(self.nk))
                        return [(j, rest.scale(-1 / parts[1].constant_coeff()))]
        for c in polys:
            used = c.variables()
            if len(used) == 1:
                j = next(iter(used))
                for q in polys:
                    if q.variables() == used:
                        c = poly_gcd(c, q)
                return [(j, MultiPoly.const(self.nk, r)) for r in self._roots(c, j)]
        return None

    def _eager(self, pending):
        """Points of a zero-dimensional subsystem of the constraints, if any."""
        tried = set()
        for p in sorted(pending, key=lambda q: len(q.variables())):
            V = frozenset(p.variables())
            if V in tried:
                continue
            tried.add(V)
            sub = [q for q in pending if q.variables() <= V]
            if len(sub) < len(V):
                continue
            self._posdim = False
            pts = self._system(sub)
            if not self._posdim:
                return pts
        return None

    def _roots(self, c: MultiPoly, j: int) -> List[Fraction]:
        uni = MultiPoly(1, {(e[j],): v for e, v in c.terms.items()})
        roots = rational_roots(uni)
        if squarefree_part(uni).degree() > len(roots):
            self.caveats.add(ALGEBRAIC_COFACTOR)
        return roots

    def _system(self, polys) -> List[Dict[int, Fraction]]:
        """Rational points of a polynomial system, by resultant projection."""
        if not self._tick():
            return []
        polys = _dedupe([p for p in polys if p])
        if any(p.is_constant() for p in polys):
            return []
        if not polys:
            return [{}]
        easy = self._easy(polys)
        if easy is not None:
            out = []
            for j, val in easy:
                for s in self._system([p.substitute(j, val) for p in polys]):
                    if val.variables() - set(s):
                        self._posdim = True
                        continue
                    s = dict(s)
                    s[j] = val.evaluate([s.get(i, 0) for i in range(self.nk)])
                    out.append(s)
            return out
        used = set()
        for p in polys:
            used |= p.variables()
        j = max(used)
        with_j = sorted((p for p in polys if j in p.variables()), key=lambda p: (p.degree_in(j), p.degree()))
        without = [p for p in polys if j not in p.variables()]
        proj = list(without)
        if len(with_j) >= 2:
            p0 = with_j[0]
            for q in with_j[1:]:
                r = self._resultant(p0, q, j)
                if not r:
                    g = poly_gcd(p0, q)
                    others = [p for p in polys if p is not p0 and p is not q]
                    return (self._system(others + [g])
                            + self._system(others + [p0.exquo(g), q.exquo(g)]))
                proj.append(r)
        out = []
        for s in self._system(proj):
            subbed = []
            for p in with_j:
                for i, v in s.items():
                    p = p.substitute(i, v)
                subbed.append(p)
            rest_vars = set()
            for p in subbed:
                rest_vars |= p.variables()
            if len(rest_vars) >= len(used):
                # positive-dimensional fibre: see _finish
                self._posdim = True
                continue
            for t in self._system(subbed):
                merged = dict(s)
                merged.update(t)
                out.append(merged)
        return out

    def _resultant(self, p, q, j):
        key = (p, q, j)
        r = self._res_cache.get(key)
        if r is None:
            r = resultant(p, q, j)
            if r:
                r = r.primitive()
            self._res_cache[key] = r
        return r

    def _finish(self, ineqs, subs, part) -> List[Dict[int, Fraction]]:
        vals: Dict[int, MultiPoly] = {i: MultiPoly.const(self.nk, v) for i, v in part.items()}
        for j, v in reversed(subs):
            for i, w in vals.items():
                v = v.substitute(i, w)
            vals[j] = v
        # Darboux polynomials with distinct cofactors are linearly independent,
        # so only finitely many cofactors occur in bounded degree. A branch whose
        # solution set is positive-dimensional must therefore lie inside the
        # zero set of its nonvanishing assumptions, and carries nothing.
        if len(vals) < self.nk or not all(v.is_constant() for v in vals.values()):
            return []
        point = [vals[j].constant_coeff() for j in range(self.nk)]
        for q in ineqs:
            if not q.evaluate(point):
                return []
        return [dict(enumerate(point))]


def _strip(c: MultiPoly, ineqs) -> MultiPoly:
    # drop factors of c that are known not to vanish
    for q in ineqs:
        if q.is_constant():
            continue
        while not c.is_constant():
            g = poly_gcd(c, q)
            if g.is_constant():
                break
            c = c.exquo(g)
    return c


def _dedupe(polys):
    out = []
    seen = set()
    for p in polys:
        if not p:
            continue
        q = p.monic()
        if q not in seen:
            seen.add(q)
            out.append(q)
    return out


def _combine(r, prow, f, col):
    # r + f * prow, dropping col
    co = dict(r[0])
    del co[col]
    for c, e in prow[0].items():
        if c == col:
            continue
        v = co.get(c)
        v = f * e if v is None else v + f * e
        if v:
            co[c] = v
        else:
            co.pop(c, None)
    return (co, r[1] + f * prow[1])


def _combine_ff(r, prow, e, f, col):
    # e * r - f * prow, dropping col
    co = {}
    for c, v in r[0].items():
        if c != col:
            co[c] = e * v
    for c, w in prow[0].items():
        if c == col:
            continue
        v = co.get(c, MultiPoly.zero(e.nvars)) - f * w
        if v:
            co[c] = v
        else:
            co.pop(c, None)
    return (co, e * r[1] - f * prow[1])


def _subst_rows(rows, j, val):
    out = []
    for co, rhs in rows:
        nco = {}
        for c, e in co.items():
            e2 = e.substitute(j, val)
            if e2:
                nco[c] = e2
        out.append((nco, rhs.substitute(j, val)))
    return out


# ---------------------------------------------------------------------------

def _cofactor_monomials(XC: ClearedField) -> list:
    D = XC.degree()
    if D < 1:
        return []
    return monomials_upto(XC.k, D - 1)


def _branch_rows(lie_images, pmons, kmons, lead: int, nk: int):
    """Rows of L(P) - K P = 0 with p_lead = 1 and p_m = 0 above lead."""
    k = len(pmons[0])
    rows: Dict[tuple, list] = {}
    one = MultiPoly.const(nk, 1)

    def add(r, col, poly):
        co, rhs = rows.setdefault(r, [{}, MultiPoly.zero(nk)])
        if col == lead:
            rows[r][1] = rhs + poly
        else:
            v = co.get(col)
            v = poly if v is None else v + poly
            if v:
                co[col] = v
            else:
                co.pop(col, None)

    for col in range(lead, len(pmons)):
        m = pmons[col]
        for r, c in lie_images[col].terms.items():
            add(r, col, one.scale(c))
        for s_idx, s in enumerate(kmons):
            r = tuple(a + b for a, b in zip(m, s))
            add(r, col, MultiPoly.var(nk, s_idx).scale(-1))
    return [(co, rhs) for co, rhs in rows.values()]


def _darboux_space(XC: ClearedField, K: MultiPoly, pmons, lie_images) -> List[MultiPoly]:
    """Canonical basis of {P : deg P <= d, L(P) = K P}."""
    k = XC.k
    index: Dict[tuple, int] = {}
    cols = []
    for col, m in enumerate(pmons):
        img = lie_images[col] - K.mul_monomial(m)
        cols.append(img)
        for r in img.terms:
            index.setdefault(r, len(index))
    mat = [[Fraction(0)] * len(pmons) for _ in range(len(index))]
    for col, img in enumerate(cols):
        for r, c in img.terms.items():
            mat[index[r]][col] = c
    basis = nullspace(mat, len(pmons)) if mat else [
        [Fraction(int(i == j)) for j in range(len(pmons))] for i in range(len(pmons))]
    if not basis:
        return []
    red, _ = rref(basis, len(pmons))
    out = []
    for v in red:
        P = MultiPoly(k, {pmons[i]: c for i, c in enumerate(v) if c})
        if not P.is_constant():
            out.append(P)
    return out


def _factors_over(P: MultiPoly, found: List[MultiPoly]) -> bool:
    """True if P is a constant times a product of polynomials in found."""
    if P.is_constant():
        return True
    for Q in found:
        if Q.degree() <= P.degree():
            q, r = P.divmod(Q)
            if not r and _factors_over(q, found):
                return True
    return False


def find_darboux_polynomials(XC: ClearedField, dmax: int, report: Optional[DarbouxSearch] = None) -> List[DarbouxElement]:
    if dmax < 1:
        raise ValueError("degree bound must be at least 1")
    k = XC.k
    kmons = _cofactor_monomials(XC)
    nk = len(kmons)
    pmons = monomials_upto(k, dmax)
    lie_images = [XC.lie(MultiPoly.monomial(m)) for m in pmons]
    solver = _Solver(nk)
    cofactors = set()
    for lead in range(len(pmons)):
        if sum(pmons[lead]) == 0:
            continue
        rows = _branch_rows(lie_images, pmons, kmons, lead, nk)
        for sol in solver.run(rows, [], []):
            cofactors.add(tuple(sol[j] for j in range(nk)))
    candidates = []
    for kv in cofactors:
        K = MultiPoly(k, {m: c for m, c in zip(kmons, kv)})
        for P in _darboux_space(XC, K, pmons, lie_images):
            candidates.append(DarbouxElement(P, K))
    candidates.sort(key=lambda el: (el.P.degree(), len(el.P.terms), _order_key(el.P)))
    kept: List[DarbouxElement] = []
    for el in candidates:
        assert XC.lie(el.P) == el.K * el.P
        if any(el.P == q.P for q in kept):
            continue
        if _factors_over(el.P, [q.P for q in kept]):
            continue
        kept.append(el)
    if report is not None:
        report.elements = kept
        report.caveats = sorted(solver.caveats)
    return kept


def _order_key(P: MultiPoly):
    return tuple((-sum(e), tuple(-x for x in e), c) for e, c in P.sorted_terms())


def search_darboux(XC: ClearedField, dmax: int) -> DarbouxSearch:
    rep = DarbouxSearch([])
    find_darboux_polynomials(XC, dmax, rep)
    return rep


# ---------------------------------------------------------------------------

def _coefficient_matrix(polys: Sequence[MultiPoly]):
    index: Dict[tuple, int] = {}
    for p in polys:
        for e in p.terms:
            index.setdefault(e, len(index))
    mat = [[Fraction(0)] * len(polys) for _ in range(len(index))]
    for j, p in enumerate(polys):
        for e, c in p.terms.items():
            mat[index[e]][j] = c
    return mat


def find_cofactor_relations(elements: Sequence[DarbouxElement], h: MultiPoly, mode: str,
                            bound: int = 6) -> List[CofactorRelation]:
    if not elements:
        raise ValueError("no Darboux elements")
    m = len(elements)
    if mode == ZERO:
        mat = _coefficient_matrix([el.K for el in elements])
        basis = nullspace(mat, m) if mat else [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
        if not basis:
            return []
        red, _ = rref(basis, m)
        out = []
        for v in red:
            n = integer_vector(v)
            if max(abs(x) for x in n) <= bound:
                out.append(CofactorRelation(tuple(n), Fraction(0), ZERO))
        return out
    if mode == CONSTANT_TIMES_H:
        # lambda column first so at most one basis vector has lambda != 0
        polys = [-h] + [el.K for el in elements]
        mat = _coefficient_matrix(polys)
        basis = nullspace(mat, m + 1)
        if not basis:
            return []
        red, pivots = rref(basis, m + 1)
        out = []
        for v, pc in zip(red, pivots):
            if pc != 0:
                continue
            n = integer_vector(v[1:])
            scale = Fraction(n[next(i for i, x in enumerate(n) if x)]) / v[1 + next(i for i, x in enumerate(n) if x)]
            lam = v[0] * scale
            if max(abs(x) for x in n) <= bound:
                out.append(CofactorRelation(tuple(n), lam, CONSTANT_TIMES_H))
        return out
    raise ValueError("unknown mode %r" % mode)


def assemble_integrals(elements: Sequence[DarbouxElement], relations: Sequence[CofactorRelation]) -> List[IntegralCandidate]:
    out = []
    for rel in relations:
        if not elements:
            break
        k = elements[0].P.nvars
        num = MultiPoly.const(k, 1)
        den = MultiPoly.const(k, 1)
        for el, e in zip(elements, rel.n):
            if e > 0:
                num = num * el.P ** e
            elif e < 0:
                den = den * el.P ** (-e)
        g = RationalFunction(num.primitive(), den.primitive())
        kind = FIRST_INTEGRAL if rel.lam == 0 else EXPONENTIAL
        try:
            out.append(IntegralCandidate(g, kind, rel.lam))
        except ValueError:
            continue
    return out


# ---------------------------------------------------------------------------

def _denominator_products(elements: Sequence[DarbouxElement], dmax: int, bound: int) -> List[MultiPoly]:
    """Products of element powers with degree <= dmax, Q = 1 included."""
    if not elements:
        return []
    k = elements[0].P.nvars
    out = [(MultiPoly.const(k, 1), 0)]

    def rec(i, Q, deg):
        if i == len(elements):
            return
        P = elements[i].P
        rec(i + 1, Q, deg)
        e = 1
        while e <= bound and deg + e * P.degree() <= dmax:
            Qe = Q * P ** e
            out.append((Qe, deg + e * P.degree()))
            rec(i + 1, Qe, deg + e * P.degree())
            e += 1

    rec(0, MultiPoly.const(k, 1), 0)
    return [q for q, _ in out]


def solve_primitive(XC: ClearedField, elements: Sequence[DarbouxElement], dmax: int,
                    bound: int = 6) -> List[IntegralCandidate]:
    """All g = P/Q with L_X(g) = 1, Q a product of Darboux elements."""
    if dmax < 1:
        raise ValueError("degree bound must be at least 1")
    k = XC.k
    Qs = _denominator_products(elements, dmax, bound) or [MultiPoly.const(k, 1)]
    found = []
    seen = set()
    for Q in Qs:
        LQ = XC.lie(Q)
        rhs = XC.h * Q * Q
        pmons = [m for m in monomials_upto(k, dmax + Q.degree()) if sum(m) > 0]
        cols = [XC.lie(MultiPoly.monomial(m)) * Q - MultiPoly.monomial(m) * LQ for m in pmons]
        index: Dict[tuple, int] = {}
        for p in cols + [rhs]:
            for e in p.terms:
                index.setdefault(e, len(index))
        mat = [[Fraction(0)] * (len(pmons) + 1) for _ in range(len(index))]
        for j, p in enumerate(cols):
            for e, c in p.terms.items():
                mat[index[e]][j] = c
        for e, c in rhs.terms.items():
            mat[index[e]][len(pmons)] = c
        red, pivots = rref(mat, len(pmons) + 1)
        if len(pmons) in pivots:
            continue
        # particular solution with free unknowns set to zero
        sol = [Fraction(0)] * len(pmons)
        for row, pc in zip(red, pivots):
            sol[pc] = row[len(pmons)]
        P = MultiPoly(k, {m: c for m, c in zip(pmons, sol) if c})
        g = RationalFunction(P, Q)
        g = _drop_constant(g)
        if g in seen:
            continue
        cand = IntegralCandidate(g, PRIMITIVE)
        seen.add(g)
        found.append(cand)
    return found


def _drop_constant(g: RationalFunction) -> RationalFunction:
    """Normalize away an additive rational constant."""
    q, r = g.num.divmod(g.den)
    c = q.constant_coeff()
    if c:
        return g - c
    return g
