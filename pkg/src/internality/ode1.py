"""One-variable tools: rational solutions of y' + p y = q, residues, log-derivatives."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, List, Optional, Tuple

from .algebra import (MultiPoly, RationalFunction, poly_gcd, rational_roots, resultant,
                      solve, squarefree_factorization, squarefree_part)
from .algebra.linalg import nullspace, rref

X = MultiPoly.var(1, 0)
ONE = MultiPoly.const(1, 1)


def _rf(p) -> RationalFunction:
    if isinstance(p, RationalFunction):
        return p
    if isinstance(p, MultiPoly):
        return RationalFunction(p, reduced=True).normalized()
    return RationalFunction.const(1, p)


def _deg(r: RationalFunction) -> int:
    """Degree at infinity: deg num - deg den (None-like -10**9 for zero)."""
    if not r:
        return -10 ** 9
    return r.num.degree() - r.den.degree()


@dataclass(frozen=True)
class LinearODE:
    """y' + p y = q in one variable."""
    p: RationalFunction
    q: RationalFunction

    @classmethod
    def of(cls, p, q=0) -> "LinearODE":
        return cls(_rf(p), _rf(q))

    def residual(self, y: RationalFunction) -> RationalFunction:
        return y.diff(0) + self.p * y - self.q


@dataclass
class ODESolution:
    particular: Optional[RationalFunction]
    homogeneous: Optional[RationalFunction]


# ---------------------------------------------------------------------------
# rational solutions

def _coprime_pieces(polys: List[MultiPoly]) -> List[MultiPoly]:
    """Pairwise coprime squarefree pieces whose product has the same roots."""
    pieces: List[MultiPoly] = []
    for p in polys:
        if p.is_constant():
            continue
        new = [squarefree_part(p)]
        out = []
        for s in pieces:
            rest = []
            for t in new:
                g = poly_gcd(s, t)
                if g.is_constant():
                    rest.append(t)
                    continue
                if not (s.exquo(g)).is_constant():
                    out.append(s.exquo(g).monic())
                s = g
                u = t.exquo(g)
                if not u.is_constant():
                    rest.append(u.monic())
            out.append(s)
            new = rest
        pieces = out + new
    return [p.monic() for p in pieces if not p.is_constant()]


def _multiplicity(s: MultiPoly, d: MultiPoly) -> int:
    m = 0
    while not d.is_constant() and s.divides(d):
        d = d.exquo(s)
        m += 1
    return m


def _local_residues(s: MultiPoly, a: MultiPoly, b: MultiPoly) -> List[Fraction]:
    """Rational residues of a/b at the roots of s (b has simple zeros there)."""
    two = lambda p: p.extend(2, [0])
    t = MultiPoly.var(2, 1)
    R = resultant(two(s), two(a) - t * two(b.diff(0)), 0)
    uni = MultiPoly(1, {(e[1],): c for e, c in R.terms.items()})
    if not uni or uni.is_constant():
        return []
    return rational_roots(uni)


def solution_bounds(e: LinearODE) -> Tuple[MultiPoly, int]:
    """Denominator candidate and numerator degree bound covering all rational solutions."""
    p, q = e.p, e.q
    # split by multiplicity first so each piece has a single order in p.den and q.den
    pieces = _coprime_pieces([f for d in (p.den, q.den) if not d.is_constant()
                              for f, _ in squarefree_factorization(d)])
    D = ONE
    for s in pieces:
        pi = _multiplicity(s, p.den)
        kappa = _multiplicity(s, q.den) if q else 0
        nu = max(kappa - 1, 0)
        if pi == 1:
            for r in _local_residues(s, p.num, p.den):
                if r.denominator == 1 and r > 0:
                    nu = max(nu, int(r))
        elif pi >= 2:
            nu = max(nu, kappa - pi)
        D = D * s ** nu
    dq = _deg(q) if q else None
    dp = _deg(p) if p else None
    cands = []
    if dp is None:
        # y' = q
        cands.append(0)
        if dq is not None:
            cands.append(dq + 1)
    elif dp >= 0:
        if dq is not None:
            cands.append(dq - dp)
    elif dp == -1:
        lead = p.num.leading_coeff() / p.den.leading_coeff()
        if (-lead).denominator == 1:
            cands.append(int(-lead))
        if dq is not None:
            cands.append(dq + 1)
    else:
        cands.append(0)
        if dq is not None:
            cands.append(dq + 1)
    delta = max(cands) if cands else -1
    return D, delta + D.degree()


def _solve_with(e: LinearODE, D: MultiPoly, nmax: int) -> ODESolution:
    if nmax < 0:
        return ODESolution(RationalFunction.const(1, 0) if not e.q else None, None)
    p, q = e.p, e.q
    # (N'D - N D') pd qd + pn qd N D - qn pd D^2 = 0
    pd, pn, qd, qn = p.den, p.num, q.den, q.num
    Dd = D.diff(0)
    cols = []
    for j in range(nmax + 1):
        N = MultiPoly.monomial((j,))
        cols.append((N.diff(0) * D - N * Dd) * pd * qd + pn * qd * N * D)
    rhs = qn * pd * D * D
    index: Dict[tuple, int] = {}
    for c in cols + [rhs]:
        for m in c.terms:
            index.setdefault(m, len(index))
    mat = [[Fraction(0)] * (nmax + 1) for _ in range(len(index))]
    for j, c in enumerate(cols):
        for m, v in c.terms.items():
            mat[index[m]][j] = v
    b = [Fraction(0)] * len(index)
    for m, v in rhs.terms.items():
        b[index[m]] = v
    part = None
    x = solve(mat, b) if mat else [Fraction(0)] * (nmax + 1)
    if x is not None:
        part = RationalFunction(MultiPoly(1, {(j,): c for j, c in enumerate(x)}), D)
    hom = None
    kern = nullspace(mat, nmax + 1) if mat else [[Fraction(int(i == j)) for j in range(nmax + 1)] for i in range(nmax + 1)]
    if kern:
        red, _ = rref(kern, nmax + 1)
        v = red[0]
        hom = RationalFunction(MultiPoly(1, {(j,): c for j, c in enumerate(v)}), D)
        hom = RationalFunction(hom.num.monic(), hom.den)
    return ODESolution(part, hom)


def rational_solve_linear_ode(e: LinearODE) -> ODESolution:
    D, nmax = solution_bounds(e)
    sol = _solve_with(e, D, nmax)
    for y in (sol.particular,):
        if y is not None:
            assert not e.residual(y), "particular solution failed verification"
    if sol.homogeneous is not None:
        assert not LinearODE(e.p, RationalFunction.const(1, 0)).residual(sol.homogeneous)
    return sol


# ---------------------------------------------------------------------------
# residues

@dataclass
class ResidueReport:
    r: RationalFunction
    rothstein: MultiPoly
    rational_residues: List[Fraction]
    has_irrational_residues: bool
    all_integers: bool


def rothstein_resultant(r: RationalFunction) -> MultiPoly:
    """res_x(den, num - t den') as a polynomial in t (primitive, positive lead)."""
    a, b = r.num, r.den
    if b.is_constant():
        return ONE
    two = lambda p: p.extend(2, [0])
    t = MultiPoly.var(2, 1)
    R = resultant(two(b), two(a) - t * two(b.diff(0)), 0)
    return MultiPoly(1, {(e[1],): c for e, c in R.terms.items()}).primitive()


def is_proper(r: RationalFunction) -> bool:
    return not r or r.num.degree() < r.den.degree()


def residue_analysis(r: RationalFunction) -> ResidueReport:
    r = _rf(r)
    if not r:
        raise ValueError("residue analysis of zero")
    R = rothstein_resultant(r)
    if R.is_constant():
        return ResidueReport(r, R, [], False, False)
    roots = rational_roots(R)
    irr = squarefree_part(R).degree() > len(roots)
    simple = squarefree_part(r.den) == r.den.monic()
    ints = (not irr and is_proper(r) and simple and all(c.denominator == 1 for c in roots))
    return ResidueReport(r, R, roots, irr, ints)


def logderiv_preimage(r: RationalFunction) -> Optional[RationalFunction]:
    """h with h'/h = r, or None."""
    r = _rf(r)
    if not r:
        return RationalFunction.const(1, 1)
    rep = residue_analysis(r)
    if not rep.all_integers:
        return None
    num = ONE
    den = ONE
    b = r.den
    for c in rep.rational_residues:
        v = poly_gcd(b, r.num - b.diff(0).scale(c))
        if c > 0:
            num = num * v ** int(c)
        else:
            den = den * v ** int(-c)
    h = RationalFunction(num, den)
    if h.diff(0) != r * h:
        return None
    return h


def rational_antiderivative(r: RationalFunction) -> Optional[RationalFunction]:
    """g with g' = r (zero constant term in the polynomial part), or None."""
    r = _rf(r)
    if not r:
        return RationalFunction.const(1, 0)
    quo, rem = r.num.divmod(r.den)
    b = r.den
    poly = MultiPoly(1, {(e[0] + 1,): c / (e[0] + 1) for e, c in quo.terms.items()})
    g = RationalFunction(poly, reduced=True).normalized()
    if not rem:
        return g
    # Horowitz-Ostrogradsky: rem/b = (N/D1)' + M/D2
    D1 = poly_gcd(b, b.diff(0))
    D2 = b.exquo(D1)
    if D1.is_constant():
        return None
    H = (D2 * D1.diff(0)).exquo(D1)
    n1, n2 = D1.degree(), D2.degree()
    cols = []
    for j in range(n1):
        N = MultiPoly.monomial((j,))
        cols.append(N.diff(0) * D2 - N * H)
    for j in range(n2):
        cols.append(MultiPoly.monomial((j,)) * D1)
    size = max(b.degree(), 1)
    mat = [[Fraction(0)] * len(cols) for _ in range(size)]
    for j, c in enumerate(cols):
        for e, v in c.terms.items():
            mat[e[0]][j] = v
    rhs = [rem.coeff((i,)) for i in range(size)]
    x = solve(mat, rhs)
    if x is None or any(x[n1:]):
        return None
    N = MultiPoly(1, {(j,): x[j] for j in range(n1)})
    g = g + RationalFunction(N, D1)
    assert g.diff(0) == r
    return g


# ---------------------------------------------------------------------------
# commensurability of residues

EXISTS = "exists"
ABSENT = "absent"
INCONCLUSIVE = "inconclusive"


@dataclass
class Commensurability:
    status: str
    case: Optional[str] = None
    c: Optional[Fraction] = None
    witness: Optional[RationalFunction] = None
    detail: Dict[str, object] = field(default_factory=dict)


def commensurable_scaling(r: RationalFunction) -> Commensurability:
    """Is some nonzero constant multiple of r a rational log-derivative?"""
    r = _rf(r)
    if not r:
        raise ValueError("commensurability of zero")
    if not is_proper(r) or squarefree_part(r.den) != r.den.monic():
        return Commensurability(ABSENT, detail={"reason": "not proper with simple poles"})
    rep = residue_analysis(r)
    R = squarefree_part(rep.rothstein)
    if not rep.has_irrational_residues:
        roots = rep.rational_residues
        den = 1
        num = 0
        for c in roots:
            den = lcm(den, c.denominator)
            num = gcd(num, c.numerator)
        c = Fraction(den, num)
        h = logderiv_preimage(r * c)
        assert h is not None
        return Commensurability(EXISTS, "rational", c, h, {"residues": roots})
    if R.degree() == 2:
        c2, c1, c0 = (R.coeff((2,)), R.coeff((1,)), R.coeff((0,)))
        bb, cc = c1 / c2, c0 / c2
        # roots rho, q*rho: (1+q) rho = -bb, q rho^2 = cc  =>  q bb^2 = cc (1+q)^2
        eq = MultiPoly.univariate([cc, 2 * cc - bb * bb, cc])
        qs = rational_roots(eq) if eq else []
        detail = {"residue_polynomial": R, "ratios": qs}
        if qs:
            q = qs[0]
            return Commensurability(EXISTS, "quadratic", None, None,
                                    dict(detail, exponents=(q.denominator, q.numerator)))
        return Commensurability(ABSENT, "quadratic", detail=detail)
    return Commensurability(INCONCLUSIVE, "degree>=3",
                            detail={"residue_polynomial": R,
                                    "reason": "residue polynomial of degree %d with irrational roots" % R.degree()})


# ---------------------------------------------------------------------------
# indicial constraints for families with integer parameters

class Affine:
    """c0 + sum c_p * p over named integer parameters."""

    __slots__ = ("coeffs", "const")

    def __init__(self, const=0, **coeffs):
        self.const = Fraction(const)
        self.coeffs = {k: Fraction(v) for k, v in coeffs.items() if v}

    @classmethod
    def of(cls, v) -> "Affine":
        return v if isinstance(v, Affine) else cls(v)

    def __add__(self, o):
        o = Affine.of(o)
        out = Affine(self.const + o.const)
        for k in set(self.coeffs) | set(o.coeffs):
            v = self.coeffs.get(k, 0) + o.coeffs.get(k, 0)
            if v:
                out.coeffs[k] = v
        return out

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, o):
        return self + (-Affine.of(o))

    def __rsub__(self, o):
        return Affine.of(o) - self

    def __mul__(self, c):
        c = Fraction(c)
        out = Affine(self.const * c)
        out.coeffs = {k: v * c for k, v in self.coeffs.items() if v * c}
        return out

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / Fraction(c))

    def is_constant(self) -> bool:
        return not self.coeffs

    def value(self, env: Dict[str, int]) -> Fraction:
        return self.const + sum(v * env[k] for k, v in self.coeffs.items())

    def __eq__(self, o):
        o = Affine.of(o)
        return self.const == o.const and self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.const, tuple(sorted(self.coeffs.items()))))

    def __str__(self):
        parts = []
        for k in sorted(self.coeffs):
            v = self.coeffs[k]
            parts.append((v, k))
        s = ""
        for v, k in parts:
            mag = abs(v)
            body = k if mag == 1 else ("%s*%s" % (mag, k) if mag.denominator == 1 else "(%s)*%s" % (mag, k))
            s += (" - " if v < 0 else " + ") + body if s else ("-" if v < 0 else "") + body
        if self.const or not s:
            c = self.const
            s += (" - %s" % -c if c < 0 else " + %s" % c) if s else str(c)
        return s

    __repr__ = __str__


EQ = "eq"          # form == 0
INT = "int"        # form in Z
LE = "le"          # form <= 0
NE = "ne"          # form != 0

LOWEST_BELOW_TOP = "lowest exponent below the top exponent e - 1"


@dataclass(frozen=True)
class Constraint:
    kind: str
    form: Affine
    reason: str

    def holds(self, env: Dict[str, int]) -> bool:
        v = self.form.value(env)
        if self.kind == EQ:
            return v == 0
        if self.kind == INT:
            return v.denominator == 1
        if self.kind == LE:
            return v <= 0
        return v != 0

    def __str__(self):
        f = self.form
        if self.kind == EQ:
            return "%s = 0" % f
        if self.kind == INT:
            return "%s ∈ ℤ" % f
        if self.kind == LE:
            return "%s ≤ 0" % f
        return "%s ≠ 0" % f


class Unsupported(ValueError):
    pass


@dataclass
class IndicialFamily:
    """x*a' + (alpha + beta*x)*a = w * x^e, coefficients affine in parameters.

    With w = None the family is homogeneous. This is the shape of every
    leading-order and first-order equation produced by planar expansions
    whose only finite singular point is x = 0.
    """
    alpha: Affine
    beta: Affine
    w: Optional[Affine] = None
    e: Optional[Affine] = None
    label: str = ""

    def instance(self, env: Dict[str, int]) -> LinearODE:
        x = RationalFunction(X, reduced=True)
        p = (RationalFunction.const(1, self.alpha.value(env)) + x * self.beta.value(env)) / x
        if self.w is None:
            return LinearODE(p, RationalFunction.const(1, 0))
        ex = self.e.value(env)
        if ex.denominator != 1:
            raise ValueError("non-integer exponent")
        q = RationalFunction.const(1, self.w.value(env)) * x ** int(ex) / x
        return LinearODE(p, q)


@dataclass
class MonomialFamily:
    """c*x^m*a' + B(x)*a = 0 with B = sum coeffs[k]*x^k affine in the parameters.

    m = None means the derivative term is absent, so B must vanish identically.
    """
    m: Optional[int]
    c: Fraction
    coeffs: Dict[int, Affine]
    label: str = ""

    def log_derivative_terms(self) -> Dict[int, Affine]:
        """Laurent coefficients of -B/(c x^m), i.e. of a'/a."""
        return {k - self.m: v * (-1 / Fraction(self.c)) for k, v in self.coeffs.items()}

    def exponent(self) -> Affine:
        """Exponent of the monomial solution x^rho when one exists."""
        return Affine.of(self.log_derivative_terms().get(-1, Affine(0)))


def _monomial_constraints(fam: MonomialFamily) -> List[Constraint]:
    out: List[Constraint] = []
    if fam.m is None:
        for k in sorted(fam.coeffs):
            out.append(Constraint(EQ, fam.coeffs[k], "coefficient of x^%d must vanish" % k))
        return out
    for j, v in sorted(fam.log_derivative_terms().items()):
        if j == -1:
            out.append(Constraint(INT, v, "integer residue at 0"))
        elif j < -1:
            out.append(Constraint(EQ, v, "no pole of order %d at 0" % -j))
        else:
            out.append(Constraint(EQ, v, "no polynomial part at infinity"))
    return out


def parametric_indicial_constraints(fam) -> List[Constraint]:
    """Necessary conditions on the parameters for a nonzero rational solution."""
    if isinstance(fam, MonomialFamily):
        return _monomial_constraints(fam)
    if not isinstance(fam, IndicialFamily):
        raise Unsupported("family shape not recognized")
    alpha, beta = fam.alpha, fam.beta
    out: List[Constraint] = []
    if fam.w is None or (fam.w.is_constant() and fam.w.const == 0):
        # a'/a = -alpha/x - beta: proper, integer residue
        out.append(Constraint(EQ, beta, "no polynomial part at infinity"))
        out.append(Constraint(INT, -alpha, "integer residue at 0"))
        return out
    if not beta.is_constant():
        raise Unsupported("coefficient of x*a must be parameter free")
    e = fam.e
    out.append(Constraint(INT, e, "integer exponent of the inhomogeneity"))
    if beta.const == 0:
        out.append(Constraint(NE, e + alpha, "no logarithmic term"))
        return out
    # Laurent polynomial solution from x^l to x^n: n = e - 1 from infinity,
    # l + alpha = 0 from the lowest order term
    out.append(Constraint(INT, -alpha, "lowest exponent is an integer"))
    out.append(Constraint(LE, -alpha - (e - 1), LOWEST_BELOW_TOP))
    return out


def satisfiable(constraints: List[Constraint], params: List[str],
                fixed: Optional[Dict[str, int]] = None, window: int = 24) -> Optional[Dict[str, int]]:
    """Exact search for integer parameter values meeting every constraint.

    Equalities are used to eliminate parameters; remaining ones are scanned
    over one full period of the integrality conditions inside the feasible
    range, which decides the question exactly for affine constraints in one
    free parameter. Returns a witness or None.
    """
    env = dict(fixed or {})
    cons = list(constraints)
    changed = True
    while changed:
        changed = False
        for c in cons:
            if c.kind != EQ:
                continue
            free = [k for k in c.form.coeffs if k not in env]
            if len(free) == 1:
                k = free[0]
                rest = c.form - Affine(**{k: c.form.coeffs[k]})
                val = -rest.value(dict(env, **{k: 0})) / c.form.coeffs[k]
                if val.denominator != 1:
                    return None
                env[k] = int(val)
                changed = True
    free = [k for k in params if k not in env]
    for c in cons:
        if all(k in env for k in c.form.coeffs) and not c.holds(env):
            return None
    if not free:
        return env
    if len(free) > 1:
        # brute force over a box; adequate for the two-parameter families used here
        import itertools
        for vals in itertools.product(range(-window, window + 1), repeat=len(free)):
            trial = dict(env, **dict(zip(free, vals)))
            if all(c.holds(trial) for c in cons):
                return trial
        return None
    k = free[0]
    lo, hi = None, None
    period = 1
    for c in cons:
        a = c.form.coeffs.get(k, Fraction(0))
        b = c.form.value(dict(env, **{k: 0})) if all(q in env or q == k for q in c.form.coeffs) else None
        if b is None:
            continue
        if c.kind == INT and a:
            period = lcm(period, a.denominator)
        if c.kind == LE:
            if a > 0:
                bound = (-b) / a
                hi = int(bound // 1) if hi is None else min(hi, int(bound // 1))
            elif a < 0:
                bound = (-b) / a
                v = -((-bound) // 1)
                lo = int(v) if lo is None else max(lo, int(v))
    if lo is not None and hi is not None and lo > hi:
        return None
    # each inequation removes at most one value, so scan one extra period per inequation
    span = period * (1 + sum(1 for c in cons if c.kind == NE))
    start = lo if lo is not None else (hi - span + 1 if hi is not None else -(span // 2))
    stop = min(start + span - 1, hi) if hi is not None else start + span - 1
    for v in range(start, stop + 1):
        trial = dict(env, **{k: v})
        if all(c.holds(trial) for c in cons):
            return trial
    return None
