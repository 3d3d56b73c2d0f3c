"""Laurent-series analysis of L_X(g) = lam*g, 1 or 0 for planar fields.

A hypothetical solution g is written as sum_{i >= N} a_i(u) v^i where v is the
distinguished variable and u the other one. Collecting powers of v gives one
linear ODE per order for the coefficient a_i. The leading order is analyzed
with the order N (and lam) kept symbolic; the next order adds the constraints
coming from its inhomogeneity. Concrete branches are propagated order by order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .algebra import MultiPoly, RationalFunction
from .ode1 import (EQ, INT, LE, LOWEST_BELOW_TOP, NE, Affine, Constraint, IndicialFamily, LinearODE, MonomialFamily,
                   Unsupported, parametric_indicial_constraints, rational_solve_linear_ode,
                   satisfiable)
from .vectorfield import (EXPONENTIAL, FIRST_INTEGRAL, PRIMITIVE, ClearedField, IntegralCandidate,
                          VectorField, is_constant, verify_candidate)

ZERO = "Zero"
ONE = "One"
EXP = "Exp"

LAM = "λ"
ORDER_NAMES = ("N", "M")
FORK_VALUES = (0, 1, -1, 2, -2, 3)

NONEXISTENCE = "nonexistence"
CANDIDATES = "candidates"
INCONCLUSIVE = "inconclusive"


def _uni(p: MultiPoly, u: int) -> MultiPoly:
    """Coefficient free of v, viewed as a polynomial in one variable."""
    return MultiPoly(1, {(e[u],): c for e, c in p.terms.items()})


def _lift(r: RationalFunction, u: int) -> RationalFunction:
    pos = [u]
    return RationalFunction(r.num.extend(2, pos), r.den.extend(2, pos), reduced=True)


def _split(p: MultiPoly, v: int) -> Dict[int, MultiPoly]:
    u = 1 - v
    return {k: _uni(c, u) for k, c in p.coeffs_in(v).items() if c}


def _affine_poly(parts: List[Tuple[Affine, MultiPoly]]) -> Dict[int, Affine]:
    """sum of (affine scalar) * (polynomial in u), grouped by power of u."""
    out: Dict[int, Affine] = {}
    for a, p in parts:
        for (k,), c in p.terms.items():
            out[k] = out.get(k, Affine(0)) + a * c
    return {k: v for k, v in out.items() if v != Affine(0)}


@dataclass
class RecurrenceSpec:
    """Per-order equations A a_i' + (i*P - lam*H0) a_i = R_i for the coefficients of g.

    deriv, mult and weight hold the coefficients of F_u, F_v and h by power of
    the distinguished variable v; sigma is the shift between the power of v and
    the order of the coefficient that first appears there.
    """
    system: ClearedField
    distinguished: int
    target: str
    lam: Optional[Fraction]
    sigma: int
    deriv: Dict[int, MultiPoly]
    mult: Dict[int, MultiPoly]
    weight: Dict[int, MultiPoly]
    s: int

    @property
    def other(self) -> int:
        return 1 - self.distinguished

    def _get(self, d: Dict[int, MultiPoly], k: int) -> MultiPoly:
        return d.get(k, MultiPoly.zero(1))

    @property
    def lead_derivative(self) -> MultiPoly:
        return self._get(self.deriv, self.sigma)

    @property
    def lead_multiplier(self) -> MultiPoly:
        return self._get(self.mult, self.sigma + 1)

    @property
    def lead_weight(self) -> MultiPoly:
        if self.target != EXP:
            return MultiPoly.zero(1)
        return self._get(self.weight, self.sigma)

    def source_power(self) -> Optional[int]:
        """Lowest power of v in h, which is where the target One first acts."""
        if self.target != ONE:
            return None
        return min(self.weight)

    def leading_equation(self, names=None) -> str:
        names = names or ["x%d" % i for i in range(2)]
        un = [names[self.other]]
        A, P, H = self.lead_derivative, self.lead_multiplier, self.lead_weight
        lhs = []
        if P:
            lhs.append("N*(%s)*a_N" % P.to_str(un))
        if A:
            lhs.append("(%s)*a_N'" % A.to_str(un))
        left = " + ".join(lhs) or "0"
        if self.target == EXP:
            lam = LAM if self.lam is None else str(self.lam)
            right = "%s*(%s)*a_N" % (lam, H.to_str(un)) if H else "0"
        else:
            right = "0"
        return "%s = %s" % (left, right)

    def coefficients(self, i: int, lam) -> Tuple[MultiPoly, MultiPoly]:
        """(A, B_i) of the order-i equation for a concrete lam."""
        lam = Fraction(lam or 0) if self.target == EXP else Fraction(0)
        return self.lead_derivative, self.lead_multiplier * i - self.lead_weight * lam

    def rhs(self, i: int, N: int, coeffs: List[RationalFunction], lam) -> RationalFunction:
        """Right-hand side of the order-i equation from the earlier coefficients a_N .. a_{i-1}."""
        lam = Fraction(lam or 0) if self.target == EXP else Fraction(0)
        out = RationalFunction.const(1, 0)
        for j in range(1, self.s + 1):
            idx = i - j - N
            if idx < 0:
                break
            a = coeffs[idx]
            if not a:
                continue
            term = a * self._get(self.mult, self.sigma + 1 + j) * (i - j) \
                + a.diff(0) * self._get(self.deriv, self.sigma + j)
            if lam:
                term = term - a * self._get(self.weight, self.sigma + j) * lam
            out = out - term
        if self.target == ONE:
            w = self.weight.get(i + self.sigma)
            if w is not None:
                out = out + RationalFunction(w, reduced=True).normalized()
        return out


def derive_recurrence(XC: ClearedField, distinguished: int, target: str,
                      lam: Optional[Fraction] = None) -> RecurrenceSpec:
    if XC.k != 2:
        raise Unsupported("series analysis is implemented for planar fields only")
    if target not in (ZERO, ONE, EXP):
        raise ValueError("unknown target %r" % target)
    v, u = distinguished, 1 - distinguished
    mult = _split(XC.F[v], v)
    deriv = _split(XC.F[u], v)
    weight = _split(XC.h, v)
    shifts = [k - 1 for k in mult] + list(deriv)
    if target == EXP:
        shifts += list(weight)
    if not shifts:
        raise Unsupported("zero vector field")
    sigma = min(shifts)
    spans = [k - sigma - 1 for k in mult] + [k - sigma for k in deriv]
    if target == EXP:
        spans += [k - sigma for k in weight]
    lam = None if lam is None else Fraction(lam)
    if target != EXP:
        lam = None
    return RecurrenceSpec(XC, distinguished, target, lam, sigma, deriv, mult, weight, max(spans))


# ---------------------------------------------------------------------------
# symbolic leading orders

@dataclass
class Branch:
    """One case of the indicial analysis on one side, with its necessary conditions."""
    label: str
    constraints: List[Constraint]
    concrete_order: Optional[int] = None
    refuted: Optional[str] = None


@dataclass
class SideAnalysis:
    spec: RecurrenceSpec
    order_name: str
    branches: List[Branch]
    leading: List[Constraint]
    exponent: Optional[Affine] = None

    @property
    def distinguished(self) -> int:
        return self.spec.distinguished


def _lam_affine(spec: RecurrenceSpec) -> Affine:
    if spec.target != EXP:
        return Affine(0)
    if spec.lam is not None:
        return Affine(spec.lam)
    return Affine(**{LAM: 1})


def _leading_family(spec: RecurrenceSpec, n: Affine) -> MonomialFamily:
    A = spec.lead_derivative
    lam = _lam_affine(spec)
    coeffs = _affine_poly([(n, spec.lead_multiplier), (lam * -1, spec.lead_weight)])
    if not A:
        return MonomialFamily(None, Fraction(1), coeffs, "leading order")
    if len(A.terms) != 1:
        raise Unsupported("leading derivative coefficient %s has a finite singular point away from 0"
                          % A.to_str(["u"]))
    (m,), c = next(iter(A.terms.items()))
    return MonomialFamily(m, c, coeffs, "leading order")


def _first_order_family(spec: RecurrenceSpec, n: Affine, rho: Affine) -> Optional[IndicialFamily]:
    """Family for a_{N+1} when a_N = u^rho, or None when its shape is not covered."""
    A = spec.lead_derivative
    if not A or len(A.terms) != 1 or next(iter(A.terms))[0] != 1:
        return None
    c = next(iter(A.terms.values()))
    lam = _lam_affine(spec)
    s = spec.sigma
    B = _affine_poly([(n + 1, spec.lead_multiplier), (lam * -1, spec.lead_weight)])
    if any(k > 1 for k in B) or not B.get(1, Affine(0)).is_constant():
        return None
    # bracket with a_{N+1} rhs = -u^rho * bracket
    parts = [(n, spec._get(spec.mult, s + 2)), (lam * -1, spec._get(spec.weight, s + 1) if spec.target == EXP
                                                 else MultiPoly.zero(1))]
    bracket = _affine_poly(parts)
    for (k,), coef in spec._get(spec.deriv, s + 1).terms.items():
        bracket[k - 1] = bracket.get(k - 1, Affine(0)) + rho * coef
    bracket = {k: v for k, v in bracket.items() if v != Affine(0)}
    if not bracket:
        return None
    if len(bracket) != 1:
        return None
    (k, gamma), = bracket.items()
    return IndicialFamily(alpha=B.get(0, Affine(0)) / c, beta=B.get(1, Affine(0)) / c,
                          w=gamma * (-1 / Fraction(c)), e=rho + k, label="first order")


def analyze_side(XC: ClearedField, distinguished: int, target: str,
                 lam: Optional[Fraction] = None) -> SideAnalysis:
    spec = derive_recurrence(XC, distinguished, target, lam)
    name = ORDER_NAMES[distinguished]
    n = Affine(**{name: 1})
    fam = _leading_family(spec, n)
    leading = parametric_indicial_constraints(fam)
    rho = fam.exponent() if fam.m is not None else None
    branches: List[Branch] = []
    if target == ONE:
        top = spec.source_power() - spec.sigma
        below = Constraint(LE, n - (top - 1), "source term of h not reached")
        branches.append(Branch("%s < %d" % (name, top), leading + [below]))
        branches.append(Branch("%s = %d" % (name, top), [Constraint(EQ, n - top, "source term at leading order")],
                               concrete_order=top))
        return SideAnalysis(spec, name, branches, leading, rho)
    base = list(leading)
    if target == ZERO and rho is not None:
        # a constant leading term at order 0 can be subtracted from g
        alts = [("%s ≠ 0" % name, [Constraint(NE, n, "nonzero starting order")]),
                ("nonconstant a_%s" % name, [Constraint(NE, rho, "nonconstant leading coefficient")])]
    else:
        alts = [("", [])]
    nxt = None
    if rho is not None:
        # the order is usually pinned by the leading equalities; use that before the next order
        env = _forced(leading)
        nxt = _first_order_family(spec, _subst(n, env), _subst(rho, env))
    for tag, extra in alts:
        if nxt is None:
            branches.append(Branch(tag or "leading order", base + extra))
            continue
        cons1 = parametric_indicial_constraints(nxt)
        branches.append(Branch(("%s, " % tag if tag else "") + "inhomogeneous first order",
                               base + extra + cons1 + [Constraint(NE, nxt.w, "inhomogeneity present")]))
        branches.append(Branch(("%s, " % tag if tag else "") + "homogeneous first order",
                               base + extra + [Constraint(EQ, nxt.w, "inhomogeneity absent")]))
    return SideAnalysis(spec, name, branches, leading, rho)


def indicial_branches(spec: RecurrenceSpec) -> Dict[str, list]:
    """Surviving and refuted leading-order branches for one recurrence."""
    side = analyze_side(spec.system, spec.distinguished, spec.target, spec.lam)
    params = [side.order_name] + ([LAM] if spec.target == EXP and spec.lam is None else [])
    glob = _global_constraints(spec.target) if spec.lam is None else []
    surviving, refuted = [], []
    for b in side.branches:
        if b.concrete_order is not None:
            res = propagate(spec, b.concrete_order, spec.lam, 0)
            if isinstance(res, OrderRefutation):
                refuted.append((b, str(res)))
            else:
                surviving.append((b, {side.order_name: b.concrete_order}))
            continue
        w = satisfiable(b.constraints + glob, params)
        if w is None:
            refuted.append((b, "constraints unsatisfiable"))
        else:
            surviving.append((b, w))
    return {"surviving": surviving, "refuted": refuted}


def _global_constraints(target: str) -> List[Constraint]:
    if target == EXP:
        # g -> 1/g flips the sign of lam, so lam >= 1 loses nothing
        return [Constraint(LE, 1 - Affine(**{LAM: 1}), "normalized exponent, replacing g by 1/g if needed")]
    return []


# ---------------------------------------------------------------------------
# concrete propagation

@dataclass
class LaurentExpansion:
    distinguished: int
    N: int
    coeffs: List[RationalFunction]
    truncation: int
    lam: Optional[Fraction] = None

    def series(self) -> RationalFunction:
        v, u = self.distinguished, 1 - self.distinguished
        out = RationalFunction.const(2, 0)
        x = RationalFunction.var(2, v)
        for j, a in enumerate(self.coeffs):
            if a:
                out = out + _lift(a, u) * x ** (self.N + j)
        return out

    def terminates(self, s: int) -> bool:
        """True when the last s+1 computed coefficients vanish."""
        tail = self.coeffs[-(s + 1):]
        return len(self.coeffs) > s + 1 and all(not a for a in tail)


@dataclass
class OrderRefutation:
    order: int
    reason: str

    def __str__(self):
        return "no rational coefficient at order %d: %s" % (self.order, self.reason)


def _solve_order(spec: RecurrenceSpec, i: int, rhs: RationalFunction, lam) -> Tuple[Optional[RationalFunction], Optional[RationalFunction], str]:
    A, B = spec.coefficients(i, lam)
    if not A:
        if not B:
            if rhs:
                return None, None, "0 = %s" % rhs.to_str(["u"])
            raise Unsupported("coefficient at order %d is an undetermined function" % i)
        return rhs / RationalFunction(B, reduced=True).normalized(), None, ""
    Ar = RationalFunction(A, reduced=True).normalized()
    e = LinearODE(RationalFunction(B, reduced=True).normalized() / Ar, rhs / Ar)
    sol = rational_solve_linear_ode(e)
    if sol.particular is None:
        return None, sol.homogeneous, "the order equation has no rational solution"
    return sol.particular, sol.homogeneous, ""


def _propagate_all(spec: RecurrenceSpec, N: int, lam, T: int, fork_cap: int,
                   caveats: List[str], limit: int = 64) -> List:
    results: List = []
    stack: List[Tuple[int, List[RationalFunction]]] = []
    # leading coefficient: the homogeneous solution (or the forced one when the source term acts)
    rhs = spec.rhs(N, N, [], lam)
    part, hom, why = _solve_order(spec, N, rhs, lam)
    if not rhs:
        if hom is None:
            return [OrderRefutation(N, "the leading equation has no nonzero rational solution")]
        starts = [hom]
    else:
        if part is None:
            return [OrderRefutation(N, why)]
        starts = [part] if hom is None else [part + hom * c for c in FORK_VALUES[:fork_cap]]
    for a in starts:
        stack.append((N + 1, [a]))
    while stack:
        i, coeffs = stack.pop()
        if i > N + T:
            results.append(LaurentExpansion(spec.distinguished, N, coeffs, T, spec.lam if lam is None else Fraction(lam)))
            if len(results) >= limit:
                caveats.append("branch limit %d reached during propagation" % limit)
                break
            continue
        rhs = spec.rhs(i, N, coeffs, lam)
        part, hom, why = _solve_order(spec, i, rhs, lam)
        if part is None:
            results.append(OrderRefutation(i, why))
            continue
        if hom is None:
            stack.append((i + 1, coeffs + [part]))
            continue
        caveats.append("homogeneous freedom at order %d: forked over %d constants" % (i, fork_cap))
        for c in reversed(FORK_VALUES[:fork_cap]):
            stack.append((i + 1, coeffs + [part + hom * c]))
    return results


def propagate(spec: RecurrenceSpec, N: int, lam=None, T: int = 8, fork_cap: int = 4):
    """First truncated expansion along the branch, or the refutation when every fork fails."""
    caveats: List[str] = []
    res = _propagate_all(spec, N, lam, T, fork_cap, caveats)
    for r in res:
        if isinstance(r, LaurentExpansion):
            return r
    return max(res, key=lambda r: r.order)


# ---------------------------------------------------------------------------
# certification

@dataclass
class Membership:
    """A parameter-free consequence 'value is a positive integer' and whether it holds."""
    value: Fraction
    holds: bool
    side: int

    def __str__(self):
        return "%s ∈ ℕ (expansion in x%d)" % (self.value, self.side)


def _forced(cons: List[Constraint]) -> Dict[str, Fraction]:
    env: Dict[str, Fraction] = {}
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
                env[k] = -_subst(rest, env).const / c.form.coeffs[k] if _subst(rest, env).is_constant() else None
                if env[k] is None:
                    del env[k]
                else:
                    changed = True
    return env


def _subst(f: Affine, env: Dict[str, Fraction]) -> Affine:
    out = Affine(f.const)
    for k, v in f.coeffs.items():
        out = out + (v * env[k] if k in env else Affine(**{k: v}))
    return out


def _strip_integer(f: Affine) -> Affine:
    """Drop parameter terms with integer coefficients (they do not affect integrality)."""
    out = Affine(f.const)
    for k, v in f.coeffs.items():
        if v.denominator != 1:
            out = out + Affine(**{k: v})
    return out


def simplified(cons: List[Constraint]) -> List[Constraint]:
    """Constraints after substituting the parameters fixed by equalities."""
    env = _forced(cons)
    out = [Constraint(EQ, Affine(**{k: 1}) - v, "forced") for k, v in sorted(env.items())]
    for c in cons:
        f = _subst(c.form, env)
        if c.kind != EQ:
            out.append(Constraint(c.kind, f, c.reason))
    return out


def derived_memberships(cons: List[Constraint], side: int) -> List[Membership]:
    simple = simplified(cons)
    ints = [_strip_integer(c.form) for c in simple if c.kind == INT]
    facts = set()
    for i, f in enumerate(ints):
        if f.is_constant():
            facts.add(abs(f.const))
        for g in ints[i + 1:]:
            d = _strip_integer(f - g)
            if d.is_constant():
                facts.add(abs(d.const))
    out = []
    seen = set()
    for c in simple:
        if c.kind == LE and c.reason == LOWEST_BELOW_TOP and c.form.is_constant():
            v = 1 - c.form.const
            if abs(v) in facts and v not in seen:
                seen.add(v)
                out.append(Membership(v, v.denominator == 1 and v >= 1, side))
    return out


@dataclass
class NonexistenceCertificate:
    target: str
    sides: List[int]
    branches: List[Tuple[int, str, List[str], str]]
    memberships: List[Membership] = field(default_factory=list)
    order_refutations: List[Tuple[Optional[Fraction], int, str]] = field(default_factory=list)
    note: str = ""

    def summary(self) -> str:
        bits = ["target %s refuted" % self.target]
        failing = [str(m) for m in self.memberships if not m.holds]
        if failing:
            bits.append("fails " + " and ".join(failing))
        if self.note:
            bits.append(self.note)
        return "; ".join(bits)

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "distinguished": self.sides,
            "branches": [{"distinguished": d, "branch": label, "constraints": cons, "status": st}
                         for d, label, cons, st in self.branches],
            "memberships": [{"value": str(m.value), "holds": m.holds, "distinguished": m.side}
                            for m in self.memberships],
            "order_refutations": [{"lambda": None if l is None else str(l), "order": o, "reason": r}
                                  for l, o, r in self.order_refutations],
            "summary": self.summary(),
        }

    def replay(self, XC: ClearedField, lambda_scan: int = 6, truncation: int = 8) -> bool:
        again = certify(XC, self.target, lambda_scan=lambda_scan, truncation=truncation)
        return again.certificate is not None and again.certificate.to_json() == self.to_json()


@dataclass
class CertifyOutcome:
    status: str
    target: str
    certificate: Optional[NonexistenceCertificate] = None
    candidates: List[IntegralCandidate] = field(default_factory=list)
    expansions: List[LaurentExpansion] = field(default_factory=list)
    sides: List[SideAnalysis] = field(default_factory=list)
    caveats: List[str] = field(default_factory=list)


def _field_of(XC: ClearedField) -> VectorField:
    h = RationalFunction(XC.h, reduced=True).normalized()
    return VectorField([RationalFunction(F, reduced=True).normalized() / h for F in XC.F])


def _candidate(X: VectorField, g: RationalFunction, target: str, lam) -> Optional[IntegralCandidate]:
    if is_constant(g):
        return None
    kind = {ZERO: FIRST_INTEGRAL, ONE: PRIMITIVE, EXP: EXPONENTIAL}[target]
    if target != ONE:
        g = g * (1 / g.num.leading_coeff())
    c = IntegralCandidate(g, kind, lam or 0)
    return c if verify_candidate(X, c) else None


def _status(b: Branch, ok: bool) -> str:
    return "satisfiable" if ok else "refuted"


def certify(XC: ClearedField, target: str, lambda_scan: int = 6, truncation: int = 8,
            fork_cap: int = 4) -> CertifyOutcome:
    """Refute L_X(g) = target for rational g, or collect candidates within the bounds."""
    if XC.k != 2:
        raise Unsupported("series analysis is implemented for planar fields only")
    out = CertifyOutcome(INCONCLUSIVE, target)
    sides: List[SideAnalysis] = []
    for d in (0, 1):
        try:
            sides.append(analyze_side(XC, d, target))
        except Unsupported as exc:
            out.caveats.append("expansion in x%d not analyzed: %s" % (d, exc))
    out.sides = sides
    if not sides:
        return out
    params = [s.order_name for s in sides] + ([LAM] if target == EXP else [])
    glob = _global_constraints(target)
    records: List[Tuple[int, str, List[str], str]] = []
    order_refs: List[Tuple[Optional[Fraction], int, str]] = []
    live: List[List[Branch]] = []
    for s in sides:
        keep = []
        for b in s.branches:
            if b.concrete_order is not None:
                try:
                    res = propagate(s.spec, b.concrete_order, None, 0, fork_cap)
                except Unsupported as exc:
                    out.caveats.append(str(exc))
                    keep.append(b)
                    continue
                if isinstance(res, OrderRefutation):
                    b.refuted = str(res)
                    order_refs.append((None, res.order, "x%d expansion: %s" % (s.distinguished, res.reason)))
                else:
                    keep.append(b)
                records.append((s.distinguished, b.label, [str(c) for c in b.constraints], b.refuted or "satisfiable"))
                continue
            ok = satisfiable(b.constraints + glob, params) is not None
            records.append((s.distinguished, b.label, [str(c) for c in simplified(b.constraints)], _status(b, ok)))
            if ok:
                keep.append(b)
        live.append(keep)
    memberships: List[Membership] = []
    for s in sides:
        for b in s.branches:
            for m in derived_memberships(b.constraints, s.distinguished):
                if all(m.value != q.value or m.side != q.side for q in memberships):
                    memberships.append(m)
    combos = _joint(live, glob, params)

    def certificate(note=""):
        return NonexistenceCertificate(target, [s.distinguished for s in sides], records,
                                       memberships, order_refs, note)

    if not combos:
        out.status = NONEXISTENCE
        out.certificate = certificate("both expansions combined" if all(live) else "")
        return out
    X = _field_of(XC)
    if target == EXP:
        found = False
        survivors = False
        for lam in range(1, lambda_scan + 1):
            fixed = {LAM: lam}
            joint = [c for c in combos if satisfiable(c + glob, params, fixed=fixed) is not None]
            if not joint:
                continue
            survivors = True
            res = _expand(sides, joint, Fraction(lam), truncation, fork_cap, out, X)
            if isinstance(res, OrderRefutation):
                order_refs.append((Fraction(lam), res.order, res.reason))
            elif res:
                found = True
        beyond = [c for c in combos
                  if satisfiable(c + glob + [Constraint(LE, (lambda_scan + 1) - Affine(**{LAM: 1}), "beyond scan")],
                                 params) is not None]
        if beyond:
            out.caveats.append("exponents λ > %d satisfy the branch constraints and were not scanned" % lambda_scan)
        if found or out.expansions:
            out.status = CANDIDATES
        elif not beyond and survivors and len(order_refs) > 0:
            out.status = NONEXISTENCE
            out.certificate = certificate("every admissible λ fails at a later order")
        return out
    res = _expand(sides, combos, None, truncation, fork_cap, out, X)
    if isinstance(res, OrderRefutation):
        order_refs.append((None, res.order, res.reason))
    if out.candidates or out.expansions:
        out.status = CANDIDATES
    return out


def _joint(live: List[List[Branch]], glob, params) -> List[List[Constraint]]:
    combos: List[List[Constraint]] = [[]]
    for keep in live:
        combos = [c + b.constraints for c in combos for b in keep]
    return [c for c in combos if satisfiable(c + glob, params) is not None]


def _expand(sides, combos, lam, T, fork_cap, out: CertifyOutcome, X: VectorField):
    """Propagate on the first side whose order is fixed; record candidates in out."""
    for s in sides:
        orders = set()
        for c in combos:
            env = _forced(c + ([Constraint(EQ, Affine(**{LAM: 1}) - lam, "scan")] if lam is not None else []))
            n = env.get(s.order_name)
            if n is None or n.denominator != 1:
                orders = None
                break
            orders.add(int(n))
        if not orders:
            continue
        last = None
        for N in sorted(orders):
            spec = s.spec if lam is None else derive_recurrence(s.spec.system, s.distinguished, s.spec.target, lam)
            try:
                res = _propagate_all(spec, N, lam, T, fork_cap, out.caveats)
            except Unsupported as exc:
                out.caveats.append(str(exc))
                continue
            for r in res:
                if isinstance(r, OrderRefutation):
                    last = r
                    continue
                if r.terminates(spec.s):
                    g = r.series()
                    cand = _candidate(X, g, s.spec.target, lam)
                    if cand is not None:
                        if cand not in out.candidates:
                            out.candidates.append(cand)
                        continue
                    if s.spec.target == ZERO and is_constant(g):
                        continue
                out.expansions.append(r)
        if out.candidates or any(e.lam == lam for e in out.expansions):
            return True
        return last
    out.caveats.append("starting order not fixed by the constraints; no propagation")
    return None
