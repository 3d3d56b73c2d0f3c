"""Classification of systems from integral candidates and nonexistence certificates."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import laurent
from .algebra import MultiPoly, RationalFunction
from .darboux import (CONSTANT_TIMES_H, ZERO, assemble_integrals, find_cofactor_relations,
                      search_darboux, solve_primitive)
from .ode1 import ABSENT, EXISTS, commensurable_scaling, rational_antiderivative
from .vectorfield import (EXPONENTIAL, FIRST_INTEGRAL, PRIMITIVE, IntegralCandidate, VectorField,
                          clear_denominators, jacobian_independent, verify_candidate)

ALMOST_INTERNAL = "AlmostInternal"
NOT_ALMOST_INTERNAL = "NotAlmostInternalCertified"
ORTHOGONALITY = "OrthogonalityEvidence"
NOT_WEAKLY_ORTHOGONAL = "NotWeaklyOrthogonal"
INCONCLUSIVE = "Inconclusive"

WEAK_ORTHOGONALITY_READING = ("weak orthogonality decided by searching for rational first integrals "
                              "(not by the signs of the exponents of one certificate set)")


@dataclass
class AnalysisReport:
    system: VectorField
    degree: Optional[int]
    classification: str = INCONCLUSIVE
    weakly_orthogonal: Optional[bool] = None
    certificates: List[IntegralCandidate] = field(default_factory=list)
    nonexistence: List[laurent.NonexistenceCertificate] = field(default_factory=list)
    independent: List[int] = field(default_factory=list)
    caveats: List[str] = field(default_factory=list)
    notes: Dict[str, object] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.system.k

    def label(self) -> str:
        if self.classification == ALMOST_INTERNAL:
            wo = "weakly orthogonal" if self.weakly_orthogonal else "not weakly orthogonal"
            return "almost internal (%s)" % wo
        if self.classification == NOT_ALMOST_INTERNAL:
            if self.notes.get("two_step_analysable"):
                return "not almost internal; 2-analysable"
            return "not almost internal"
        if self.classification == ORTHOGONALITY:
            return "orthogonal to the constants (certified)" if self.notes.get("certified") \
                else "evidence of orthogonality to the constants"
        if self.classification == NOT_WEAKLY_ORTHOGONAL:
            return "not weakly orthogonal (rational first integral)"
        return "inconclusive"

    def refuted_targets(self) -> List[str]:
        return sorted({c.target for c in self.nonexistence})

    def check(self) -> bool:
        """Exact re-verification of every certificate and of the classification invariants."""
        X = self.system
        if not all(verify_candidate(X, c) for c in self.certificates):
            return False
        if self.classification == ALMOST_INTERNAL and "algebraic_witness" in self.notes:
            return X.k == 1 and commensurable_scaling(1 / X.f[0]).status == EXISTS
        if self.classification == ALMOST_INTERNAL:
            chosen = [self.certificates[i] for i in self.independent]
            if len(chosen) != X.k or sum(c.kind == PRIMITIVE for c in chosen) > 1:
                return False
            if not jacobian_independent([c.g for c in chosen], X.k):
                return False
        return True


def _candidate_key(c: IntegralCandidate):
    order = {FIRST_INTEGRAL: 0, EXPONENTIAL: 1, PRIMITIVE: 2}[c.kind]
    return (order, c.g.num.degree() + c.g.den.degree(), len(c.g.num.terms) + len(c.g.den.terms),
            c.lam, str(c.g))


def _add(report: AnalysisReport, cands: Sequence[IntegralCandidate]) -> None:
    for c in cands:
        if c not in report.certificates and verify_candidate(report.system, c):
            report.certificates.append(c)


def _independent(X: VectorField, cands: List[IntegralCandidate]) -> List[int]:
    """Greedy maximal Jacobian-independent subset with at most one primitive."""
    chosen: List[int] = []
    prim = False
    order = sorted(range(len(cands)), key=lambda i: _candidate_key(cands[i]))
    for i in order:
        c = cands[i]
        if c.kind == PRIMITIVE and prim:
            continue
        if jacobian_independent([cands[j].g for j in chosen] + [c.g], X.k):
            chosen.append(i)
            prim = prim or c.kind == PRIMITIVE
        if len(chosen) == X.k:
            break
    return chosen


def _classify(report: AnalysisReport, zero_witness: bool) -> None:
    X = report.system
    report.independent = _independent(X, report.certificates)
    has_fi = zero_witness or any(c.kind == FIRST_INTEGRAL for c in report.certificates)
    refuted = set(report.refuted_targets())
    if report.certificates:
        report.notes["not_orthogonal"] = True
    if len(report.independent) == X.k:
        report.classification = ALMOST_INTERNAL
        report.weakly_orthogonal = not has_fi
        report.caveats.append(WEAK_ORTHOGONALITY_READING)
    elif len(refuted) == 3:
        report.classification = ORTHOGONALITY
    elif has_fi:
        report.classification = NOT_WEAKLY_ORTHOGONAL
    elif X.k == 2 and len(refuted) >= 2:
        # two refuted target types leave at most one independent integral
        report.classification = NOT_ALMOST_INTERNAL
    else:
        report.classification = INCONCLUSIVE
        report.caveats.append("no certificate up to degree %s" % report.degree)


def _run_laurent(report: AnalysisReport, X: VectorField, lambda_scan: int, truncation: int) -> bool:
    """Certify the three targets on a planar field; returns whether a first integral was produced."""
    XC = clear_denominators(X)
    zero_witness = False
    for target in (laurent.ZERO, laurent.ONE, laurent.EXP):
        try:
            out = laurent.certify(XC, target, lambda_scan=lambda_scan, truncation=truncation)
        except laurent.Unsupported as exc:
            report.caveats.append("series analysis skipped: %s" % exc)
            continue
        for cav in out.caveats:
            if cav not in report.caveats:
                report.caveats.append(cav)
        if out.certificate is not None:
            report.nonexistence.append(out.certificate)
        _add(report, out.candidates)
        if target == laurent.ZERO and out.candidates:
            zero_witness = True
    return zero_witness


def analyze_system(X: VectorField, d: int = 4, lambda_scan: int = 6, truncation: int = 8,
                   bound: int = 6) -> AnalysisReport:
    if d < 1:
        raise ValueError("degree bound must be at least 1")
    report = AnalysisReport(X, d)
    t0 = time.perf_counter()
    XC = clear_denominators(X)
    search = search_darboux(XC, d)
    report.caveats.extend(c for c in search.caveats if c not in report.caveats)
    elements = search.elements
    report.notes["darboux_polynomials"] = [(el.P, el.K) for el in elements]
    if elements:
        rels = find_cofactor_relations(elements, XC.h, ZERO, bound) + \
            find_cofactor_relations(elements, XC.h, CONSTANT_TIMES_H, bound)
        _add(report, assemble_integrals(elements, rels))
    _add(report, solve_primitive(XC, elements, d, bound))
    report.timings["darboux"] = time.perf_counter() - t0
    zero_witness = False
    if X.k == 2:
        t1 = time.perf_counter()
        zero_witness = _run_laurent(report, X, lambda_scan, truncation)
        report.timings["laurent"] = time.perf_counter() - t1
        report.caveats.append("exponential integrals scanned for λ ≤ %d" % lambda_scan)
    report.caveats.append("Darboux polynomials searched up to degree %d" % d)
    report.caveats.append("coefficients restricted to the rationals")
    _classify(report, zero_witness)
    report.timings["total"] = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# one-dimensional fields

def analyze_rosenlicht(f: RationalFunction) -> AnalysisReport:
    """x' = f(x): internal iff f = 0, 1/f has a rational antiderivative, or a multiple of 1/f is a log-derivative."""
    if isinstance(f, MultiPoly):
        f = RationalFunction(f, reduced=True).normalized()
    X = VectorField([f], ["x"])
    report = AnalysisReport(X, None)
    t0 = time.perf_counter()
    x = RationalFunction.var(1, 0)
    if not f:
        _add(report, [IntegralCandidate(x, FIRST_INTEGRAL)])
        report.notes["reason"] = "every point is constant"
        report.independent = [0]
        report.classification = ALMOST_INTERNAL
        report.weakly_orthogonal = False
        return report
    inv = 1 / f
    g = rational_antiderivative(inv)
    if g is not None:
        _add(report, [IntegralCandidate(g, PRIMITIVE)])
    com = commensurable_scaling(inv)
    report.notes["commensurability"] = com.case or com.status
    if com.status == EXISTS:
        if com.witness is not None:
            _add(report, [IntegralCandidate(com.witness, EXPONENTIAL, com.c)])
        else:
            report.notes["algebraic_witness"] = {k: str(v) for k, v in com.detail.items()}
            report.caveats.append("exponential witness exists only over an algebraic extension of the rationals")
    report.timings["total"] = time.perf_counter() - t0
    if report.certificates:
        report.independent = _independent(X, report.certificates)
    if report.independent or com.status == EXISTS:
        report.classification = ALMOST_INTERNAL
        report.weakly_orthogonal = True
    elif com.status == ABSENT:
        report.classification = NOT_ALMOST_INTERNAL
    else:
        report.classification = INCONCLUSIVE
        report.caveats.append("residue polynomial of degree ≥ 3 with irrational roots: commensurability undecided")
    return report


# ---------------------------------------------------------------------------
# y'' = y' f(y)

def poizat_field(f: RationalFunction) -> VectorField:
    fx = RationalFunction(f.num.extend(2, [0]), f.den.extend(2, [0]), reduced=True)
    y2 = RationalFunction.var(2, 1)
    return VectorField([y2, y2 * fx], ["y1", "y2"])


def analyze_poizat(f, lambda_scan: int = 6, truncation: int = 8) -> AnalysisReport:
    if isinstance(f, (int, Fraction)):
        f = RationalFunction.const(1, f)
    elif isinstance(f, MultiPoly):
        f = RationalFunction(f, reduced=True).normalized()
    X = poizat_field(f)
    report = AnalysisReport(X, None)
    t0 = time.perf_counter()
    y1, y2 = RationalFunction.var(2, 0), RationalFunction.var(2, 1)
    G = rational_antiderivative(f)
    report.notes["rational_antiderivative"] = G
    report.notes["strongly_minimal"] = G is None
    if G is not None and not f.is_constant():
        fi = y2 - RationalFunction(G.num.extend(2, [0]), G.den.extend(2, [0]), reduced=True)
        report.notes["first_integral_map"] = fi
        _add(report, [IntegralCandidate(fi, FIRST_INTEGRAL)])
    if f.is_constant():
        c = f.constant_value()
        if c:
            _add(report, [IntegralCandidate(y2, EXPONENTIAL, c), IntegralCandidate(y1 * c - y2, FIRST_INTEGRAL)])
        else:
            _add(report, [IntegralCandidate(y1 / y2, PRIMITIVE), IntegralCandidate(y2, FIRST_INTEGRAL)])
        report.independent = _independent(X, report.certificates)
        report.classification = ALMOST_INTERNAL
        report.weakly_orthogonal = False
        report.timings["total"] = time.perf_counter() - t0
        return report
    _run_laurent(report, X, lambda_scan, truncation)
    refuted = set(report.refuted_targets())
    report.independent = _independent(X, report.certificates)
    if {laurent.EXP, laurent.ONE} <= refuted:
        # only first integrals remain and a planar field has at most one independent one
        report.classification = NOT_ALMOST_INTERNAL
    else:
        report.classification = INCONCLUSIVE
        report.caveats.append("series analysis did not refute every exponential or primitive integral")
    report.timings["total"] = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# x' = a x + b x y, y' = c y + d x y

def lotka_volterra_field(a, b, c, d) -> VectorField:
    x, y = RationalFunction.var(2, 0), RationalFunction.var(2, 1)
    return VectorField([x * a + x * y * b, y * c + x * y * d], ["x", "y"])


def normalized_lotka_volterra(mu) -> VectorField:
    """u' = mu*u + u*v, v' = v + u*v (time rescaled by c)."""
    u, v = RationalFunction.var(2, 0), RationalFunction.var(2, 1)
    return VectorField([u * Fraction(mu) + u * v, v + u * v], ["u", "v"])


def analyze_lotka_volterra(a, b, c, d, lambda_scan: int = 6, truncation: int = 8) -> AnalysisReport:
    a, b, c, d = (Fraction(t) for t in (a, b, c, d))
    if not (a and b and c and d):
        raise ValueError("Lotka-Volterra parameters must be nonzero")
    X = lotka_volterra_field(a, b, c, d)
    report = AnalysisReport(X, None)
    t0 = time.perf_counter()
    mu = a / c
    report.notes["mu"] = mu
    report.notes["substitution"] = "u = %s*x, v = %s*y, mu = %s" % (d / c, b / c, mu)
    N = normalized_lotka_volterra(mu)
    _run_laurent(report, N, lambda_scan, truncation)
    for cert in report.nonexistence:
        for m in cert.memberships:
            m_label = "μ" if m.value == mu else ("1/μ" if mu and m.value == 1 / mu else None)
            if m_label:
                text = "%s ∈ ℕ %s (μ = %s)" % (m_label, "holds" if m.holds else "fails", mu)
                seen = report.notes.setdefault("memberships", [])
                if text not in seen:
                    seen.append(text)
    # candidates of the normalized field live in other coordinates
    report.notes["normalized_candidates"] = [c for c in report.certificates]
    report.certificates = []
    report.notes["classical"] = a == c
    if a != c:
        refuted = set(report.refuted_targets())
        if len(refuted) == 3:
            report.classification = ORTHOGONALITY
            report.notes["certified"] = True
        else:
            report.classification = INCONCLUSIVE
            report.caveats.append("series analysis left target(s) %s open"
                                  % sorted({laurent.ZERO, laurent.ONE, laurent.EXP} - refuted))
    else:
        x, y = RationalFunction.var(2, 0), RationalFunction.var(2, 1)
        z = x / b - y / d
        _add(report, [IntegralCandidate(z, EXPONENTIAL, a)])
        report.notes["two_step_analysable"] = True
        report.notes["witness"] = "z = %s with z' = %s*z" % (z.to_str(X.names), a)
        report.notes["lambda_lattice"] = "every exponent λ is an integer multiple of %s" % c
        refuted = set(report.refuted_targets())
        report.independent = _independent(X, report.certificates)
        report.classification = NOT_ALMOST_INTERNAL if {laurent.ZERO, laurent.ONE} <= refuted else INCONCLUSIVE
    report.timings["total"] = time.perf_counter() - t0
    return report
