"""End-to-end acceptance checks; each prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also repeated in the terminal summary.
"""
import itertools
import json
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import ACCEPTANCE, rf, uni
from oracles import brute_force_ode, d_trim
from internality import laurent
from internality.algebra import MultiPoly, RationalFunction
from internality.cli import _corpus_dir, main
from internality.darboux import ZERO, assemble_integrals, find_cofactor_relations, find_darboux_polynomials
from internality.ode1 import LinearODE, rational_solve_linear_ode
from internality.vectorfield import (EXPONENTIAL, FIRST_INTEGRAL, PRIMITIVE, IntegralCandidate, VectorField,
                                     clear_denominators, jacobian_independent, lie_derivative,
                                     verify_candidate)
from internality.verdict import (ALMOST_INTERNAL, INCONCLUSIVE, NOT_ALMOST_INTERNAL, NOT_WEAKLY_ORTHOGONAL,
                                 ORTHOGONALITY, analyze_lotka_volterra, analyze_poizat, analyze_rosenlicht,
                                 analyze_system, normalized_lotka_volterra)


@pytest.fixture
def criterion(request):
    state = {}

    def record(n, title):
        state.update(n=n, title=title, t0=time.perf_counter())
    yield record
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    line = "%s criterion %d: %s (%.1fs)" % ("PASS" if passed else "FAIL", state["n"], state["title"],
                                           time.perf_counter() - state["t0"])
    ACCEPTANCE[state["n"]] = line
    print("\n" + line)


def _elapsed_below(t0, limit):
    assert time.perf_counter() - t0 < limit


def test_weierstrass_first_integral(criterion):
    criterion(1, "Weierstrass first integral at degree 3")
    t0 = time.perf_counter()
    X = VectorField([rf("x1"), rf("6*x0^2 - 1/2")])
    rep = analyze_system(X, d=3)
    target = rf("x1^2 - 4*x0^3 + x0")
    found = [c for c in rep.certificates if c.kind == FIRST_INTEGRAL]
    assert any((c.g / target).is_constant() for c in found)
    assert not lie_derivative(X, target)
    assert rep.classification == NOT_WEAKLY_ORTHOGONAL and rep.check()
    _elapsed_below(t0, 5)


def test_poizat_dichotomy(criterion):
    criterion(2, "constant/nonconstant dichotomy for y'' = y' f(y)")
    for c in (Fraction(-2), Fraction(-1), Fraction(1, 2), Fraction(3)):
        t0 = time.perf_counter()
        rep = analyze_poizat(c)
        assert rep.classification == ALMOST_INTERNAL, c
        chosen = [rep.certificates[i] for i in rep.independent]
        assert len(chosen) == 2 and all(verify_candidate(rep.system, x) for x in chosen)
        assert jacobian_independent([x.g for x in chosen], 2) and rep.check()
        _elapsed_below(t0, 10)
    for f in ("x", "x^2", "1/x", "x+1/x"):
        t0 = time.perf_counter()
        rep = analyze_poizat(uni(f))
        assert rep.classification == NOT_ALMOST_INTERNAL, f
        assert {laurent.EXP, laurent.ONE} <= set(rep.refuted_targets())
        XC = clear_denominators(rep.system)
        assert rep.nonexistence and all(cert.replay(XC) for cert in rep.nonexistence)
        _elapsed_below(t0, 10)


def test_lotka_volterra_grid(criterion):
    criterion(3, "Lotka-Volterra classification grid")
    t0 = time.perf_counter()
    grid = [Fraction(1), Fraction(2), Fraction(3), Fraction(-1), Fraction(1, 2)]
    for a, c in itertools.product(grid, repeat=2):
        rep = analyze_lotka_volterra(a, 1, c, 1)
        if a != c:
            assert rep.classification == ORTHOGONALITY and rep.notes.get("certified"), (a, c)
        else:
            assert rep.classification == NOT_ALMOST_INTERNAL and rep.notes.get("two_step_analysable"), (a, c)
            assert rep.check()
    _elapsed_below(t0, 30)


def test_lotka_volterra_exponential_space(criterion):
    criterion(4, "exponential integrals of u' = u + uv, v' = v + uv")
    t0 = time.perf_counter()
    X = normalized_lotka_volterra(1)
    assert X.f == [rf("x0 + x0*x1"), rf("x1 + x0*x1")]
    rep = analyze_system(X, d=2, lambda_scan=3)
    expected = [IntegralCandidate(rf("x0 - x1") ** lam, EXPONENTIAL, lam) for lam in (1, 2, 3)]
    assert [c for c in rep.certificates if c.kind == EXPONENTIAL] == expected
    assert not [c for c in rep.certificates if c.kind != EXPONENTIAL]
    rep6 = analyze_system(X, d=6, lambda_scan=3)
    assert not [c for c in rep6.certificates if c.kind in (FIRST_INTEGRAL, PRIMITIVE)]
    assert {laurent.ZERO, laurent.ONE} <= set(rep6.refuted_targets())
    _elapsed_below(t0, 60)


def _inhomogeneous(XC, dist):
    side = laurent.analyze_side(XC, dist, laurent.EXP)
    return side, next(b for b in side.branches if b.label == "inhomogeneous first order")


def test_lotka_volterra_indicial_constraints(criterion):
    criterion(5, "indicial constraints for mu = 2 and mu = 3/2")
    t0 = time.perf_counter()
    XC = clear_denominators(normalized_lotka_volterra(2))
    side0, b0 = _inhomogeneous(XC, 0)
    side1, b1 = _inhomogeneous(XC, 1)
    assert (side0.order_name, side1.order_name) == ("N", "M")
    assert {"N = 0", "λ ∈ ℤ"} <= {str(c) for c in laurent.simplified(b0.constraints)}
    assert {"M = 0", "(1/2)*λ ∈ ℤ"} <= {str(c) for c in laurent.simplified(b1.constraints)}
    m0 = laurent.derived_memberships(b0.constraints, 0)
    m1 = laurent.derived_memberships(b1.constraints, 1)
    assert [(m.value, m.holds) for m in m0] == [(2, True)]
    assert [(m.value, m.holds) for m in m1] == [(Fraction(1, 2), False)]
    assert laurent.certify(XC, laurent.EXP).status == laurent.NONEXISTENCE
    # mu = 3/2: the first expansion alone already refutes
    XC = clear_denominators(normalized_lotka_volterra(Fraction(3, 2)))
    _, b0 = _inhomogeneous(XC, 0)
    assert [(m.value, m.holds) for m in laurent.derived_memberships(b0.constraints, 0)] == [(Fraction(3, 2), False)]
    _elapsed_below(t0, 10)


def test_rosenlicht_cases(criterion):
    criterion(6, "one-dimensional fields x' = f(x)")
    t0 = time.perf_counter()
    rep = analyze_rosenlicht(uni("x^2"))
    assert rep.classification == ALMOST_INTERNAL
    assert IntegralCandidate(uni("-1/x"), PRIMITIVE) in rep.certificates
    rep = analyze_rosenlicht(uni("x"))
    assert rep.classification == ALMOST_INTERNAL
    assert IntegralCandidate(uni("x"), EXPONENTIAL, 1) in rep.certificates
    rep = analyze_rosenlicht(uni("x^2+1"))
    assert rep.classification == ALMOST_INTERNAL and "algebraic_witness" in rep.notes and rep.check()
    rep = analyze_rosenlicht(uni("x^3+x+1"))
    assert rep.classification in (NOT_ALMOST_INTERNAL, INCONCLUSIVE)
    if rep.classification == INCONCLUSIVE:
        assert any("degree ≥ 3" in c for c in rep.caveats)
    _elapsed_below(t0, 20)


X1 = RationalFunction.var(1, 0)
SUPPORT = (X1, X1 - 1, X1 + 2)


def _dense(r):
    n = [Fraction(0)] * (r.num.degree() + 1) if r.num else []
    for (e,), c in r.num.terms.items():
        n[e] = c
    d = [Fraction(0)] * (r.den.degree() + 1)
    for (e,), c in r.den.terms.items():
        d[e] = c
    return d_trim(n), d_trim(d)


def _from_dense(N, D):
    return RationalFunction(MultiPoly.univariate(N), MultiPoly.univariate(D))


def _random_poly(rnd, maxdeg):
    return RationalFunction(MultiPoly.univariate([rnd.randint(-3, 3) for _ in range(rnd.randint(0, maxdeg) + 1)]))


def _random_instance(rnd):
    p = RationalFunction.const(1, rnd.randint(-1, 1)) + X1 * (rnd.randint(-1, 1) * rnd.randint(0, 1))
    for f in SUPPORT:
        r = rnd.choice([0, 0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2), 3])
        if r:
            p = p + RationalFunction.const(1, r) / f
    if rnd.random() < 0.6:
        # planted: q built from a known rational y
        y = _random_poly(rnd, 3)
        for f in SUPPORT:
            y = y / f ** rnd.randint(0, 2)
        return p, y.diff(0) + p * y
    q = _random_poly(rnd, 4)
    for f in SUPPORT:
        q = q / f ** rnd.randint(0, 2)
    return p, q


def test_ode_oracle_equivalence(criterion):
    criterion(7, "rational first-order solver agrees with the bounded sweep")
    t0 = time.perf_counter()
    rnd = random.Random(7)
    solvable = 0
    for _ in range(200):
        p, q = _random_instance(rnd)
        sol = rational_solve_linear_ode(LinearODE(p, q))
        part, hom = brute_force_ode(*_dense(p), *_dense(q), max_pole=3, slack=7)
        assert (sol.particular is None) == (part is None), (p, q)
        assert (sol.homogeneous is not None) == hom, (p, q)
        if part is not None:
            solvable += 1
            diff = sol.particular - _from_dense(*part)
            assert not (diff.diff(0) + p * diff), (p, q)
    assert solvable >= 100
    _elapsed_below(t0, 120)


def test_certificate_soundness_sweep(criterion, tmp_path, capsys):
    criterion(8, "every corpus report re-verifies")
    t0 = time.perf_counter()
    assert main(["run", "--corpus", "--format", "json", "--out", str(tmp_path)]) == 0
    reports = sorted(str(p) for p in Path(tmp_path).glob("*.json"))
    table = json.loads((_corpus_dir() / "expectations.json").read_text())
    assert len(reports) == len(table)
    assert main(["verify"] + reports) == 0
    _elapsed_below(t0, 60)


def _kernel_vector_exists(lams, bound):
    rng = range(-bound, bound + 1)
    return any(any(v) and sum(a * b for a, b in zip(v, lams)) == 0 for v in itertools.product(rng, repeat=len(lams)))


def test_planted_structure_recall(criterion):
    criterion(9, "first integrals of random diagonal linear fields")
    t0 = time.perf_counter()
    rnd = random.Random(9)
    bound = 6
    for _ in range(50):
        k = rnd.randint(1, 3)
        lams = [rnd.randint(-4, 4) for _ in range(k)]
        X = VectorField([RationalFunction.var(k, i) * l for i, l in enumerate(lams)])
        XC = clear_denominators(X)
        els = find_darboux_polynomials(XC, 1)
        found = assemble_integrals(els, find_cofactor_relations(els, XC.h, ZERO, bound))
        assert all(verify_candidate(X, c) and c.kind == FIRST_INTEGRAL for c in found)
        assert bool(found) == _kernel_vector_exists(lams, bound), lams
    _elapsed_below(t0, 60)
