import itertools
import random
from fractions import Fraction

import pytest

from conftest import poly, rf, uni, upoly
from internality.algebra import MultiPoly, RationalFunction
from internality.darboux import (CONSTANT_TIMES_H, ZERO, assemble_integrals, find_cofactor_relations,
                                 find_darboux_polynomials, search_darboux, solve_primitive)
from internality.vectorfield import (EXPONENTIAL, FIRST_INTEGRAL, PRIMITIVE, IntegralCandidate, VectorField,
                                     clear_denominators, verify_candidate)

LV1 = VectorField([rf("x0+x0*x1"), rf("x1+x0*x1")])
POIZAT3 = VectorField([rf("x1"), rf("3*x1")])


def pairs(elements):
    return {(e.P, e.K) for e in elements}


def test_lv_mu1_elements():
    els = find_darboux_polynomials(clear_denominators(LV1), 1)
    assert pairs(els) == {(poly("x0"), poly("1+x1")), (poly("x1"), poly("1+x0")), (poly("x0-x1"), poly("1"))}


def test_poizat_elements_up_to_scaling():
    els = find_darboux_polynomials(clear_denominators(POIZAT3), 1)
    # 3*x0 - x1 is stored with leading coefficient 1
    assert pairs(els) == {(poly("x1"), poly("3")), (poly("x0 - x1/3"), poly("0"))}


def test_identity_coordinate():
    els = find_darboux_polynomials(clear_denominators(VectorField([uni("x")])), 2)
    assert pairs(els) == {(upoly("x"), upoly("1"))}


def test_elements_verify_exactly():
    for X in (LV1, POIZAT3, VectorField([rf("x1"), rf("6*x0^2-1/2")])):
        XC = clear_denominators(X)
        for el in find_darboux_polynomials(XC, 3):
            assert XC.lie(el.P) == el.K * el.P
            assert el.K.degree() <= max(XC.degree() - 1, 0)


def test_cofactor_relations_lv():
    XC = clear_denominators(LV1)
    els = find_darboux_polynomials(XC, 1)
    assert find_cofactor_relations(els, XC.h, ZERO) == []
    rels = find_cofactor_relations(els, XC.h, CONSTANT_TIMES_H)
    idx = [e.P for e in els].index(poly("x0-x1"))
    assert len(rels) == 1 and rels[0].lam == 1
    assert rels[0].n == tuple(int(i == idx) for i in range(3))
    assert assemble_integrals(els, rels) == [IntegralCandidate(rf("x0-x1"), EXPONENTIAL, 1)]


def test_cofactor_relations_poizat():
    XC = clear_denominators(POIZAT3)
    els = find_darboux_polynomials(XC, 1)
    rels = find_cofactor_relations(els, XC.h, CONSTANT_TIMES_H)
    assert [(r.lam, [els[i].P for i, n in enumerate(r.n) if n]) for r in rels] == [(3, [poly("x1")])]
    cands = assemble_integrals(els, find_cofactor_relations(els, XC.h, ZERO))
    assert cands == [IntegralCandidate(rf("3*x0-x1"), FIRST_INTEGRAL)]
    assert assemble_integrals(els, []) == []


def test_relations_need_elements():
    with pytest.raises(ValueError):
        find_cofactor_relations([], MultiPoly.const(2, 1), ZERO)


def test_primitives():
    X = VectorField([uni("x^2")])
    XC = clear_denominators(X)
    els = find_darboux_polynomials(XC, 2)
    assert solve_primitive(XC, els, 2) == [IntegralCandidate(uni("-1/x"), PRIMITIVE)]
    X = VectorField([uni("1")])
    XC = clear_denominators(X)
    assert solve_primitive(XC, find_darboux_polynomials(XC, 1), 1) == [IntegralCandidate(uni("x"), PRIMITIVE)]


def test_no_primitive_lv_mu2():
    X = VectorField([rf("2*x0+2*x0*x1"), rf("x1+x0*x1")])
    XC = clear_denominators(X)
    assert solve_primitive(XC, find_darboux_polynomials(XC, 6), 6) == []


def test_multiplicativity():
    XC = clear_denominators(LV1)
    els = find_darboux_polynomials(XC, 1)
    for a, b in itertools.combinations(els, 2):
        assert XC.lie(a.P * b.P) == (a.K + b.K) * a.P * b.P
    # products of found factors are not reported again
    assert all(e.P.degree() == 1 for e in find_darboux_polynomials(XC, 2))


def test_exponential_scaling_law():
    XC = clear_denominators(LV1)
    els = find_darboux_polynomials(XC, 1)
    for c in assemble_integrals(els, find_cofactor_relations(els, XC.h, CONSTANT_TIMES_H)):
        for n in range(1, 4):
            assert verify_candidate(LV1, IntegralCandidate(c.g ** n, EXPONENTIAL, c.lam * n))


def _kernel_vector_exists(lams, bound):
    rng = range(-bound, bound + 1)
    return any(any(v) and sum(a * b for a, b in zip(v, lams)) == 0 for v in itertools.product(rng, repeat=len(lams)))


def test_planted_diagonal_fields():
    rnd = random.Random(11)
    for _ in range(20):
        k = rnd.randint(1, 3)
        lams = [rnd.randint(-4, 4) for _ in range(k)]
        X = VectorField([RationalFunction.var(k, i) * l for i, l in enumerate(lams)])
        XC = clear_denominators(X)
        els = find_darboux_polynomials(XC, 1)
        for i, l in enumerate(lams):
            assert any(e.P == MultiPoly.var(k, i) and e.K == MultiPoly.const(k, l) for e in els)
        for bound in (1, 6):
            cands = assemble_integrals(els, find_cofactor_relations(els, XC.h, ZERO, bound))
            assert all(verify_candidate(X, c) for c in cands)
            assert bool(cands) == _kernel_vector_exists(lams, bound), (lams, bound)


def test_search_report_has_no_caveats_on_small_cases():
    assert search_darboux(clear_denominators(LV1), 2).caveats == []
