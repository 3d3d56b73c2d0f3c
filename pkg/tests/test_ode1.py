import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import uni, upoly
from internality.algebra import MultiPoly, RationalFunction
from internality.ode1 import (ABSENT, EQ, EXISTS, INCONCLUSIVE, INT, LE, Affine, Constraint, IndicialFamily,
                              LinearODE, MonomialFamily, Unsupported, commensurable_scaling, logderiv_preimage,
                              parametric_indicial_constraints, rational_antiderivative, rational_solve_linear_ode,
                              residue_analysis, satisfiable, solution_bounds)
from oracles import brute_force_ode, d_trim

X = RationalFunction.var(1, 0)
ZERO = RationalFunction.const(1, 0)


def test_solver_examples():
    sol = rational_solve_linear_ode(LinearODE(uni("(x-1)/x"), uni("-2*x")))
    assert sol.particular == uni("-2*x") and sol.homogeneous is None
    sol = rational_solve_linear_ode(LinearODE(uni("2/x+1"), ZERO))
    assert sol.homogeneous is None
    sol = rational_solve_linear_ode(LinearODE(ZERO, ZERO))
    assert sol.particular == ZERO and sol.homogeneous == uni("1")


def test_solver_homogeneous_and_particular():
    # y' - (2/x) y = 0 has x^2; y' - (2/x) y = x^3 has x^4/2
    sol = rational_solve_linear_ode(LinearODE(uni("-2/x"), uni("x^3")))
    assert sol.homogeneous == uni("x^2")
    assert LinearODE(uni("-2/x"), uni("x^3")).residual(sol.particular).is_zero()


def test_solver_no_solution():
    # y' = 1/x
    assert rational_solve_linear_ode(LinearODE(ZERO, uni("1/x"))).particular is None


def test_residue_analysis():
    rep = residue_analysis(uni("3/x"))
    assert rep.rational_residues == [3] and rep.all_integers
    rep = residue_analysis(uni("1/(2*x)"))
    assert rep.rational_residues == [Fraction(1, 2)] and not rep.all_integers
    rep = residue_analysis(uni("1/(x^2+1)"))
    assert rep.has_irrational_residues and rep.rational_residues == []
    assert rep.rothstein == upoly("4*x^2+1")
    with pytest.raises(ValueError):
        residue_analysis(ZERO)


def test_residue_not_integer_for_double_pole():
    assert not residue_analysis(uni("1/x^2")).all_integers


def test_logderiv_preimage():
    assert logderiv_preimage(uni("3/x")) == uni("x^3")
    assert logderiv_preimage(uni("2*x/(x^2+1)")) == uni("x^2+1")
    assert logderiv_preimage(uni("1/(2*x)")) is None
    assert logderiv_preimage(uni("x")) is None


def test_rational_antiderivative():
    assert rational_antiderivative(uni("2*x")) == uni("x^2")
    assert rational_antiderivative(uni("1/x^2")) == uni("-1/x")
    assert rational_antiderivative(uni("1/x")) is None


def test_commensurable_scaling():
    c = commensurable_scaling(uni("1/(2*x)"))
    assert c.status == EXISTS and c.c == 2 and c.witness == uni("x")
    c = commensurable_scaling(uni("1/(x^2+1)"))
    assert c.status == EXISTS and c.case == "quadratic"
    assert c.detail["ratios"] == [-1]
    assert commensurable_scaling(uni("1/(x^3-2)")).status == INCONCLUSIVE
    # residues 1 and sqrt 2 style: 1/(x^2-2) has residues +-1/(2 sqrt 2), ratio -1
    assert commensurable_scaling(uni("1/(x^2-2)")).status == EXISTS


def test_commensurable_absent():
    # residues (1 +- 1/sqrt 2)/2 have the irrational ratio 3 + 2 sqrt 2
    c = commensurable_scaling(uni("(x+1)/(x^2-2)"))
    assert c.status == ABSENT and c.case == "quadratic"
    assert commensurable_scaling(uni("1/x + 1/(x-1)")).status == EXISTS


# --- parametric indicial constraints ----------------------------------------

def _holds_all(cons, env):
    return all(c.holds(env) for c in cons)


def test_leading_family_n_zero_lambda_integer():
    mu = Fraction(2)
    N, lam = Affine(N=1), Affine(**{"λ": 1})
    fam = MonomialFamily(1, Fraction(1), {0: N * mu - lam, 1: N})
    cons = parametric_indicial_constraints(fam)
    assert Constraint(EQ, -N, "no polynomial part at infinity") in cons
    assert any(c.kind == INT and c.form == lam - N * mu for c in cons)
    assert _holds_all(cons, {"N": 0, "λ": 3})
    assert not _holds_all(cons, {"N": 1, "λ": 3})


def test_dual_leading_family():
    mu = Fraction(2)
    M, lam = Affine(M=1), Affine(**{"λ": 1})
    # mu x a' + (M - lam + M x) a = 0
    fam = MonomialFamily(1, mu, {0: M - lam, 1: M})
    cons = parametric_indicial_constraints(fam)
    assert _holds_all(cons, {"M": 0, "λ": 4})
    assert not _holds_all(cons, {"M": 0, "λ": 3})
    assert satisfiable(cons, ["M", "λ"]) is not None


def test_first_order_family_membership():
    lam = Affine(**{"λ": 1})
    for mu, ok in ((Fraction(2), True), (Fraction(3, 2), False), (Fraction(1, 2), False)):
        # x a' + (x + mu - lam) a = -lam x^lam
        fam = IndicialFamily(alpha=lam * -1 + mu, beta=Affine(1), w=-lam, e=lam + 1)
        cons = parametric_indicial_constraints(fam)
        assert any(c.kind == LE for c in cons)
        assert (satisfiable(cons, ["λ"]) is not None) == ok, mu


def test_family_instance_matches_constraints():
    lam = Affine(**{"λ": 1})
    fam = IndicialFamily(alpha=lam * -1 + 2, beta=Affine(1), w=-lam, e=lam + 1)
    for v in range(1, 5):
        sol = rational_solve_linear_ode(fam.instance({"λ": v}))
        assert sol.particular is not None


def test_unsupported_shape():
    with pytest.raises(Unsupported):
        parametric_indicial_constraints(LinearODE(X, X))
    fam = IndicialFamily(alpha=Affine(1), beta=Affine(N=1), w=Affine(1), e=Affine(1))
    with pytest.raises(Unsupported):
        parametric_indicial_constraints(fam)


# --- properties -------------------------------------------------------------

def _linear_product(rnd):
    h = RationalFunction.const(1, rnd.choice([1, 2, -3]))
    for root in rnd.sample([0, 1, -1, 2, -2, 3], rnd.randint(1, 3)):
        h = h * (X - root) ** rnd.choice([-2, -1, 1, 2, 3])
    return h


def test_logderiv_roundtrip():
    rnd = random.Random(3)
    for _ in range(25):
        h = _linear_product(rnd)
        got = logderiv_preimage(h.diff(0) / h)
        assert got is not None and (got / h).is_constant()


@st.composite
def rationals_1(draw):
    num = MultiPoly.univariate([Fraction(draw(st.integers(-3, 3))) for _ in range(draw(st.integers(1, 4)))])
    den = MultiPoly.univariate([Fraction(draw(st.integers(-3, 3))) for _ in range(draw(st.integers(1, 3)))])
    if not den:
        den = MultiPoly.const(1, 1)
    return RationalFunction(num, den)


@settings(max_examples=40, deadline=None)
@given(rationals_1())
def test_antiderivative_roundtrip(g):
    got = rational_antiderivative(g.diff(0))
    assert got is not None and (got - g).is_constant()


def test_residue_sum_at_infinity():
    rnd = random.Random(5)
    for _ in range(20):
        r = ZERO
        for root in rnd.sample([0, 1, -1, 2, -2], 3):
            r = r + RationalFunction.const(1, Fraction(rnd.randint(-4, 4), rnd.choice([1, 2, 3]))) / (X - root)
        if not r:
            continue
        rep = residue_analysis(r)
        # coefficient of 1/x at infinity: lc(num)/lc(den) when deg den = deg num + 1
        at_inf = Fraction(0)
        if r.den.degree() == r.num.degree() + 1:
            at_inf = r.num.leading_coeff() / r.den.leading_coeff()
        total = Fraction(0)
        for res in rep.rational_residues:
            # residue res occurs at every root of gcd(den, num - res den')
            from internality.algebra import poly_gcd
            total += res * poly_gcd(r.den, r.num - r.den.diff(0) * res).degree()
        assert total == at_inf


def _dense(r):
    n = [Fraction(0)] * (r.num.degree() + 1) if r.num else []
    for (e,), c in r.num.terms.items():
        n[e] = c
    d = [Fraction(0)] * (r.den.degree() + 1)
    for (e,), c in r.den.terms.items():
        d[e] = c
    return d_trim(n), d_trim(d)


def test_oracle_agreement_small():
    rnd = random.Random(21)
    for _ in range(15):
        p = RationalFunction.const(1, rnd.randint(-1, 1))
        for f in (X, X - 1, X + 2):
            p = p + RationalFunction.const(1, rnd.choice([0, 1, -1, 2, Fraction(1, 2)])) / f
        y = RationalFunction(MultiPoly.univariate([rnd.randint(-2, 2) for _ in range(3)]) or MultiPoly.const(1, 1))
        y = y / X ** rnd.randint(0, 2)
        q = y.diff(0) + p * y
        sol = rational_solve_linear_ode(LinearODE(p, q))
        part, hom = brute_force_ode(*_dense(p), *_dense(q), max_pole=2, slack=5)
        assert (sol.particular is None) == (part is None)
        assert (sol.homogeneous is not None) == hom
        assert sol.particular is not None


def test_solution_bounds_cover_planted():
    p = uni("(x^2-2*x-2)/((x-1)*(x+2))")
    y = uni("1/(x-1)^2")
    q = y.diff(0) + p * y
    D, n = solution_bounds(LinearODE(p, q))
    assert (MultiPoly.univariate([-1, 1]) ** 2).divides(D)
    assert rational_solve_linear_ode(LinearODE(p, q)).particular == y
