import math
from fractions import Fraction

import pytest

from bpcalc.arith import padic_valuation
from bpcalc.errors import DegreeError, TruncationError
from bpcalc.grading import Context, Poly, monomials_up_to, reduce_mod
from bpcalc.hopf import (
    OperationCombo,
    OperationExpr,
    TPoly,
    coassociativity_check,
    compose_pair,
    eta_r,
    eta_r_m,
    pair,
    pair_word,
    product_in_basis,
    psi,
    psi_t,
    r_action,
    r_action_table,
    verify_lemma_7_1,
)


@pytest.fixture(scope="module")
def ctx7():
    return Context(prime=7)


@pytest.fixture(scope="module")
def ctx5():
    return Context(prime=5)


def test_psi_t1_corrected_by_grading(ctx7):
    # t1 (x) 1 + 1 (x) t1; the other diagonal shape is impossible by degree
    pt1 = psi_t(ctx7, 1)
    assert pt1.coeff((1,), ()) == 1
    assert pt1.coeff((), (1,)) == 1
    assert len(pt1.terms) == 2


def test_psi_t2_formula(ctx5, ctx7):
    for ctx in (ctx5, ctx7):
        p = ctx.prime
        pt2 = psi_t(ctx, 2)
        assert pt2.coeff((0, 1), ()) == 1
        assert pt2.coeff((), (0, 1)) == 1
        assert pt2.coeff((1,), (p,)) == 1
        for i in range(1, p):
            j = p - i
            expected = -Fraction(
                math.factorial(p - 1), math.factorial(i) * math.factorial(j)
            )
            assert pt2.coeff((i,), (j,)) == expected * ctx.v(1)
        assert len(pt2.terms) == 3 + (p - 1)


def test_psi_t3_key_coefficient(ctx5, ctx7):
    # the coefficient of t1^p (x) t1^(p^2-p) is -v2 modulo p^3 * m2
    for ctx in (ctx5, ctx7):
        p = ctx.prime
        c = psi_t(ctx, 3).coeff((p,), (p * p - p,))
        diff = ctx.to_m_basis(c) + ctx.to_m_basis(ctx.v(2))
        assert set(diff.terms) <= {(0, 1)}
        assert all(
            padic_valuation(Fraction(v), p) >= 3 for v in diff.terms.values()
        )


def test_psi_t4_at_small_prime():
    # the recursion extends to t4 within the default truncation; the small
    # prime keeps the expansion tractable
    ctx = Context(prime=3)
    pt4 = psi_t(ctx, 4)
    assert pt4.coeff((0, 0, 0, 1), ()) == 1
    assert pt4.coeff((), (0, 0, 0, 1)) == 1
    assert coassociativity_check(ctx, 3)


def test_psi_truncation_error(ctx7):
    with pytest.raises(TruncationError):
        psi_t(ctx7, 5)


def test_psi_multiplicative(ctx7):
    pt = psi(TPoly.t(ctx7, 1, 2))
    assert pt.coeff((2,), ()) == 1
    assert pt.coeff((1,), (1,)) == 2
    assert pt.coeff((), (2,)) == 1
    assert psi(TPoly.unit(ctx7)).coeff((), ()) == 1
    # left coefficients pass through unchanged
    x = TPoly.monomial(ctx7, (1,), coeff=ctx7.v(3))
    assert psi(x).coeff((1,), ()) == ctx7.v(3)


def test_psi_t1t2_term_feeds_pairing_table(ctx7):
    # the term with right factor t1^p and left factor -c*v1*t1 has c = 1
    x = TPoly.monomial(ctx7, (1, 1))
    assert psi(x).coeff((1,), (7,)) == -ctx7.v(1)


def test_coassociativity_spot_check(ctx5, ctx7):
    for ctx in (ctx5, ctx7):
        for k in (1, 2, 3):
            assert coassociativity_check(ctx, k)


def test_eta_r_values(ctx7):
    p = ctx7.prime
    assert eta_r(ctx7, ctx7.v(1)).terms == {
        (): ctx7.v(1),
        (1,): Poly.constant(ctx7.V, p),
    }
    unit = eta_r(ctx7, Poly.constant(ctx7.V, 1))
    assert unit.terms == {(): Poly.constant(ctx7.V, 1)}
    # rational variant on m2: m2 + m1 t1^p + t2
    em2 = eta_r_m(ctx7, ctx7.m(2))
    assert em2.terms == {
        (): ctx7.m(2),
        (p,): ctx7.m(1),
        (0, 1): Poly.constant(ctx7.M, 1),
    }


def test_eta_r_is_ring_homomorphism(ctx7):
    x, y = ctx7.v(1), ctx7.v(2)
    assert eta_r(ctx7, x * y) == eta_r(ctx7, x) * eta_r(ctx7, y)
    assert eta_r(ctx7, x + y) == eta_r(ctx7, x) + eta_r(ctx7, y)


def test_pairing_dual_basis(ctx7):
    r01 = OperationCombo.basis(ctx7, 0, 1)
    assert pair(r01, TPoly.t(ctx7, 2)) == 1
    assert pair(r01, TPoly.monomial(ctx7, (0, 1), coeff=ctx7.v(3))) == ctx7.v(3)
    r1 = OperationCombo.basis(ctx7, 1)
    assert pair(r1, TPoly.monomial(ctx7, (7,))).is_zero()


def test_compose_pair_table_values(ctx5, ctx7):
    for ctx in (ctx5, ctx7):
        p = ctx.prime
        r1 = OperationCombo.basis(ctx, 1)
        rp = OperationCombo.basis(ctx, p)
        t1t2 = TPoly.monomial(ctx, (1, 1))
        assert compose_pair(r1, rp, t1t2) == -ctx.v(1)
        assert compose_pair(rp, r1, t1t2) == -ctx.v(1)
        t1p1 = TPoly.monomial(ctx, (p + 1,))
        assert compose_pair(r1, rp, t1p1) == p + 1
        assert compose_pair(rp, r1, t1p1) == p + 1
        # counit behavior of the identity operation
        r0 = OperationCombo.basis(ctx, 0)
        a = OperationCombo(ctx, {(1,): ctx.v(2), (0, 1): Poly.constant(ctx.V, 3)})
        x = TPoly.monomial(ctx, (1, 1))
        assert compose_pair(r0, a, x) == pair(a, x)
        assert compose_pair(a, r0, x) == pair(a, x)


def test_product_in_basis_commutator(ctx7):
    p = ctx7.prime
    bound = ctx7.qdeg(2 * p + 4)
    r1 = OperationCombo.basis(ctx7, 1)
    rp = OperationCombo.basis(ctx7, p)
    r01 = OperationCombo.basis(ctx7, 0, 1)
    commutator = product_in_basis(r1, rp, bound) - product_in_basis(rp, r1, bound)
    assert commutator == r01
    zero = product_in_basis(r1, r01, bound) - product_in_basis(r01, r1, bound)
    assert not zero.terms


def test_duality_of_product_and_pairing(ctx7):
    p = ctx7.prime
    bound = ctx7.qdeg(10)
    r1 = OperationCombo.basis(ctx7, 1)
    rp = OperationCombo.basis(ctx7, p)
    prod = product_in_basis(r1, rp, bound)
    for mono in monomials_up_to(bound, ctx7.T):
        x = TPoly.monomial(ctx7, mono.exps)
        assert pair(prod, x) == compose_pair(r1, rp, x)


def test_pair_word_associativity_sample(ctx7):
    p = ctx7.prime
    bound = ctx7.qdeg(2 * p + 4)
    r1 = OperationCombo.basis(ctx7, 1)
    rp = OperationCombo.basis(ctx7, p)
    ab = product_in_basis(rp, r1, bound)
    bc = product_in_basis(r1, rp, bound)
    for mono in monomials_up_to(bound, ctx7.T):
        x = TPoly.monomial(ctx7, mono.exps)
        left_assoc = compose_pair(ab, rp, x)  # (Rp R1) Rp
        nested = pair_word(ctx7, ((p,), (1,), (p,)), mono.exps)
        right_assoc = compose_pair(rp, bc, x)  # Rp (R1 Rp)
        assert left_assoc == nested == right_assoc


def test_r_action_examples(ctx5, ctx7):
    for ctx in (ctx5, ctx7):
        p = ctx.prime
        assert r_action(ctx, (1,), ctx.v(1)) == p + Poly.zero(ctx.V)
        assert r_action(ctx, (1,), ctx.v(2)) == -(p + 1) * ctx.v(1) ** p
        expected = (1 - (p + 1) * p ** (p - 1)) * ctx.v(1)
        assert r_action(ctx, (p,), ctx.v(2)) == expected


def test_r_action_cartan_formula(ctx7):
    # R_I(xy) = sum_{J+K=I} R_J(x) R_K(y) on a sample
    p = ctx7.prime
    x, y = ctx7.v(1) ** 2, ctx7.v(2)
    I = (3,)
    lhs = r_action(ctx7, I, x * y)
    rhs = Poly.zero(ctx7.V)
    for j in range(I[0] + 1):
        rhs = rhs + r_action(ctx7, (j,), x) * r_action(ctx7, (I[0] - j,), y)
    assert lhs == rhs


def test_r_action_matches_eta_r(ctx7):
    for x in (ctx7.v(2), ctx7.v(1) ** 3 * ctx7.v(2), ctx7.v(3)):
        table = r_action_table(ctx7, x)
        eta = eta_r(ctx7, x)
        assert table == dict(eta.terms)


def test_r_action_identity_and_additivity(ctx7):
    x = 3 * ctx7.v(2) - ctx7.v(1) ** 8
    assert r_action(ctx7, (), x) == x
    y = ctx7.v(1) ** 8
    assert r_action(ctx7, (1,), x + y) == r_action(ctx7, (1,), x) + r_action(
        ctx7, (1,), y
    )


def test_verify_relations_both_primes(ctx5, ctx7):
    for ctx in (ctx5, ctx7):
        report = verify_lemma_7_1(ctx)
        assert report.passed, [r.id for r in report.failures()]


def test_mutated_relation_fails(ctx5):
    # negative control: R1 Rp - Rp R1 = 2 R[0,1] leaves a residual at t2
    p = ctx5.prime
    E = OperationExpr.word
    mutated = (
        E(ctx5, (1,), (p,))
        - E(ctx5, (p,), (1,))
        - E(ctx5, (0, 1)).scale(2)
    )
    residual = mutated.pair_monomial((0, 1))
    assert residual == Poly.constant(ctx5.V, -1)


def test_operation_expr_degrees(ctx7):
    p, q = ctx7.prime, ctx7.q
    E = OperationExpr.word
    assert E(ctx7, (1,), (p,)).degree() == (p + 1) * q
    with pytest.raises(DegreeError):
        (E(ctx7, (1,)) + E(ctx7, (p,))).degree()


def test_koszul_degrees_all_even(ctx7):
    # every pairing input in play has even degree; odd input is rejected
    bound = ctx7.qdeg(10)
    for mono in monomials_up_to(bound, ctx7.T):
        assert mono.degree % 2 == 0


def test_tensor_and_tpoly_literals(ctx7):
    from bpcalc.hopf import parse_tensor, parse_tpoly

    x = parse_tpoly("v3*t2 + t1^2 - 7*t1", ctx7)
    assert x.coeff((0, 1)) == ctx7.v(3)
    assert parse_tpoly(str(x), ctx7) == x
    t = parse_tensor("t1^2(x)t2 + (-2*v1)*t1(x)t1^4 - 1(x)t2", ctx7)
    assert t.coeff((1,), (4,)) == -2 * ctx7.v(1)
    assert parse_tensor(str(t), ctx7) == t
    # the diagonal's own printout parses back to itself
    pt2 = psi_t(ctx7, 2)
    assert parse_tensor(str(pt2), ctx7) == pt2
    with pytest.raises(Exception):
        parse_tensor("t1 + t2", ctx7)  # missing (x) separator


def test_binomial_expansion_in_diagonal(ctx7):
    # right-factor t1^p coefficient of psi(t1^(p+1)) is (p+1) t1
    p = ctx7.prime
    diag = psi(TPoly.t(ctx7, 1, p + 1))
    assert diag.coeff((1,), (p,)) == p + 1
