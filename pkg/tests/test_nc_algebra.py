import pytest
from conftest import SPATIAL_ATOMS, expressions
from hypothesis import given, settings

from ncehrenfest.context import (
    CONVENTIONS,
    AlgebraContext,
    Mode,
    NCParameters,
    eta_matrix,
    theta_matrix,
)
from ncehrenfest.expr import OperatorExpr, p, x
from ncehrenfest.nc_algebra import (
    DoubleShiftError,
    algebra_consistency_report,
    bopp_shift,
    effective_planck,
    star_product,
    star_series_terms,
)
from ncehrenfest.operator_ir import canonicalize, commutator
from ncehrenfest.scalar import ZERO, I, sym

HBAR, THETA, ETA = sym("hbar"), sym("Theta"), sym("eta")
DEFAULT = CONVENTIONS["default"]
UNIT = CONVENTIONS["unit"]


def atom(a):
    return OperatorExpr.atom(a)


def ctx_for(conv, params=None):
    return AlgebraContext(Mode.COMMUTATIVE, params or NCParameters(), conv)


def test_effective_planck_default():
    params = NCParameters()
    xi, heff = effective_planck(params, theta_matrix(params, DEFAULT), eta_matrix(params, DEFAULT))
    # Tr[Theta eta] = -2 kappa^2 Theta eta with kappa = 1/2
    assert xi == -THETA * ETA / (HBAR * HBAR * 8)
    assert heff == HBAR + xi * HBAR


def test_effective_planck_commutative():
    params = NCParameters.commutative()
    xi, heff = effective_planck(params, theta_matrix(params, DEFAULT), eta_matrix(params, DEFAULT))
    assert xi == ZERO and heff == HBAR


def test_bopp_identity_when_commutative():
    params = NCParameters.commutative()
    e = OperatorExpr.word(x(1), p(2), x(3))
    assert bopp_shift(e, params, DEFAULT) == e


def test_bopp_images_default():
    params = NCParameters()
    ctx = ctx_for(DEFAULT)
    x1 = canonicalize(bopp_shift(atom(x(1)), params, DEFAULT), ctx)
    assert x1 == atom(x(1)) - OperatorExpr.atom(p(2), THETA / (HBAR * 4))
    p1 = canonicalize(bopp_shift(atom(p(1)), params, DEFAULT), ctx)
    assert p1 == atom(p(1)) + OperatorExpr.atom(x(2), ETA / (HBAR * 4))
    assert bopp_shift(atom(x(3)), params, DEFAULT) == atom(x(3))


@settings(max_examples=60)
@given(expressions(SPATIAL_ATOMS, max_len=2, max_terms=2),
       expressions(SPATIAL_ATOMS, max_len=2, max_terms=2))
def test_bopp_is_a_homomorphism(a, b):
    params = NCParameters()
    ctx = ctx_for(DEFAULT)
    lhs = canonicalize(bopp_shift(a * b, params, DEFAULT), ctx)
    rhs = canonicalize(bopp_shift(a, params, DEFAULT) * bopp_shift(b, params, DEFAULT), ctx)
    assert lhs == rhs


def test_double_shift_rejected():
    params = NCParameters()
    once = bopp_shift(atom(x(1)), params, DEFAULT)
    with pytest.raises(DoubleShiftError):
        bopp_shift(once, params, DEFAULT)


def test_star_order_zero_is_pointwise():
    ctx = ctx_for(DEFAULT)
    assert star_product(atom(x(1)), atom(x(2)), 0, ctx=ctx) == canonicalize(
        OperatorExpr.word(x(1), x(2)), ctx)


def test_star_commutator_of_positions():
    ctx = ctx_for(DEFAULT)
    a = star_product(atom(x(1)), atom(x(2)), 1, ctx=ctx)
    b = star_product(atom(x(2)), atom(x(1)), 1, ctx=ctx)
    assert canonicalize(a - b, ctx) == OperatorExpr.scalar(I * THETA / 2)


@pytest.mark.parametrize("order", [2, 3, 4, 5])
def test_star_higher_orders_vanish_on_linear_functions(order):
    ctx = ctx_for(DEFAULT)
    terms = star_series_terms(atom(x(1)), atom(p(2)) + atom(x(2)), order, "phase_space", ctx)
    assert all(t.is_zero() for t in terms[2:])


@settings(max_examples=40)
@given(expressions(SPATIAL_ATOMS, max_len=1, max_terms=2),
       expressions(SPATIAL_ATOMS, max_len=1, max_terms=2),
       expressions(SPATIAL_ATOMS, max_len=1, max_terms=2))
def test_star_associative_on_low_degree(f, g, h):
    ctx = ctx_for(DEFAULT)
    left = star_product(star_product(f, g, 3, "phase_space", ctx), h, 3, "phase_space", ctx)
    right = star_product(f, star_product(g, h, 3, "phase_space", ctx), 3, "phase_space", ctx)
    assert canonicalize(left - right, ctx).is_zero()


def test_star_rejects_bad_sector():
    with pytest.raises(ValueError):
        star_product(atom(x(1)), atom(x(2)), 1, "time")


@pytest.mark.parametrize("conv", [DEFAULT, UNIT], ids=["default", "unit"])
def test_moyal_matches_bopp_when_denominator_is_2hbar_over_kappa(conv):
    params = NCParameters()
    ctx = ctx_for(conv, params)
    pairs = [(x(1), x(2)), (p(1), p(2)), (x(1), p(1)), (x(2), p(2))]
    for a, b in pairs:
        moyal = canonicalize(star_product(atom(a), atom(b), 1, "phase_space", ctx)
                             - star_product(atom(b), atom(a), 1, "phase_space", ctx), ctx)
        ba = bopp_shift(atom(a), params, conv)
        bb = bopp_shift(atom(b), params, conv)
        bopp = commutator(ba, bb, ctx)
        # the star product only carries the Theta/eta deformation, so the
        # canonical i*hbar is subtracted; the Theta*eta term is second order
        first = bopp.map_coefficients(lambda c: c.truncate(("Theta", "eta"), 1))
        if a.kind != b.kind:
            first = first - OperatorExpr.scalar(I * HBAR)
        assert moyal == canonicalize(first, ctx), (a, b)


def test_audit_default_rows():
    rep = algebra_consistency_report()
    rows = {r.relation: r for r in rep.rows}
    assert len(rep.rows) == 10
    assert rows["[x1, x2]"].derived == I * THETA / 2 and rows["[x1, x2]"].match
    assert rows["[p1, p2]"].match
    assert rows["[x1, p1]"].derived == I * HBAR + I * THETA * ETA / (HBAR * 16)
    assert not rows["[x1, p1]"].match
    assert rows["[x3, p3]"].derived == I * HBAR and not rows["[x3, p3]"].match
    assert rows["xi"].derived == -THETA * ETA / (HBAR * HBAR * 8)
    assert {r.relation for r in rep.findings()} == {"[x1, p1]", "[x2, p2]", "[x3, p3]", "xi"}


def test_audit_unit_convention():
    rows = {r.relation: r for r in algebra_consistency_report(conv=UNIT).rows}
    assert rows["[x1, p1]"].derived == I * HBAR + I * THETA * ETA / (HBAR * 4)
    assert rows["[x1, p1]"].match
    assert rows["[x1, x2]"].derived == I * THETA and not rows["[x1, x2]"].match


def test_audit_commutative_has_no_findings():
    rep = algebra_consistency_report(NCParameters.commutative())
    assert rep.findings() == []


def test_audit_csv_is_deterministic():
    a, b = algebra_consistency_report().to_csv(), algebra_consistency_report().to_csv()
    assert a == b
    assert a.splitlines()[0] == "relation,derived,paper,match"
    assert len(a.splitlines()) == 11


def test_moyal_and_bopp_disagree_for_half_2hbar():
    conv = CONVENTIONS["half-2hbar"]
    params = NCParameters()
    ctx = ctx_for(conv, params)
    moyal = canonicalize(star_product(atom(x(1)), atom(x(2)), 1, ctx=ctx)
                         - star_product(atom(x(2)), atom(x(1)), 1, ctx=ctx), ctx)
    bopp = commutator(bopp_shift(atom(x(1)), params, conv), bopp_shift(atom(x(2)), params, conv), ctx)
    assert moyal == OperatorExpr.scalar(I * THETA / 2)
    assert bopp == OperatorExpr.scalar(I * THETA)
