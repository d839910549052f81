import itertools

import pytest
from conftest import (
    ALL_ATOMS,
    FIELD_ATOMS,
    SPATIAL_ATOMS,
    SPIN_ATOMS,
    expressions,
    words,
)
from hypothesis import given, settings
from hypothesis import strategies as st

from ncehrenfest.context import AlgebraContext, FieldSpec, Mode
from ncehrenfest.expr import (
    ExprError,
    OperatorExpr,
    a_field,
    alpha,
    beta,
    p,
    phi_field,
    x,
)
from ncehrenfest.operator_ir import (
    UnknownAtomPairError,
    anticommutator,
    canonicalize,
    commutator,
    differentiate,
    reduce_spin_word,
)
from ncehrenfest.scalar import ONE, I, Scalar, sym

HBAR = sym("hbar")


def atom(a, k=ONE):
    return OperatorExpr.atom(a, k)


# ---------------------------------------------------------------------------
# worked examples
# ---------------------------------------------------------------------------

def test_p_x_reorders_with_ccr(ctx):
    e = OperatorExpr.word(p(1), x(1))
    assert canonicalize(e, ctx) == OperatorExpr.word(x(1), p(1)) - OperatorExpr.scalar(I * HBAR)


def test_alpha_squares_to_one(ctx):
    for a in SPIN_ATOMS:
        assert canonicalize(OperatorExpr.word(a, a), ctx) == OperatorExpr.scalar(1)


def test_ccr(ctx):
    assert commutator(atom(x(1)), atom(p(1)), ctx) == OperatorExpr.scalar(I * HBAR)
    assert commutator(atom(x(1)), atom(p(2)), ctx).is_zero()
    assert commutator(atom(x(1)), atom(x(2)), ctx).is_zero()


def test_alpha_dot_p_with_position(ctx):
    a_dot_p = sum((OperatorExpr.word(alpha(i), p(i)) for i in (1, 2, 3)), OperatorExpr())
    for k in (1, 2, 3):
        assert commutator(a_dot_p, atom(x(k)), ctx) == atom(alpha(k), -I * HBAR)


@pytest.mark.parametrize("a,b,expected", [
    (alpha(1), alpha(2), 0), (alpha(1), beta(), 0), (alpha(1), alpha(1), 2),
    (beta(), beta(), 2), (alpha(3), alpha(2), 0),
])
def test_dirac_anticommutators(ctx, a, b, expected):
    assert anticommutator(atom(a), atom(b), ctx) == OperatorExpr.scalar(expected)


def test_field_momentum_commutator_is_gradient(ctx):
    c = commutator(atom(a_field(1)), atom(p(2)), ctx)
    assert c == atom(a_field(1).differentiated(2), I * HBAR)


def test_second_derivatives_vanish_for_linear_symbolic_fields(ctx):
    c = commutator(atom(a_field(1).differentiated(2)), atom(p(1)), ctx)
    assert c.is_zero()


def test_nc_modes(nc_ctx):
    space = nc_ctx.with_mode(Mode.NC_SPACE)
    assert commutator(atom(x(1)), atom(x(2)), space) == OperatorExpr.scalar(I * sym("Theta") / 2)
    assert commutator(atom(p(1)), atom(p(2)), space).is_zero()
    assert commutator(atom(p(1)), atom(p(2)), nc_ctx) == OperatorExpr.scalar(I * sym("eta") / 2)
    hbar_eff = HBAR + sym("Theta") * sym("eta") / (HBAR * 4)
    assert commutator(atom(x(2)), atom(p(2)), nc_ctx) == OperatorExpr.scalar(I * hbar_eff)


def test_unknown_pair_is_named(nc_ctx):
    with pytest.raises(UnknownAtomPairError, match="A\\[1\\]"):
        canonicalize(OperatorExpr.word(a_field(1), x(1)), nc_ctx)
    with pytest.raises(UnknownAtomPairError):
        commutator(atom(a_field(1)), atom(p(1)), nc_ctx)


def test_differentiate_symmetric_gauge():
    f = FieldSpec.symmetric_gauge()
    ctx = AlgebraContext(fieldspec=f)
    assert differentiate(atom(a_field(1)), 2, ctx) == OperatorExpr.scalar(-sym("B") / 2)
    assert differentiate(atom(a_field(2)), 1, ctx) == OperatorExpr.scalar(sym("B") / 2)


def test_differentiate_uniform_phi_and_constants():
    ctx = AlgebraContext(fieldspec=FieldSpec.uniform_electric())
    assert differentiate(atom(phi_field()), 1, ctx) == OperatorExpr.scalar(-sym("E1"))
    assert differentiate(OperatorExpr.scalar(sym("B")), 3, ctx).is_zero()


def test_differentiate_momentum_rejected(ctx):
    with pytest.raises(ExprError):
        differentiate(atom(p(1)), 1, ctx)


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

@given(expressions(max_len=6, max_terms=2))
def test_canonicalize_idempotent(ctx, e):
    once = canonicalize(e, ctx)
    assert canonicalize(once, ctx) == once


@settings(max_examples=100)
@given(expressions(), expressions())
def test_canonicalize_is_a_congruence(ctx, a, b):
    lhs = canonicalize(a * b, ctx)
    rhs = canonicalize(canonicalize(a, ctx) * canonicalize(b, ctx), ctx)
    assert lhs == rhs


@settings(max_examples=100)
@given(expressions(), expressions(), expressions(), st.sampled_from([Scalar.const(3), I, HBAR]))
def test_commutator_bilinear(ctx, a, b, c, k):
    assert commutator(a + b, c, ctx) == canonicalize(commutator(a, c, ctx) + commutator(b, c, ctx), ctx)
    assert commutator(a * k, c, ctx) == canonicalize(commutator(a, c, ctx) * k, ctx)


def test_antisymmetry_exhaustive_pairs(ctx):
    for a, b in itertools.product(ALL_ATOMS, repeat=2):
        ea, eb = atom(a), atom(b)
        assert commutator(ea, eb, ctx) == -commutator(eb, ea, ctx)


@settings(max_examples=100)
@given(expressions(max_len=2, max_terms=2), expressions(max_len=2, max_terms=2),
       expressions(max_len=2, max_terms=2))
def test_jacobi(ctx, a, b, c):
    total = (commutator(a, commutator(b, c, ctx), ctx) + commutator(b, commutator(c, a, ctx), ctx)
             + commutator(c, commutator(a, b, ctx), ctx))
    assert canonicalize(total, ctx).is_zero()


def test_jacobi_exhaustive_atom_triples_sample(ctx):
    pool = SPATIAL_ATOMS + FIELD_ATOMS[:2] + SPIN_ATOMS[:2]
    for a, b, c in itertools.combinations(pool, 3):
        ea, eb, ec = atom(a), atom(b), atom(c)
        total = (commutator(ea, commutator(eb, ec, ctx), ctx) + commutator(eb, commutator(ec, ea, ctx), ctx)
                 + commutator(ec, commutator(ea, eb, ctx), ctx))
        assert canonicalize(total, ctx).is_zero(), (a, b, c)


@settings(max_examples=100)
@given(expressions(max_len=2), expressions(max_len=2), expressions(max_len=2))
def test_leibniz(ctx, a, b, c):
    lhs = commutator(a * b, c, ctx)
    rhs = canonicalize(commutator(a, c, ctx) * b + a * commutator(b, c, ctx), ctx)
    assert lhs == rhs


@given(words(SPIN_ATOMS, 6))
def test_dirac_closure(ctx, word):
    e = canonicalize(OperatorExpr({word: ONE}), ctx)
    terms = list(e.terms())
    assert len(terms) == 1
    coeff, factors = terms[0]
    assert coeff in (Scalar.const(1), Scalar.const(-1))
    keys = [f.key for f in factors]
    assert keys == sorted(set(keys)), "basis element is an ordered product of distinct matrices"


def test_sixteen_element_basis(ctx):
    seen = set()
    for n in range(5):
        for word in itertools.product(SPIN_ATOMS, repeat=n):
            _, reduced = reduce_spin_word(word)
            seen.add(reduced)
    assert len(seen) == 16


NC_ATOMS = SPATIAL_ATOMS + SPIN_ATOMS


@settings(max_examples=50)
@given(expressions(NC_ATOMS), expressions(NC_ATOMS))
def test_nc_phase_space_congruence(nc_ctx, a, b):
    lhs = canonicalize(a * b, nc_ctx)
    assert lhs == canonicalize(canonicalize(a, nc_ctx) * canonicalize(b, nc_ctx), nc_ctx)

