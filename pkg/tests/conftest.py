from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ncehrenfest.context import AlgebraContext, FieldSpec, Mode
from ncehrenfest.expr import OperatorExpr, a_field, alpha, beta, p, phi_field, x
from ncehrenfest.scalar import I, Scalar, sym

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SPATIAL_ATOMS = [x(1), x(2), x(3), p(1), p(2), p(3)]
FIELD_ATOMS = [phi_field(), a_field(1), a_field(2), a_field(3)]
SPIN_ATOMS = [alpha(1), alpha(2), alpha(3), beta()]
ALL_ATOMS = SPATIAL_ATOMS + FIELD_ATOMS + SPIN_ATOMS

coefficients = st.sampled_from([
    Scalar.const(1), Scalar.const(-1), Scalar.const(Fraction(1, 2)), Scalar.const(3), I,
    -I * 2, sym("hbar"), sym("c") * Fraction(2, 3), I * sym("e") * sym("hbar", -1),
])


def words(atoms, max_len):
    return st.lists(st.sampled_from(atoms), min_size=0, max_size=max_len).map(tuple)


def expressions(atoms=ALL_ATOMS, max_len=3, max_terms=3):
    term = st.tuples(coefficients, words(atoms, max_len))
    return st.lists(term, min_size=1, max_size=max_terms).map(
        lambda ts: sum((OperatorExpr({w: c}) for c, w in ts), OperatorExpr()))


@pytest.fixture(scope="session")
def ctx() -> AlgebraContext:
    return AlgebraContext(Mode.COMMUTATIVE, fieldspec=FieldSpec.symbolic())


@pytest.fixture(scope="session")
def nc_ctx() -> AlgebraContext:
    return AlgebraContext(Mode.NC_PHASE_SPACE, fieldspec=FieldSpec.symbolic())


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion, printed after the run
# ---------------------------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
