from fractions import Fraction

import pytest

from ncehrenfest.scalar import ONE, ZERO, I, Scalar, ScalarError, sym


def test_zero_is_unique():
    assert Scalar.const(0) == ZERO
    assert sym("hbar") - sym("hbar") == ZERO
    assert hash(Scalar.const(0)) == hash(ZERO)
    assert not ZERO


def test_gaussian_arithmetic_is_exact():
    assert I * I == Scalar.const(-1)
    assert (ONE + I) * (ONE - I) == Scalar.const(2)
    assert Scalar.const(1) / 3 * 3 == ONE
    assert (I / 2).conjugate() == -I / 2


def test_laurent_powers():
    h = sym("hbar")
    assert h * sym("hbar", -1) == ONE
    assert (h ** -2) * h ** 2 == ONE
    assert (h ** 3).degree("hbar") == 3


def test_division_by_polynomial_rejected():
    with pytest.raises((ScalarError, ZeroDivisionError)):
        ONE / (sym("hbar") + ONE)


def test_divide_exact():
    a = sym("e") * sym("Theta") * Fraction(1, 4)
    assert a.divide_exact(sym("e")) == sym("Theta") * Fraction(1, 4)
    # monomials always divide a Laurent polynomial
    assert (sym("e") + sym("c")).divide_exact(sym("e")) == ONE + sym("c") / sym("e")
    # polynomial divisors: only monomial quotients are recognised
    s, d = sym("e") + sym("c"), sym("e") - sym("c")
    assert (s * sym("m") * 3).divide_exact(s) == sym("m") * 3
    assert s.divide_exact(d) is None


def test_subs_and_evaluate():
    expr = sym("Theta") * sym("eta") / (sym("hbar") * 4) + sym("hbar")
    assert expr.subs({"Theta": 0}) == sym("hbar")
    assert expr.evaluate({"Theta": 2, "eta": 3, "hbar": 1}) == pytest.approx(2.5)


def test_truncate_drops_high_orders():
    t, e = sym("Theta"), sym("eta")
    s = ONE + t + e + t * e + t * t
    assert s.truncate(("Theta", "eta"), 1) == ONE + t + e


def test_rendering():
    assert (I * sym("hbar")).to_plain() == "i*hbar"
    assert (sym("Theta") * I / 2).to_plain() == "1/2*i*Theta"
    assert ZERO.to_plain() == "0"
    assert "\\hbar" in (I * sym("hbar")).to_latex()


def test_float_constants_become_exact():
    assert Scalar.const(0.5) == Scalar.const(Fraction(1, 2))
    assert Scalar.const(0.1) == Scalar.const(Fraction(1, 10))
