"""Exact scalar coefficients for the symbolic kernel.

A :class:`Scalar` is a Laurent polynomial in a fixed set of named physical
constants whose coefficients are exact Gaussian rationals (``a + b*i`` with
``a, b`` rational).  Nothing here ever touches floating point until
:meth:`Scalar.evaluate` is called.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

SYMBOLS: tuple[str, ...] = (
    "hbar", "c", "e", "m", "Theta", "eta", "B", "E1", "E2", "E3",
)
_INDEX = {name: k for k, name in enumerate(SYMBOLS)}
_ZERO_MONO = (0,) * len(SYMBOLS)

Number = Union[int, Fraction]
Gauss = tuple  # (Fraction re, Fraction im)


class ScalarError(ValueError):
    pass


def _gmul(a: Gauss, b: Gauss) -> Gauss:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gadd(a: Gauss, b: Gauss) -> Gauss:
    return (a[0] + b[0], a[1] + b[1])


def _gdiv(a: Gauss, b: Gauss) -> Gauss:
    den = b[0] * b[0] + b[1] * b[1]
    if den == 0:
        raise ZeroDivisionError("division by zero scalar")
    return ((a[0] * b[0] + a[1] * b[1]) / den, (a[1] * b[0] - a[0] * b[1]) / den)


def _is_zero(g: Gauss) -> bool:
    return g[0] == 0 and g[1] == 0


class Scalar:
    """Immutable exact Laurent polynomial over :data:`SYMBOLS`."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, Gauss] | None = None):
        clean = {}
        if terms:
            for mono, g in terms.items():
                if not _is_zero(g):
                    clean[mono] = (Fraction(g[0]), Fraction(g[1]))
        self._terms = tuple(sorted(clean.items()))
        self._hash = None

    # ---- constructors ----
    @classmethod
    def const(cls, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, complex):
            raise ScalarError("floating-point complex values are not exact")
        if isinstance(value, float):
            value = Fraction(value).limit_denominator(10**12)
        return cls({_ZERO_MONO: (Fraction(value), Fraction(0))})

    @classmethod
    def gauss(cls, re, im) -> "Scalar":
        return cls({_ZERO_MONO: (Fraction(re), Fraction(im))})

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "Scalar":
        if name not in _INDEX:
            raise ScalarError(f"unknown symbol {name!r}")
        mono = list(_ZERO_MONO)
        mono[_INDEX[name]] = power
        return cls({tuple(mono): (Fraction(1), Fraction(0))})

    # ---- inspection ----
    @property
    def terms(self) -> tuple:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_number(self) -> bool:
        return self.is_zero() or (self.is_monomial() and self._terms[0][0] == _ZERO_MONO)

    def number(self) -> Gauss:
        if self.is_zero():
            return (Fraction(0), Fraction(0))
        if not self.is_number():
            raise ScalarError(f"{self} is not a plain number")
        return self._terms[0][1]

    def symbols(self) -> set[str]:
        out = set()
        for mono, _ in self._terms:
            out.update(SYMBOLS[k] for k, p in enumerate(mono) if p)
        return out

    def degree(self, name: str) -> int:
        """Largest power of ``name`` over all monomials (0 for the zero scalar)."""
        k = _INDEX[name]
        return max((mono[k] for mono, _ in self._terms), default=0)

    def min_degree(self, name: str) -> int:
        k = _INDEX[name]
        return min((mono[k] for mono, _ in self._terms), default=0)

    # ---- arithmetic ----
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction, float)):
            return Scalar.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for mono, g in other._terms:
            acc[mono] = _gadd(acc.get(mono, (Fraction(0), Fraction(0))), g)
        return Scalar(acc)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({mono: (-g[0], -g[1]) for mono, g in self._terms})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict = {}
        for m1, g1 in self._terms:
            for m2, g2 in other._terms:
                mono = tuple(a + b for a, b in zip(m1, m2))
                acc[mono] = _gadd(acc.get(mono, (Fraction(0), Fraction(0))), _gmul(g1, g2))
        return Scalar(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.is_monomial():
            raise ScalarError(f"can only divide by a monomial, got {other}")
        (m2, g2), = other._terms
        return Scalar({
            tuple(a - b for a, b in zip(m1, m2)): _gdiv(g1, g2)
            for m1, g1 in self._terms
        })

    def __rtruediv__(self, other):
        return Scalar.const(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ScalarError("only integer powers are exact")
        if n < 0:
            return Scalar.const(1) / (self ** (-n))
        out = Scalar.const(1)
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self) -> "Scalar":
        """Complex conjugate, treating every symbol as real."""
        return Scalar({mono: (g[0], -g[1]) for mono, g in self._terms})

    def divide_exact(self, other: "Scalar") -> "Scalar | None":
        """Return ``q`` with ``q * other == self`` or None if no monomial-only quotient exists."""
        if other.is_zero():
            return None
        if other.is_monomial():
            return self / other
        if self.is_zero():
            return Scalar()
        # single-candidate check: quotient of leading terms must reproduce self
        q = Scalar(dict([self._terms[0]])) / Scalar(dict([other._terms[0]]))
        return q if q * other == self else None

    # ---- substitution ----
    def subs(self, values: Mapping[str, "Scalar | Number"]) -> "Scalar":
        """Substitute exact values for symbols; negative powers need non-zero values."""
        out = Scalar()
        for mono, g in self._terms:
            term = Scalar({tuple(0 if SYMBOLS[k] in values else p for k, p in enumerate(mono)): g})
            for k, p in enumerate(mono):
                name = SYMBOLS[k]
                if p and name in values:
                    val = Scalar.const(values[name])
                    if val.is_zero() and p > 0:
                        term = Scalar()
                        break
                    term = term * val ** p
            out = out + term
        return out

    def truncate(self, names: Iterable[str], max_total: int) -> "Scalar":
        """Drop monomials whose summed degree in ``names`` exceeds ``max_total``."""
        idx = [_INDEX[n] for n in names]
        return Scalar({
            mono: g for mono, g in self._terms
            if sum(mono[k] for k in idx) <= max_total
        })

    def evaluate(self, values: Mapping[str, complex | float]) -> complex:
        total = 0j
        for mono, g in self._terms:
            v = complex(float(g[0]), float(g[1]))
            for k, p in enumerate(mono):
                if p:
                    name = SYMBOLS[k]
                    if name not in values:
                        raise KeyError(name)
                    v *= complex(values[name]) ** p
            total += v
        return total

    # ---- comparison / hashing ----
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __repr__(self):
        return f"Scalar({self.to_plain()!r})"

    def __str__(self):
        return self.to_plain()

    # ---- rendering ----
    def _monomial_parts(self, mono, latex: bool) -> list[str]:
        parts = []
        for k, p in enumerate(mono):
            if not p:
                continue
            name = SYMBOLS[k]
            if latex:
                base = _LATEX_NAMES[name]
                parts.append(base if p == 1 else f"{base}^{{{p}}}")
            else:
                parts.append(name if p == 1 else f"{name}^{p}")
        return parts

    @staticmethod
    def _number_plain(g: Gauss) -> tuple[str, str]:
        """(sign, magnitude text) for a Gaussian rational that is purely real or imaginary."""
        re, im = g
        if im == 0:
            sign = "-" if re < 0 else "+"
            return sign, _frac_plain(abs(re)), ""
        if re == 0:
            sign = "-" if im < 0 else "+"
            return sign, _frac_plain(abs(im)), "i"
        return "+", f"({_frac_plain(re)} + {_frac_plain(im)}*i)" if im > 0 else \
            f"({_frac_plain(re)} - {_frac_plain(-im)}*i)", ""

    def monomial_strings(self, latex: bool = False) -> list[tuple[str, str]]:
        """Rendered ``(sign, body)`` per monomial; body never carries the sign."""
        out = []
        for mono, g in self._terms:
            sign, mag, unit = self._number_plain(g)
            syms = self._monomial_parts(mono, latex)
            if latex:
                if unit:
                    syms = ["i"] + syms
                if mag.startswith("("):
                    mag = mag.replace("*i", "i")
                num = _frac_latex(mag)
                pieces = ([] if num == "1" and syms else [num]) + syms
                out.append((sign, " ".join(pieces)))
            else:
                if unit:
                    syms = ["i"] + syms
                pieces = ([] if mag == "1" and syms else [mag]) + syms
                out.append((sign, "*".join(pieces)))
        return out

    def to_plain(self) -> str:
        if self.is_zero():
            return "0"
        return _join_signed(self.monomial_strings())

    def to_latex(self) -> str:
        if self.is_zero():
            return "0"
        return _join_signed(self.monomial_strings(latex=True))


_LATEX_NAMES = {
    "hbar": r"\hbar", "c": "c", "e": "e", "m": "m", "Theta": r"\Theta",
    "eta": r"\eta", "B": "B", "E1": "E_{1}", "E2": "E_{2}", "E3": "E_{3}",
}


def _frac_plain(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _frac_latex(text: str) -> str:
    if "/" in text and not text.startswith("("):
        num, den = text.split("/")
        return rf"\frac{{{num}}}{{{den}}}"
    return text


def _join_signed(parts: list[tuple[str, str]]) -> str:
    out = ""
    for k, (sign, body) in enumerate(parts):
        if k == 0:
            out = body if sign == "+" else f"-{body}"
        else:
            out += f" {sign} {body}"
    return out


ZERO = Scalar()
ONE = Scalar.const(1)
I = Scalar.gauss(0, 1)


def sym(name: str, power: int = 1) -> Scalar:
    return Scalar.symbol(name, power)
