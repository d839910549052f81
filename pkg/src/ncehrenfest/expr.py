"""Operator atoms and sum-of-products expressions.

Expressions are immutable.  Arithmetic here is *raw*: products concatenate
factor words and like words are merged, but no commutation rule is applied.
Reordering into normal form needs an algebra context and lives in
:mod:`ncehrenfest.operator_ir`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, NamedTuple

from .scalar import ONE, Scalar

POSITION = "x"
MOMENTUM = "p"
FIELD = "field"
ALPHA = "alpha"
BETA = "beta"

_RANK = {POSITION: 1, MOMENTUM: 2, FIELD: 3, ALPHA: 4, BETA: 5}
SPIN_KINDS = frozenset({ALPHA, BETA})


class ExprError(ValueError):
    pass


@dataclass(frozen=True)
class Atom:
    """One non-scalar factor.

    For ``FIELD`` atoms ``axis`` selects the field (0 is the scalar potential,
    1..3 the vector-potential components) and ``partials`` holds the sorted
    coordinate axes it has been differentiated along.
    """

    kind: str
    axis: int = 0
    partials: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in _RANK:
            raise ExprError(f"unknown atom kind {self.kind!r}")
        if self.kind in (POSITION, MOMENTUM, ALPHA) and self.axis not in (1, 2, 3):
            raise ExprError(f"{self.kind} needs an axis in 1..3, got {self.axis}")
        if self.kind == FIELD and self.axis not in (0, 1, 2, 3):
            raise ExprError(f"field axis must be 0..3, got {self.axis}")
        if self.partials and self.kind != FIELD:
            raise ExprError("only field atoms carry partial derivatives")
        if any(j not in (1, 2, 3) for j in self.partials):
            raise ExprError(f"bad derivative axes {self.partials}")
        if tuple(sorted(self.partials)) != self.partials:
            object.__setattr__(self, "partials", tuple(sorted(self.partials)))

    @property
    def key(self) -> tuple:
        if self.kind == FIELD:
            return (_RANK[FIELD], 1 if self.partials else 0, self.axis,
                    len(self.partials), self.partials)
        return (_RANK[self.kind], self.axis)

    @property
    def is_spin(self) -> bool:
        return self.kind in SPIN_KINDS

    @property
    def order(self) -> int:
        return len(self.partials)

    def differentiated(self, axis: int) -> "Atom":
        if self.kind != FIELD:
            raise ExprError(f"cannot form a derivative atom of {self}")
        return Atom(FIELD, self.axis, tuple(sorted(self.partials + (axis,))))

    def base_field(self) -> "Atom":
        return Atom(FIELD, self.axis)

    def plain(self) -> str:
        if self.kind == BETA:
            return "beta"
        if self.kind == FIELD:
            text = "Phi" if self.axis == 0 else f"A[{self.axis}]"
            for j in reversed(self.partials):
                text = f"d[{j}]({text})"
            return text
        return f"{self.kind}[{self.axis}]"

    def latex(self) -> str:
        if self.kind == BETA:
            return r"\beta"
        if self.kind == ALPHA:
            return rf"\alpha_{{{self.axis}}}"
        if self.kind == FIELD:
            base = r"\Phi" if self.axis == 0 else f"A_{{{self.axis}}}"
            ds = "".join(rf"\partial_{{{j}}}" for j in self.partials)
            return f"{ds} {base}" if ds else base
        return f"{self.kind}_{{{self.axis}}}"

    def __repr__(self):
        return self.plain()


def x(i: int) -> Atom:
    return Atom(POSITION, i)


def p(i: int) -> Atom:
    return Atom(MOMENTUM, i)


def alpha(i: int) -> Atom:
    return Atom(ALPHA, i)


def beta() -> Atom:
    return Atom(BETA)


def phi_field() -> Atom:
    return Atom(FIELD, 0)


def a_field(i: int) -> Atom:
    if i not in (1, 2, 3):
        raise ExprError(f"vector potential axis must be 1..3, got {i}")
    return Atom(FIELD, i)


class Term(NamedTuple):
    coeff: Scalar
    factors: tuple[Atom, ...]


def _word_key(word: tuple[Atom, ...]) -> tuple:
    return (len(word), tuple(a.key for a in word))


class OperatorExpr:
    """Immutable linear combination of atom words with :class:`Scalar` coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[Atom, ...], Scalar] | None = None):
        clean = {}
        if terms:
            for word, c in terms.items():
                c = Scalar.const(c) if not isinstance(c, Scalar) else c
                if not c.is_zero():
                    clean[tuple(word)] = c
        self._terms = dict(sorted(clean.items(), key=lambda kv: _word_key(kv[0])))
        self._hash = None

    # ---- constructors ----
    @classmethod
    def zero(cls) -> "OperatorExpr":
        return cls()

    @classmethod
    def scalar(cls, value) -> "OperatorExpr":
        return cls({(): Scalar.const(value)})

    @classmethod
    def atom(cls, a: Atom, coeff=ONE) -> "OperatorExpr":
        return cls({(a,): Scalar.const(coeff)})

    @classmethod
    def word(cls, *atoms: Atom, coeff=ONE) -> "OperatorExpr":
        return cls({tuple(atoms): Scalar.const(coeff)})

    @classmethod
    def from_terms(cls, terms) -> "OperatorExpr":
        acc: dict = {}
        for c, w in terms:
            w = tuple(w)
            acc[w] = acc.get(w, Scalar()) + Scalar.const(c)
        return cls(acc)

    # ---- inspection ----
    def terms(self) -> Iterator[Term]:
        for w, c in self._terms.items():
            yield Term(c, w)

    def as_dict(self) -> dict:
        return dict(self._terms)

    def coefficient(self, word: tuple[Atom, ...]) -> Scalar:
        return self._terms.get(tuple(word), Scalar())

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def atoms(self) -> set[Atom]:
        return {a for w in self._terms for a in w}

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for c in self._terms.values():
            out |= c.symbols()
        return out

    def is_scalar(self) -> bool:
        return all(not w for w in self._terms)

    def scalar_value(self) -> Scalar:
        if not self.is_scalar():
            raise ExprError(f"{self} is not a scalar")
        return self._terms.get((), Scalar())

    # ---- arithmetic (raw, no reordering) ----
    @staticmethod
    def _lift(other) -> "OperatorExpr":
        if isinstance(other, OperatorExpr):
            return other
        if isinstance(other, Atom):
            return OperatorExpr.atom(other)
        if isinstance(other, (Scalar, int, Fraction)):
            return OperatorExpr.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for w, c in other._terms.items():
            acc[w] = acc.get(w, Scalar()) + c
        return OperatorExpr(acc)

    __radd__ = __add__

    def __neg__(self):
        return OperatorExpr({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            s = Scalar.const(other)
            return OperatorExpr({w: c * s for w, c in self._terms.items()})
        other = self._lift(other)
        if other is NotImplemented:
            return other
        acc: dict = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                acc[w] = acc.get(w, Scalar()) + c1 * c2
        return OperatorExpr(acc)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            return self * other
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other * self

    def __truediv__(self, other):
        s = Scalar.const(other)
        return OperatorExpr({w: c / s for w, c in self._terms.items()})

    def map_coefficients(self, fn) -> "OperatorExpr":
        return OperatorExpr({w: fn(c) for w, c in self._terms.items()})

    def subs(self, values: Mapping[str, object]) -> "OperatorExpr":
        return self.map_coefficients(lambda c: c.subs(values))

    def filter(self, predicate) -> "OperatorExpr":
        """Keep the terms for which ``predicate(coeff, factors)`` is true."""
        return OperatorExpr({w: c for w, c in self._terms.items() if predicate(c, w)})

    def split_by_monomial(self, predicate) -> "OperatorExpr":
        """Keep, per word, only the coefficient monomials matching ``predicate(mono)``."""
        out = {}
        for w, c in self._terms.items():
            kept = Scalar({mono: g for mono, g in c.terms if predicate(mono)})
            if kept:
                out[w] = kept
        return OperatorExpr(out)

    def adjoint(self) -> "OperatorExpr":
        """Formal adjoint with every atom self-adjoint (word reversed, coefficient conjugated)."""
        return OperatorExpr({tuple(reversed(w)): c.conjugate() for w, c in self._terms.items()})

    # ---- comparison ----
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = OperatorExpr.scalar(other)
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        from .textio import render
        return f"OperatorExpr({render(self)!r})"

    def __str__(self):
        from .textio import render
        return render(self)


def atom_expr(a: Atom) -> OperatorExpr:
    return OperatorExpr.atom(a)


def vector(atom_fn) -> tuple[OperatorExpr, OperatorExpr, OperatorExpr]:
    """``(atom_fn(1), atom_fn(2), atom_fn(3))`` lifted to expressions."""
    return tuple(OperatorExpr.atom(atom_fn(i)) for i in (1, 2, 3))


def dot(u, v) -> OperatorExpr:
    out = OperatorExpr()
    for a, b in zip(u, v):
        out = out + a * b
    return out


def levi_civita(i: int, j: int, k: int) -> int:
    return (i - j) * (j - k) * (k - i) // 2


def cross(u, v) -> tuple[OperatorExpr, OperatorExpr, OperatorExpr]:
    """Component-wise ``u x v`` keeping the factor order ``u_j v_k``."""
    out = []
    for i in (1, 2, 3):
        comp = OperatorExpr()
        for j in (1, 2, 3):
            for k in (1, 2, 3):
                eps = levi_civita(i, j, k)
                if eps:
                    comp = comp + (u[j - 1] * v[k - 1]) * eps
        out.append(comp)
    return tuple(out)
