"""Parameter bundles shared by every module: NC parameters, conventions, fields."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .expr import FIELD, POSITION, Atom, ExprError, OperatorExpr, x
from .scalar import ZERO, Scalar, sym


class Mode(str, enum.Enum):
    COMMUTATIVE = "commutative"
    NC_SPACE = "nc-space"
    NC_PHASE_SPACE = "nc-phase-space"


@dataclass(frozen=True)
class NCParameters:
    """Noncommutativity strengths (along the third axis), hbar and Bopp scale factors.

    ``theta`` and ``eta`` default to the free symbols ``Theta`` and ``eta``;
    pass ``0`` for the commutative theory.  ``b_scale`` defaults to ``1/a_scale``.
    """

    theta: Scalar = field(default_factory=lambda: sym("Theta"))
    eta: Scalar = field(default_factory=lambda: sym("eta"))
    hbar: Scalar = field(default_factory=lambda: sym("hbar"))
    a_scale: Fraction = Fraction(1)
    b_scale: Fraction | None = None

    def __post_init__(self):
        for name in ("theta", "eta", "hbar"):
            object.__setattr__(self, name, Scalar.const(getattr(self, name)))
        object.__setattr__(self, "a_scale", Fraction(self.a_scale))
        if self.b_scale is None:
            object.__setattr__(self, "b_scale", 1 / self.a_scale)
        else:
            object.__setattr__(self, "b_scale", Fraction(self.b_scale))
        for name in ("theta", "eta"):
            val = getattr(self, name)
            if val != val.conjugate():
                raise ValueError(f"{name} must be real, got {val}")
        if self.hbar.is_zero():
            raise ValueError("hbar must be non-zero")

    @classmethod
    def commutative(cls, hbar=None) -> "NCParameters":
        return cls(theta=ZERO, eta=ZERO, hbar=sym("hbar") if hbar is None else hbar)

    @property
    def theta_vec(self) -> tuple[Scalar, Scalar, Scalar]:
        return (ZERO, ZERO, self.theta)

    @property
    def eta_vec(self) -> tuple[Scalar, Scalar, Scalar]:
        return (ZERO, ZERO, self.eta)

    @property
    def is_commutative(self) -> bool:
        return self.theta.is_zero() and self.eta.is_zero()


@dataclass(frozen=True)
class ConventionConfig:
    """Coefficient conventions left open by the source formulas.

    ``theta_matrix_factor`` and ``eta_matrix_factor`` embed the NC vectors as
    antisymmetric matrices ``M_ab = factor * eps_abl v_l``; the Bopp shift
    divides by ``bopp_factor * hbar``.
    """

    theta_matrix_factor: Fraction = Fraction(1, 2)
    eta_matrix_factor: Fraction = Fraction(1, 2)
    bopp_factor: int = 4
    name: str = "default"

    def __post_init__(self):
        object.__setattr__(self, "theta_matrix_factor", Fraction(self.theta_matrix_factor))
        object.__setattr__(self, "eta_matrix_factor", Fraction(self.eta_matrix_factor))
        if self.theta_matrix_factor not in (Fraction(1, 2), Fraction(1)):
            raise ValueError("theta_matrix_factor must be 1/2 or 1")
        if self.eta_matrix_factor not in (Fraction(1, 2), Fraction(1)):
            raise ValueError("eta_matrix_factor must be 1/2 or 1")
        if self.bopp_factor not in (2, 4):
            raise ValueError("bopp_factor must be 2 or 4 (denominator 2*hbar or 4*hbar)")

    def bopp_denominator(self, hbar: Scalar) -> Scalar:
        return hbar * self.bopp_factor


CONVENTIONS = {
    "default": ConventionConfig(),
    "unit": ConventionConfig(Fraction(1), Fraction(1), 2, name="unit"),
    "half-2hbar": ConventionConfig(Fraction(1, 2), Fraction(1, 2), 2, name="half-2hbar"),
}


def convention(name: str) -> ConventionConfig:
    try:
        return CONVENTIONS[name]
    except KeyError:
        raise ValueError(f"unknown convention {name!r}; choose from {sorted(CONVENTIONS)}") from None


def _position_degree(poly: OperatorExpr) -> int:
    return max((len(w) for w in poly.as_dict()), default=0)


def _poly_partial(poly: OperatorExpr, axis: int) -> OperatorExpr:
    """Derivative of a polynomial in commuting position atoms."""
    out = OperatorExpr()
    for c, word in poly.terms():
        for k, a in enumerate(word):
            if a == x(axis):
                out = out + OperatorExpr({word[:k] + word[k + 1:]: c})
    return _sort_positions(out)


def _sort_positions(poly: OperatorExpr) -> OperatorExpr:
    acc: dict = {}
    for c, word in poly.terms():
        w = tuple(sorted(word, key=lambda a: a.key))
        acc[w] = acc.get(w, ZERO) + c
    return OperatorExpr(acc)


@dataclass(frozen=True)
class FieldSpec:
    """Static electromagnetic potentials with polynomial coordinate dependence.

    ``vector_potential`` and ``scalar_potential`` are polynomials in position
    atoms.  When both are ``None`` the field is symbolic: field atoms stay
    unevaluated and derivative atoms vanish only beyond ``max_degree``.
    """

    vector_potential: tuple[OperatorExpr, OperatorExpr, OperatorExpr] | None = None
    scalar_potential: OperatorExpr | None = None
    max_degree: int = 1
    label: str = "symbolic"
    static: bool = True

    def __post_init__(self):
        if (self.vector_potential is None) != (self.scalar_potential is None):
            raise ValueError("give both potentials or neither")
        if not self.static:
            raise ValueError("only static fields are supported")
        if self.vector_potential is not None:
            if len(self.vector_potential) != 3:
                raise ValueError("vector potential needs three components")
            polys = tuple(_sort_positions(OperatorExpr._lift(a)) for a in self.vector_potential)
            object.__setattr__(self, "vector_potential", polys)
            object.__setattr__(self, "scalar_potential",
                               _sort_positions(OperatorExpr._lift(self.scalar_potential)))
            for poly in self.polynomials():
                for atom in poly.atoms():
                    if atom.kind != POSITION:
                        raise ExprError(f"field polynomials may only contain positions, found {atom}")
                if _position_degree(poly) > self.max_degree:
                    raise ValueError(
                        f"field polynomial {poly} exceeds max_degree={self.max_degree}")

    # ---- constructors ----
    @classmethod
    def symbolic(cls, max_degree: int = 1) -> "FieldSpec":
        return cls(max_degree=max_degree)

    @classmethod
    def free(cls) -> "FieldSpec":
        z = OperatorExpr()
        return cls((z, z, z), z, max_degree=1, label="free")

    @classmethod
    def symmetric_gauge(cls, b=None, e_field=None) -> "FieldSpec":
        """Uniform magnetic field ``b`` along axis 3 plus an optional uniform electric field.

        ``A = (-b x2 / 2, b x1 / 2, 0)`` and ``Phi = -E . r``; ``e_field`` defaults
        to zero, pass :data:`E_SYMBOLS` for a symbolic uniform field.
        """
        b = sym("B") if b is None else Scalar.const(b)
        half = Fraction(1, 2)
        a_vec = (OperatorExpr.atom(x(2), -b * half), OperatorExpr.atom(x(1), b * half), OperatorExpr())
        phi = _uniform_phi((0, 0, 0) if e_field is None else e_field)
        return cls(a_vec, phi, max_degree=1, label="symmetric-gauge")

    @classmethod
    def uniform_electric(cls, e_field=None) -> "FieldSpec":
        z = OperatorExpr()
        return cls((z, z, z), _uniform_phi(e_field), max_degree=1, label="uniform-electric")

    @classmethod
    def custom(cls, vector_potential, scalar_potential, max_degree: int = 2) -> "FieldSpec":
        return cls(tuple(vector_potential), scalar_potential, max_degree=max_degree, label="custom")

    # ---- queries ----
    @property
    def is_concrete(self) -> bool:
        return self.vector_potential is not None

    def polynomials(self) -> tuple[OperatorExpr, ...]:
        if not self.is_concrete:
            return ()
        return (self.scalar_potential,) + tuple(self.vector_potential)

    def degree(self) -> int:
        if not self.is_concrete:
            return self.max_degree
        return max(_position_degree(p) for p in self.polynomials())

    def polynomial(self, atom: Atom) -> OperatorExpr | None:
        """Explicit polynomial of a field atom, or None for symbolic fields."""
        if atom.kind != FIELD:
            raise ExprError(f"{atom} is not a field atom")
        if not self.is_concrete:
            return None
        poly = self.scalar_potential if atom.axis == 0 else self.vector_potential[atom.axis - 1]
        for j in atom.partials:
            poly = _poly_partial(poly, j)
        return poly

    def vanishes(self, atom: Atom) -> bool:
        if not self.is_concrete:
            return atom.order > self.max_degree
        return self.polynomial(atom).is_zero()

    def magnetic_field(self) -> tuple[OperatorExpr, OperatorExpr, OperatorExpr]:
        """``curl A`` as position polynomials."""
        if not self.is_concrete:
            raise ValueError("curl needs a concrete vector potential")
        a = self.vector_potential
        d = _poly_partial
        return (d(a[2], 2) - d(a[1], 3), d(a[0], 3) - d(a[2], 1), d(a[1], 1) - d(a[0], 2))

    def electric_field(self) -> tuple[OperatorExpr, OperatorExpr, OperatorExpr]:
        """``-grad Phi`` (static fields have no time-derivative part)."""
        if not self.is_concrete:
            raise ValueError("E needs a concrete scalar potential")
        return tuple(-_poly_partial(self.scalar_potential, j) for j in (1, 2, 3))

    def with_label(self, label: str) -> "FieldSpec":
        return replace(self, label=label)


E_SYMBOLS = (sym("E1"), sym("E2"), sym("E3"))


def _uniform_phi(e_field) -> OperatorExpr:
    if e_field is None:
        e_field = (sym("E1"), sym("E2"), sym("E3"))
    phi = OperatorExpr()
    for j, ej in enumerate(e_field, start=1):
        phi = phi + OperatorExpr.atom(x(j), -Scalar.const(ej))
    return phi


@dataclass(frozen=True)
class AlgebraContext:
    """Everything canonicalization needs: which commutation table, parameters, field."""

    mode: Mode = Mode.COMMUTATIVE
    params: NCParameters = field(default_factory=NCParameters)
    convention: ConventionConfig = field(default_factory=ConventionConfig)
    fieldspec: FieldSpec = field(default_factory=FieldSpec.symbolic)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def hbar(self) -> Scalar:
        return self.params.hbar

    def with_field(self, f: FieldSpec) -> "AlgebraContext":
        return replace(self, fieldspec=f)

    def with_mode(self, mode: Mode) -> "AlgebraContext":
        return replace(self, mode=Mode(mode))

    def with_params(self, params: NCParameters) -> "AlgebraContext":
        return replace(self, params=params)


def theta_matrix(params: NCParameters, conv: ConventionConfig) -> tuple[tuple[Scalar, ...], ...]:
    return _embed(params.theta_vec, conv.theta_matrix_factor)


def eta_matrix(params: NCParameters, conv: ConventionConfig) -> tuple[tuple[Scalar, ...], ...]:
    return _embed(params.eta_vec, conv.eta_matrix_factor)


def _embed(vec, factor: Fraction):
    from .expr import levi_civita
    return tuple(
        tuple(sum((vec[l - 1] * (factor * levi_civita(a, b, l)) for l in (1, 2, 3)), ZERO)
              for b in (1, 2, 3))
        for a in (1, 2, 3)
    )
