"""Symbolic operator algebra: normal ordering, commutators, derivatives.

Canonical factor order is

    positions < momenta < fields (Phi < A1 < A2 < A3 < derivatives) < alpha < beta

Spatial atoms are reordered with the base commutators of the active
:class:`~ncehrenfest.context.AlgebraContext`; Dirac matrices commute with
every spatial atom and are reduced separately to one of the 16 ordered
products of ``{alpha1, alpha2, alpha3, beta}``.
"""
from __future__ import annotations

from functools import lru_cache

from .context import AlgebraContext, Mode
from .expr import (
    FIELD, MOMENTUM, POSITION, Atom, ExprError, OperatorExpr, levi_civita,
    p as momentum_atom,
)
from .scalar import I, ONE, ZERO, Scalar

__all__ = [
    "UnknownAtomPairError", "canonicalize", "commutator", "anticommutator",
    "commutator_raw", "differentiate", "expand_fields", "base_commutator",
    "function_product", "phase_space_partial", "reduce_spin_word",
]


class UnknownAtomPairError(ExprError):
    """No commutation rule is registered for a pair of atoms in the active mode."""

    def __init__(self, a: Atom, b: Atom, mode: Mode):
        super().__init__(f"no commutation rule for ({a.plain()}, {b.plain()}) in {mode.value} mode")
        self.pair = (a, b)
        self.mode = mode


# ---------------------------------------------------------------------------
# base tables
# ---------------------------------------------------------------------------

def _theta_entry(ctx: AlgebraContext, i: int, j: int) -> Scalar:
    return ctx.params.theta * (ctx.convention.theta_matrix_factor * levi_civita(i, j, 3))


def _eta_entry(ctx: AlgebraContext, i: int, j: int) -> Scalar:
    return ctx.params.eta * (ctx.convention.eta_matrix_factor * levi_civita(i, j, 3))


def _effective_hbar(ctx: AlgebraContext) -> Scalar:
    hbar = ctx.params.hbar
    if ctx.mode is Mode.NC_PHASE_SPACE:
        # printed relation [x_j, p_k] = i hbar (1 + Theta eta / 4 hbar^2) delta_jk
        return hbar + ctx.params.theta * ctx.params.eta / (hbar * 4)
    return hbar


def _derivative_atom(f: Atom, axis: int, ctx: AlgebraContext) -> OperatorExpr:
    d = f.differentiated(axis)
    if ctx.fieldspec.vanishes(d):
        return OperatorExpr()
    return OperatorExpr.atom(d)


def base_commutator(a: Atom, b: Atom, ctx: AlgebraContext) -> OperatorExpr:
    """``[a, b]`` for two spatial atoms under the context's commutation table."""
    mode = ctx.mode
    ka, kb = a.kind, b.kind
    if a.is_spin or b.is_spin:
        raise ExprError("spin atoms are reduced by anticommutation, not commutators")
    if ka == kb == POSITION:
        if mode is Mode.COMMUTATIVE:
            return OperatorExpr()
        return OperatorExpr.scalar(I * _theta_entry(ctx, a.axis, b.axis))
    if ka == kb == MOMENTUM:
        if mode is not Mode.NC_PHASE_SPACE:
            return OperatorExpr()
        return OperatorExpr.scalar(I * _eta_entry(ctx, a.axis, b.axis))
    if {ka, kb} == {POSITION, MOMENTUM}:
        val = I * _effective_hbar(ctx) if a.axis == b.axis else ZERO
        return OperatorExpr.scalar(val if ka == POSITION else -val)
    if FIELD in (ka, kb):
        other = b if ka == FIELD else a
        f = a if ka == FIELD else b
        sign = 1 if ka == FIELD else -1
        if other.kind == MOMENTUM:
            if mode is Mode.NC_PHASE_SPACE:
                raise UnknownAtomPairError(a, b, mode)
            # [F(x), p_j] = i hbar d_j F ; the derivative acts on the field only
            return _derivative_atom(f, other.axis, ctx) * (I * ctx.params.hbar * sign)
        if mode is not Mode.COMMUTATIVE:
            raise UnknownAtomPairError(a, b, mode)
        return OperatorExpr()
    raise UnknownAtomPairError(a, b, mode)


# ---------------------------------------------------------------------------
# spin sector
# ---------------------------------------------------------------------------

def reduce_spin_word(word: tuple[Atom, ...]) -> tuple[int, tuple[Atom, ...]]:
    """Reduce a product of Dirac matrices to ``sign * (ordered basis element)``.

    Distinct matrices anticommute and each squares to one.
    """
    items = list(word)
    sign = 1
    n = len(items)
    for i in range(n):
        for j in range(n - 1 - i):
            if items[j].key > items[j + 1].key:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
    out: list[Atom] = []
    for a in items:
        if out and out[-1] == a:
            out.pop()
        else:
            out.append(a)
    return sign, tuple(out)


# ---------------------------------------------------------------------------
# normal ordering
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def _normal_order(word: tuple[Atom, ...], ctx: AlgebraContext) -> tuple:
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a.key > b.key:
            acc: dict = {}
            swapped = word[:i] + (b, a) + word[i + 2:]
            for w, c in _normal_order(swapped, ctx):
                acc[w] = acc.get(w, ZERO) + c
            comm = base_commutator(a, b, ctx)
            for coeff, factors in comm.terms():
                for w, c in _normal_order(word[:i] + factors + word[i + 2:], ctx):
                    acc[w] = acc.get(w, ZERO) + coeff * c
            return tuple((w, c) for w, c in acc.items() if not c.is_zero())
    return ((word, ONE),)


@lru_cache(maxsize=1 << 16)
def _canonical_word(word: tuple[Atom, ...], ctx: AlgebraContext) -> tuple:
    spatial = []
    spin = []
    for a in word:
        if a.is_spin:
            spin.append(a)
        else:
            if a.kind == FIELD and ctx.fieldspec.vanishes(a):
                return ()
            spatial.append(a)
    sign, spin_word = reduce_spin_word(tuple(spin))
    out = []
    for w, c in _normal_order(tuple(spatial), ctx):
        if any(a.kind == FIELD and ctx.fieldspec.vanishes(a) for a in w):
            continue
        out.append((w + spin_word, c * sign))
    return tuple(out)


def canonicalize(e: OperatorExpr, ctx: AlgebraContext) -> OperatorExpr:
    """Rewrite ``e`` into canonical order under ``ctx``; idempotent."""
    acc: dict = {}
    for coeff, word in e.terms():
        for w, c in _canonical_word(word, ctx):
            acc[w] = acc.get(w, ZERO) + coeff * c
    return OperatorExpr(acc)


def commutator_raw(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    """``a*b - b*a`` without any reordering."""
    return a * b - b * a


def commutator(a: OperatorExpr, b: OperatorExpr, ctx: AlgebraContext) -> OperatorExpr:
    return canonicalize(commutator_raw(OperatorExpr._lift(a), OperatorExpr._lift(b)), ctx)


def anticommutator(a: OperatorExpr, b: OperatorExpr, ctx: AlgebraContext) -> OperatorExpr:
    a, b = OperatorExpr._lift(a), OperatorExpr._lift(b)
    return canonicalize(a * b + b * a, ctx)


# ---------------------------------------------------------------------------
# fields and derivatives
# ---------------------------------------------------------------------------

def expand_fields(e: OperatorExpr, ctx: AlgebraContext) -> OperatorExpr:
    """Substitute every field atom by its polynomial from the context's field spec."""
    spec = ctx.fieldspec
    if not spec.is_concrete:
        return canonicalize(e, ctx)
    out = OperatorExpr()
    for coeff, word in e.terms():
        prod = OperatorExpr.scalar(coeff)
        for a in word:
            if a.kind == FIELD:
                prod = prod * spec.polynomial(a)
            else:
                prod = prod * OperatorExpr.atom(a)
        out = out + prod
    return canonicalize(out, ctx)


def _word_partial(word: tuple[Atom, ...], axis: int, ctx: AlgebraContext,
                  wrt: str = POSITION) -> OperatorExpr:
    out = OperatorExpr()
    for k, a in enumerate(word):
        if wrt == POSITION:
            if a.kind == POSITION and a.axis == axis:
                out = out + OperatorExpr({word[:k] + word[k + 1:]: ONE})
            elif a.kind == FIELD:
                d = a.differentiated(axis)
                if not ctx.fieldspec.vanishes(d):
                    out = out + OperatorExpr({word[:k] + (d,) + word[k + 1:]: ONE})
        else:
            if a.kind == MOMENTUM and a.axis == axis:
                out = out + OperatorExpr({word[:k] + word[k + 1:]: ONE})
    return out


def differentiate(e: OperatorExpr, axis: int, ctx: AlgebraContext,
                  expand: bool = True) -> OperatorExpr:
    """Partial derivative along coordinate ``axis`` of a position/field expression.

    With ``expand`` the field atoms are first replaced by their polynomials, so
    the result is explicit; otherwise derivative atoms are produced.
    """
    if axis not in (1, 2, 3):
        raise ExprError(f"axis must be 1..3, got {axis}")
    for a in e.atoms():
        if a.kind == MOMENTUM:
            raise ExprError(f"cannot differentiate momentum atom {a.plain()} along a coordinate")
    src = expand_fields(e, ctx) if expand else e
    out = OperatorExpr()
    for coeff, word in src.terms():
        out = out + _word_partial(word, axis, ctx) * coeff
    return canonicalize(out, ctx)


def phase_space_partial(e: OperatorExpr, variable: str, axis: int,
                        ctx: AlgebraContext) -> OperatorExpr:
    """Derivative of a phase-space function; positions and momenta are independent."""
    out = OperatorExpr()
    for coeff, word in e.terms():
        out = out + _word_partial(word, axis, ctx, wrt=variable) * coeff
    return function_normal_form(out, ctx)


def function_normal_form(e: OperatorExpr, ctx: AlgebraContext) -> OperatorExpr:
    """Normal form treating spatial atoms as commuting c-numbers (spin order kept)."""
    acc: dict = {}
    for coeff, word in e.terms():
        spatial = []
        spin = []
        for a in word:
            if a.is_spin:
                spin.append(a)
            elif a.kind == FIELD and ctx.fieldspec.vanishes(a):
                break
            else:
                spatial.append(a)
        else:
            sign, spin_word = reduce_spin_word(tuple(spin))
            w = tuple(sorted(spatial, key=lambda a: a.key)) + spin_word
            acc[w] = acc.get(w, ZERO) + coeff * sign
    return OperatorExpr(acc)


def function_product(f: OperatorExpr, g: OperatorExpr, ctx: AlgebraContext) -> OperatorExpr:
    """Pointwise product of phase-space functions (matrix order of spin factors kept)."""
    return function_normal_form(f * g, ctx)


def momentum_vector() -> tuple[OperatorExpr, OperatorExpr, OperatorExpr]:
    return tuple(OperatorExpr.atom(momentum_atom(i)) for i in (1, 2, 3))


def is_hermitian_form(e: OperatorExpr, ctx: AlgebraContext) -> bool:
    """Exact symbolic Hermiticity: canonical(e) == canonical(e^dagger)."""
    return canonicalize(e, ctx) == canonicalize(e.adjoint(), ctx)
