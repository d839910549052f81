"""Commutative Dirac Hamiltonian and its noncommutative deformation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import factorial

from .context import AlgebraContext, ConventionConfig, FieldSpec, Mode, NCParameters, theta_matrix
from .expr import POSITION, OperatorExpr, a_field, alpha, beta, p, phi_field
from .nc_algebra import bopp_shift
from .operator_ir import canonicalize, expand_fields, phase_space_partial
from .scalar import I, ONE, Scalar, sym
from .textio import render

__all__ = [
    "FieldSpec", "DiracConstants", "HamiltonianBundle", "commutative_hamiltonian",
    "space_deformed_hamiltonian", "deformed_hamiltonian", "PIECES",
]

PIECES = ("kinetic", "coupling", "scalar", "mass", "eta", "theta")


@dataclass(frozen=True)
class DiracConstants:
    """Light speed, charge and mass; symbolic by default."""

    c: Scalar = field(default_factory=lambda: sym("c"))
    e: Scalar = field(default_factory=lambda: sym("e"))
    m: Scalar = field(default_factory=lambda: sym("m"))

    def __post_init__(self):
        for name in ("c", "e", "m"):
            object.__setattr__(self, name, Scalar.const(getattr(self, name)))


def _minimal_coupling_pieces(consts: DiracConstants) -> dict[str, OperatorExpr]:
    c, e, m = consts.c, consts.e, consts.m
    kinetic = OperatorExpr()
    coupling = OperatorExpr()
    for i in (1, 2, 3):
        kinetic = kinetic + OperatorExpr.word(alpha(i), p(i), coeff=c)
        coupling = coupling + OperatorExpr.word(alpha(i), a_field(i), coeff=-e)
    return {
        "kinetic": kinetic,
        "coupling": coupling,
        "scalar": OperatorExpr.atom(phi_field(), e),
        "mass": OperatorExpr.atom(beta(), m * c * c),
    }


def commutative_hamiltonian(f: FieldSpec, consts: DiracConstants | None = None,
                            expand: bool = False) -> OperatorExpr:
    """``c alpha.(p - e A / c) + e Phi + beta m c^2`` in Gaussian units.

    Field atoms are kept unless ``expand`` substitutes the field polynomials.
    """
    consts = DiracConstants() if consts is None else consts
    ctx = AlgebraContext(Mode.COMMUTATIVE, NCParameters.commutative(), ConventionConfig(), f)
    h = OperatorExpr()
    for piece in _minimal_coupling_pieces(consts).values():
        h = h + piece
    return expand_fields(h, ctx) if expand else canonicalize(h, ctx)


def _theta_index_chains(th, n):
    """All ((a1..an), (b1..bn), prod Theta_ab) with non-zero product."""
    chains = [((), (), ONE)]
    for _ in range(n):
        nxt = []
        for aa, bb, w in chains:
            for a in (1, 2, 3):
                for b in (1, 2, 3):
                    t = th[a - 1][b - 1]
                    if not t.is_zero():
                        nxt.append((aa + (a,), bb + (b,), w * t))
        chains = nxt
    return chains


def space_deformed_hamiltonian(h: OperatorExpr, params: NCParameters, conv: ConventionConfig,
                               max_order: int = 1, ctx: AlgebraContext | None = None) -> OperatorExpr:
    """``H`` plus its space star-product correction acting on a wavefunction.

    Each derivative on the wavefunction is traded for ``(i/hbar) p``; derivatives
    of ``H`` act on its coordinate dependence only.
    """
    if ctx is None:
        ctx = AlgebraContext(Mode.COMMUTATIVE, params, conv)
    th = theta_matrix(params, conv)
    hbar = params.hbar
    out = h
    for n in range(1, max_order + 1):
        weight = (I / 2) ** n * (I / hbar) ** n / factorial(n)
        for aa, bb, w in _theta_index_chains(th, n):
            dh = h
            for a in aa:
                dh = phase_space_partial(dh, POSITION, a, ctx)
                if dh.is_zero():
                    break
            if dh.is_zero():
                continue
            moms = OperatorExpr.scalar(ONE)
            for b in bb:
                moms = moms * OperatorExpr.atom(p(b))
            out = out + dh * moms * (weight * w)
    return canonicalize(out, ctx)


@dataclass
class HamiltonianBundle:
    """Commutative, space-deformed and fully deformed Hamiltonians (field atoms kept)."""

    h_commutative: OperatorExpr
    h_space_deformed: OperatorExpr
    h_nc: OperatorExpr
    pieces: dict[str, OperatorExpr]
    provenance: dict[str, str]
    ctx: AlgebraContext
    consts: DiracConstants

    def explicit(self, which: str = "h_nc") -> OperatorExpr:
        """A Hamiltonian or piece with the field polynomials substituted."""
        src = self.pieces[which] if which in self.pieces else getattr(self, which)
        return expand_fields(src, self.ctx)

    def deformation_pieces(self) -> dict[str, OperatorExpr]:
        return {k: self.pieces[k] for k in ("eta", "theta") if not self.pieces[k].is_zero()}

    def to_dict(self) -> dict:
        entries = []
        for name in PIECES:
            for coeff, factors in canonicalize(self.pieces[name], self.ctx).terms():
                entries.append({
                    "piece": name,
                    "coefficient": coeff.to_plain(),
                    "factors": [a.plain() for a in factors],
                    "provenance": self.provenance[name],
                    "source": _SOURCES[name],
                })
        return {
            "hamiltonian": render(self.h_nc),
            "explicit": render(self.explicit()),
            "field": self.ctx.fieldspec.label,
            "convention": self.ctx.convention.name,
            "terms": entries,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


_SOURCES = {
    "kinetic": "minimal coupling",
    "coupling": "minimal coupling",
    "scalar": "minimal coupling",
    "mass": "rest energy",
    "eta": "momentum Bopp shift",
    "theta": "space star product",
}


def _truncate_first_order(e: OperatorExpr) -> OperatorExpr:
    return e.map_coefficients(lambda c: c.truncate(("Theta", "eta"), 1))


def deformed_hamiltonian(f: FieldSpec, params: NCParameters | None = None,
                         conv: ConventionConfig | None = None,
                         consts: DiracConstants | None = None,
                         max_order: int = 1) -> HamiltonianBundle:
    """Space star product on ``H``, then Bopp-shift the momenta; keep first order in Theta, eta."""
    params = NCParameters() if params is None else params
    conv = ConventionConfig() if conv is None else conv
    consts = DiracConstants() if consts is None else consts
    ctx = AlgebraContext(Mode.COMMUTATIVE, params, conv, f)

    base = {k: canonicalize(v, ctx) for k, v in _minimal_coupling_pieces(consts).items()}
    h = OperatorExpr()
    for piece in base.values():
        h = h + piece
    h = canonicalize(h, ctx)

    h_space = space_deformed_hamiltonian(h, params, conv, max_order, ctx)
    theta_piece = canonicalize(h_space - h, ctx)
    shifted = canonicalize(bopp_shift(h_space, params, conv, positions=False, momenta=True), ctx)
    eta_piece = _truncate_first_order(canonicalize(shifted - h_space, ctx))
    h_nc = canonicalize(h_space + eta_piece, ctx)
    if max_order == 1:
        h_nc = _truncate_first_order(h_nc)

    pieces = dict(base, eta=eta_piece, theta=theta_piece)
    kappa = conv.theta_matrix_factor
    provenance = {
        "kinetic": "c alpha.p",
        "coupling": "-e alpha.A",
        "scalar": "e Phi",
        "mass": "beta m c^2",
        "eta": (f"c/({conv.bopp_factor}*hbar) (alpha x r).eta from p -> p + eps eta x/"
                f"({conv.bopp_factor}*hbar); printed coefficient c/hbar"),
        "theta": (f"({kappa})*e/(2*hbar) (grad(alpha.A - Phi) x p).Theta from the first star-product "
                  "order with d_b psi -> (i/hbar) p_b psi; the gradient acts on alpha.A - Phi "
                  "(the intermediate printing with +Phi is a sign slip); printed coefficient e/hbar"),
    }
    if params.eta.is_zero():
        provenance["eta"] = "absent (eta = 0)"
    if params.theta.is_zero():
        provenance["theta"] = "absent (Theta = 0)"
    return HamiltonianBundle(h, h_space, h_nc, pieces, provenance, ctx, consts)
