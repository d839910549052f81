"""Noncommutative structure: effective Planck constant, Bopp shifts, star products, audit."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from math import factorial

from .context import (
    AlgebraContext, ConventionConfig, Mode, NCParameters, eta_matrix, theta_matrix,
)
from .expr import MOMENTUM, POSITION, ExprError, OperatorExpr, levi_civita, p, x
from .operator_ir import canonicalize, commutator, function_product, phase_space_partial
from .scalar import I, ONE, ZERO, Scalar

__all__ = [
    "effective_planck", "bopp_shift", "star_product", "star_series_terms",
    "algebra_consistency_report", "ConsistencyReport", "ReportRow", "DoubleShiftError",
]


class DoubleShiftError(ExprError):
    """Input already carries the NC parameter the shift would introduce."""


def effective_planck(params: NCParameters, theta_m, eta_m) -> tuple[Scalar, Scalar]:
    """``(xi, hbar_eff)`` with ``xi = Tr[Theta eta] / (4 A B hbar^2)`` and
    ``hbar_eff = hbar (A B + xi)``."""
    trace = ZERO
    for a in range(3):
        for b in range(3):
            trace = trace + theta_m[a][b] * eta_m[b][a]
    ab = Scalar.const(params.a_scale * params.b_scale)
    hbar = params.hbar
    xi = trace / (ab * hbar * hbar * 4) if trace else ZERO
    return xi, hbar * (ab + xi)


def bopp_shift(e: OperatorExpr, params: NCParameters, conv: ConventionConfig,
               positions: bool = True, momenta: bool = True) -> OperatorExpr:
    """Replace commutative positions/momenta by their Bopp-shifted NC counterparts.

    ``x_i -> A x_i - eps_ijk Theta_k p_j / (A D)`` and
    ``p_i -> B p_i + eps_ijk eta_k x_j / (B D)`` with ``D = bopp_factor * hbar``.
    The substitution is done word by word without reordering, so it is an
    algebra homomorphism on raw expressions; canonicalize afterwards.
    """
    syms = e.symbols()
    if positions and not params.theta.is_zero() and "Theta" in syms:
        raise DoubleShiftError("expression already depends on Theta; refusing to shift positions again")
    if momenta and not params.eta.is_zero() and "eta" in syms:
        raise DoubleShiftError("expression already depends on eta; refusing to shift momenta again")
    den = conv.bopp_denominator(params.hbar)
    a_s, b_s = Scalar.const(params.a_scale), Scalar.const(params.b_scale)
    theta, eta = params.theta_vec, params.eta_vec
    images = {}
    for i in (1, 2, 3):
        xi = OperatorExpr.atom(x(i), a_s)
        pi = OperatorExpr.atom(p(i), b_s)
        for j in (1, 2, 3):
            for k in (1, 2, 3):
                eps = levi_civita(i, j, k)
                if not eps:
                    continue
                if not theta[k - 1].is_zero():
                    xi = xi - OperatorExpr.atom(p(j), theta[k - 1] * eps / (a_s * den))
                if not eta[k - 1].is_zero():
                    pi = pi + OperatorExpr.atom(x(j), eta[k - 1] * eps / (b_s * den))
        if positions:
            images[x(i)] = xi
        if momenta:
            images[p(i)] = pi
    out = OperatorExpr()
    for coeff, word in e.terms():
        prod = OperatorExpr.scalar(coeff)
        for a in word:
            prod = prod * images.get(a, OperatorExpr.atom(a))
        out = out + prod
    return out


def _bidifferential_step(pairs, matrix, variable, ctx):
    half_i = I * Scalar.const(1) / 2
    out = []
    for c, f, g in pairs:
        for a in (1, 2, 3):
            for b in (1, 2, 3):
                m = matrix[a - 1][b - 1]
                if m.is_zero():
                    continue
                fa = phase_space_partial(f, variable, a, ctx)
                if fa.is_zero():
                    continue
                gb = phase_space_partial(g, variable, b, ctx)
                if gb.is_zero():
                    continue
                out.append((c * half_i * m, fa, gb))
    return out


def star_series_terms(f: OperatorExpr, g: OperatorExpr, max_order: int, sector: str,
                      ctx: AlgebraContext) -> list[OperatorExpr]:
    """Order-by-order contributions ``[n=0, 1, ..., max_order]`` of ``f * g``.

    The ``space`` sector uses only the Theta bidifferential; ``phase_space``
    adds the eta bidifferential on momenta.  The exponential is expanded in
    full, so mixed Theta-eta orders are included.
    """
    if sector not in ("space", "phase_space"):
        raise ValueError(f"sector must be 'space' or 'phase_space', got {sector!r}")
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    th = theta_matrix(ctx.params, ctx.convention)
    et = eta_matrix(ctx.params, ctx.convention)
    terms = [function_product(f, g, ctx)]
    pairs = [(ONE, f, g)]
    for n in range(1, max_order + 1):
        nxt = _bidifferential_step(pairs, th, POSITION, ctx)
        if sector == "phase_space":
            nxt += _bidifferential_step(pairs, et, MOMENTUM, ctx)
        pairs = nxt
        total = OperatorExpr()
        for c, fa, gb in pairs:
            total = total + function_product(fa, gb, ctx) * c
        terms.append(total / factorial(n))
    return terms


def star_product(f: OperatorExpr, g: OperatorExpr, max_order: int = 1,
                 sector: str = "space", ctx: AlgebraContext | None = None) -> OperatorExpr:
    """Moyal product of two polynomial phase-space functions through ``max_order``."""
    ctx = AlgebraContext() if ctx is None else ctx
    out = OperatorExpr()
    for t in star_series_terms(f, g, max_order, sector, ctx):
        out = out + t
    return out


# ---------------------------------------------------------------------------
# consistency audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    relation: str
    derived: Scalar
    paper: Scalar
    match: bool


@dataclass
class ConsistencyReport:
    header: str
    rows: list[ReportRow] = field(default_factory=list)

    def findings(self) -> list[ReportRow]:
        return [r for r in self.rows if not r.match]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["relation", "derived", "paper", "match"])
        for r in self.rows:
            w.writerow([r.relation, r.derived.to_plain(), r.paper.to_plain(), str(r.match).lower()])
        return buf.getvalue()

    def to_text(self) -> str:
        width = max(len(r.relation) for r in self.rows)
        lines = [self.header, ""]
        for r in self.rows:
            flag = "match" if r.match else "MISMATCH"
            lines.append(f"{r.relation:<{width}}  derived: {r.derived.to_plain():<28} "
                         f"printed: {r.paper.to_plain():<28} {flag}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "header": self.header,
            "rows": [
                {"relation": r.relation, "derived": r.derived.to_plain(),
                 "paper": r.paper.to_plain(), "match": r.match}
                for r in self.rows
            ],
        }


_PAIRS = ((1, 2), (2, 3), (1, 3))


def algebra_consistency_report(params: NCParameters | None = None,
                               conv: ConventionConfig | None = None) -> ConsistencyReport:
    """Bopp-derive every NC commutator and tabulate it against the printed algebra.

    Rows: three ``[x, x]``, three ``[p, p]``, three diagonal ``[x, p]``, and ``xi``.
    """
    params = NCParameters() if params is None else params
    conv = ConventionConfig() if conv is None else conv
    ctx = AlgebraContext(Mode.COMMUTATIVE, params, conv)
    hbar = params.hbar
    th, et = params.theta_vec, params.eta_vec
    half_i = I / 2

    xs = {i: canonicalize(bopp_shift(OperatorExpr.atom(x(i)), params, conv), ctx) for i in (1, 2, 3)}
    ps = {i: canonicalize(bopp_shift(OperatorExpr.atom(p(i)), params, conv), ctx) for i in (1, 2, 3)}

    def printed_eps(vec, j, k):
        return sum((half_i * vec[l - 1] * levi_civita(j, k, l) for l in (1, 2, 3)), ZERO)

    printed_xp = I * hbar * (ONE + params.theta * params.eta / (hbar * hbar * 4))
    rows = []
    for j, k in _PAIRS:
        d = commutator(xs[j], xs[k], ctx).scalar_value()
        pr = printed_eps(th, j, k)
        rows.append(ReportRow(f"[x{j}, x{k}]", d, pr, d == pr))
    for j, k in _PAIRS:
        d = commutator(ps[j], ps[k], ctx).scalar_value()
        pr = printed_eps(et, j, k)
        rows.append(ReportRow(f"[p{j}, p{k}]", d, pr, d == pr))
    for j in (1, 2, 3):
        d = commutator(xs[j], ps[j], ctx).scalar_value()
        rows.append(ReportRow(f"[x{j}, p{j}]", d, printed_xp, d == printed_xp))
    xi, _ = effective_planck(params, theta_matrix(params, conv), eta_matrix(params, conv))
    xi_printed = params.theta * params.eta / (hbar * hbar * 4)
    rows.append(ReportRow("xi", xi, xi_printed, xi == xi_printed))

    header = (
        f"NC algebra audit (convention {conv.name}): Theta_ab = {conv.theta_matrix_factor} "
        f"eps_abl Theta_l, eta_ab = {conv.eta_matrix_factor} eps_abl eta_l, "
        f"Bopp denominator {conv.bopp_factor}*hbar, A = {params.a_scale}, B = {params.b_scale}"
    )
    return ConsistencyReport(header, rows)
