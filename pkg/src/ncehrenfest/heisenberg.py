"""Heisenberg-picture rates for position and kinetic momentum, and their audit.

Rates are computed as ``dF/dt = dF/dt|explicit + (i/hbar) [H, F]`` on the
symbolic Hamiltonian (field atoms kept), then expanded through the field spec
and split into named groups.  Templates hold the printed textbook/deformed
forms with one coefficient slot per term; :func:`paper_form_comparison`
extracts the derived coefficients slot by slot.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .context import AlgebraContext, FieldSpec
from .dirac_model import DiracConstants, HamiltonianBundle, PIECES
from .expr import (
    ALPHA, OperatorExpr, a_field, alpha, beta, cross, dot, p, phi_field, vector, x,
)
from .operator_ir import canonicalize, commutator, differentiate, expand_fields
from .scalar import I, ONE, SYMBOLS, Scalar
from .textio import render

__all__ = [
    "TraceEntry", "RateResult", "TemplateTerm", "PaperTemplate", "DiscrepancyRow",
    "DiscrepancyReport", "SpinorAction", "heisenberg_rate", "position_rate", "kinetic_momentum",
    "kinetic_momentum_rate", "commutative_limit", "spinor_component_action",
    "paper_form_comparison", "declared_zero_commutators", "hamiltonian_groups",
    "velocity_template", "position_rate_template", "lorentz_template",
    "deformed_lorentz_template", "deformed_hamiltonian_template",
]

_THETA = SYMBOLS.index("Theta")
_ETA = SYMBOLS.index("eta")


@dataclass(frozen=True)
class TraceEntry:
    """One intermediate commutator ``[left, right]`` and its canonical value."""

    label: str
    left: OperatorExpr
    right: OperatorExpr
    value: OperatorExpr

    def to_dict(self) -> dict:
        return {"commutator": self.label, "value": render(self.value)}


@dataclass
class RateResult:
    """Derived time derivative of a vector observable, one expression per axis."""

    observable: str
    components: tuple[OperatorExpr, ...]
    symbolic: tuple[OperatorExpr, ...]
    groups: dict[str, tuple[OperatorExpr, ...]]
    trace: list[TraceEntry] = field(default_factory=list)

    def group(self, name: str) -> tuple[OperatorExpr, ...]:
        return self.groups.get(name, tuple(OperatorExpr() for _ in self.components))

    def residue_is_empty(self) -> bool:
        return all(c.is_zero() for c in self.group("residue"))

    def to_dict(self) -> dict:
        return {
            "observable": self.observable,
            "components": [render(c) for c in self.components],
            "symbolic": [render(c) for c in self.symbolic],
            "groups": {k: [render(c) for c in v] for k, v in self.groups.items()},
            "trace": [t.to_dict() for t in self.trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self, latex: bool = False) -> str:
        fmt = "latex" if latex else "plain"
        lines = [f"d{self.observable}/dt"]
        for k, c in enumerate(self.components, start=1):
            lines.append(f"  [{k}] {render(c, fmt)}")
        lines.append("groups:")
        for name, comps in self.groups.items():
            for k, c in enumerate(comps, start=1):
                if not c.is_zero():
                    lines.append(f"  {name}[{k}]: {render(c, fmt)}")
        lines.append("commutator trace:")
        for t in self.trace:
            lines.append(f"  {t.label} = {render(t.value, fmt)}")
        return "\n".join(lines) + "\n"


def heisenberg_rate(f: OperatorExpr, h: OperatorExpr, explicit_dt: OperatorExpr | None,
                    ctx: AlgebraContext) -> OperatorExpr:
    """``explicit_dt + (i/hbar) [H, F]`` in canonical form."""
    out = commutator(h, f, ctx) * (I / ctx.hbar)
    if explicit_dt is not None:
        out = out + explicit_dt
    return canonicalize(out, ctx)


def _split_nc(e: OperatorExpr) -> dict[str, OperatorExpr]:
    return {
        "plain": e.split_by_monomial(lambda m: m[_THETA] == 0 and m[_ETA] == 0),
        "theta": e.split_by_monomial(lambda m: m[_THETA] != 0 and m[_ETA] == 0),
        "eta": e.split_by_monomial(lambda m: m[_ETA] != 0 and m[_THETA] == 0),
        "mixed": e.split_by_monomial(lambda m: m[_ETA] != 0 and m[_THETA] != 0),
    }


def _has_spin(word) -> bool:
    return any(a.is_spin for a in word)


# ---------------------------------------------------------------------------
# position
# ---------------------------------------------------------------------------

def position_rate(bundle: HamiltonianBundle) -> RateResult:
    ctx = bundle.ctx
    c = bundle.consts.c
    symbolic, explicit, trace = [], [], []
    groups = {"velocity": [], "lambda": [], "eta": [], "residue": []}
    for k in (1, 2, 3):
        xk = OperatorExpr.atom(x(k))
        for name in PIECES:
            piece = bundle.pieces[name]
            trace.append(TraceEntry(f"[{name}, x{k}]", piece, xk, commutator(piece, xk, ctx)))
        rate = heisenberg_rate(xk, bundle.h_nc, None, ctx)
        symbolic.append(rate)
        ex = expand_fields(rate, ctx)
        explicit.append(ex)
        parts = _split_nc(ex)
        expected = OperatorExpr.atom(alpha(k), c)
        groups["velocity"].append(parts["plain"])
        groups["lambda"].append(parts["theta"])
        groups["eta"].append(parts["eta"])
        groups["residue"].append(canonicalize(parts["plain"] - expected + parts["mixed"], ctx))
    return RateResult("x", tuple(explicit), tuple(symbolic),
                      {k: tuple(v) for k, v in groups.items()}, trace)


# ---------------------------------------------------------------------------
# kinetic momentum
# ---------------------------------------------------------------------------

def kinetic_momentum(f: FieldSpec, consts: DiracConstants | None = None,
                     expand: bool = False) -> tuple[OperatorExpr, ...]:
    """``D = p - (e/c) A`` per axis."""
    consts = DiracConstants() if consts is None else consts
    ctx = AlgebraContext(fieldspec=f)
    out = []
    for k in (1, 2, 3):
        d = OperatorExpr.atom(p(k)) - OperatorExpr.atom(a_field(k), consts.e / consts.c)
        out.append(expand_fields(d, ctx) if expand else canonicalize(d, ctx))
    return tuple(out)


def _electric(ctx: AlgebraContext, consts: DiracConstants) -> tuple[OperatorExpr, ...]:
    phi = OperatorExpr.atom(phi_field())
    return tuple(canonicalize(-differentiate(phi, j, ctx) * consts.e, ctx) for j in (1, 2, 3))


def _magnetic(ctx: AlgebraContext, consts: DiracConstants) -> tuple[OperatorExpr, ...]:
    """``(e/c) v x curl A`` with ``v = c alpha``."""
    b_vec = ctx.fieldspec.magnetic_field()
    v = tuple(OperatorExpr.atom(alpha(i), consts.c) for i in (1, 2, 3))
    return tuple(canonicalize(comp * (consts.e / consts.c), ctx) for comp in cross(v, b_vec))


def kinetic_momentum_rate(bundle: HamiltonianBundle) -> RateResult:
    ctx = bundle.ctx
    consts = bundle.consts
    if not ctx.fieldspec.is_concrete:
        raise ValueError("the Lorentz-force grouping needs a concrete field spec")
    ds = kinetic_momentum(ctx.fieldspec, consts)
    electric = _electric(ctx, consts)
    magnetic = _magnetic(ctx, consts)
    symbolic, explicit, trace = [], [], []
    groups = {"electric": [], "magnetic": [], "theta": [], "eta": [], "residue": []}
    for k in (1, 2, 3):
        pk = OperatorExpr.atom(p(k))
        ak = OperatorExpr.atom(a_field(k))
        for name in PIECES:
            piece = bundle.pieces[name]
            trace.append(TraceEntry(f"[{name}, p{k}]", piece, pk, commutator(piece, pk, ctx)))
        for name in PIECES:
            piece = bundle.pieces[name]
            trace.append(TraceEntry(f"[{name}, A{k}]", piece, ak, commutator(piece, ak, ctx)))
        # static fields: the explicit -(e/c) dA/dt contribution is zero
        rate = heisenberg_rate(ds[k - 1], bundle.h_nc, OperatorExpr(), ctx)
        symbolic.append(rate)
        ex = expand_fields(rate, ctx)
        explicit.append(ex)
        parts = _split_nc(ex)
        plain = parts["plain"]
        el = plain.filter(lambda c, w: not _has_spin(w))
        mag = plain.filter(lambda c, w: _has_spin(w))
        groups["electric"].append(el)
        groups["magnetic"].append(mag)
        groups["theta"].append(parts["theta"])
        groups["eta"].append(parts["eta"])
        residue = (el - electric[k - 1]) + (mag - magnetic[k - 1]) + parts["mixed"]
        groups["residue"].append(canonicalize(residue, ctx))
    return RateResult("D", tuple(explicit), tuple(symbolic),
                      {k: tuple(v) for k, v in groups.items()}, trace)


def commutative_limit(r: RateResult | tuple | OperatorExpr):
    """Set Theta = eta = 0 and drop vanished terms."""
    zero = {"Theta": 0, "eta": 0}
    if isinstance(r, OperatorExpr):
        return r.subs(zero)
    comps = r.components if isinstance(r, RateResult) else r
    return tuple(c.subs(zero) for c in comps)


# ---------------------------------------------------------------------------
# zero commutators and spinor action
# ---------------------------------------------------------------------------

def declared_zero_commutators(bundle: HamiltonianBundle) -> list[TraceEntry]:
    """Intermediate commutators that must vanish identically, evaluated by the kernel."""
    ctx = bundle.ctx
    pc = bundle.pieces
    a_dot_a = dot(vector(alpha), vector(a_field))
    a_dot_p = dot(vector(alpha), vector(p))
    phi = OperatorExpr.atom(phi_field())
    bt = OperatorExpr.atom(beta())
    cases = []
    for k in (1, 2, 3):
        xk, pk, ak = OperatorExpr.atom(x(k)), OperatorExpr.atom(p(k)), OperatorExpr.atom(a_field(k))
        cases += [
            (f"[Phi, x{k}]", phi, xk),
            (f"[beta, x{k}]", bt, xk),
            (f"[alpha.A, x{k}]", a_dot_a, xk),
            (f"[(alpha x r).eta, x{k}]", pc["eta"], xk),
            (f"[alpha.p, p{k}]", a_dot_p, pk),
            (f"[beta, p{k}]", bt, pk),
            (f"[beta, A{k}]", bt, ak),
            (f"[Phi, A{k}]", phi, ak),
            (f"[(alpha x r).eta, A{k}]", pc["eta"], ak),
        ]
        for i in (1, 2, 3):
            ai = OperatorExpr.atom(alpha(i))
            cases += [
                (f"[alpha{i}, x{k}]", ai, xk),
                (f"[alpha{i}, p{k}]", ai, pk),
                (f"[alpha{i}, A{k}]", ai, ak),
            ]
    return [TraceEntry(label, a, b, commutator(a, b, ctx)) for label, a, b in cases]


@dataclass
class SpinorAction:
    velocity_coefficients: tuple[Scalar, ...]
    alpha_eigenvalues: tuple[tuple[int, ...], ...]
    component_speeds: tuple[tuple[Scalar, ...], ...]
    lambda_plus: tuple[OperatorExpr, ...]
    lambda_minus: tuple[OperatorExpr, ...]


def _substitute_alpha(e: OperatorExpr, value: int) -> OperatorExpr:
    out = OperatorExpr()
    for coeff, word in e.terms():
        sign = 1
        rest = []
        for a in word:
            if a.kind == ALPHA:
                sign *= value
            else:
                rest.append(a)
        out = out + OperatorExpr({tuple(rest): coeff * sign})
    return out


def spinor_component_action(r: RateResult) -> SpinorAction:
    """Eigenvalue structure of the velocity group and the Lambda shift at alpha = +-1."""
    from .matrix_rep import dirac_alpha

    coeffs, eigs, speeds = [], [], []
    for k, comp in enumerate(r.group("velocity"), start=1):
        c = comp.coefficient((alpha(k),))
        coeffs.append(c)
        ev = tuple(int(round(v)) for v in np.linalg.eigvalsh(dirac_alpha(k)))
        eigs.append(ev)
        speeds.append(tuple(c * v for v in ev))
    plus = tuple(_substitute_alpha(g, 1) for g in r.group("lambda"))
    minus = tuple(_substitute_alpha(g, -1) for g in r.group("lambda"))
    return SpinorAction(tuple(coeffs), tuple(eigs), tuple(speeds), plus, minus)


# ---------------------------------------------------------------------------
# templates and comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TemplateTerm:
    label: str
    group: str
    structure: tuple[OperatorExpr, ...]
    printed: Scalar


@dataclass
class PaperTemplate:
    name: str
    terms: list[TemplateTerm]

    def replace_coefficient(self, label: str, printed: Scalar) -> "PaperTemplate":
        terms = [TemplateTerm(t.label, t.group, t.structure, printed) if t.label == label else t
                 for t in self.terms]
        if all(t.label != label for t in self.terms):
            raise KeyError(label)
        return PaperTemplate(self.name, terms)

    def expression(self) -> tuple[OperatorExpr, ...]:
        """Sum of printed coefficient times structure, per component."""
        if not self.terms:
            return ()
        n = len(self.terms[0].structure)
        out = [OperatorExpr() for _ in range(n)]
        for t in self.terms:
            for k in range(n):
                out[k] = out[k] + t.structure[k] * t.printed
        return tuple(out)


def _grad_g(ctx: AlgebraContext) -> tuple[OperatorExpr, ...]:
    """Explicit ``grad(alpha.A - Phi)``."""
    g = dot(vector(alpha), vector(a_field)) - OperatorExpr.atom(phi_field())
    return tuple(differentiate(g, j, ctx) for j in (1, 2, 3))


def _theta_cross_grad(ctx: AlgebraContext) -> tuple[OperatorExpr, ...]:
    th = tuple(OperatorExpr.scalar(t) for t in ctx.params.theta_vec)
    return tuple(canonicalize(c, ctx) for c in cross(th, _grad_g(ctx)))


def velocity_template(bundle: HamiltonianBundle) -> PaperTemplate:
    return PaperTemplate("velocity", [
        TemplateTerm("c alpha", "velocity", vector(alpha), bundle.consts.c),
    ])


def position_rate_template(bundle: HamiltonianBundle) -> PaperTemplate:
    e = bundle.consts.e
    return PaperTemplate("position_rate", [
        TemplateTerm("c alpha", "velocity", vector(alpha), bundle.consts.c),
        TemplateTerm("Theta x grad(alpha.A - Phi)", "lambda", _theta_cross_grad(bundle.ctx), -I * e),
    ])


def lorentz_template(bundle: HamiltonianBundle) -> PaperTemplate:
    ctx, consts = bundle.ctx, bundle.consts
    one = DiracConstants(c=consts.c, e=ONE, m=consts.m)
    e_vec = _electric(ctx, one)
    vxb = tuple(canonicalize(v * consts.c, ctx) for v in _magnetic(ctx, one))
    return PaperTemplate("lorentz_force", [
        TemplateTerm("E", "electric", e_vec, consts.e),
        TemplateTerm("v x B", "magnetic", vxb, consts.e / consts.c),
    ])


def deformed_lorentz_template(bundle: HamiltonianBundle) -> PaperTemplate:
    ctx, consts = bundle.ctx, bundle.consts
    hbar = ctx.hbar
    base = lorentz_template(bundle).terms
    tg = _theta_cross_grad(ctx)
    nabla = tuple(OperatorExpr.atom(p(j), I / hbar) for j in (1, 2, 3))
    comm_term, eta_term, ta_term = [], [], []
    eta_vec = tuple(OperatorExpr.scalar(v) for v in ctx.params.eta_vec)
    eta_x_alpha = cross(eta_vec, vector(alpha))
    for j in (1, 2, 3):
        s = OperatorExpr()
        for i in (1, 2, 3):
            s = s + commutator(tg[i - 1], nabla[j - 1], ctx) * nabla[i - 1]
        comm_term.append(canonicalize(s, ctx))
        s = OperatorExpr()
        for i in (1, 2, 3):
            s = s + commutator(OperatorExpr.atom(x(i)), nabla[j - 1], ctx) * eta_x_alpha[i - 1]
        eta_term.append(canonicalize(s, ctx))
        s = OperatorExpr()
        for i in (1, 2, 3):
            s = s + tg[i - 1] * differentiate(OperatorExpr.atom(a_field(j)), i, ctx)
        ta_term.append(canonicalize(s, ctx))
    return PaperTemplate("deformed_lorentz_force", list(base) + [
        TemplateTerm("[(Theta x grad G)_i, nabla_j] nabla_i", "theta", tuple(comm_term), consts.e / hbar),
        TemplateTerm("[r_i, nabla_j] (eta x alpha)_i", "eta", tuple(eta_term), consts.c / hbar),
        TemplateTerm("(Theta x grad G)_i d_i A_j", "theta", tuple(ta_term),
                     -consts.e * consts.e / (consts.c * hbar)),
    ])


def deformed_hamiltonian_template(bundle: HamiltonianBundle) -> PaperTemplate:
    ctx, consts = bundle.ctx, bundle.consts
    hbar = ctx.hbar

    def ex(e):
        return (expand_fields(e, ctx),)

    eta_vec = tuple(OperatorExpr.scalar(v) for v in ctx.params.eta_vec)
    th_vec = tuple(OperatorExpr.scalar(v) for v in ctx.params.theta_vec)
    pos = vector(x)
    return PaperTemplate("deformed_hamiltonian", [
        TemplateTerm("alpha.p", "kinetic", ex(dot(vector(alpha), vector(p))), consts.c),
        TemplateTerm("alpha.A", "coupling", ex(dot(vector(alpha), vector(a_field))), -consts.e),
        TemplateTerm("Phi", "scalar", ex(OperatorExpr.atom(phi_field())), consts.e),
        TemplateTerm("beta", "mass", ex(OperatorExpr.atom(beta())), consts.m * consts.c * consts.c),
        TemplateTerm("(alpha x r).eta", "eta", ex(dot(cross(vector(alpha), pos), eta_vec)), consts.c / hbar),
        TemplateTerm("(grad(alpha.A - Phi) x p).Theta", "theta",
                     ex(dot(cross(_grad_g(ctx), vector(p)), th_vec)), consts.e / hbar),
    ])


def hamiltonian_groups(bundle: HamiltonianBundle) -> dict[str, tuple[OperatorExpr, ...]]:
    return {name: (bundle.explicit(name),) for name in PIECES}


@dataclass(frozen=True)
class DiscrepancyRow:
    template: str
    term: str
    group: str
    derived: Scalar | None
    paper: Scalar | None
    ratio: Scalar | None
    match: bool
    note: str = ""

    def to_dict(self) -> dict:
        def s(v):
            return None if v is None else v.to_plain()
        return {"template": self.template, "term": self.term, "group": self.group,
                "derived": s(self.derived), "paper": s(self.paper), "ratio": s(self.ratio),
                "match": self.match, "note": self.note}


@dataclass
class DiscrepancyReport:
    template: str
    rows: list[DiscrepancyRow] = field(default_factory=list)

    def findings(self) -> list[DiscrepancyRow]:
        return [r for r in self.rows if not r.match]

    def row(self, term: str) -> DiscrepancyRow:
        for r in self.rows:
            if r.term == term:
                return r
        raise KeyError(term)

    def to_dict(self) -> dict:
        return {"template": self.template, "rows": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [f"template {self.template}"]
        for r in self.rows:
            d = "-" if r.derived is None else r.derived.to_plain()
            pp = "-" if r.paper is None else r.paper.to_plain()
            q = "-" if r.ratio is None else r.ratio.to_plain()
            flag = "match" if r.match else "MISMATCH"
            note = f"  ({r.note})" if r.note else ""
            lines.append(f"  {r.term} [{r.group}]: derived {d}; printed {pp}; ratio {q}; {flag}{note}")
        return "\n".join(lines) + "\n"


def _witness(structure, others):
    """A (component, word) present in ``structure`` and absent from every other structure."""
    for k, comp in enumerate(structure):
        for _, word in comp.terms():
            if all(o[k].coefficient(word).is_zero() for o in others):
                return k, word
    return None


def _is_zero_vec(v) -> bool:
    return all(c.is_zero() for c in v)


def paper_form_comparison(r: RateResult | dict, t: PaperTemplate) -> DiscrepancyReport:
    """Fit one coefficient per template term to the derived groups and compare."""
    groups = r.groups if isinstance(r, RateResult) else r
    report = DiscrepancyReport(t.name)
    by_group: dict[str, list[TemplateTerm]] = {}
    for term in t.terms:
        by_group.setdefault(term.group, []).append(term)
    for gname, terms in by_group.items():
        derived = groups.get(gname)
        n = len(terms[0].structure)
        if derived is None:
            derived = tuple(OperatorExpr() for _ in range(n))
        live = [tm for tm in terms if not _is_zero_vec(tm.structure)]
        fitted = {}
        for tm in terms:
            if _is_zero_vec(tm.structure):
                report.rows.append(DiscrepancyRow(t.name, tm.label, gname, None, tm.printed, None,
                                                  True, "structure vanishes identically"))
                continue
            w = _witness(tm.structure, [o.structure for o in live if o is not tm])
            if w is None:
                report.rows.append(DiscrepancyRow(t.name, tm.label, gname, None, tm.printed, None,
                                                  False, "no separating term in structure"))
                continue
            k, word = w
            q = derived[k].coefficient(word).divide_exact(tm.structure[k].coefficient(word))
            fitted[tm.label] = q
            if q is None:
                report.rows.append(DiscrepancyRow(t.name, tm.label, gname, None, tm.printed, None,
                                                  False, "coefficient is not a multiple of the slot"))
                continue
            ratio = q.divide_exact(tm.printed) if not q.is_zero() else None
            note = "term absent from derived result" if q.is_zero() else ""
            report.rows.append(DiscrepancyRow(t.name, tm.label, gname, q, tm.printed, ratio,
                                              q == tm.printed, note))
        remainder = list(derived)
        for tm in live:
            q = fitted.get(tm.label)
            if q is None:
                continue
            for k in range(n):
                remainder[k] = remainder[k] - tm.structure[k] * q
        if not _is_zero_vec(remainder):
            text = "; ".join(render(c) for c in remainder)
            report.rows.append(DiscrepancyRow(t.name, "(unmatched derived terms)", gname, None, None,
                                              None, False, text))
    for gname, comps in groups.items():
        if gname in by_group or gname == "residue":
            continue
        if not _is_zero_vec(comps):
            text = "; ".join(render(c) for c in comps)
            report.rows.append(DiscrepancyRow(t.name, "(group absent from template)", gname, None,
                                              None, None, False, text))
    return report
