"""End-to-end pipelines shared by the command line, the demos and the acceptance tests."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .config import RunConfig, override_coefficient
from .dirac_model import HamiltonianBundle, commutative_hamiltonian, deformed_hamiltonian
from .expr import MOMENTUM, POSITION, OperatorExpr, alpha, p, x
from .heisenberg import (
    DiscrepancyReport, PaperTemplate, RateResult, commutative_limit, declared_zero_commutators,
    deformed_hamiltonian_template, deformed_lorentz_template, hamiltonian_groups,
    kinetic_momentum, kinetic_momentum_rate, lorentz_template, paper_form_comparison,
    position_rate, position_rate_template, velocity_template,
)
from .matrix_rep import (
    MatrixError, MatrixOperator, Realizer, Trajectory, convergence_ratio, ehrenfest_residual,
    evolve, gaussian_packet, hermiticity_residual, identity_residual,
)
from .nc_algebra import ConsistencyReport, algebra_consistency_report
from .operator_ir import canonicalize, is_hermitian_form
from .scalar import I
from .textio import render

__all__ = [
    "Derivation", "CheckResult", "LimitCheck", "VerifyReport", "EvolutionRun", "EvolutionReport",
    "derive", "build_templates", "discrepancy_reports", "limit_checks", "verify",
    "run_evolution", "evolution_report",
]


# ---------------------------------------------------------------------------
# derivation
# ---------------------------------------------------------------------------

@dataclass
class Derivation:
    config: RunConfig
    bundle: HamiltonianBundle
    position: RateResult
    momentum: RateResult
    templates: dict[str, PaperTemplate]


def build_templates(bundle: HamiltonianBundle,
                    overrides: dict[str, dict[str, str]] | None = None) -> dict[str, PaperTemplate]:
    templates = {
        "velocity": velocity_template(bundle),
        "position_rate": position_rate_template(bundle),
        "lorentz_force": lorentz_template(bundle),
        "deformed_lorentz_force": deformed_lorentz_template(bundle),
        "deformed_hamiltonian": deformed_hamiltonian_template(bundle),
    }
    for name, slots in (overrides or {}).items():
        if name not in templates:
            raise KeyError(f"no template named {name!r}")
        for label, text in slots.items():
            path = f"template_overrides.{name}.{label}"
            templates[name] = templates[name].replace_coefficient(label, override_coefficient(text, path))
    return templates


def derive(cfg: RunConfig) -> Derivation:
    bundle = deformed_hamiltonian(cfg.fieldspec, cfg.nc_parameters(), cfg.convention,
                                  cfg.dirac_constants(), max_order=cfg.order)
    return Derivation(cfg, bundle, position_rate(bundle), kinetic_momentum_rate(bundle),
                      build_templates(bundle, cfg.template_overrides))


def discrepancy_reports(d: Derivation) -> dict[str, DiscrepancyReport]:
    t = d.templates
    return {
        "position_rate": paper_form_comparison(d.position, t["position_rate"]),
        "deformed_lorentz_force": paper_form_comparison(d.momentum, t["deformed_lorentz_force"]),
        "deformed_hamiltonian": paper_form_comparison(hamiltonian_groups(d.bundle),
                                                      t["deformed_hamiltonian"]),
    }


# ---------------------------------------------------------------------------
# commutative limits
# ---------------------------------------------------------------------------

@dataclass
class LimitCheck:
    name: str
    derived: tuple[OperatorExpr, ...]
    expected: tuple[OperatorExpr, ...]
    delta: tuple[OperatorExpr, ...]

    @property
    def passed(self) -> bool:
        return all(c.is_zero() for c in self.delta)

    def to_dict(self) -> dict:
        return {"limit": self.name, "pass": self.passed,
                "derived": [render(c) for c in self.derived],
                "expected": [render(c) for c in self.expected],
                "delta": [render(c) for c in self.delta]}


def limit_checks(d: Derivation) -> list[LimitCheck]:
    """Theta, eta -> 0 limits of both rates against the textbook templates."""
    ctx = d.bundle.ctx
    out = []
    for name, rate, template in (
        ("position rate -> c alpha", d.position, d.templates["velocity"]),
        ("kinetic momentum rate -> Lorentz force", d.momentum, d.templates["lorentz_force"]),
    ):
        derived = commutative_limit(rate)
        expected = tuple(canonicalize(e, ctx) for e in template.expression())
        delta = tuple(canonicalize(a - b, ctx) for a, b in zip(derived, expected))
        out.append(LimitCheck(name, derived, expected, delta))
    return out


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    identity: str
    category: str
    status: str
    residual: float | None = None
    tolerance: float | None = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        out = {"identity": self.identity, "category": self.category, "status": self.status,
               "pass": self.passed}
        if self.residual is not None:
            out["residual"] = self.residual
            out["tolerance"] = self.tolerance
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerifyReport:
    checks: list[CheckResult]
    audit: ConsistencyReport
    discrepancies: dict[str, DiscrepancyReport]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def findings(self) -> list[str]:
        out = [f"audit: {r.relation} derived {r.derived.to_plain()} vs printed {r.paper.to_plain()}"
               for r in self.audit.findings()]
        for name, rep in self.discrepancies.items():
            for r in rep.findings():
                d = "-" if r.derived is None else r.derived.to_plain()
                pp = "-" if r.paper is None else r.paper.to_plain()
                out.append(f"{name}: {r.term} derived {d} vs printed {pp}")
        return out

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "findings": self.findings(),
            "audit": self.audit.to_dict(),
            "discrepancies": {k: v.to_dict() for k, v in self.discrepancies.items()},
        }


def _symbolic(name: str, ok: bool, detail: str = "") -> CheckResult:
    return CheckResult(name, "symbolic", "pass" if ok else "fail", detail="" if ok else detail)


def _unsupported(realizer: Realizer, exprs) -> list[str]:
    """Positions beyond the basis dimension that survive with a non-zero coefficient."""
    bad = set()
    for e in exprs:
        for coeff, word in realizer.expand(e).terms():
            if coeff.evaluate(realizer.values) == 0:
                continue
            for a in word:
                if a.kind in (POSITION, MOMENTUM) and a.axis > realizer.basis.dim:
                    if not (a.kind == MOMENTUM and realizer.basis.dim == 2):
                        bad.add(a.plain())
    return sorted(bad)


def _numeric_tasks(d: Derivation, realizer: Realizer) -> list[Callable[[], CheckResult]]:
    cfg = d.config
    tol = cfg.tolerances
    basis = cfg.basis
    hbar = cfg.constants["hbar"]
    h_expr = d.bundle.explicit()
    kin = kinetic_momentum(cfg.fieldspec, cfg.dirac_constants())
    tasks: list[Callable[[], CheckResult]] = []

    def hermitian(name: str, e: OperatorExpr):
        def run():
            res = hermiticity_residual(realizer(e))
            ok = res <= tol["hermiticity"]
            return CheckResult(name, "hermiticity", "pass" if ok else "fail", res, tol["hermiticity"])
        run.check_name = name
        return run

    def commutator_identity(name: str, category: str, a: OperatorExpr, b: OperatorExpr,
                            value: OperatorExpr, scale: complex, tolerance: float):
        def run():
            bad = _unsupported(realizer, (a, b, value))
            if bad:
                return CheckResult(name, category, "skip",
                                   detail=f"{', '.join(bad)} outside the {basis.dim}-dimensional basis")
            am, bm = realizer(a), realizer(b)
            lhs = (am @ bm - bm @ am).scaled(scale)
            res = identity_residual(lhs, realizer(value), basis, realizer.values)
            ok = res <= tolerance
            return CheckResult(name, category, "pass" if ok else "fail", res, tolerance)
        run.check_name = name
        return run

    tasks.append(hermitian("realize(H_nc) is Hermitian", h_expr))
    for k in range(1, basis.dim + 1):
        tasks.append(hermitian(f"realize(D{k}) is Hermitian", kin[k - 1]))
    one = OperatorExpr.scalar(1)
    tasks.append(commutator_identity("[x1, p1] = i hbar", "ccr", OperatorExpr.atom(x(1)),
                                     OperatorExpr.atom(p(1)), one * (I * d.bundle.ctx.hbar), 1,
                                     tol["zero_commutator"]))
    for k in (1, 2, 3):
        tasks.append(commutator_identity(
            f"dx{k}/dt = (i/hbar)[H_nc, x{k}]", "rate", h_expr, OperatorExpr.atom(x(k)),
            d.position.components[k - 1], 1j / hbar, tol["identity"]))
        tasks.append(commutator_identity(
            f"dD{k}/dt = (i/hbar)[H_nc, D{k}]", "rate", h_expr, kin[k - 1],
            d.momentum.components[k - 1], 1j / hbar, tol["identity"]))
    for entry in d.position.trace + d.momentum.trace:
        zero = entry.value.is_zero()
        tasks.append(commutator_identity(
            entry.label, "trace", entry.left, entry.right, entry.value, 1,
            tol["zero_commutator"] if zero else tol["identity"]))
    for entry in declared_zero_commutators(d.bundle):
        tasks.append(commutator_identity(
            f"{entry.label} = 0", "declared-zero", entry.left, entry.right, entry.value, 1,
            tol["zero_commutator"]))
    return tasks


def _symbolic_checks(d: Derivation) -> list[CheckResult]:
    ctx = d.bundle.ctx
    checks = []
    for label, r in (("position", d.position), ("kinetic momentum", d.momentum)):
        residue = r.group("residue")
        checks.append(_symbolic(f"{label} rate residue is empty", r.residue_is_empty(),
                                "; ".join(render(c) for c in residue)))
        lim = commutative_limit(r)
        syms = set().union(*(c.symbols() for c in lim))
        checks.append(_symbolic(f"{label} rate limit is free of Theta and eta",
                                not ({"Theta", "eta"} & syms), ", ".join(sorted(syms))))
    nonzero = [t.label for t in declared_zero_commutators(d.bundle) if not t.value.is_zero()]
    checks.append(_symbolic("declared zero commutators vanish exactly", not nonzero,
                            ", ".join(nonzero)))
    for lc in limit_checks(d):
        checks.append(_symbolic(f"limit: {lc.name}", lc.passed,
                                "delta = " + "; ".join(render(c) for c in lc.delta)))
    h_nc = d.bundle.h_nc.subs({"Theta": 0, "eta": 0})
    h_c = commutative_hamiltonian(d.config.fieldspec, d.bundle.consts)
    checks.append(_symbolic("H_nc(Theta = eta = 0) equals H", canonicalize(h_nc - h_c, ctx).is_zero(),
                            render(canonicalize(h_nc - h_c, ctx))))
    checks.append(_symbolic("H_nc is Hermitian (symbolic)",
                            is_hermitian_form(d.bundle.explicit(), ctx),
                            "H_nc differs from its adjoint"))
    return checks


def verify(cfg: RunConfig, workers: int = 4) -> VerifyReport:
    """All internal-consistency checks; mismatches against printed coefficients are findings only."""
    d = derive(cfg)
    realizer = Realizer(cfg.basis, cfg.values(), cfg.fieldspec)
    checks = _symbolic_checks(d)
    tasks = _numeric_tasks(d, realizer)
    # warm the atom cache before sharing the realizer between threads
    realizer(d.bundle.explicit())

    def guarded(task):
        try:
            return task()
        except MatrixError as exc:
            return CheckResult(task.check_name, "numeric", "fail",
                               detail=str(exc))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        checks.extend(pool.map(guarded, tasks))
    audit = algebra_consistency_report(cfg.nc_parameters(), cfg.convention)
    return VerifyReport(checks, audit, discrepancy_reports(d))


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------

@dataclass
class EvolutionRun:
    dt: float
    steps: int
    trajectory: Trajectory
    residuals: dict[str, float]
    invariants: dict[str, float]


@dataclass
class EvolutionReport:
    runs: list[EvolutionRun]
    records: list[dict[str, Any]] = field(default_factory=list)
    convergence: dict[str, dict[str, float]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r["pass"] for r in self.records)

    @property
    def trajectory(self) -> Trajectory:
        return self.runs[0].trajectory

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "records": self.records,
            "convergence": self.convergence,
            "runs": [{"dt": r.dt, "steps": r.steps, "max_residual": r.residuals,
                      "invariants": r.invariants} for r in self.runs],
        }


def _observables(d: Derivation, realizer: Realizer) -> tuple[dict[str, MatrixOperator], dict[str, str]]:
    cfg = d.config
    kin = kinetic_momentum(cfg.fieldspec, cfg.dirac_constants())
    c = cfg.constants["c"]
    obs = {"H": realizer(d.bundle.explicit())}
    pairs = {}
    for k in range(1, cfg.basis.dim + 1):
        obs[f"x{k}"] = realizer(OperatorExpr.atom(x(k)))
        obs[f"rate_x{k}"] = realizer(d.position.components[k - 1])
        obs[f"D{k}"] = realizer(kin[k - 1])
        obs[f"rate_D{k}"] = realizer(d.momentum.components[k - 1])
        pairs[f"x{k}"] = f"rate_x{k}"
        pairs[f"D{k}"] = f"rate_D{k}"
    for i in (1, 2, 3):
        obs[f"c_alpha{i}"] = realizer(OperatorExpr.atom(alpha(i), c))
    return obs, pairs


def run_evolution(d: Derivation, dt: float | None = None, steps: int | None = None) -> EvolutionRun:
    cfg = d.config
    evo = cfg.evolution
    dt = evo["dt"] if dt is None else dt
    steps = evo["steps"] if steps is None else steps
    realizer = Realizer(cfg.basis, cfg.values(), cfg.fieldspec)
    obs, pairs = _observables(d, realizer)
    psi0 = gaussian_packet(cfg.basis, evo["x0"], evo["p0"], evo["spinor"], cfg.values())
    traj = evolve(obs["H"], psi0, dt, steps, obs, hbar=cfg.constants["hbar"],
                  hermiticity_tolerance=cfg.tolerances["hermiticity"])
    res = ehrenfest_residual(traj, pairs)
    c = cfg.constants["c"]
    speed = max(float(np.max(np.abs(traj.columns[f"c_alpha{i}"]))) for i in (1, 2, 3))
    invariants = {
        "norm_drift": float(np.max(np.abs(traj.norms - traj.norms[0]))),
        "energy_drift": float(np.ptp(traj.columns["H"])),
        "max_abs_c_alpha": speed,
        "speed_of_light": c,
    }
    return EvolutionRun(dt, steps, traj, {k: v.max_residual for k, v in res.items()}, invariants)


def evolution_report(cfg: RunConfig, d: Derivation | None = None) -> EvolutionReport:
    """Evolve at ``dt`` (and ``dt/2`` for the convergence estimate) and grade the results."""
    d = derive(cfg) if d is None else d
    tol = cfg.tolerances
    evo = cfg.evolution
    runs = [run_evolution(d)]
    if evo["convergence"]:
        runs.append(run_evolution(d, evo["dt"] / 2, evo["steps"] * 2))
    report = EvolutionReport(runs)
    base = runs[0]
    for name, value in base.residuals.items():
        report.records.append({"identity": f"d<{name}>/dt = <rate_{name}>", "residual": value,
                               "tolerance": tol["ehrenfest"], "pass": value <= tol["ehrenfest"]})
    inv = base.invariants
    report.records += [
        {"identity": "norm drift", "residual": inv["norm_drift"], "tolerance": tol["norm_drift"],
         "pass": inv["norm_drift"] <= tol["norm_drift"]},
        {"identity": "energy drift", "residual": inv["energy_drift"],
         "tolerance": tol["energy_drift"], "pass": inv["energy_drift"] <= tol["energy_drift"]},
        {"identity": "|<c alpha_i>| <= c", "residual": inv["max_abs_c_alpha"],
         "tolerance": inv["speed_of_light"],
         "pass": inv["max_abs_c_alpha"] <= inv["speed_of_light"] * (1 + 1e-12)},
    ]
    if len(runs) == 2:
        lo, hi = tol["convergence_window"]
        for name in base.residuals:
            ratio, order = convergence_ratio(base.residuals[name], runs[1].residuals[name])
            ok = bool(lo <= ratio <= hi)
            report.convergence[name] = {"ratio": ratio, "order": order}
            report.records.append({"identity": f"convergence of d<{name}>/dt", "residual": ratio,
                                   "tolerance": [lo, hi], "pass": ok})
    return report
