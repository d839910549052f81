"""Run configuration: one JSON document, every key defaulted, unknown keys rejected."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .context import CONVENTIONS, E_SYMBOLS, ConventionConfig, FieldSpec, NCParameters, convention
from .dirac_model import DiracConstants
from .matrix_rep import FockBasisConfig
from .scalar import Scalar, sym
from .textio import ParseError, parse_expr

__all__ = ["ConfigError", "RunConfig", "DEFAULTS", "load_config"]


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


DEFAULTS: dict[str, Any] = {
    "convention": "default",
    "order": 1,
    "nc": {"theta": 0.01, "eta": 0.01},
    "constants": {"hbar": 1.0, "c": 1.0, "m": 1.0, "e": 1.0},
    "field": {
        "kind": "symmetric-gauge",
        "B": 1.0,
        "E": [0.1, 0.0, 0.0],
        "vector_potential": None,
        "scalar_potential": None,
    },
    "basis": {"dim": 2, "levels": 16, "omega": 1.0, "guard": 6},
    "evolution": {
        "dt": 1e-3,
        "steps": 2000,
        "x0": [0.25, 0.0],
        "p0": [0.0, 0.0],
        "spinor": [1.0, 0.0, 0.0, 0.0],
        "convergence": True,
    },
    "tolerances": {
        "identity": 1e-10,
        "zero_commutator": 1e-12,
        "hermiticity": 1e-12,
        "norm_drift": 1e-12,
        "energy_drift": 1e-10,
        "ehrenfest": 1e-5,
        "convergence_window": [3.6, 4.4],
    },
    "template_overrides": {},
}

_FIELD_KINDS = ("symmetric-gauge", "uniform-electric", "free", "custom")


def _merge(base: dict, override: dict, path: str) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        here = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(here, "unknown key")
        if isinstance(base[key], dict) and key != "template_overrides":
            if not isinstance(value, dict):
                raise ConfigError(here, "expected an object")
            out[key] = _merge(base[key], value, here)
        else:
            out[key] = value
    return out


def _number(raw: dict, path: str, positive: bool = False) -> float:
    node = raw
    for part in path.split("."):
        node = node[part]
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(path, f"expected a number, got {node!r}")
    if positive and node <= 0:
        raise ConfigError(path, "must be positive")
    return float(node)


def _vector(raw: dict, path: str, n: int) -> tuple[float, ...]:
    node = raw
    for part in path.split("."):
        node = node[part]
    if not isinstance(node, list) or len(node) != n:
        raise ConfigError(path, f"expected a list of {n} numbers")
    for k, v in enumerate(node):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{path}[{k}]", f"expected a number, got {v!r}")
    return tuple(float(v) for v in node)


@dataclass(frozen=True)
class RunConfig:
    """Validated settings shared by every subcommand."""

    raw: dict
    convention: ConventionConfig
    order: int
    theta: float
    eta: float
    constants: dict[str, float]
    field_kind: str
    b_field: float
    e_field: tuple[float, float, float]
    fieldspec: FieldSpec
    basis: FockBasisConfig
    tolerances: dict[str, Any]
    template_overrides: dict[str, dict[str, str]]

    # ---- symbolic side ----
    def nc_parameters(self) -> NCParameters:
        """Symbolic Theta/eta unless the config switches one off (then exactly zero)."""
        return NCParameters(theta=sym("Theta") if self.theta else 0,
                            eta=sym("eta") if self.eta else 0)

    def dirac_constants(self) -> DiracConstants:
        return DiracConstants()

    # ---- numeric side ----
    def values(self) -> dict[str, float]:
        vals = dict(self.constants)
        vals.update(Theta=self.theta, eta=self.eta, B=self.b_field,
                    E1=self.e_field[0], E2=self.e_field[1], E3=self.e_field[2])
        return vals

    @property
    def evolution(self) -> dict[str, Any]:
        return self.raw["evolution"]

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)

    # ---- construction ----
    @classmethod
    def from_dict(cls, data: dict | None = None, convention_name: str | None = None,
                  order: int | None = None) -> "RunConfig":
        if data is not None and not isinstance(data, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        raw = _merge(DEFAULTS, data or {}, "")
        if convention_name is not None:
            raw["convention"] = convention_name
        if order is not None:
            raw["order"] = order
        if raw["convention"] not in CONVENTIONS:
            raise ConfigError("convention", f"unknown convention {raw['convention']!r}; "
                                            f"choose from {sorted(CONVENTIONS)}")
        if not isinstance(raw["order"], int) or isinstance(raw["order"], bool) or raw["order"] < 1:
            raise ConfigError("order", "must be a positive integer")

        theta = _number(raw, "nc.theta")
        eta = _number(raw, "nc.eta")
        consts = {k: _number(raw, f"constants.{k}", positive=True) for k in ("hbar", "c", "m", "e")}

        fraw = raw["field"]
        kind = fraw["kind"]
        if kind not in _FIELD_KINDS:
            raise ConfigError("field.kind", f"unknown field kind {kind!r}; choose from {_FIELD_KINDS}")
        b_field = _number(raw, "field.B")
        e_field = _vector(raw, "field.E", 3)
        fieldspec = _build_field(kind, fraw)

        braw = raw["basis"]
        for key in ("dim", "levels", "guard"):
            if not isinstance(braw[key], int) or isinstance(braw[key], bool):
                raise ConfigError(f"basis.{key}", "expected an integer")
        try:
            basis = FockBasisConfig(braw["dim"], braw["levels"], _number(raw, "basis.omega", True),
                                    braw["guard"])
        except ValueError as exc:
            raise ConfigError("basis", str(exc)) from None
        if basis.dim == 1 and (theta or eta):
            raise ConfigError("basis.dim", "a 1-dimensional basis needs theta = eta = 0")

        evo = raw["evolution"]
        _number(raw, "evolution.dt", positive=True)
        if not isinstance(evo["steps"], int) or isinstance(evo["steps"], bool) or evo["steps"] < 2:
            raise ConfigError("evolution.steps", "expected an integer of at least 2")
        _vector(raw, "evolution.x0", basis.dim)
        _vector(raw, "evolution.p0", basis.dim)
        _vector(raw, "evolution.spinor", 4)
        if not isinstance(evo["convergence"], bool):
            raise ConfigError("evolution.convergence", "expected true or false")

        tol = raw["tolerances"]
        for key in tol:
            if key == "convergence_window":
                lo, hi = _vector(raw, "tolerances.convergence_window", 2)
                if not 0 < lo < hi:
                    raise ConfigError("tolerances.convergence_window", "need 0 < low < high")
            else:
                _number(raw, f"tolerances.{key}", positive=True)

        overrides = raw["template_overrides"]
        if not isinstance(overrides, dict):
            raise ConfigError("template_overrides", "expected an object")
        for name, slots in overrides.items():
            if not isinstance(slots, dict):
                raise ConfigError(f"template_overrides.{name}", "expected an object")
            for label, text in slots.items():
                _coefficient(text, f"template_overrides.{name}.{label}")

        return cls(raw, convention(raw["convention"]), raw["order"], theta, eta, consts, kind,
                   b_field, e_field, fieldspec, basis, tol, overrides)


def _coefficient(text: Any, path: str) -> Scalar:
    if not isinstance(text, str):
        raise ConfigError(path, "expected an expression string")
    try:
        e = parse_expr(text)
    except ParseError as exc:
        raise ConfigError(path, str(exc)) from None
    if not e.is_scalar():
        raise ConfigError(path, "coefficient must not contain operators")
    return e.scalar_value()


def override_coefficient(text: str, path: str = "template_overrides") -> Scalar:
    return _coefficient(text, path)


def _build_field(kind: str, fraw: dict) -> FieldSpec:
    """Symbolic field for derivations; B and E stay as symbols bound later."""
    if kind == "symmetric-gauge":
        return FieldSpec.symmetric_gauge(e_field=E_SYMBOLS)
    if kind == "uniform-electric":
        return FieldSpec.uniform_electric(E_SYMBOLS)
    if kind == "free":
        return FieldSpec.free()
    a_raw, phi_raw = fraw["vector_potential"], fraw["scalar_potential"]
    if not isinstance(a_raw, list) or len(a_raw) != 3:
        raise ConfigError("field.vector_potential", "custom fields need three expression strings")
    if not isinstance(phi_raw, str):
        raise ConfigError("field.scalar_potential", "custom fields need an expression string")
    try:
        a_vec = [parse_expr(s) for s in a_raw]
        phi = parse_expr(phi_raw)
        return FieldSpec.custom(a_vec, phi, max_degree=1).with_label("custom")
    except (ParseError, ValueError, TypeError) as exc:
        raise ConfigError("field", f"invalid custom potential: {exc}") from None


def load_config(path: str | Path | None, convention_name: str | None = None,
                order: int | None = None) -> RunConfig:
    """Read a JSON config file (``None`` means all defaults)."""
    data = None
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON at line {exc.lineno} column {exc.colno}: "
                                        f"{exc.msg}") from None
    return RunConfig.from_dict(data, convention_name, order)
