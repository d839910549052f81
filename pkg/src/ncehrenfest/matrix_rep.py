"""Finite matrix realization in a spinor (x) Fock basis; the numerical oracle.

Each spatial axis carries an oscillator ladder truncated to ``N`` levels with
``x = s (a + a^dag)`` and ``p = i t (a^dag - a)``, ``s = sqrt(hbar / 2 m w)``,
``t = sqrt(m hbar w / 2)``.  Truncation only corrupts matrix elements that
touch the top levels, so identities are compared on the guarded block where
every Fock index is at most ``N - g - 1``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg  # noqa: F401  (registers sp.linalg)
from scipy.stats import poisson

from .context import FieldSpec
from .expr import ALPHA, BETA, FIELD, MOMENTUM, POSITION, Atom, OperatorExpr

__all__ = [
    "MatrixError", "OccupancyError", "Realizer", "FockBasisConfig", "MatrixOperator", "StateVector",
    "Trajectory", "ResidualRecord", "EhrenfestResult", "dirac_alpha", "dirac_beta", "realize",
    "spectral_norm", "identity_residual", "commutator_residual", "hermiticity_residual", "gaussian_packet",
    "evolve", "ehrenfest_residual", "convergence_ratio",
]

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def dirac_alpha(i: int) -> np.ndarray:
    """``alpha_i = [[0, sigma_i], [sigma_i, 0]]`` (Dirac representation)."""
    z = np.zeros((2, 2), dtype=complex)
    s = _SIGMA[i - 1]
    return np.block([[z, s], [s, z]])


def dirac_beta() -> np.ndarray:
    return np.diag([1, 1, -1, -1]).astype(complex)


class MatrixError(ValueError):
    """An expression cannot be realized in the configured basis."""


class OccupancyError(MatrixError):
    """A requested packet puts too much weight near the truncation edge."""


@dataclass(frozen=True)
class FockBasisConfig:
    """Spinor (x) Fock basis: ``dim`` spatial axes with ``levels`` states each."""

    dim: int = 2
    levels: int = 16
    omega: float = 1.0
    guard: int = 6

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {self.dim}")
        if self.levels < 8:
            raise ValueError(f"need at least 8 levels per axis, got {self.levels}")
        if not 0 < self.guard < self.levels / 2:
            raise ValueError(f"guard band must satisfy 0 < g < N/2, got g={self.guard}")
        if self.omega <= 0:
            raise ValueError("oscillator frequency must be positive")

    @property
    def spatial_size(self) -> int:
        return self.levels ** self.dim

    @property
    def size(self) -> int:
        return 4 * self.spatial_size

    @cached_property
    def guarded_indices(self) -> np.ndarray:
        """Full-space indices whose every Fock index is at most ``N - g - 1``."""
        keep = self.levels - self.guard
        axes = [np.arange(self.levels)] * self.dim
        grids = np.meshgrid(*axes, indexing="ij")
        mask = np.ones(self.spatial_size, dtype=bool)
        for g in grids:
            mask &= (g.ravel() < keep)
        spatial = np.flatnonzero(mask)
        return np.concatenate([s * self.spatial_size + spatial for s in range(4)])

    def scales(self, hbar: float, m: float) -> tuple[float, float]:
        return math.sqrt(hbar / (2 * m * self.omega)), math.sqrt(m * hbar * self.omega / 2)


@dataclass(frozen=True)
class MatrixOperator:
    """Sparse-backed operator on the spinor (x) Fock space."""

    matrix: sp.csr_matrix
    basis: FockBasisConfig

    @property
    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, other: "MatrixOperator") -> "MatrixOperator":
        return MatrixOperator((self.matrix @ other.matrix).tocsr(), self.basis)

    def __add__(self, other: "MatrixOperator") -> "MatrixOperator":
        return MatrixOperator((self.matrix + other.matrix).tocsr(), self.basis)

    def __sub__(self, other: "MatrixOperator") -> "MatrixOperator":
        return MatrixOperator((self.matrix - other.matrix).tocsr(), self.basis)

    def scaled(self, k: complex) -> "MatrixOperator":
        return MatrixOperator((self.matrix * k).tocsr(), self.basis)

    def adjoint(self) -> "MatrixOperator":
        return MatrixOperator(self.matrix.conj().T.tocsr(), self.basis)

    def guarded(self) -> np.ndarray:
        idx = self.basis.guarded_indices
        return self.matrix[idx][:, idx].toarray()


@dataclass(frozen=True)
class StateVector:
    vector: np.ndarray
    basis: FockBasisConfig

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def expectation(self, op: MatrixOperator) -> complex:
        return complex(np.vdot(self.vector, op.matrix @ self.vector))


# ---------------------------------------------------------------------------
# realization
# ---------------------------------------------------------------------------

def _ladder(n: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, format="csr", dtype=complex)


class Realizer:
    """Reusable ``realize`` that caches atom matrices across calls."""

    def __init__(self, basis: FockBasisConfig, values: Mapping[str, complex],
                 fieldspec: FieldSpec | None):
        self.basis = basis
        self.values = dict(values)
        self.fieldspec = fieldspec
        self._cache: dict[Atom, sp.csr_matrix] = {}
        self._spin = {("alpha", i): dirac_alpha(i) for i in (1, 2, 3)}
        self._spin[("beta", 0)] = dirac_beta()

    def _scales(self):
        missing = [k for k in ("hbar", "m") if k not in self.values]
        if missing:
            raise MatrixError(f"unbound constant(s) {missing} needed for position/momentum scales")
        return self.basis.scales(float(np.real(self.values["hbar"])), float(np.real(self.values["m"])))

    def _axis_embed(self, single: sp.csr_matrix, axis: int) -> sp.csr_matrix:
        n = self.basis.levels
        if self.basis.dim == 1:
            return single
        eye = sp.identity(n, dtype=complex, format="csr")
        return sp.kron(single, eye, format="csr") if axis == 1 else sp.kron(eye, single, format="csr")

    def spatial(self, a: Atom) -> sp.csr_matrix | None:
        """Spatial matrix of a position/momentum atom; ``None`` means the zero operator."""
        if a in self._cache:
            return self._cache[a]
        d = self.basis.dim
        if a.axis > d:
            if a.kind == MOMENTUM and d == 2 and a.axis == 3:
                self._cache[a] = None
                return None
            raise MatrixError(f"{a.plain()} has no realization in a {d}-dimensional basis")
        s, t = self._scales()
        lad = _ladder(self.basis.levels)
        if a.kind == POSITION:
            single = (lad + lad.T) * s
        else:
            single = (lad.T - lad) * (1j * t)
        m = self._axis_embed(single.tocsr(), a.axis)
        self._cache[a] = m
        return m

    def expand(self, e: OperatorExpr) -> OperatorExpr:
        if not any(a.kind == FIELD for a in e.atoms()):
            return e
        if self.fieldspec is None or not self.fieldspec.is_concrete:
            raise MatrixError("field atoms need a concrete field spec to be realized")
        out = OperatorExpr()
        for coeff, word in e.terms():
            prod = OperatorExpr.scalar(coeff)
            for a in word:
                prod = prod * (self.fieldspec.polynomial(a) if a.kind == FIELD else OperatorExpr.atom(a))
            out = out + prod
        return out

    def __call__(self, e: OperatorExpr) -> MatrixOperator:
        e = self.expand(OperatorExpr._lift(e))
        size = self.basis.spatial_size
        eye = sp.identity(size, dtype=complex, format="csr")
        by_spin: dict[bytes, tuple[np.ndarray, sp.csr_matrix]] = {}
        for coeff, word in e.terms():
            missing = coeff.symbols() - set(self.values)
            if missing:
                raise MatrixError(f"unbound constant(s) {sorted(missing)} in coefficient {coeff}")
            k = coeff.evaluate(self.values)
            if k == 0:
                continue
            spin = np.eye(4, dtype=complex)
            spatial = eye
            zero = False
            for a in word:
                if a.kind == ALPHA:
                    spin = spin @ self._spin[("alpha", a.axis)]
                elif a.kind == BETA:
                    spin = spin @ self._spin[("beta", 0)]
                else:
                    m = self.spatial(a)
                    if m is None:
                        zero = True
                        break
                    spatial = spatial @ m
            if zero:
                continue
            key = np.round(spin, 12).tobytes()
            if key in by_spin:
                s0, acc = by_spin[key]
                by_spin[key] = (s0, acc + spatial * k)
            else:
                by_spin[key] = (spin, spatial * k)
        total = sp.csr_matrix((4 * size, 4 * size), dtype=complex)
        for spin, spatial in by_spin.values():
            total = total + sp.kron(sp.csr_matrix(spin), spatial, format="csr")
        total.eliminate_zeros()
        return MatrixOperator(total.tocsr(), self.basis)


def realize(e: OperatorExpr, basis: FockBasisConfig, values: Mapping[str, complex],
            fieldspec: FieldSpec | None = None) -> MatrixOperator:
    """Matrix of ``e`` with every symbol bound by ``values``.

    Products are realized in the written factor order, so ``realize`` is a
    homomorphism on raw expressions.  In a 2-dimensional basis ``p3`` acts as
    zero (no dependence on the third coordinate) while ``x3`` is rejected.
    """
    return Realizer(basis, values, fieldspec)(e)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualRecord:
    identity: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {"identity": self.identity, "residual": self.residual,
                "tolerance": self.tolerance, "pass": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _as_matrix(e, basis, values, fieldspec) -> MatrixOperator:
    if isinstance(e, MatrixOperator):
        return e
    return realize(e, basis, values, fieldspec)


def spectral_norm(a) -> float:
    """Largest singular value, from the top eigenvalue of ``A^dag A``."""
    if sp.issparse(a):
        if a.count_nonzero() == 0:
            return 0.0
        a = a.toarray()
    if a.size == 0 or not np.any(a):
        return 0.0
    gram = a.conj().T @ a if a.shape[0] >= a.shape[1] else a @ a.conj().T
    gram = 0.5 * (gram + gram.conj().T)
    n = gram.shape[0]
    try:
        top = scipy.linalg.eigvalsh(gram, subset_by_index=[n - 1, n - 1], driver="evx")[0]
    except np.linalg.LinAlgError:
        return float(np.linalg.norm(a, 2))
    return float(math.sqrt(max(top, 0.0)))


def identity_residual(lhs, rhs, basis: FockBasisConfig, values: Mapping[str, complex],
                      fieldspec: FieldSpec | None = None) -> float:
    """``||P (L - R) P|| / max(1, ||P R P||)`` in the spectral norm."""
    idx = basis.guarded_indices
    left = _as_matrix(lhs, basis, values, fieldspec).matrix[idx][:, idx]
    right = _as_matrix(rhs, basis, values, fieldspec).matrix[idx][:, idx]
    num = spectral_norm(left - right)
    if num == 0.0:
        return 0.0
    return num / max(1.0, spectral_norm(right))


def commutator_residual(a, b, value, basis: FockBasisConfig, values: Mapping[str, complex],
                        fieldspec: FieldSpec | None = None, scale: complex = 1.0) -> float:
    """Residual of ``scale * [A, B] = value`` with the commutator taken as matrices."""
    am = _as_matrix(a, basis, values, fieldspec)
    bm = _as_matrix(b, basis, values, fieldspec)
    comm = (am @ bm - bm @ am).scaled(scale)
    return identity_residual(comm, value, basis, values, fieldspec)


def hermiticity_residual(op: MatrixOperator | np.ndarray) -> float:
    """``||M - M^dag||_F / max(1, ||M||_2)``; Frobenius bounds the spectral norm from above."""
    m = op.matrix if isinstance(op, MatrixOperator) else sp.csr_matrix(np.asarray(op))
    diff = m - m.conj().T
    if diff.count_nonzero() == 0:
        return 0.0
    num = float(sp.linalg.norm(diff))
    return num / max(1.0, spectral_norm(m))


# ---------------------------------------------------------------------------
# packets and evolution
# ---------------------------------------------------------------------------

def gaussian_packet(basis: FockBasisConfig, x0, p0, spinor, values: Mapping[str, complex],
                    tail_tolerance: float = 1e-12) -> StateVector:
    """Coherent state of the scaffold oscillator centred at ``(x0, p0)`` times a spinor."""
    d = basis.dim
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    if x0.shape != (d,) or p0.shape != (d,):
        raise ValueError(f"x0 and p0 need {d} components")
    w = np.asarray(spinor, dtype=complex)
    if w.shape != (4,) or not np.any(w):
        raise ValueError("spinor weights need four components, not all zero")
    w = w / np.linalg.norm(w)
    s, t = basis.scales(float(np.real(values["hbar"])), float(np.real(values["m"])))
    keep = basis.levels - basis.guard
    n = np.arange(basis.levels)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    spatial = np.ones(1, dtype=complex)
    for j in range(d):
        amp = x0[j] / (2 * s) + 1j * p0[j] / (2 * t)
        spill = float(poisson.sf(keep - 1, abs(amp) ** 2))
        if spill >= tail_tolerance:
            raise OccupancyError(
                f"axis {j + 1}: probability {spill:.3e} beyond Fock level {keep - 1} "
                f"(tolerance {tail_tolerance:.0e}); reduce |x0|, |p0| or raise N")
        with np.errstate(divide="ignore"):
            log_abs = np.where(n > 0, n * np.log(abs(amp)) if amp != 0 else -np.inf, 0.0)
        coeff = np.exp(log_abs - 0.5 * log_fact) * np.exp(1j * n * np.angle(amp))
        if amp == 0:
            coeff = (n == 0).astype(complex)
        spatial = np.kron(spatial, coeff)
    spatial /= np.linalg.norm(spatial)
    return StateVector(np.kron(w, spatial), basis)


@dataclass
class Trajectory:
    """Expectation values on a uniform time grid."""

    times: np.ndarray
    norms: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = list(self.columns)
        w.writerow(["t", "norm"] + names)
        for k, t in enumerate(self.times):
            w.writerow([f"{t:.17g}", f"{self.norms[k]:.17g}"]
                       + [f"{self.columns[n][k]:.17g}" for n in names])
        return buf.getvalue()


def evolve(h: MatrixOperator, psi0: StateVector, dt: float, steps: int,
           observables: Mapping[str, MatrixOperator], hbar: float = 1.0,
           hermiticity_tolerance: float = 1e-12) -> Trajectory:
    """Exact propagation ``psi(t) = exp(-i H t / hbar) psi0`` from one eigendecomposition."""
    if dt <= 0 or steps < 1:
        raise ValueError("need dt > 0 and at least one step")
    dense = h.dense
    res = hermiticity_residual(dense)
    if res > hermiticity_tolerance:
        raise MatrixError(f"Hamiltonian is not Hermitian: residual {res:.3e}")
    energies, vecs = np.linalg.eigh(0.5 * (dense + dense.conj().T))
    times = dt * np.arange(steps + 1)
    c0 = vecs.conj().T @ psi0.vector
    phases = np.exp(-1j * np.outer(energies, times) / hbar)
    states = vecs @ (phases * c0[:, None])
    norms = np.linalg.norm(states, axis=0)
    cols = {}
    for name, op in observables.items():
        vals = np.einsum("ij,ij->j", states.conj(), op.matrix @ states)
        cols[name] = vals.real
    return Trajectory(times, norms, cols)


@dataclass(frozen=True)
class EhrenfestResult:
    observable: str
    rate: str
    residuals: np.ndarray
    max_residual: float

    def to_dict(self) -> dict:
        return {"observable": self.observable, "rate": self.rate, "max_residual": self.max_residual}


def ehrenfest_residual(traj: Trajectory, pairs: Mapping[str, str]) -> dict[str, EhrenfestResult]:
    """``|central difference of <F>| - <rate>|`` at interior times, per ``{F: rate}`` pair."""
    out = {}
    for obs, rate in pairs.items():
        missing = [c for c in (obs, rate) if c not in traj.columns]
        if missing:
            raise KeyError(f"trajectory lacks column(s) {missing}")
        f = traj.columns[obs]
        deriv = (f[2:] - f[:-2]) / (2 * traj.dt)
        r = np.abs(deriv - traj.columns[rate][1:-1])
        out[obs] = EhrenfestResult(obs, rate, r, float(r.max()))
    return out


def convergence_ratio(coarse: float, fine: float) -> tuple[float, float]:
    """``(ratio, empirical order)`` for residuals at ``dt`` and ``dt / 2``."""
    if fine == 0:
        return math.inf, math.inf
    ratio = coarse / fine
    return ratio, math.log2(ratio) if ratio > 0 else -math.inf
