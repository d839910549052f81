import numpy as np
import pytest
import scipy.sparse as sp

from ncehrenfest.context import FieldSpec
from ncehrenfest.dirac_model import DiracConstants, commutative_hamiltonian
from ncehrenfest.expr import OperatorExpr, a_field, alpha, beta, p, x
from ncehrenfest.heisenberg import kinetic_momentum
from ncehrenfest.matrix_rep import (
    FockBasisConfig,
    MatrixError,
    MatrixOperator,
    OccupancyError,
    Trajectory,
    commutator_residual,
    convergence_ratio,
    dirac_alpha,
    dirac_beta,
    ehrenfest_residual,
    evolve,
    gaussian_packet,
    hermiticity_residual,
    identity_residual,
    realize,
    spectral_norm,
)
from ncehrenfest.scalar import I, sym

VALUES = {"hbar": 1.0, "m": 1.0, "c": 1.0, "e": 1.0, "B": 1.0, "Theta": 0.01, "eta": 0.01}
BASIS = FockBasisConfig(dim=2, levels=16, guard=6)


def atom(a, k=1):
    return OperatorExpr.atom(a, k)


def test_identity_realizes_to_identity():
    m = realize(OperatorExpr.scalar(1), BASIS, VALUES)
    assert m.matrix.shape == (BASIS.size, BASIS.size)
    assert np.allclose(m.dense, np.eye(BASIS.size))


def test_ccr_on_guarded_block():
    res = commutator_residual(atom(x(1)), atom(p(1)), OperatorExpr.scalar(I), BASIS, VALUES)
    assert res <= 1e-12
    # the unguarded matrix commutator fails at the truncation edge
    xm, pm = realize(atom(x(1)), BASIS, VALUES), realize(atom(p(1)), BASIS, VALUES)
    full = (xm @ pm - pm @ xm).dense - 1j * np.eye(BASIS.size)
    assert np.abs(full).max() > 1


def test_distinct_axes_commute():
    assert commutator_residual(atom(x(1)), atom(p(2)), OperatorExpr(), BASIS, VALUES) == 0.0


def test_dirac_matrices():
    for i in (1, 2, 3):
        a = dirac_alpha(i)
        assert np.allclose(a @ a, np.eye(4))
        assert np.allclose(a @ dirac_beta() + dirac_beta() @ a, 0)
    m = realize(OperatorExpr.word(alpha(1), alpha(1)), BASIS, VALUES)
    assert np.allclose(m.dense, np.eye(BASIS.size))


def test_realize_is_a_homomorphism():
    e1 = OperatorExpr.word(x(1), alpha(2))
    e2 = OperatorExpr.word(p(2), beta())
    prod = realize(e1 * e2, BASIS, VALUES)
    assert np.allclose(prod.dense, (realize(e1, BASIS, VALUES) @ realize(e2, BASIS, VALUES)).dense)


def test_third_axis_in_plane_basis():
    assert realize(atom(p(3)), BASIS, VALUES).matrix.count_nonzero() == 0
    with pytest.raises(MatrixError):
        realize(atom(x(3)), BASIS, VALUES)
    line = FockBasisConfig(dim=1, levels=16, guard=6)
    with pytest.raises(MatrixError):
        realize(atom(p(2)), line, VALUES)


def test_unbound_symbol_rejected():
    with pytest.raises(MatrixError, match="E1"):
        realize(OperatorExpr.atom(x(1), sym("E1")), BASIS, VALUES)


def test_field_atoms_need_concrete_field():
    with pytest.raises(MatrixError):
        realize(atom(a_field(1)), BASIS, VALUES)
    m = realize(atom(a_field(1)), BASIS, VALUES, FieldSpec.symmetric_gauge())
    assert np.allclose(m.dense, realize(atom(x(2), -0.5), BASIS, VALUES).dense)


def test_basis_validation():
    with pytest.raises(ValueError):
        FockBasisConfig(dim=3)
    with pytest.raises(ValueError):
        FockBasisConfig(levels=16, guard=8)


def test_coherent_state_expectation():
    basis = FockBasisConfig(dim=2, levels=24, guard=6)
    psi = gaussian_packet(basis, (0.5, 0.0), (0.0, 0.3), (1, 0, 0, 0), VALUES)
    assert psi.norm == pytest.approx(1.0, abs=1e-14)
    assert psi.expectation(realize(atom(x(1)), basis, VALUES)).real == pytest.approx(0.5, abs=1e-10)
    assert psi.expectation(realize(atom(p(2)), basis, VALUES)).real == pytest.approx(0.3, abs=1e-10)


def test_packet_near_edge_rejected():
    with pytest.raises(OccupancyError):
        gaussian_packet(BASIS, (3.0, 0.0), (0.0, 0.0), (1, 0, 0, 0), VALUES)


def test_spectral_norm_and_hermiticity():
    a = np.array([[0, 2], [0, 0]], dtype=complex)
    assert spectral_norm(a) == pytest.approx(2.0)
    assert spectral_norm(np.zeros((3, 3))) == 0.0
    assert hermiticity_residual(a) == pytest.approx(2 * np.sqrt(2) / 2)
    h = commutative_hamiltonian(FieldSpec.symmetric_gauge(), DiracConstants(1, 1, 1), expand=True)
    assert hermiticity_residual(realize(h, BASIS, VALUES)) <= 1e-12


def test_guard_doubling_keeps_residual_small():
    e = OperatorExpr.word(x(1), x(1), p(1))
    rhs = OperatorExpr.word(p(1), x(1), x(1)) + OperatorExpr.atom(x(1), 2 * I)
    for g in (3, 6):
        basis = FockBasisConfig(dim=1, levels=16, guard=g)
        assert identity_residual(e, rhs, basis, VALUES) <= 1e-12


def _plane_evolution(field, steps=400, dt=1e-3):
    consts = DiracConstants(1, 1, 1)
    h = commutative_hamiltonian(field, consts, expand=True)
    hm = realize(h, BASIS, VALUES, field)
    d1, d2 = kinetic_momentum(field, consts, expand=True)[:2]
    psi = gaussian_packet(BASIS, (0.25, 0.0), (0.0, 0.0), (1, 0, 0, 0), VALUES)
    obs = {"D1": realize(d1, BASIS, VALUES, field), "D2": realize(d2, BASIS, VALUES, field)}
    return evolve(hm, psi, dt, steps, obs)


def test_free_kinetic_momentum_is_conserved():
    traj = _plane_evolution(FieldSpec.free())
    for name in ("D1", "D2"):
        assert np.ptp(traj.columns[name]) < 1e-12
    assert np.abs(traj.norms - 1).max() < 1e-12


def test_uniform_electric_force():
    field = FieldSpec.uniform_electric((0.5, 0, 0))
    traj = _plane_evolution(field)
    slope = np.gradient(traj.columns["D1"], traj.dt)
    assert np.abs(slope[1:-1] - 0.5).max() < 1e-6


def test_evolve_rejects_non_hermitian():
    m = sp.csr_matrix(np.triu(np.ones((BASIS.size, BASIS.size))), dtype=complex)
    psi = gaussian_packet(BASIS, (0, 0), (0, 0), (1, 0, 0, 0), VALUES)
    with pytest.raises(MatrixError):
        evolve(MatrixOperator(m, BASIS), psi, 1e-3, 3, {})


def test_ehrenfest_residual_and_ratio():
    t = np.linspace(0, 1, 101)
    traj = Trajectory(t, np.ones_like(t), {"f": t ** 3, "rate": 3 * t ** 2})
    res = ehrenfest_residual(traj, {"f": "rate"})["f"]
    # the central difference of t^3 is exact up to dt^2
    assert res.max_residual == pytest.approx(0.01 ** 2, rel=1e-6)
    with pytest.raises(KeyError):
        ehrenfest_residual(traj, {"f": "missing"})
    assert convergence_ratio(4.0, 1.0) == (4.0, 2.0)


def test_trajectory_csv():
    t = np.array([0.0, 0.1])
    csv_text = Trajectory(t, np.ones(2), {"x1": np.array([1 / 3, 0.5])}).to_csv()
    lines = csv_text.splitlines()
    assert lines[0] == "t,norm,x1"
    assert float(lines[1].split(",")[2]) == 1 / 3
