import math

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from ljspec import (
    DomainError,
    LJParams,
    ParameterError,
    TridiagonalOperator,
    assemble_hamiltonian,
    barrier_truncation_point,
    build_grid,
    eval_potential,
    landmarks,
    second_difference_energy,
)

from conftest import free_box


def test_uniform_spacing_exact():
    g = build_grid(1.0, 2.0, 17)
    assert g.spacing == 1 / 16
    assert np.all(g.steps() == 1 / 16)
    assert g.nodes[0] == 1.0 and g.nodes[-1] == 2.0


def test_large_uniform_grid():
    g = build_grid(0.3, 50.0, 20000)
    assert g.n == 20000 and g.nodes[0] == 0.3 and g.nodes[-1] == 50.0


def test_graded_grid_formula():
    g = build_grid(0.3, 50.0, 1000, "graded", 2.0)
    t = np.linspace(0, 1, 1000)
    assert np.allclose(g.nodes, 0.3 + 49.7 * t**2, rtol=1e-15, atol=0)
    g3 = build_grid(0.3, 50.0, 1001, "graded", 2.0)
    assert g3.nodes[500] == pytest.approx(12.725, rel=1e-15)
    h = np.diff(g.nodes)
    assert h[0] < h[-1]
    assert np.all(h > 0)


@pytest.mark.parametrize("args", [(2.0, 1.0, 100), (1.0, 1.0, 100), (0.1, 1.0, 15), (-0.1, 1.0, 100)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ParameterError):
        build_grid(*args)


def test_grid_rejects_unknown_policy():
    with pytest.raises(ParameterError):
        build_grid(0.1, 1.0, 100, "chebyshev")


def test_assembly_diag_is_stencil_plus_potential(lj11):
    g = build_grid(0.5, 10.0, 400)
    op = assemble_hamiltonian(g, lj11)
    h = g.spacing
    assert np.allclose(op.diag - 2 / h**2, eval_potential(lj11, g.interior), rtol=1e-9, atol=1e-9)
    assert np.all(op.offdiag == -1 / h**2)
    assert op.dim == g.n - 2


def test_symmetric_by_construction(lj11):
    op = assemble_hamiltonian(build_grid(0.5, 5.0, 60, "graded", 1.5), lj11)
    dense = op.to_dense()
    assert np.array_equal(dense, dense.T)


def test_graded_stencil_reduces_to_uniform_form():
    # the symmetrized graded stencil must reproduce the kinetic form exactly
    g = build_grid(0.2, 3.0, 50, "graded", 1.7)
    op = assemble_hamiltonian(g, None)
    psi = np.sin(np.linspace(0, 3, g.n)) ** 2
    psi[0] = psi[-1] = 0
    u = op.to_coefficients(psi)
    assert np.dot(u, op.matvec(u)) == pytest.approx(second_difference_energy(op, psi), rel=1e-12)


def test_free_box_eigenvalues_converge_at_second_order():
    errors = []
    for n in (50, 100, 200, 400):
        op = free_box(n)
        lam = eigh_tridiagonal(op.diag, op.offdiag, eigvals_only=True, select="i", select_range=(0, 2))
        assert lam[:3] == pytest.approx([(k * math.pi) ** 2 for k in (1, 2, 3)], rel=0.01)
        errors.append(lam[0] - math.pi**2)
    ratios = [errors[i] / errors[i + 1] for i in range(3)]
    for r in ratios:
        assert abs(r - 4.0) <= 0.2 * 4.0


def test_lower_bound_of_spectrum(lj110):
    eps = barrier_truncation_point(lj110)
    for policy in ("uniform", "graded"):
        op = assemble_hamiltonian(build_grid(eps, 30.0, 3000, policy), lj110)
        lam0 = eigh_tridiagonal(op.diag, op.offdiag, eigvals_only=True, select="i", select_range=(0, 0))[0]
        assert lam0 >= landmarks(lj110).gamma


def test_rejects_node_at_origin(lj11):
    with pytest.raises(DomainError):
        assemble_hamiltonian(build_grid(0.0, 1.0, 100), lj11)


def test_rejects_overflowing_potential(lj11):
    with pytest.raises(ParameterError):
        assemble_hamiltonian(build_grid(0.04, 1.0, 100), lj11)


def test_kinetic_form_examples():
    op = free_box(999)
    zero = np.zeros(op.grid.n)
    assert second_difference_energy(op, zero) == 0.0
    x = op.grid.nodes
    psi = np.sin(math.pi * x)
    psi /= math.sqrt(np.sum(op.weights * psi[1:-1] ** 2))
    assert second_difference_energy(op, psi) == pytest.approx(math.pi**2, rel=1e-5)
    const = np.ones(op.grid.n)
    h = op.grid.spacing
    # only the two jumps onto the Dirichlet ends contribute
    assert second_difference_energy(op, const) == pytest.approx(2 / h, rel=1e-12)
    assert second_difference_energy(op, const[1:-1]) == pytest.approx(2 / h, rel=1e-12)
    with pytest.raises(ParameterError):
        second_difference_energy(op, np.ones(5))


def test_kinetic_form_nonnegative(rng):
    op = assemble_hamiltonian(build_grid(0.3, 4.0, 80, "graded", 2.0), None)
    for _ in range(20):
        psi = rng.standard_normal(op.grid.n) + 1j * rng.standard_normal(op.grid.n)
        assert second_difference_energy(op, psi) >= 0


def test_coefficient_round_trip(rng):
    op = assemble_hamiltonian(build_grid(0.3, 4.0, 80, "graded", 2.0), None)
    psi = rng.standard_normal(op.grid.n)
    psi[0] = psi[-1] = 0
    assert np.allclose(op.from_coefficients(op.to_coefficients(psi)), psi, rtol=1e-14, atol=0)
    u = op.to_coefficients(psi)
    assert np.dot(u, u) == pytest.approx(np.sum(op.weights * psi[1:-1] ** 2), rel=1e-14)


def test_json_round_trip(lj11):
    op = assemble_hamiltonian(build_grid(0.4, 5.0, 40, "graded", 2.0), lj11)
    back = TridiagonalOperator.from_json(op.to_json())
    assert np.array_equal(back.diag, op.diag)
    assert np.array_equal(back.offdiag, op.offdiag)
    assert np.array_equal(back.grid.nodes, op.grid.nodes)
    assert back.grid.policy == "graded" and back.params == lj11
    free = assemble_hamiltonian(build_grid(0.0, 1.0, 20), None)
    assert TridiagonalOperator.from_json(free.to_json()).params is None
