import numpy as np
import pytest
from scipy import sparse
from scipy.sparse.linalg import norm as sparse_norm

from fem.assembly import (
    apply_dirichlet,
    assemble_convection,
    discretize,
    element_geometry,
)
from fem.space import quadrature


def test_operator_shapes(disc4):
    dofmap = disc4.dofmap
    operators = disc4.operators
    nu = dofmap.n_velocity_dofs
    assert operators.mass.shape == (nu, nu)
    assert operators.stiffness.shape == (nu, nu)
    assert operators.divergence.shape == (dofmap.n_pressure_dofs, nu)


def test_mass_and_stiffness_are_symmetric(disc4):
    for matrix in (disc4.operators.mass, disc4.operators.stiffness):
        assert abs(matrix - matrix.T).max() <= 1e-14


def test_mass_integrates_quadratics(disc4):
    operators = disc4.operators
    ones = np.ones(disc4.dofmap.n_velocity_dofs)
    assert ones @ operators.mass @ ones == pytest.approx(2.0, rel=1e-13)
    U = disc4.dofmap.interpolate(lambda x, y: (x * x, x * y))
    # int x^4 + x^2 y^2 over the unit square
    assert U @ operators.mass @ U == pytest.approx(1 / 5 + 1 / 9, rel=1e-12)


def test_stiffness_annihilates_constants_and_integrates_gradients(disc4):
    operators = disc4.operators
    ones = np.ones(disc4.dofmap.n_velocity_dofs)
    np.testing.assert_allclose(operators.stiffness @ ones, 0.0, atol=1e-12)
    U = disc4.dofmap.interpolate(lambda x, y: (x * x, x * y))
    # int 4x^2 + y^2 + x^2
    assert U @ operators.stiffness @ U == pytest.approx(4 / 3 + 1 / 3 + 1 / 3, rel=1e-12)


def test_stiffness_is_positive_definite_on_interior_dofs(disc4):
    free = np.setdiff1d(np.arange(disc4.dofmap.n_velocity_dofs), disc4.operators.dirichlet_dofs)
    block = disc4.operators.stiffness[free][:, free].toarray()
    assert np.linalg.eigvalsh(block).min() > 0


def test_divergence_of_solenoidal_field_vanishes(disc4):
    U = disc4.dofmap.interpolate(lambda x, y: (x * x, -2 * x * y))
    np.testing.assert_allclose(disc4.operators.divergence @ U, 0.0, atol=1e-14)


def test_divergence_integrates_cellwise(disc4):
    U = disc4.dofmap.interpolate(lambda x, y: (x, 0.0))
    np.testing.assert_allclose(disc4.operators.divergence @ U, disc4.operators.cell_areas)


def test_convection_is_skew_symmetric(disc4, rng):
    for _ in range(50):
        w = rng.standard_normal(disc4.dofmap.n_velocity_dofs)
        phi = rng.standard_normal(disc4.dofmap.n_velocity_dofs)
        C = disc4.convection(w)
        bound = 1e-12 * sparse_norm(C, "fro") * (phi @ phi)
        assert abs(phi @ (C @ phi)) <= bound


def test_convection_against_constant_fields(disc4):
    w = disc4.dofmap.interpolate(lambda x, y: (1.0, 0.0))
    u = disc4.dofmap.interpolate(lambda x, y: (x * x, 0.0))
    v = disc4.dofmap.interpolate(lambda x, y: (1.0, 0.0))
    geometry = element_geometry(disc4.mesh, quadrature(5))
    C = assemble_convection(disc4.mesh, disc4.dofmap, w, geometry=geometry)
    # 1/2 (d/dx x^2, 1) - 1/2 (d/dx 1, x^2)
    assert v @ C @ u == pytest.approx(0.5, rel=1e-12)
    assert u @ C @ v == pytest.approx(-0.5, rel=1e-12)
    assert abs(disc4.convection(np.zeros_like(w))).max() == 0.0


def test_convection_rejects_wrong_dimension(disc4):
    with pytest.raises(ValueError):
        disc4.convection(np.zeros(3))


def test_load_of_constant_force(disc4):
    load = disc4.load(lambda x, y: (1.0, 2.0))
    ns = disc4.dofmap.n_velocity_scalar_dofs
    assert load[:ns].sum() == pytest.approx(1.0, rel=1e-13)
    assert load[ns:].sum() == pytest.approx(2.0, rel=1e-13)


def test_load_tests_against_basis(disc4):
    U = disc4.dofmap.interpolate(lambda x, y: (x * y, y))
    load = disc4.load(lambda x, y: (x * y, y))
    np.testing.assert_allclose(load, disc4.operators.mass @ U, atol=1e-14)


def test_apply_dirichlet():
    matrix = sparse.csr_matrix(np.array([[4.0, 1.0, 0.0], [1.0, 4.0, 1.0], [0.0, 1.0, 4.0]]))
    rhs = np.array([1.0, 2.0, 3.0])
    constrained, constrained_rhs = apply_dirichlet(matrix, rhs, np.array([0]), [5.0])
    dense = constrained.toarray()
    np.testing.assert_array_equal(dense, dense.T)
    np.testing.assert_array_equal(dense[0], [1.0, 0.0, 0.0])
    np.testing.assert_allclose(constrained_rhs, [5.0, 2.0 - 5.0, 3.0])
    x = np.linalg.solve(dense, constrained_rhs)
    assert x[0] == 5.0
    np.testing.assert_allclose(matrix.toarray()[1:] @ x, rhs[1:])


def test_mass_is_positive_definite_and_stiffness_semidefinite(disc4, rng):
    operators = disc4.operators
    for _ in range(100):
        x = rng.standard_normal(disc4.dofmap.n_velocity_dofs)
        assert x @ operators.mass @ x > 0
        assert x @ operators.stiffness @ x >= -1e-13


def test_dirichlet_energy_converges_under_refinement():
    # sin(pi x) sin(pi y) has Dirichlet energy pi^2 / 2
    exact = np.pi**2 / 2
    ns = [4, 8, 16]
    errors = []
    for n in ns:
        disc = discretize(n)
        U = disc.dofmap.interpolate(
            lambda x, y: (np.sin(np.pi * x) * np.sin(np.pi * y), 0.0)
        )
        errors.append(abs(U @ disc.operators.stiffness @ U - exact))
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(rates >= 1.9)
