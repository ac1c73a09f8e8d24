import numpy as np
import pytest
from scipy import sparse

from fem.sparse import assemble_elements, assemble_from_triplets, lu_factor, solve
from interfaces.linear_solver import SingularMatrixError
from interfaces.linear_solver.dense import DenseLUSolver
from interfaces.linear_solver.superlu import SuperLUSolver


def random_system(rng, n=100, density=0.05):
    matrix = sparse.random(n, n, density=density, random_state=rng, format="csr")
    matrix = matrix + sparse.diags(rng.uniform(1.0, 2.0, n) * np.sign(rng.standard_normal(n)))
    return matrix.tocsr(), rng.standard_normal(n)


def test_duplicates_are_summed():
    matrix = assemble_from_triplets([0, 1, 0, 0], [0, 1, 0, 2], [1.0, 2.0, 3.0, 4.0], (2, 3))
    np.testing.assert_array_equal(matrix.toarray(), [[4.0, 0.0, 4.0], [0.0, 2.0, 0.0]])
    assert matrix.has_canonical_format


def test_triplet_validation():
    with pytest.raises(ValueError):
        assemble_from_triplets([0, 1], [0], [1.0, 2.0], (2, 2))
    with pytest.raises(IndexError):
        assemble_from_triplets([0, 2], [0, 0], [1.0, 2.0], (2, 2))
    with pytest.raises(IndexError):
        assemble_from_triplets([0], [-1], [1.0], (2, 2))


def test_element_scatter():
    local = np.ones((2, 2, 2))
    dofs = np.array([[0, 1], [1, 2]])
    matrix = assemble_elements(local, dofs, dofs, (3, 3))
    np.testing.assert_array_equal(
        matrix.toarray(), [[1.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 1.0]]
    )


@pytest.mark.parametrize("trial", range(5))
def test_lu_residual_against_dense_oracle(rng, trial):
    matrix, rhs = random_system(rng)
    x = solve(lu_factor(matrix), rhs)
    oracle = np.linalg.solve(matrix.toarray(), rhs)
    assert np.linalg.norm(matrix @ x - rhs) <= 1e-10 * np.linalg.norm(rhs)
    np.testing.assert_allclose(x, oracle, rtol=1e-8, atol=1e-10)


def test_dense_solver_agrees(rng):
    matrix, rhs = random_system(rng, n=40, density=0.1)
    dense = lu_factor(matrix, DenseLUSolver({})).solve(rhs)
    superlu = lu_factor(matrix, SuperLUSolver({"permc_spec": "NATURAL"})).solve(rhs)
    np.testing.assert_allclose(dense, superlu, rtol=1e-10, atol=1e-12)


def test_indefinite_system_needs_pivoting():
    matrix = sparse.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(solve(lu_factor(matrix), [2.0, 3.0]), [3.0, 2.0])


@pytest.mark.parametrize("solver", [SuperLUSolver({}), DenseLUSolver({})])
def test_singular_matrix(solver):
    matrix = sparse.csr_matrix(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(SingularMatrixError):
        lu_factor(matrix, solver).solve([1.0, 1.0])


def test_zero_matrix():
    with pytest.raises(SingularMatrixError):
        lu_factor(sparse.csr_matrix((3, 3)))


def test_shape_errors():
    with pytest.raises(ValueError):
        lu_factor(sparse.csr_matrix(np.ones((2, 3))))
    factorization = lu_factor(sparse.identity(3, format="csr"))
    with pytest.raises(ValueError):
        factorization.solve(np.ones(2))
