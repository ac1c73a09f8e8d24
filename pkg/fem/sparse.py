import numpy as np
import numpy.typing as npt
from scipy import sparse

from interfaces.linear_solver import Factorization, LinearSolver
from interfaces.linear_solver.superlu import SuperLUSolver

SparseMatrix = sparse.csr_matrix


def assemble_from_triplets(
    rows: npt.ArrayLike,
    cols: npt.ArrayLike,
    vals: npt.ArrayLike,
    shape: tuple[int, int],
) -> SparseMatrix:
    """Build a canonical CSR matrix from (row, col, value) triplets.

    Duplicate entries are summed in the order they are given.

    Parameters
    ----------
    rows : npt.ArrayLike
        Row indices.
    cols : npt.ArrayLike
        Column indices.
    vals : npt.ArrayLike
        Values.
    shape : tuple[int, int]
        Matrix shape.

    Returns
    -------
    SparseMatrix
        Matrix with sorted, duplicate-free column indices in every row.

    Raises
    ------
    ValueError
        If the triplet arrays differ in length.
    IndexError
        If an index falls outside the shape.
    """
    rows = np.asarray(rows, dtype=np.int64).ravel()
    cols = np.asarray(cols, dtype=np.int64).ravel()
    vals = np.asarray(vals, dtype=float).ravel()
    if not len(rows) == len(cols) == len(vals):
        raise ValueError(
            f"Triplet length mismatch: {len(rows)}, {len(cols)}, {len(vals)}"
        )
    if len(rows) and (
        rows.min() < 0 or cols.min() < 0 or rows.max() >= shape[0] or cols.max() >= shape[1]
    ):
        raise IndexError(f"Triplet index out of range for shape {shape}")
    matrix = sparse.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()
    matrix.sum_duplicates()
    matrix.sort_indices()
    return matrix


def assemble_elements(
    local: npt.NDArray[np.float64],
    row_dofs: npt.NDArray[np.int64],
    col_dofs: npt.NDArray[np.int64],
    shape: tuple[int, int],
) -> SparseMatrix:
    """Scatter element matrices of shape (cells, rows, cols) into a global matrix."""
    n_rows, n_cols = local.shape[1:]
    rows = np.repeat(row_dofs[:, :, None], n_cols, axis=2)
    cols = np.repeat(col_dofs[:, None, :], n_rows, axis=1)
    return assemble_from_triplets(rows, cols, local, shape)


def block_diagonal(block: SparseMatrix, copies: int = 2) -> SparseMatrix:
    return sparse.block_diag([block] * copies, format="csr")


def lu_factor(
    matrix: SparseMatrix, solver: LinearSolver | None = None
) -> Factorization:
    """Factor a square sparse matrix, by default with SuperLU.

    Parameters
    ----------
    matrix : SparseMatrix
        Square, structurally nonsingular matrix.
    solver : LinearSolver | None, optional
        Backend, by default a SuperLU solver with COLAMD ordering.

    Returns
    -------
    Factorization
        The LU factors.
    """
    if solver is None:
        solver = SuperLUSolver({})
    return solver.factor(matrix)


def solve(factorization: Factorization, rhs: npt.ArrayLike) -> npt.NDArray[np.float64]:
    return factorization.solve(rhs)
