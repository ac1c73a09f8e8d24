from abc import ABC, abstractmethod

import numpy as np
import numpy.typing as npt
from scipy import sparse

from .. import Interface


class SingularMatrixError(RuntimeError):
    """Raised when a factorization meets a (numerically) zero pivot."""


class Factorization(ABC):
    """LU factors of a square matrix, ready for repeated solves."""

    def __init__(self, shape: tuple[int, int]):
        self.shape = shape

    def solve(self, rhs: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Template method to solve A x = rhs.

        Parameters
        ----------
        rhs : npt.ArrayLike
            Right-hand side vector.

        Returns
        -------
        npt.NDArray[np.float64]
            Solution vector.

        Raises
        ------
        ValueError
            If the right-hand side dimension does not match the matrix.
        """
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (self.shape[0],):
            raise ValueError(
                f"Dimension mismatch: matrix {self.shape}, right-hand side {rhs.shape}"
            )
        solution = self._solve(rhs)
        if not np.all(np.isfinite(solution)):
            raise SingularMatrixError("Non-finite solution; the matrix is singular")
        return solution

    @abstractmethod
    def _solve(self, rhs: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        pass


class LinearSolver(Interface, ABC):
    """Direct linear solver interface.

    Parameters
    ----------
    ABC : _abc.ABCMeta
        Abstract base class.
    """

    @abstractmethod
    def __init__(self, module_settings: dict):
        pass

    def factor(self, matrix: sparse.spmatrix | sparse.sparray) -> Factorization:
        """Template method to factor a square matrix.

        Parameters
        ----------
        matrix : sparse.spmatrix | sparse.sparray
            Square matrix.

        Returns
        -------
        Factorization
            The LU factors.

        Raises
        ------
        ValueError
            If the matrix is not square.
        SingularMatrixError
            If a pivot falls below the singularity tolerance.
        """
        matrix = sparse.csc_matrix(matrix, dtype=float)
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Matrix is not square: {matrix.shape}")
        if matrix.shape[0] == 0:
            raise ValueError("Cannot factor an empty matrix")
        scale = abs(matrix).max()
        if scale == 0.0:
            raise SingularMatrixError("Matrix is identically zero")
        return self._factor(matrix, scale)

    @abstractmethod
    def _factor(self, matrix: sparse.csc_matrix, scale: float) -> Factorization:
        """Factor a non-empty square matrix.

        Parameters
        ----------
        matrix : sparse.csc_matrix
            Square matrix.
        scale : float
            Largest absolute entry, the reference for the pivot test.

        Returns
        -------
        Factorization
            The LU factors.
        """
        pass
