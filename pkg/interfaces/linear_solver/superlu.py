import logging

import numpy as np
import numpy.typing as npt
from scipy import sparse
from scipy.sparse import linalg

from . import Factorization, LinearSolver, SingularMatrixError

logger = logging.getLogger(__name__)


class SuperLUFactorization(Factorization):
    def __init__(self, lu: linalg.SuperLU):
        super().__init__(lu.shape)
        self.lu = lu

    @property
    def nnz(self) -> int:
        return self.lu.L.nnz + self.lu.U.nnz

    def _solve(self, rhs: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return self.lu.solve(rhs)


class SuperLUSolver(LinearSolver):
    """Sparse direct LU with a fill-reducing column ordering and partial pivoting."""

    def __init__(self, module_settings: dict):
        self.permc_spec = module_settings.get("permc_spec", "COLAMD")
        self.diag_pivot_thresh = module_settings.get("diag_pivot_thresh", 1.0)
        self.singular_tolerance = module_settings.get("singular_tolerance", 1e-14)

    def _factor(self, matrix: sparse.csc_matrix, scale: float) -> Factorization:
        try:
            lu = linalg.splu(
                matrix,
                permc_spec=self.permc_spec,
                diag_pivot_thresh=self.diag_pivot_thresh,
            )
        except RuntimeError as error:
            raise SingularMatrixError(f"Factorization failed: {error}") from error
        pivots = np.abs(lu.U.diagonal())
        if pivots.min() < self.singular_tolerance * scale:
            raise SingularMatrixError(
                f"Pivot {pivots.min():.3e} below {self.singular_tolerance:g} "
                f"times the largest entry {scale:.3e}"
            )
        factorization = SuperLUFactorization(lu)
        logger.debug(
            "Factored %dx%d matrix with %d nonzeros into %d",
            *matrix.shape,
            matrix.nnz,
            factorization.nnz,
        )
        return factorization
