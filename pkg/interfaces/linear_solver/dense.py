import numpy as np
import numpy.typing as npt
from scipy import linalg, sparse

from . import Factorization, LinearSolver, SingularMatrixError


class DenseLUFactorization(Factorization):
    def __init__(self, lu: npt.NDArray[np.float64], piv: npt.NDArray[np.int32]):
        super().__init__(lu.shape)
        self.lu = lu
        self.piv = piv

    def _solve(self, rhs: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return linalg.lu_solve((self.lu, self.piv), rhs)


class DenseLUSolver(LinearSolver):
    """Dense LAPACK LU with partial pivoting, for small systems and cross-checks."""

    def __init__(self, module_settings: dict):
        self.singular_tolerance = module_settings.get("singular_tolerance", 1e-14)

    def _factor(self, matrix: sparse.csc_matrix, scale: float) -> Factorization:
        lu, piv = linalg.lu_factor(matrix.toarray(), check_finite=True)
        pivots = np.abs(np.diag(lu))
        if pivots.min() < self.singular_tolerance * scale:
            raise SingularMatrixError(
                f"Pivot {pivots.min():.3e} below {self.singular_tolerance:g} "
                f"times the largest entry {scale:.3e}"
            )
        return DenseLUFactorization(lu, piv)
