import numpy as np

from problems import Array, ProblemDefinition, ProblemHints
from problems.manufactured import velocity_shape


def _no_slip(x: Array, y: Array, t: float) -> tuple[Array, Array]:
    return np.zeros_like(x), np.zeros_like(x)


def decay_problem() -> ProblemDefinition:
    """Force-free flow released from the manufactured velocity profile."""
    return ProblemDefinition(
        name="decay",
        initial_velocity=velocity_shape,
        boundary_values=_no_slip,
        hints=ProblemHints(kappa=1.0, nu=1.0, T=4.0, n=16),
    )
