import numpy as np

from problems import Array, ProblemDefinition, ProblemHints

LID_TOLERANCE = 1e-12


def lid_velocity(x: Array, y: Array, t: float) -> tuple[Array, Array]:
    """(1, 0) on the lid y = 1, corners included, and no-slip elsewhere."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    on_lid = y >= 1.0 - LID_TOLERANCE
    return np.where(on_lid, 1.0, 0.0), np.zeros_like(x)


def _at_rest(x: Array, y: Array) -> tuple[Array, Array]:
    return np.zeros_like(x), np.zeros_like(x)


def cavity_problem() -> ProblemDefinition:
    """Lid-driven cavity started from rest."""
    return ProblemDefinition(
        name="cavity",
        initial_velocity=_at_rest,
        boundary_values=lid_velocity,
        hints=ProblemHints(kappa=1e-3, nu=1.0, T=40.0, n=32),
    )
