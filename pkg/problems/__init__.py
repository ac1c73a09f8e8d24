from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto
from typing import TYPE_CHECKING, Callable

import numpy as np
import numpy.typing as npt

if TYPE_CHECKING:
    from fem.assembly import Forcing
    from fem.timestepper import BoundaryData, ModelParams

Array = npt.NDArray[np.float64]
SpatialField = Callable[[Array, Array], tuple[npt.ArrayLike, npt.ArrayLike]]
SpaceTimeField = Callable[[Array, Array, float], tuple[npt.ArrayLike, npt.ArrayLike]]
SpaceTimeScalar = Callable[[Array, Array, float], npt.ArrayLike]
SpaceTimeGradient = Callable[
    [Array, Array, float],
    tuple[tuple[npt.ArrayLike, npt.ArrayLike], tuple[npt.ArrayLike, npt.ArrayLike]],
]
ForcingField = Callable[
    [Array, Array, float, "ModelParams"], tuple[npt.ArrayLike, npt.ArrayLike]
]


class ProblemType(Enum):
    """Problem type enumeration.

    Parameters
    ----------
    Enum : EnumMeta
        Enumeration metaclass.
    """

    MANUFACTURED = auto()
    DECAY = auto()
    CAVITY = auto()


@dataclass(frozen=True)
class ProblemHints:
    """Suggested parameters: retardation time, viscosity, final time and cells per side."""

    kappa: float
    nu: float
    T: float
    n: int


@dataclass(frozen=True)
class ProblemDefinition:
    """Initial, boundary and forcing data of one experiment.

    `forcing` is None for force-free problems. The exact fields are present
    only when the solution is known in closed form; `exact_velocity_gradient`
    returns ((du1/dx, du1/dy), (du2/dx, du2/dy)).
    """

    name: str
    initial_velocity: SpatialField
    boundary_values: SpaceTimeField
    hints: ProblemHints
    forcing: ForcingField | None = None
    exact_velocity: SpaceTimeField | None = None
    exact_velocity_gradient: SpaceTimeGradient | None = None
    exact_pressure: SpaceTimeScalar | None = None

    @property
    def has_exact_solution(self) -> bool:
        return self.exact_velocity is not None

    def forcing_at(self, t: float, params: ModelParams) -> Forcing | None:
        """Forcing frozen at time t for the given parameters, or None if force-free."""
        forcing = self.forcing
        if forcing is None:
            return None
        return lambda x, y: forcing(x, y, t, params)

    def boundary_at(self, t: float) -> BoundaryData:
        return lambda x, y: self.boundary_values(x, y, t)


def get_problem(problem_type: ProblemType) -> ProblemDefinition:
    """Build the problem definition of a problem type.

    Parameters
    ----------
    problem_type : ProblemType
        Problem type.

    Returns
    -------
    ProblemDefinition
        The problem.

    Raises
    ------
    ValueError
        If the problem type is not valid.
    """
    match problem_type:
        case ProblemType.MANUFACTURED:
            from problems.manufactured import manufactured_problem

            return manufactured_problem()
        case ProblemType.DECAY:
            from problems.decay import decay_problem

            return decay_problem()
        case ProblemType.CAVITY:
            from problems.cavity import cavity_problem

            return cavity_problem()
        case _:
            raise ValueError(f"Invalid problem type: {problem_type}")
