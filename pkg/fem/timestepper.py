"""Backward Euler time stepping of the Kelvin-Voigt equations.

Each step solves the nonlinear saddle-point system

    [ (M + kappa A)/k + nu A + C(U), -B^T ] [U]   [ (M + kappa A)/k U_prev + F ]
    [ B,                              0    ] [P] = [ 0                        ]

by Picard iteration on the convecting velocity, with Anderson mixing of the
latest iterates. One pressure dof is pinned during the solve and the
pressure is then shifted to zero mean.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import TYPE_CHECKING, Callable

import numpy as np
import numpy.typing as npt
from scipy import sparse

from interfaces.linear_solver import LinearSolver, SingularMatrixError
from interfaces.linear_solver.superlu import SuperLUSolver

from .assembly import Discretization, Forcing, OperatorSet, apply_dirichlet
from .sparse import SparseMatrix

if TYPE_CHECKING:
    from problems import ProblemDefinition

logger = logging.getLogger(__name__)

BoundaryData = Callable[
    [npt.NDArray[np.float64], npt.NDArray[np.float64]],
    tuple[npt.ArrayLike, npt.ArrayLike],
]

DIVERGENCE_TOLERANCE = 1e-9
PICARD_ITERATION_BOUND = 10


class NonConvergenceError(RuntimeError):
    """Raised when the Picard iteration exhausts its iteration budget."""

    def __init__(self, iterations: int, last_update: float):
        super().__init__(
            f"Picard iteration did not converge in {iterations} iterations "
            f"(last relative update {last_update:.3e})"
        )
        self.iterations = iterations
        self.last_update = last_update


class TimeStepError(RuntimeError):
    """Raised when a time step fails; carries the failing time level."""

    def __init__(self, level: int, time: float, reason: Exception):
        super().__init__(f"Time step {level} (t = {time:.6g}) failed: {reason}")
        self.level = level
        self.time = time


@dataclass(frozen=True)
class ModelParams:
    """Retardation time kappa (kappa = 0 is Navier-Stokes) and viscosity nu."""

    kappa: float
    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"Invalid viscosity: {self.nu}")
        if not self.kappa >= 0:
            raise ValueError(f"Invalid retardation time: {self.kappa}")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform partition t_n = n k of [0, T]."""

    k: float
    T: float

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"Invalid time step: {self.k}")
        if self.N < 1 or abs(self.N * self.k - self.T) > 1e-12 * max(1.0, self.T):
            raise ValueError(
                f"Final time {self.T} is not a positive multiple of the step {self.k}"
            )

    @property
    def N(self) -> int:
        return int(round(self.T / self.k))

    def time(self, n: int) -> float:
        return n * self.k


class StepRuleKind(Enum):
    """How the time step follows the mesh parameter.

    Parameters
    ----------
    Enum : EnumMeta
        Enumeration metaclass.
    """

    H = auto()
    H2 = auto()
    FIXED = auto()


@dataclass(frozen=True)
class StepRule:
    """Time step as a function of h = 1/n: k = h, k = h^2 or a fixed value."""

    kind: StepRuleKind
    value: float | None = None

    def __post_init__(self):
        if self.kind == StepRuleKind.FIXED and not (
            self.value is not None and self.value > 0
        ):
            raise ValueError(f"Invalid fixed time step: {self.value}")

    def step(self, n: int) -> float:
        match self.kind:
            case StepRuleKind.H:
                return 1.0 / n
            case StepRuleKind.H2:
                return 1.0 / (n * n)
            case StepRuleKind.FIXED:
                return float(self.value)  # type: ignore[arg-type]
            case _:
                raise ValueError(f"Invalid step rule: {self.kind}")

    def grid(self, n: int, T: float) -> TimeGrid:
        return TimeGrid(self.step(n), T)


@dataclass(frozen=True)
class NonlinearSolveConfig:
    """Picard tolerance, iteration limit and Anderson mixing depth (0 is plain Picard)."""

    picard_tol: float = 1e-10
    max_iters: int = 50
    anderson_depth: int = 5

    def __post_init__(self):
        if not self.picard_tol > 0:
            raise ValueError(f"Invalid Picard tolerance: {self.picard_tol}")
        if self.max_iters < 1:
            raise ValueError(f"Invalid iteration limit: {self.max_iters}")
        if self.anderson_depth < 0:
            raise ValueError(f"Invalid Anderson depth: {self.anderson_depth}")


@dataclass(frozen=True)
class State:
    """Velocity U^n and pressure P^n at time t_n."""

    U: npt.NDArray[np.float64]
    P: npt.NDArray[np.float64]
    t: float


@dataclass(frozen=True)
class StepDiagnostics:
    t: float
    kinetic_energy: float
    gradient_energy: float
    picard_iterations: int
    divergence_residual: float
    time_derivative_norm: float


@dataclass
class Trajectory:
    params: ModelParams
    grid: TimeGrid
    states: list[State] = field(default_factory=list)
    diagnostics: list[StepDiagnostics] = field(default_factory=list)

    @property
    def final(self) -> State:
        return self.states[-1]


def system_matrix(
    operators: OperatorSet,
    params: ModelParams,
    grid: TimeGrid,
    convection: SparseMatrix,
) -> SparseMatrix:
    """Momentum block (M + kappa A)/k + nu A + C(w)."""
    return (
        (operators.mass + params.kappa * operators.stiffness) / grid.k
        + params.nu * operators.stiffness
        + convection
    ).tocsr()


def saddle_point_system(
    momentum: SparseMatrix, operators: OperatorSet
) -> SparseMatrix:
    B = operators.divergence
    return sparse.bmat([[momentum, -B.T], [B, None]], format="csr")


def zero_mean_pressure(
    P: npt.NDArray[np.float64], cell_areas: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    return P - np.dot(P, cell_areas) / cell_areas.sum()


def boundary_vector(
    discretization: Discretization, boundary: BoundaryData | None
) -> npt.NDArray[np.float64]:
    """Prescribed values at the Dirichlet dofs, in `dirichlet_dofs` order."""
    dofmap = discretization.dofmap
    if boundary is None:
        return np.zeros(len(dofmap.dirichlet_dofs))
    nodes = dofmap.node_coordinates[dofmap.dirichlet_mask]
    bx, by = boundary(nodes[:, 0], nodes[:, 1])
    return np.concatenate(
        [np.broadcast_to(bx, len(nodes)), np.broadcast_to(by, len(nodes))]
    ).astype(float)


def initial_state(
    problem: ProblemDefinition,
    discretization: Discretization,
    solver: LinearSolver | None = None,
) -> State:
    """L2 projection of the initial velocity, with Dirichlet data at t = 0.

    Parameters
    ----------
    problem : ProblemDefinition
        Problem providing the initial velocity and the boundary data.
    discretization : Discretization
        The discretization.
    solver : LinearSolver | None, optional
        Linear solver, by default SuperLU.

    Returns
    -------
    State
        U^0 and a zero pressure at t = 0.
    """
    solver = solver or SuperLUSolver({})
    operators = discretization.operators
    rhs = discretization.load(problem.initial_velocity)
    values = boundary_vector(
        discretization, lambda x, y: problem.boundary_values(x, y, 0.0)
    )
    matrix, rhs = apply_dirichlet(operators.mass, rhs, operators.dirichlet_dofs, values)
    U = solver.factor(matrix).solve(rhs)
    return State(U, np.zeros(discretization.dofmap.n_pressure_dofs), 0.0)


def backward_euler_step(
    state: State,
    params: ModelParams,
    grid: TimeGrid,
    discretization: Discretization,
    f_next: Forcing | None = None,
    boundary_next: BoundaryData | None = None,
    config: NonlinearSolveConfig = NonlinearSolveConfig(),
    solver: LinearSolver | None = None,
) -> tuple[State, int]:
    """Advance one backward Euler step, resolving the convection by Picard iteration.

    Every iteration solves the saddle-point system linearized about the current
    iterate; the next iterate mixes the latest `config.anderson_depth` + 1
    solutions. The stopping test compares each solution with its own iterate,
    so the accepted state is a fixed point of the Picard map.

    Parameters
    ----------
    state : State
        Solution at t_{n-1}.
    params : ModelParams
        Retardation time and viscosity.
    grid : TimeGrid
        Time grid.
    discretization : Discretization
        The discretization.
    f_next : Forcing | None, optional
        Forcing at t_n, by default zero.
    boundary_next : BoundaryData | None, optional
        Dirichlet data at t_n, by default homogeneous.
    config : NonlinearSolveConfig, optional
        Picard tolerance, iteration limit and mixing depth.
    solver : LinearSolver | None, optional
        Linear solver, by default SuperLU.

    Returns
    -------
    tuple[State, int]
        The solution at t_n and the number of Picard iterations used.

    Raises
    ------
    NonConvergenceError
        If the iteration does not converge within `config.max_iters`.
    SingularMatrixError
        If the saddle-point system cannot be factored.
    """
    solver = solver or SuperLUSolver({})
    operators = discretization.operators
    nu_dofs = discretization.dofmap.n_velocity_dofs
    t = state.t + grid.k

    inertia = (operators.mass + params.kappa * operators.stiffness) / grid.k
    momentum_rhs = inertia @ state.U
    if f_next is not None:
        momentum_rhs = momentum_rhs + discretization.load(f_next)
    rhs = np.concatenate([momentum_rhs, np.zeros(discretization.dofmap.n_pressure_dofs)])

    constrained = np.append(operators.dirichlet_dofs, nu_dofs)
    values = np.append(boundary_vector(discretization, boundary_next), 0.0)

    U = state.U.copy()
    U[operators.dirichlet_dofs] = values[:-1]
    images: deque[npt.NDArray[np.float64]] = deque(maxlen=config.anderson_depth + 1)
    residuals: deque[npt.NDArray[np.float64]] = deque(maxlen=config.anderson_depth + 1)
    update = np.inf
    for iteration in range(1, config.max_iters + 1):
        momentum = system_matrix(operators, params, grid, discretization.convection(U))
        matrix, constrained_rhs = apply_dirichlet(
            saddle_point_system(momentum, operators), rhs, constrained, values
        )
        solution = solver.factor(matrix).solve(constrained_rhs)
        U_next, P = solution[:nu_dofs], solution[nu_dofs:]
        residual = U_next - U
        update = np.linalg.norm(residual) / max(1.0, np.linalg.norm(U_next))
        if update <= config.picard_tol:
            accepted = State(U_next, zero_mean_pressure(P, operators.cell_areas), t)
            return accepted, iteration
        if not np.isfinite(update):
            break
        images.append(U_next)
        residuals.append(residual)
        U = _anderson_mix(images, residuals)
    raise NonConvergenceError(iteration, float(update))


def _anderson_mix(
    images: deque[npt.NDArray[np.float64]],
    residuals: deque[npt.NDArray[np.float64]],
) -> npt.NDArray[np.float64]:
    """Next iterate from the latest Picard images and their residuals.

    The combination is affine, so Dirichlet values and B U = 0 carry over from
    the images. With a single image this is the plain Picard update.
    """
    if len(images) < 2:
        return images[-1]
    d_residuals = np.diff(np.array(residuals), axis=0).T
    d_images = np.diff(np.array(images), axis=0).T
    gamma = np.linalg.lstsq(d_residuals, residuals[-1], rcond=None)[0]
    return images[-1] - d_images @ gamma


def run(
    problem: ProblemDefinition,
    params: ModelParams,
    grid: TimeGrid,
    discretization: Discretization,
    config: NonlinearSolveConfig = NonlinearSolveConfig(),
    solver: LinearSolver | None = None,
    keep_states: bool = True,
) -> Trajectory:
    """Integrate a problem from t = 0 to T.

    Parameters
    ----------
    problem : ProblemDefinition
        Initial, boundary and forcing data.
    params : ModelParams
        Retardation time and viscosity.
    grid : TimeGrid
        Time grid.
    discretization : Discretization
        The discretization.
    config : NonlinearSolveConfig, optional
        Picard tolerance and iteration limit.
    solver : LinearSolver | None, optional
        Linear solver, by default SuperLU.
    keep_states : bool, optional
        Keep every state; otherwise only the initial and final ones, by default True.

    Returns
    -------
    Trajectory
        States and per-step diagnostics (the initial level included).

    Raises
    ------
    TimeStepError
        If a step fails, with the failing time level.
    """
    solver = solver or SuperLUSolver({})
    operators = discretization.operators
    state = initial_state(problem, discretization, solver)
    trajectory = Trajectory(params, grid, [state])
    trajectory.diagnostics.append(_diagnose(state, None, operators, grid, 0))
    for n in range(1, grid.N + 1):
        t = grid.time(n)
        try:
            next_state, iterations = backward_euler_step(
                State(state.U, state.P, grid.time(n - 1)),
                params,
                grid,
                discretization,
                problem.forcing_at(t, params),
                problem.boundary_at(t),
                config,
                solver,
            )
        except (NonConvergenceError, SingularMatrixError) as error:
            raise TimeStepError(n, t, error) from error
        diagnostics = _diagnose(next_state, state, operators, grid, iterations)
        if diagnostics.divergence_residual > DIVERGENCE_TOLERANCE:
            logger.warning(
                "Divergence residual %.3e at t = %.6g", diagnostics.divergence_residual, t
            )
        if iterations > PICARD_ITERATION_BOUND:
            logger.warning("%d Picard iterations at t = %.6g", iterations, t)
        logger.debug(
            "t = %.6g: %d Picard iterations, divergence %.3e",
            t,
            iterations,
            diagnostics.divergence_residual,
        )
        trajectory.diagnostics.append(diagnostics)
        if keep_states or n == grid.N:
            trajectory.states.append(next_state)
        state = next_state
    return trajectory


def _diagnose(
    state: State,
    previous: State | None,
    operators: OperatorSet,
    grid: TimeGrid,
    iterations: int,
) -> StepDiagnostics:
    U = state.U
    if previous is None:
        rate = 0.0
    else:
        dU = U - previous.U
        rate = float(np.sqrt(max(dU @ (operators.mass @ dU), 0.0))) / grid.k
    return StepDiagnostics(
        t=state.t,
        kinetic_energy=float(U @ (operators.mass @ U)),
        gradient_energy=float(U @ (operators.stiffness @ U)),
        picard_iterations=iterations,
        divergence_residual=float(np.abs(operators.divergence @ U).max()),
        time_derivative_norm=rate,
    )
