"""Error norms, convergence rates and diagnostic quantities."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum, auto
from math import log2
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from interfaces.linear_solver import LinearSolver
from interfaces.linear_solver.superlu import SuperLUSolver

from .assembly import Discretization, discretize
from .space import p2_basis
from .timestepper import (
    ModelParams,
    NonlinearSolveConfig,
    State,
    StepRule,
    TimeStepError,
    Trajectory,
    run,
)

if TYPE_CHECKING:
    from problems import ProblemDefinition

logger = logging.getLogger(__name__)


class Norm(Enum):
    """Error norm reported by a convergence study.

    Parameters
    ----------
    Enum : EnumMeta
        Enumeration metaclass.
    """

    VELOCITY_L2 = auto()
    VELOCITY_H1 = auto()
    PRESSURE_L2 = auto()


@dataclass(frozen=True)
class ErrorReport:
    l2_velocity: float
    h1_velocity: float
    l2_pressure: float

    def __getitem__(self, norm: Norm) -> float:
        match norm:
            case Norm.VELOCITY_L2:
                return self.l2_velocity
            case Norm.VELOCITY_H1:
                return self.h1_velocity
            case Norm.PRESSURE_L2:
                return self.l2_pressure
            case _:
                raise ValueError(f"Invalid norm: {norm}")


@dataclass(frozen=True)
class RateRow:
    n: int
    error: float
    rate: float | None

    @property
    def h(self) -> float:
        return 1.0 / self.n


@dataclass(frozen=True)
class RateTable:
    rows: tuple[RateRow, ...]

    @property
    def ns(self) -> tuple[int, ...]:
        return tuple(row.n for row in self.rows)

    @property
    def rates(self) -> list[float]:
        return [row.rate for row in self.rows if row.rate is not None]


@dataclass(frozen=True)
class EnergySample:
    t: float
    kinetic: float
    gradient: float


@dataclass(frozen=True)
class CenterlineProfiles:
    """u1 along the vertical line x = 0.5 and u2 along the horizontal line y = 0.5."""

    s: npt.NDArray[np.float64]
    u1_vertical: npt.NDArray[np.float64]
    u2_horizontal: npt.NDArray[np.float64]


@dataclass(frozen=True)
class RegularizationResult:
    """Final-time errors of one (h, kappa) run, or None if the run did not converge."""

    l2_velocity: float | None
    l2_pressure: float | None

    @property
    def converged(self) -> bool:
        return self.l2_velocity is not None


def error_norms(
    state: State, problem: ProblemDefinition, discretization: Discretization
) -> ErrorReport:
    """Velocity L2 and H1 errors and zero-mean pressure L2 error at the state's time.

    Parameters
    ----------
    state : State
        Discrete solution.
    problem : ProblemDefinition
        Problem with an exact solution.
    discretization : Discretization
        The discretization the state lives on.

    Returns
    -------
    ErrorReport
        The three errors, evaluated cellwise with the degree-6 rule.

    Raises
    ------
    ValueError
        If the problem has no exact solution.
    """
    if (
        problem.exact_velocity is None
        or problem.exact_velocity_gradient is None
        or problem.exact_pressure is None
    ):
        raise ValueError(f"Problem has no exact solution: {problem.name}")
    geometry = discretization.load_geometry
    dofs = discretization.dofmap.cell_to_velocity_dofs
    w = geometry.weights
    x, y = geometry.points[..., 0], geometry.points[..., 1]

    components = discretization.dofmap.split(state.U)
    exact = problem.exact_velocity(x, y, state.t)
    exact_gradient = problem.exact_velocity_gradient(x, y, state.t)
    l2 = 0.0
    h1 = 0.0
    for c, coefficients in enumerate(components):
        local = coefficients[dofs]
        value = local @ geometry.values.T
        gradient = np.einsum("ci,cqia->cqa", local, geometry.gradients)
        l2 += np.sum(w * (exact[c] - value) ** 2)
        for a in range(2):
            h1 += np.sum(w * (exact_gradient[c][a] - gradient[..., a]) ** 2)

    areas = discretization.operators.cell_areas
    p = np.broadcast_to(np.asarray(problem.exact_pressure(x, y, state.t), dtype=float), x.shape)
    p = p - np.sum(w * p) / np.sum(w)
    P = state.P - np.dot(state.P, areas) / areas.sum()
    l2_pressure = np.sum(w * (p - P[:, None]) ** 2)
    return ErrorReport(
        float(np.sqrt(l2)), float(np.sqrt(h1)), float(np.sqrt(l2_pressure))
    )


def rate_table(ns: list[int], errors: list[float]) -> RateTable:
    """Observed rates log2(e_{i-1}/e_i) for successive halvings of h.

    Parameters
    ----------
    ns : list[int]
        Cells per side, each twice the previous.
    errors : list[float]
        Error for every mesh.

    Returns
    -------
    RateTable
        Rows (h, error, rate); the first row has no rate.
    """
    if len(ns) != len(errors):
        raise ValueError(f"Length mismatch: {len(ns)} meshes, {len(errors)} errors")
    rows = []
    for i, (n, error) in enumerate(zip(ns, errors)):
        rate = None
        if i > 0:
            rate = log2(errors[i - 1] / error) / log2(n / ns[i - 1])
        rows.append(RateRow(n, error, rate))
    return RateTable(tuple(rows))


def _check_halving(ns: list[int]):
    if not ns:
        raise ValueError("Empty mesh list")
    for coarse, fine in zip(ns, ns[1:]):
        if fine != 2 * coarse:
            raise ValueError(f"Mesh parameters must halve: 1/{coarse} -> 1/{fine}")


def convergence_study(
    ns: list[int],
    kappa: float,
    nu: float,
    rule: StepRule,
    problem: ProblemDefinition,
    T: float = 1.0,
    config: NonlinearSolveConfig = NonlinearSolveConfig(),
    solver: LinearSolver | None = None,
    threads: int = 1,
) -> dict[Norm, RateTable]:
    """Final-time errors and rates of a problem with an exact solution.

    Parameters
    ----------
    ns : list[int]
        Cells per side, h halving between consecutive entries.
    kappa : float
        Retardation time.
    nu : float
        Viscosity.
    rule : StepRule
        Time step as a function of h.
    problem : ProblemDefinition
        Problem with an exact solution.
    T : float, optional
        Final time, by default 1.
    config : NonlinearSolveConfig, optional
        Picard settings.
    solver : LinearSolver | None, optional
        Linear solver, by default SuperLU.
    threads : int, optional
        Meshes solved concurrently, by default 1.

    Returns
    -------
    dict[Norm, RateTable]
        One rate table per norm.
    """
    _check_halving(ns)
    solver = solver or SuperLUSolver({})
    params = ModelParams(kappa, nu)

    def solve_one(n: int) -> ErrorReport:
        discretization = discretize(n)
        trajectory = run(
            problem, params, rule.grid(n, T), discretization, config, solver, False
        )
        report = error_norms(trajectory.final, problem, discretization)
        logger.info(
            "kappa = %g, h = 1/%d: velocity L2 %.3e, H1 %.3e, pressure L2 %.3e",
            kappa,
            n,
            report.l2_velocity,
            report.h1_velocity,
            report.l2_pressure,
        )
        return report

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        reports = list(pool.map(solve_one, ns))
    return {norm: rate_table(ns, [report[norm] for report in reports]) for norm in Norm}


def regularization_study(
    ns: list[int],
    kappas: list[float],
    nu: float,
    rule: StepRule,
    problem: ProblemDefinition,
    T: float = 1.0,
    config: NonlinearSolveConfig = NonlinearSolveConfig(),
    solver: LinearSolver | None = None,
    threads: int = 1,
) -> dict[tuple[int, float], RegularizationResult]:
    """Final-time errors for every (h, kappa), recording non-convergence instead of raising.

    Parameters
    ----------
    ns : list[int]
        Cells per side.
    kappas : list[float]
        Retardation times (0 included for the Navier-Stokes baseline).
    nu : float
        Viscosity.
    rule : StepRule
        Time step as a function of h.
    problem : ProblemDefinition
        Problem with an exact solution.
    T : float, optional
        Final time, by default 1.
    config : NonlinearSolveConfig, optional
        Picard settings.
    solver : LinearSolver | None, optional
        Linear solver, by default SuperLU.
    threads : int, optional
        Runs solved concurrently, by default 1.

    Returns
    -------
    dict[tuple[int, float], RegularizationResult]
        Results keyed by (n, kappa).
    """
    solver = solver or SuperLUSolver({})
    discretizations = {n: discretize(n) for n in ns}

    def solve_one(key: tuple[int, float]) -> RegularizationResult:
        n, kappa = key
        try:
            trajectory = run(
                problem,
                ModelParams(kappa, nu),
                rule.grid(n, T),
                discretizations[n],
                config,
                solver,
                False,
            )
        except TimeStepError as error:
            logger.info("kappa = %g, h = 1/%d: %s", kappa, n, error)
            return RegularizationResult(None, None)
        report = error_norms(trajectory.final, problem, discretizations[n])
        if not np.isfinite(report.l2_velocity):
            return RegularizationResult(None, None)
        return RegularizationResult(report.l2_velocity, report.l2_pressure)

    keys = [(n, kappa) for n in ns for kappa in kappas]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(solve_one, keys))
    return dict(zip(keys, results))


def energy_history(trajectory: Trajectory) -> list[EnergySample]:
    """Kinetic energy ||U^n||^2 and weighted gradient energy kappa ||grad U^n||^2 per level.

    Parameters
    ----------
    trajectory : Trajectory
        A completed run.

    Returns
    -------
    list[EnergySample]
        One sample per time level.
    """
    if not trajectory.diagnostics:
        raise ValueError("Empty trajectory")
    kappa = trajectory.params.kappa
    return [
        EnergySample(d.t, d.kinetic_energy, kappa * d.gradient_energy)
        for d in trajectory.diagnostics
    ]


def steady_state_gap(
    U: npt.NDArray[np.float64],
    U_reference: npt.NDArray[np.float64],
    discretization: Discretization,
) -> float:
    """L2 distance between two velocity fields on the same discretization."""
    if U.shape != U_reference.shape or U.shape != (discretization.dofmap.n_velocity_dofs,):
        raise ValueError(
            f"Dimension mismatch: {U.shape}, {U_reference.shape}, "
            f"expected ({discretization.dofmap.n_velocity_dofs},)"
        )
    difference = U - U_reference
    return float(np.sqrt(max(difference @ (discretization.operators.mass @ difference), 0.0)))


def evaluate_velocity(
    U: npt.NDArray[np.float64],
    discretization: Discretization,
    points: npt.ArrayLike,
) -> npt.NDArray[np.float64]:
    """Evaluate a P2 velocity field at physical points.

    Parameters
    ----------
    U : npt.NDArray[np.float64]
        Blocked velocity coefficients.
    discretization : Discretization
        The discretization.
    points : npt.ArrayLike
        Points in the closed unit square, shape (m, 2).

    Returns
    -------
    npt.NDArray[np.float64]
        Velocity values, shape (m, 2).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    mesh = discretization.mesh
    cells = mesh.locate(points[:, 0], points[:, 1])
    jac, _ = mesh.jacobians()
    origin = mesh.vertices[mesh.triangles[cells, 0]]
    reference = np.einsum("mab,mb->ma", np.linalg.inv(jac[cells]), points - origin)
    values, _ = p2_basis(reference)
    dofs = discretization.dofmap.cell_to_velocity_dofs[cells]
    ux, uy = discretization.dofmap.split(U)
    return np.column_stack(
        [np.sum(ux[dofs] * values, axis=1), np.sum(uy[dofs] * values, axis=1)]
    )


def centerline_profiles(
    state: State, discretization: Discretization, n_samples: int = 65
) -> CenterlineProfiles:
    """Sample u1 on x = 0.5 and u2 on y = 0.5.

    Parameters
    ----------
    state : State
        Discrete solution.
    discretization : Discretization
        The discretization.
    n_samples : int, optional
        Samples per line, endpoints included, by default 65.

    Returns
    -------
    CenterlineProfiles
        Both profiles at the common abscissae.
    """
    if n_samples < 2:
        raise ValueError(f"Invalid number of samples: {n_samples}")
    s = np.linspace(0.0, 1.0, n_samples)
    half = np.full_like(s, 0.5)
    vertical = evaluate_velocity(state.U, discretization, np.column_stack([half, s]))
    horizontal = evaluate_velocity(state.U, discretization, np.column_stack([s, half]))
    return CenterlineProfiles(s, vertical[:, 0], horizontal[:, 1])
