from concurrent.futures import ThreadPoolExecutor

from fem.assembly import Discretization
from fem.timestepper import (
    ModelParams,
    NonlinearSolveConfig,
    TimeGrid,
    Trajectory,
    run,
)
from interfaces.linear_solver import LinearSolver
from problems import ProblemDefinition


def run_kappas(
    problem: ProblemDefinition,
    kappas: list[float],
    nu: float,
    grid: TimeGrid,
    discretization: Discretization,
    config: NonlinearSolveConfig,
    solver: LinearSolver,
    threads: int = 1,
) -> dict[float, Trajectory]:
    """Run one problem for several retardation times on a shared grid.

    Parameters
    ----------
    problem : ProblemDefinition
        The problem.
    kappas : list[float]
        Retardation times; duplicates are solved once.
    nu : float
        Viscosity.
    grid : TimeGrid
        Time grid.
    discretization : Discretization
        The discretization.
    config : NonlinearSolveConfig
        Picard settings.
    solver : LinearSolver
        Linear solver.
    threads : int, optional
        Runs solved concurrently, by default 1.

    Returns
    -------
    dict[float, Trajectory]
        Trajectories keyed by kappa, keeping only the initial and final states.
    """
    kappas = list(dict.fromkeys(kappas))

    def solve_one(kappa: float) -> Trajectory:
        return run(
            problem,
            ModelParams(kappa, nu),
            grid,
            discretization,
            config,
            solver,
            keep_states=False,
        )

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return dict(zip(kappas, pool.map(solve_one, kappas)))
