import logging
from abc import ABC, abstractmethod
from pathlib import Path

from core.config import RunConfig
from fem.timestepper import NonlinearSolveConfig
from interfaces.linear_solver import LinearSolver
from interfaces.output import Output
from problems import ProblemDefinition, ProblemType, get_problem

logger = logging.getLogger(__name__)


class Experiment(ABC):
    """Abstract class for experiments driven by a run configuration."""

    default_problem: ProblemType = ProblemType.MANUFACTURED

    def __init__(
        self,
        config: RunConfig,
        solver: LinearSolver,
        output: Output,
        threads: int = 1,
    ):
        """Initialize the experiment.

        Parameters
        ----------
        config : RunConfig
            Validated run configuration.
        solver : LinearSolver
            Linear solver backend.
        output : Output
            Result writer backend.
        threads : int, optional
            Independent runs solved concurrently, by default 1.
        """
        if threads < 1:
            raise ValueError(f"Invalid number of threads: {threads}")
        self._config = config
        self._solver = solver
        self._output = output
        self._threads = threads
        self._problem = get_problem(config.problem or self.default_problem)

    @property
    def config(self) -> RunConfig:
        return self._config

    @property
    def problem(self) -> ProblemDefinition:
        return self._problem

    @property
    def nonlinear_solve(self) -> NonlinearSolveConfig:
        return NonlinearSolveConfig(self._config.picard_tol, self._config.max_iters)

    def __call__(self, output_dir: Path | None = None) -> list[Path]:
        """Run the experiment and write its results.

        Parameters
        ----------
        output_dir : Path | None, optional
            Output directory, by default the configured one.

        Returns
        -------
        list[Path]
            The files written.
        """
        output_dir = Path(output_dir or self._config.output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        logger.info(
            "Running %s on the %s problem into %s",
            type(self).__name__,
            self._problem.name,
            output_dir,
        )
        written = self._run(output_dir)
        logger.info("%s finished, %d files written", type(self).__name__, len(written))
        return written

    @abstractmethod
    def _run(self, output_dir: Path) -> list[Path]:
        pass
