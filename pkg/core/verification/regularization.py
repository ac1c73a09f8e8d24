import logging
from pathlib import Path

from core import Experiment
from fem.analysis import regularization_study

logger = logging.getLogger(__name__)


class Regularization(Experiment):
    """Coarse-mesh errors for every (h, kappa), with non-convergence recorded."""

    def _run(self, output_dir: Path) -> list[Path]:
        if not self.problem.has_exact_solution:
            raise ValueError(f"Problem has no exact solution: {self.problem.name}")
        config = self.config
        results = regularization_study(
            config.ns,
            config.kappa_list,
            config.nu,
            config.k_rule,
            self.problem,
            config.T,
            self.nonlinear_solve,
            self._solver,
            self._threads,
        )
        failed = [key for key, result in results.items() if not result.converged]
        if failed:
            logger.info(
                "Non-convergent runs (n, kappa): %s",
                ", ".join(f"(1/{n}, {kappa:g})" for n, kappa in failed),
            )
        path = output_dir / "regularization.csv"
        self._output.write_regularization(config.ns, config.kappa_list, results, path)
        return [path]
