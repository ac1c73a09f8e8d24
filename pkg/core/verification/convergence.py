from pathlib import Path

from core import Experiment
from fem.analysis import Norm, RateTable, convergence_study


class Convergence(Experiment):
    """Rates of the velocity L2, velocity H1 and pressure L2 errors under refinement."""

    def _run(self, output_dir: Path) -> list[Path]:
        if not self.problem.has_exact_solution:
            raise ValueError(f"Problem has no exact solution: {self.problem.name}")
        config = self.config
        studies: dict[float, dict[Norm, RateTable]] = {
            kappa: convergence_study(
                config.ns,
                kappa,
                config.nu,
                config.k_rule,
                self.problem,
                config.T,
                self.nonlinear_solve,
                self._solver,
                self._threads,
            )
            for kappa in config.kappa_list
        }
        written = []
        for norm in Norm:
            path = output_dir / f"rates_{norm.name.lower()}.csv"
            self._output.write_rate_tables(
                {kappa: tables[norm] for kappa, tables in studies.items()}, path
            )
            written.append(path)
        return written
