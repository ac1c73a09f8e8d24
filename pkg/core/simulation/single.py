import logging
from pathlib import Path

from core import Experiment
from fem.analysis import energy_history, error_norms
from fem.assembly import discretize
from fem.timestepper import ModelParams, run
from interfaces.output import FieldSnapshot

logger = logging.getLogger(__name__)


class Single(Experiment):
    """One run, written as a snapshot at T with its energy history."""

    def _run(self, output_dir: Path) -> list[Path]:
        config = self.config
        n = config.ns[0]
        kappa = config.kappa_list[0]
        discretization = discretize(n)
        trajectory = run(
            self.problem,
            ModelParams(kappa, config.nu),
            config.k_rule.grid(n, config.T),
            discretization,
            self.nonlinear_solve,
            self._solver,
            keep_states=False,
        )
        final = trajectory.final
        if self.problem.has_exact_solution:
            report = error_norms(final, self.problem, discretization)
            logger.info(
                "Errors at t = %g: velocity L2 %.6e, H1 %.6e, pressure L2 %.6e",
                final.t,
                report.l2_velocity,
                report.h1_velocity,
                report.l2_pressure,
            )
        snapshot_path = output_dir / "snapshot.vtk"
        self._output.write_vtk(
            FieldSnapshot(discretization, final.U, final.P, final.t), snapshot_path
        )
        energy_path = output_dir / "energy.csv"
        self._output.write_energy(energy_history(trajectory), energy_path)
        return [snapshot_path, energy_path]
