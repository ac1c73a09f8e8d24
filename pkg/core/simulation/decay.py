import logging
from pathlib import Path

import numpy as np

from core import Experiment
from core.simulation import run_kappas
from fem.analysis import EnergySample, energy_history
from fem.assembly import discretize
from interfaces.output import FieldSnapshot
from interfaces.output.files import kappa_label
from problems import ProblemType

logger = logging.getLogger(__name__)

ENERGY_TOLERANCE = 1e-12


def energy_is_monotone(series: list[EnergySample]) -> bool:
    """Whether kinetic plus weighted gradient energy never grows beyond rounding."""
    total = np.array([sample.kinetic + sample.gradient for sample in series])
    return bool(np.all(np.diff(total) <= ENERGY_TOLERANCE * max(1.0, total[0])))


class Decay(Experiment):
    """Force-free decay for each kappa next to the Navier-Stokes run (kappa = 0)."""

    default_problem = ProblemType.DECAY

    def _run(self, output_dir: Path) -> list[Path]:
        config = self.config
        n = config.ns[0]
        discretization = discretize(n)
        trajectories = run_kappas(
            self.problem,
            [*config.kappa_list, 0.0],
            config.nu,
            config.k_rule.grid(n, config.T),
            discretization,
            self.nonlinear_solve,
            self._solver,
            self._threads,
        )
        written = []
        for kappa, trajectory in trajectories.items():
            series = energy_history(trajectory)
            if self.problem.forcing is None and not energy_is_monotone(series):
                logger.warning("Energy of the kappa = %g run is not monotone", kappa)
            logger.info(
                "kappa = %g: kinetic energy %.6e at t = %g",
                kappa,
                series[-1].kinetic,
                series[-1].t,
            )
            energy_path = output_dir / f"energy_{kappa_label(kappa)}.csv"
            self._output.write_energy(series, energy_path)
            final = trajectory.final
            snapshot_path = output_dir / f"snapshot_{kappa_label(kappa)}.vtk"
            self._output.write_vtk(
                FieldSnapshot(discretization, final.U, final.P, final.t), snapshot_path
            )
            written += [energy_path, snapshot_path]
        return written
