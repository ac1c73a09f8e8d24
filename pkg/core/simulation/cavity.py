import logging
from pathlib import Path

from core import Experiment
from core.simulation import run_kappas
from fem.analysis import centerline_profiles, steady_state_gap
from fem.assembly import discretize
from interfaces.output import FieldSnapshot
from interfaces.output.files import kappa_label
from problems import ProblemType

logger = logging.getLogger(__name__)

STEADY_TOLERANCE = 1e-8
REFERENCE_KAPPA = 0.0


class Cavity(Experiment):
    """Distance of the Kelvin-Voigt cavity flow at T to the steady Navier-Stokes flow."""

    default_problem = ProblemType.CAVITY

    def _run(self, output_dir: Path) -> list[Path]:
        config = self.config
        n = config.ns[0]
        discretization = discretize(n)
        trajectories = run_kappas(
            self.problem,
            [REFERENCE_KAPPA, *config.kappa_list],
            config.nu,
            config.k_rule.grid(n, config.T),
            discretization,
            self.nonlinear_solve,
            self._solver,
            self._threads,
        )
        reference = trajectories[REFERENCE_KAPPA]
        rate = reference.diagnostics[-1].time_derivative_norm
        steady = rate <= STEADY_TOLERANCE
        if not steady:
            logger.warning(
                "Navier-Stokes reference is not steady at t = %g: |dU/dt| = %.3e",
                reference.final.t,
                rate,
            )

        gaps = {
            kappa: steady_state_gap(
                trajectories[kappa].final.U, reference.final.U, discretization
            )
            for kappa in config.kappa_list
        }
        for kappa, gap in gaps.items():
            logger.info("kappa = %g: steady-state gap %.6e", kappa, gap)
        gap_path = output_dir / "steady_gap.csv"
        self._output.write_steady_gap(gaps, steady, gap_path)

        written = [gap_path]
        for kappa, trajectory in trajectories.items():
            final = trajectory.final
            profile_path = output_dir / f"profiles_{kappa_label(kappa)}.csv"
            self._output.write_profiles(
                centerline_profiles(final, discretization), profile_path
            )
            snapshot_path = output_dir / f"snapshot_{kappa_label(kappa)}.vtk"
            self._output.write_vtk(
                FieldSnapshot(discretization, final.U, final.P, final.t), snapshot_path
            )
            written += [profile_path, snapshot_path]
        return written
