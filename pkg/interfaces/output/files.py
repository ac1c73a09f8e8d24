"""Legacy ASCII VTK snapshots and CSV tables on the local filesystem."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from . import FieldSnapshot, Output

if TYPE_CHECKING:
    from fem.analysis import (
        CenterlineProfiles,
        EnergySample,
        RateTable,
        RegularizationResult,
    )

logger = logging.getLogger(__name__)

NONCONVERGENT = "nonconvergent"

# Local P2 nodes (v0, v1, v2, m01, m12, m20) of the four midpoint subtriangles.
SUBTRIANGLES = np.array([[0, 3, 5], [3, 1, 4], [5, 4, 2], [3, 4, 5]])
VTK_TRIANGLE = 5


def kappa_label(kappa: float) -> str:
    return f"k{kappa:g}"


class FileOutput(Output):
    def __init__(self, module_settings: dict):
        self.rate_format = module_settings.get("rate_format", "%.6f")
        self.value_format = module_settings.get("value_format", "%.6e")
        self.vtk_format = module_settings.get("vtk_format", "%.17g")

    def _open(self, path: Path):
        path.parent.mkdir(parents=True, exist_ok=True)
        logger.info("Writing %s", path)
        return open(path, "w", newline="", encoding="ascii")

    def _value(self, value: float) -> str:
        return self.value_format % value

    def _write_vtk(self, snapshot: FieldSnapshot, path: Path):
        dofmap = snapshot.discretization.dofmap
        points = dofmap.node_coordinates
        cells = dofmap.cell_to_velocity_dofs[:, SUBTRIANGLES].reshape(-1, 3)
        ux, uy = dofmap.split(snapshot.U)
        pressure = np.repeat(snapshot.P, len(SUBTRIANGLES))
        n_points, n_cells = len(points), len(cells)
        with self._open(path) as file:
            file.write("# vtk DataFile Version 3.0\n")
            file.write(f"Kelvin-Voigt P2-P0 field t={snapshot.t:.17g}\n")
            file.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
            file.write(f"POINTS {n_points} double\n")
            np.savetxt(
                file, np.column_stack([points, np.zeros(n_points)]), fmt=self.vtk_format
            )
            file.write(f"CELLS {n_cells} {4 * n_cells}\n")
            np.savetxt(file, np.column_stack([np.full(n_cells, 3), cells]), fmt="%d")
            file.write(f"CELL_TYPES {n_cells}\n")
            np.savetxt(file, np.full(n_cells, VTK_TRIANGLE), fmt="%d")
            file.write(f"POINT_DATA {n_points}\nVECTORS velocity double\n")
            np.savetxt(
                file, np.column_stack([ux, uy, np.zeros(n_points)]), fmt=self.vtk_format
            )
            file.write(f"CELL_DATA {n_cells}\n")
            file.write("SCALARS pressure double 1\nLOOKUP_TABLE default\n")
            np.savetxt(file, pressure, fmt=self.vtk_format)

    def _write_rate_tables(self, tables: dict[float, RateTable], path: Path):
        header = ["h"]
        for kappa in tables:
            header += [f"err_{kappa_label(kappa)}", f"rate_{kappa_label(kappa)}"]
        ns = next(iter(tables.values())).ns
        with self._open(path) as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(header)
            for i, n in enumerate(ns):
                row = [f"1/{n}"]
                for table in tables.values():
                    rate = table.rows[i].rate
                    row.append(self._value(table.rows[i].error))
                    row.append("" if rate is None else self.rate_format % rate)
                writer.writerow(row)

    def _write_energy(self, series: list[EnergySample], path: Path):
        with self._open(path) as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(["t", "kinetic", "gradient"])
            for sample in series:
                writer.writerow(
                    [
                        self._value(sample.t),
                        self._value(sample.kinetic),
                        self._value(sample.gradient),
                    ]
                )

    def _write_steady_gap(
        self, gaps: dict[float, float], reference_steady: bool, path: Path
    ):
        steady = str(reference_steady).lower()
        with self._open(path) as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(["kappa", "gap", "reference_steady"])
            for kappa, gap in gaps.items():
                writer.writerow([f"{kappa:g}", self._value(gap), steady])

    def _write_profiles(self, profiles: CenterlineProfiles, path: Path):
        with self._open(path) as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(["s", "u1_vertical", "u2_horizontal"])
            for s, u1, u2 in zip(profiles.s, profiles.u1_vertical, profiles.u2_horizontal):
                writer.writerow([self._value(s), self._value(u1), self._value(u2)])

    def _write_regularization(
        self,
        ns: list[int],
        kappas: list[float],
        results: dict[tuple[int, float], RegularizationResult],
        path: Path,
    ):
        header = ["h"]
        for kappa in kappas:
            header += [f"err_u_{kappa_label(kappa)}", f"err_p_{kappa_label(kappa)}"]
        with self._open(path) as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(header)
            for n in ns:
                row = [f"1/{n}"]
                for kappa in kappas:
                    result = results[(n, kappa)]
                    if result.l2_velocity is None or result.l2_pressure is None:
                        row += [NONCONVERGENT, NONCONVERGENT]
                    else:
                        row += [
                            self._value(result.l2_velocity),
                            self._value(result.l2_pressure),
                        ]
                writer.writerow(row)
