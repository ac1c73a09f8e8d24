from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from .. import Interface

if TYPE_CHECKING:
    from fem.analysis import (
        CenterlineProfiles,
        EnergySample,
        RateTable,
        RegularizationResult,
    )
    from fem.assembly import Discretization


@dataclass(frozen=True)
class FieldSnapshot:
    """Velocity at the P2 nodes and cellwise pressure of one time level."""

    discretization: Discretization
    U: npt.NDArray[np.float64]
    P: npt.NDArray[np.float64]
    t: float

    def __post_init__(self):
        dofmap = self.discretization.dofmap
        if self.U.shape != (dofmap.n_velocity_dofs,):
            raise ValueError(
                f"Velocity dimension mismatch: {self.U.shape} != ({dofmap.n_velocity_dofs},)"
            )
        if self.P.shape != (dofmap.n_pressure_dofs,):
            raise ValueError(
                f"Pressure dimension mismatch: {self.P.shape} != ({dofmap.n_pressure_dofs},)"
            )


class Output(Interface, ABC):
    """Result writer interface.

    Parameters
    ----------
    ABC : _abc.ABCMeta
        Abstract base class.
    """

    @abstractmethod
    def __init__(self, module_settings: dict):
        pass

    def write_vtk(self, snapshot: FieldSnapshot, path: Path):
        """Write a field snapshot for visualization.

        Parameters
        ----------
        snapshot : FieldSnapshot
            Velocity and pressure of one time level.
        path : Path
            Target file.
        """
        self._write_vtk(snapshot, Path(path))

    def write_rate_tables(self, tables: dict[float, RateTable], path: Path):
        """Write convergence tables side by side, one column pair per kappa.

        Parameters
        ----------
        tables : dict[float, RateTable]
            Rate tables keyed by kappa.
        path : Path
            Target file.

        Raises
        ------
        ValueError
            If there are no tables or they do not share the h grid.
        """
        if not tables:
            raise ValueError("No rate tables to write")
        grids = {table.ns for table in tables.values()}
        if len(grids) != 1:
            raise ValueError(f"Rate tables do not share the h grid: {sorted(grids)}")
        self._write_rate_tables(tables, Path(path))

    def write_energy(self, series: list[EnergySample], path: Path):
        """Write an energy time series.

        Parameters
        ----------
        series : list[EnergySample]
            Energies per time level.
        path : Path
            Target file.
        """
        self._write_energy(series, Path(path))

    def write_steady_gap(
        self, gaps: dict[float, float], reference_steady: bool, path: Path
    ):
        """Write the distance to the steady reference for every kappa.

        Parameters
        ----------
        gaps : dict[float, float]
            Gaps keyed by kappa.
        reference_steady : bool
            Whether the reference passed its steadiness check.
        path : Path
            Target file.
        """
        self._write_steady_gap(gaps, reference_steady, Path(path))

    def write_profiles(self, profiles: CenterlineProfiles, path: Path):
        """Write centerline velocity samples.

        Parameters
        ----------
        profiles : CenterlineProfiles
            Samples along both centerlines.
        path : Path
            Target file.
        """
        self._write_profiles(profiles, Path(path))

    def write_regularization(
        self,
        ns: list[int],
        kappas: list[float],
        results: dict[tuple[int, float], RegularizationResult],
        path: Path,
    ):
        """Write final-time errors of every (h, kappa) run.

        Parameters
        ----------
        ns : list[int]
            Cells per side, one row each.
        kappas : list[float]
            Retardation times, one column pair each.
        results : dict[tuple[int, float], RegularizationResult]
            Results keyed by (n, kappa).
        path : Path
            Target file.

        Raises
        ------
        ValueError
            If a (n, kappa) result is missing.
        """
        missing = [(n, k) for n in ns for k in kappas if (n, k) not in results]
        if missing:
            raise ValueError(f"Missing regularization results: {missing}")
        self._write_regularization(ns, kappas, results, Path(path))

    @abstractmethod
    def _write_vtk(self, snapshot: FieldSnapshot, path: Path):
        pass

    @abstractmethod
    def _write_rate_tables(self, tables: dict[float, RateTable], path: Path):
        pass

    @abstractmethod
    def _write_energy(self, series: list[EnergySample], path: Path):
        pass

    @abstractmethod
    def _write_steady_gap(
        self, gaps: dict[float, float], reference_steady: bool, path: Path
    ):
        pass

    @abstractmethod
    def _write_profiles(self, profiles: CenterlineProfiles, path: Path):
        pass

    @abstractmethod
    def _write_regularization(
        self,
        ns: list[int],
        kappas: list[float],
        results: dict[tuple[int, float], RegularizationResult],
        path: Path,
    ):
        pass
