"""Assembly of the discrete operators of the Kelvin-Voigt weak form.

Element integrals are vectorized over cells: every cell contributes a dense
local matrix, and the global matrices are scattered through triplets.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import numpy.typing as npt
from scipy import sparse

from .mesh import TriMesh, build_structured_unit_square
from .space import DofMap, QuadratureRule, build_dof_map, p2_basis, quadrature
from .sparse import SparseMatrix, assemble_elements, block_diagonal

Forcing = Callable[
    [npt.NDArray[np.float64], npt.NDArray[np.float64]],
    tuple[npt.ArrayLike, npt.ArrayLike],
]


@dataclass(frozen=True)
class ElementGeometry:
    """Basis data at the quadrature points of every cell."""

    rule: QuadratureRule
    det: npt.NDArray[np.float64]
    values: npt.NDArray[np.float64]
    gradients: npt.NDArray[np.float64]
    points: npt.NDArray[np.float64]

    @property
    def weights(self) -> npt.NDArray[np.float64]:
        """Physical quadrature weights, shape (cells, points)."""
        return self.det[:, None] * self.rule.weights[None, :]


def element_geometry(mesh: TriMesh, rule: QuadratureRule) -> ElementGeometry:
    """Evaluate the P2 basis and its physical gradients on every cell.

    Parameters
    ----------
    mesh : TriMesh
        The triangulation.
    rule : QuadratureRule
        Quadrature rule on the reference triangle.

    Returns
    -------
    ElementGeometry
        Values (points, 6), gradients (cells, points, 6, 2), physical
        points (cells, points, 2) and absolute determinants (cells,).
    """
    jac, det = mesh.jacobians()
    inv_t = np.linalg.inv(jac).transpose(0, 2, 1)
    values, ref_grads = p2_basis(rule.points)
    gradients = np.einsum("cab,qib->cqia", inv_t, ref_grads)
    origin = mesh.vertices[mesh.triangles[:, 0]]
    points = origin[:, None, :] + np.einsum("cab,qb->cqa", jac, rule.points)
    return ElementGeometry(rule, np.abs(det), values, gradients, points)


@dataclass(frozen=True)
class OperatorSet:
    """Velocity mass, velocity stiffness and pressure-divergence coupling.

    `mass` and `stiffness` act on blocked velocity vectors; `divergence` has
    one row per cell and realizes (chi, div u).
    """

    mass: SparseMatrix
    stiffness: SparseMatrix
    divergence: SparseMatrix
    dirichlet_dofs: npt.NDArray[np.int64]
    cell_areas: npt.NDArray[np.float64]


def assemble_operators(
    mesh: TriMesh, dofmap: DofMap, rule: QuadratureRule | None = None
) -> OperatorSet:
    """Assemble M, A and B.

    Parameters
    ----------
    mesh : TriMesh
        The triangulation.
    dofmap : DofMap
        Degree-of-freedom numbering on that mesh.
    rule : QuadratureRule | None, optional
        Quadrature rule, by default the degree-5 rule.

    Returns
    -------
    OperatorSet
        The assembled operators.
    """
    geometry = element_geometry(mesh, rule or quadrature(5))
    w = geometry.weights
    phi = geometry.values
    dphi = geometry.gradients
    dofs = dofmap.cell_to_velocity_dofs
    ns = dofmap.n_velocity_scalar_dofs

    mass_local = np.einsum("cq,qi,qj->cij", w, phi, phi)
    stiffness_local = np.einsum("cq,cqia,cqja->cij", w, dphi, dphi)
    mass = assemble_elements(mass_local, dofs, dofs, (ns, ns))
    stiffness = assemble_elements(stiffness_local, dofs, dofs, (ns, ns))

    div_local = np.einsum("cq,cqia->cai", w, dphi).reshape(len(dofs), 1, 12)
    cells = np.arange(mesh.n_triangles)[:, None]
    divergence = assemble_elements(
        div_local,
        cells,
        np.hstack([dofs, dofs + ns]),
        (dofmap.n_pressure_dofs, 2 * ns),
    )
    return OperatorSet(
        mass=block_diagonal(mass),
        stiffness=block_diagonal(stiffness),
        divergence=divergence,
        dirichlet_dofs=dofmap.dirichlet_dofs,
        cell_areas=mesh.areas(),
    )


def assemble_convection(
    mesh: TriMesh,
    dofmap: DofMap,
    w: npt.NDArray[np.float64],
    rule: QuadratureRule | None = None,
    geometry: ElementGeometry | None = None,
) -> SparseMatrix:
    """Assemble the skew-symmetrized convection matrix C(w).

    (C(w) u) . phi = 1/2 (w . grad u, phi) - 1/2 (w . grad phi, u); the
    element matrices are antisymmetrized exactly, so phi^T C(w) phi = 0 up
    to rounding for every w.

    Parameters
    ----------
    mesh : TriMesh
        The triangulation.
    dofmap : DofMap
        Degree-of-freedom numbering.
    w : npt.NDArray[np.float64]
        Blocked coefficients of the advecting velocity.
    rule : QuadratureRule | None, optional
        Quadrature rule, by default the degree-5 rule.
    geometry : ElementGeometry | None, optional
        Precomputed element geometry, takes precedence over `rule`.

    Returns
    -------
    SparseMatrix
        Block-diagonal matrix acting on blocked velocity vectors.

    Raises
    ------
    ValueError
        If w does not have the velocity dimension.
    """
    wx, wy = dofmap.split(np.asarray(w, dtype=float))
    if geometry is None:
        geometry = element_geometry(mesh, rule or quadrature(5))
    dofs = dofmap.cell_to_velocity_dofs
    ns = dofmap.n_velocity_scalar_dofs
    phi = geometry.values
    w_q = np.stack(
        [wx[dofs] @ phi.T, wy[dofs] @ phi.T], axis=2
    )
    advective = np.einsum(
        "cq,cqa,cqja,qi->cij", geometry.weights, w_q, geometry.gradients, phi
    )
    local = 0.5 * (advective - advective.transpose(0, 2, 1))
    return block_diagonal(assemble_elements(local, dofs, dofs, (ns, ns)))


def assemble_load(
    mesh: TriMesh,
    dofmap: DofMap,
    f: Forcing,
    rule: QuadratureRule | None = None,
    geometry: ElementGeometry | None = None,
) -> npt.NDArray[np.float64]:
    """Assemble the load vector (f, phi_i) for every velocity basis function.

    Parameters
    ----------
    mesh : TriMesh
        The triangulation.
    dofmap : DofMap
        Degree-of-freedom numbering.
    f : Forcing
        Function of (x, y) arrays returning both force components.
    rule : QuadratureRule | None, optional
        Quadrature rule, by default the degree-6 rule.
    geometry : ElementGeometry | None, optional
        Precomputed element geometry, takes precedence over `rule`.

    Returns
    -------
    npt.NDArray[np.float64]
        Blocked load vector.
    """
    if geometry is None:
        geometry = element_geometry(mesh, rule or quadrature(6))
    x, y = geometry.points[..., 0], geometry.points[..., 1]
    fx, fy = (np.broadcast_to(np.asarray(c, dtype=float), x.shape) for c in f(x, y))
    dofs = dofmap.cell_to_velocity_dofs
    ns = dofmap.n_velocity_scalar_dofs
    load = np.zeros(2 * ns)
    for component, values in enumerate((fx, fy)):
        local = np.einsum("cq,cq,qi->ci", geometry.weights, values, geometry.values)
        np.add.at(load, dofs + component * ns, local)
    return load


def apply_dirichlet(
    matrix: SparseMatrix,
    rhs: npt.NDArray[np.float64],
    dofs: npt.NDArray[np.int64],
    values: npt.ArrayLike,
) -> tuple[SparseMatrix, npt.NDArray[np.float64]]:
    """Eliminate prescribed dofs symmetrically.

    Known values are moved to the right-hand side, the constrained rows and
    columns are zeroed and their diagonal set to one, so the solution
    reproduces the prescribed values exactly.

    Parameters
    ----------
    matrix : SparseMatrix
        Square system matrix.
    rhs : npt.NDArray[np.float64]
        Right-hand side.
    dofs : npt.NDArray[np.int64]
        Constrained indices.
    values : npt.ArrayLike
        Prescribed values, one per constrained index (or a scalar).

    Returns
    -------
    tuple[SparseMatrix, npt.NDArray[np.float64]]
        The constrained matrix and right-hand side.
    """
    n = matrix.shape[0]
    lifted = np.zeros(n)
    lifted[dofs] = values
    keep = np.ones(n)
    keep[dofs] = 0.0
    free = sparse.diags(keep)
    constrained = free @ matrix @ free + sparse.diags(1.0 - keep)
    constrained_rhs = keep * (rhs - matrix @ lifted) + lifted
    return constrained.tocsr(), constrained_rhs


@dataclass(frozen=True)
class Discretization:
    """Mesh, numbering, assembled operators and cached element geometry."""

    mesh: TriMesh
    dofmap: DofMap
    operators: OperatorSet
    assembly_geometry: ElementGeometry = field(repr=False)
    load_geometry: ElementGeometry = field(repr=False)

    def convection(self, w: npt.NDArray[np.float64]) -> SparseMatrix:
        return assemble_convection(
            self.mesh, self.dofmap, w, geometry=self.assembly_geometry
        )

    def load(self, f: Forcing) -> npt.NDArray[np.float64]:
        return assemble_load(self.mesh, self.dofmap, f, geometry=self.load_geometry)


def discretize(n: int) -> Discretization:
    """Build the P2-P0 discretization of the unit square with h = 1/n."""
    mesh = build_structured_unit_square(n)
    dofmap = build_dof_map(mesh)
    return Discretization(
        mesh=mesh,
        dofmap=dofmap,
        operators=assemble_operators(mesh, dofmap),
        assembly_geometry=element_geometry(mesh, quadrature(5)),
        load_geometry=element_geometry(mesh, quadrature(6)),
    )
