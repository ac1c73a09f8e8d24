"""Reference element, quadrature and degrees of freedom of the P2-P0 pair.

Local node ordering on the reference triangle: vertices v0=(0,0), v1=(1,0),
v2=(0,1), then the midpoints of (v0v1), (v1v2), (v2v0). Velocity vectors are
stored blocked: all x-components, then all y-components.
"""

from dataclasses import dataclass
from math import sqrt
from typing import Callable

import numpy as np
import numpy.typing as npt

from .mesh import TriMesh

VectorField = Callable[
    [npt.NDArray[np.float64], npt.NDArray[np.float64]],
    tuple[npt.ArrayLike, npt.ArrayLike],
]

REFERENCE_NODES = np.array(
    [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]]
)


@dataclass(frozen=True)
class QuadratureRule:
    """Quadrature rule on the reference triangle (weights sum to 1/2)."""

    points: npt.NDArray[np.float64]
    weights: npt.NDArray[np.float64]
    degree: int

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(
        self, f: Callable[[npt.NDArray[np.float64], npt.NDArray[np.float64]], npt.ArrayLike]
    ) -> float:
        """Integrate a function over the reference triangle."""
        values = np.asarray(f(self.points[:, 0], self.points[:, 1]), dtype=float)
        return float(np.dot(self.weights, values))


def _symmetric_rule(
    orbits: list[tuple[float, tuple[float, ...]]], degree: int
) -> QuadratureRule:
    barycentric: list[tuple[float, float, float]] = []
    weights: list[float] = []
    for weight, coords in orbits:
        match coords:
            case ():
                points = [(1 / 3, 1 / 3, 1 / 3)]
            case (a,):
                b = 1.0 - 2.0 * a
                points = [(b, a, a), (a, b, a), (a, a, b)]
            case (a, b):
                c = 1.0 - a - b
                points = [(a, b, c), (b, c, a), (c, a, b), (b, a, c), (a, c, b), (c, b, a)]
            case _:
                raise ValueError(f"Invalid orbit: {coords}")
        barycentric.extend(points)
        weights.extend([0.5 * weight] * len(points))
    lam = np.array(barycentric)
    return QuadratureRule(lam[:, 1:].copy(), np.array(weights), degree)


_RULES: dict[int, QuadratureRule] = {
    2: _symmetric_rule([(1 / 3, (1 / 6,))], 2),
    4: _symmetric_rule(
        [
            (0.223381589678011465944, (0.445948490915964886318,)),
            (0.109951743655321867389, (0.091576213509770743460,)),
        ],
        4,
    ),
    5: _symmetric_rule(
        [
            (9 / 40, ()),
            ((155 - sqrt(15)) / 1200, ((6 - sqrt(15)) / 21,)),
            ((155 + sqrt(15)) / 1200, ((6 + sqrt(15)) / 21,)),
        ],
        5,
    ),
    6: _symmetric_rule(
        [
            (0.116786275726379366030, (0.249286745170910421291,)),
            (0.050844906370206816921, (0.063089014491502228340,)),
            (
                0.082851075618373575194,
                (0.053145049844816947353, 0.310352451033784405416),
            ),
        ],
        6,
    ),
}


def quadrature(degree: int) -> QuadratureRule:
    """Symmetric Gauss rule exact for polynomials of the requested degree.

    Parameters
    ----------
    degree : int
        Polynomial degree, between 2 and 6.

    Returns
    -------
    QuadratureRule
        The lowest-order tabulated rule of at least that degree: 3 points
        (degree 2), 6 points (degrees 3-4), 7 points (degree 5) or
        12 points (degree 6).

    Raises
    ------
    ValueError
        If the degree is not supported.
    """
    match degree:
        case 2:
            return _RULES[2]
        case 3 | 4:
            return _RULES[4]
        case 5:
            return _RULES[5]
        case 6:
            return _RULES[6]
        case _:
            raise ValueError(f"Unsupported quadrature degree: {degree}")


def collapsed_gauss(degree: int) -> QuadratureRule:
    """Conical product Gauss-Legendre rule of arbitrary degree.

    The unit square is collapsed onto the reference triangle by
    (s, t) -> (s, t(1 - s)).

    Parameters
    ----------
    degree : int
        Polynomial degree to integrate exactly.

    Returns
    -------
    QuadratureRule
        The rule.
    """
    if degree < 0:
        raise ValueError(f"Invalid quadrature degree: {degree}")
    n = (degree + 3) // 2
    xi, w = np.polynomial.legendre.leggauss(n)
    s, ws = 0.5 * (1.0 + xi), 0.5 * w
    ss, tt = np.meshgrid(s, s, indexing="ij")
    wss, wtt = np.meshgrid(ws, ws, indexing="ij")
    points = np.column_stack([ss.ravel(), (tt * (1.0 - ss)).ravel()])
    weights = (wss * wtt * (1.0 - ss)).ravel()
    return QuadratureRule(points, weights, degree)


def p2_basis(
    points: npt.ArrayLike,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Quadratic Lagrange basis on the reference triangle.

    Parameters
    ----------
    points : npt.ArrayLike
        Reference coordinates, shape (m, 2).

    Returns
    -------
    tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]
        Values of shape (m, 6) and reference gradients of shape (m, 6, 2).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x, y = points[:, 0], points[:, 1]
    lam = np.stack([1.0 - x - y, x, y], axis=1)
    dlam = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])

    values = np.empty((len(points), 6))
    grads = np.empty((len(points), 6, 2))
    for i in range(3):
        values[:, i] = lam[:, i] * (2.0 * lam[:, i] - 1.0)
        grads[:, i] = np.outer(4.0 * lam[:, i] - 1.0, dlam[i])
    for k, (a, b) in enumerate([(0, 1), (1, 2), (2, 0)], start=3):
        values[:, k] = 4.0 * lam[:, a] * lam[:, b]
        grads[:, k] = 4.0 * (np.outer(lam[:, a], dlam[b]) + np.outer(lam[:, b], dlam[a]))
    return values, grads


def p2_basis_at(
    point: npt.ArrayLike,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Quadratic Lagrange basis at a single reference point.

    Parameters
    ----------
    point : npt.ArrayLike
        Reference coordinates inside the closed reference triangle.

    Returns
    -------
    tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]
        Six values and the six reference gradients, shape (6, 2).
    """
    values, grads = p2_basis([point])
    return values[0], grads[0]


@dataclass(frozen=True)
class DofMap:
    """Numbering of the P2 velocity and P0 pressure degrees of freedom.

    Scalar velocity dofs are the mesh vertices followed by the edge
    midpoints; pressure dofs are the cells.
    """

    n_velocity_scalar_dofs: int
    n_pressure_dofs: int
    cell_to_velocity_dofs: npt.NDArray[np.int64]
    dirichlet_mask: npt.NDArray[np.bool_]
    node_coordinates: npt.NDArray[np.float64]

    @property
    def n_velocity_dofs(self) -> int:
        return 2 * self.n_velocity_scalar_dofs

    @property
    def n_dofs(self) -> int:
        return self.n_velocity_dofs + self.n_pressure_dofs

    @property
    def dirichlet_dofs(self) -> npt.NDArray[np.int64]:
        """Blocked vector indices of the Dirichlet velocity dofs."""
        scalar = np.flatnonzero(self.dirichlet_mask)
        return np.concatenate([scalar, scalar + self.n_velocity_scalar_dofs])

    def split(
        self, velocity: npt.NDArray[np.float64]
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Split blocked velocity coefficients into their components."""
        if velocity.shape != (self.n_velocity_dofs,):
            raise ValueError(
                f"Velocity dimension mismatch: {velocity.shape} != ({self.n_velocity_dofs},)"
            )
        ns = self.n_velocity_scalar_dofs
        return velocity[:ns], velocity[ns:]

    def interpolate(self, field: VectorField) -> npt.NDArray[np.float64]:
        """Interpolate a vector field at the P2 nodes.

        Parameters
        ----------
        field : VectorField
            Function of (x, y) arrays returning the two components.

        Returns
        -------
        npt.NDArray[np.float64]
            Blocked velocity coefficients.
        """
        x, y = self.node_coordinates[:, 0], self.node_coordinates[:, 1]
        ux, uy = field(x, y)
        return np.concatenate(
            [np.broadcast_to(ux, x.shape), np.broadcast_to(uy, x.shape)]
        ).astype(float)


def build_dof_map(mesh: TriMesh) -> DofMap:
    """Number the P2-P0 degrees of freedom of a mesh.

    Parameters
    ----------
    mesh : TriMesh
        The triangulation.

    Returns
    -------
    DofMap
        Vertices first, then edges; Dirichlet mask on every boundary node.
    """
    nv = mesh.n_vertices
    cell_dofs = np.hstack([mesh.triangles, nv + mesh.cell_edges])
    midpoints = mesh.vertices[mesh.edges].mean(axis=1)
    mask = np.zeros(nv + mesh.n_edges, dtype=bool)
    mask[mesh.boundary_vertices] = True
    mask[nv + mesh.boundary_edges] = True
    return DofMap(
        n_velocity_scalar_dofs=nv + mesh.n_edges,
        n_pressure_dofs=mesh.n_triangles,
        cell_to_velocity_dofs=cell_dofs,
        dirichlet_mask=mask,
        node_coordinates=np.vstack([mesh.vertices, midpoints]),
    )
