from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt


class BoundarySide(Enum):
    """Side of the unit square a boundary edge lies on.

    Parameters
    ----------
    Enum : EnumMeta
        Enumeration metaclass.
    """

    BOTTOM = 0
    RIGHT = 1
    TOP = 2
    LEFT = 3


@dataclass(frozen=True)
class AffineMap:
    """Affine map from the reference triangle {(0,0),(1,0),(0,1)} to a cell."""

    vertices: npt.NDArray[np.float64]
    jacobian: npt.NDArray[np.float64]
    det: float

    def __call__(self, point: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Map reference coordinates to physical coordinates.

        Parameters
        ----------
        point : npt.ArrayLike
            Reference coordinates, shape (2,) or (m, 2).

        Returns
        -------
        npt.NDArray[np.float64]
            Physical coordinates with the same shape.
        """
        return self.vertices[0] + np.asarray(point, dtype=float) @ self.jacobian.T


@dataclass(frozen=True)
class TriMesh:
    """Structured triangulation of the unit square.

    Triangles are stored counterclockwise. Edges are unique vertex pairs
    (smaller index first); `cell_edges[c, i]` joins local vertices i and
    (i + 1) mod 3. `edge_cells` holds -1 in the second slot of boundary edges.
    """

    vertices: npt.NDArray[np.float64]
    triangles: npt.NDArray[np.int64]
    edges: npt.NDArray[np.int64]
    cell_edges: npt.NDArray[np.int64]
    edge_cells: npt.NDArray[np.int64]
    boundary_edges: npt.NDArray[np.int64]
    boundary_sides: tuple[BoundarySide, ...]
    n_cells_per_side: int

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells_per_side

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def boundary_vertices(self) -> npt.NDArray[np.int64]:
        return np.unique(self.edges[self.boundary_edges])

    def jacobians(self) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Jacobians and determinants of every cell map.

        Returns
        -------
        tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]
            Jacobians of shape (n_triangles, 2, 2) and determinants of
            shape (n_triangles,).
        """
        corners = self.vertices[self.triangles]
        jac = np.stack(
            [corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]], axis=2
        )
        det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
        return jac, det

    def areas(self) -> npt.NDArray[np.float64]:
        return 0.5 * np.abs(self.jacobians()[1])

    def triangle_geometry(self, cell: int) -> AffineMap:
        """Affine map data of a single cell.

        Parameters
        ----------
        cell : int
            Cell index.

        Returns
        -------
        AffineMap
            Vertex coordinates, Jacobian and absolute Jacobian determinant.

        Raises
        ------
        IndexError
            If the cell index is out of range.
        """
        if not 0 <= cell < self.n_triangles:
            raise IndexError(f"Invalid cell index: {cell}")
        corners = self.vertices[self.triangles[cell]]
        jac = np.column_stack([corners[1] - corners[0], corners[2] - corners[0]])
        return AffineMap(corners, jac, abs(float(np.linalg.det(jac))))

    def locate(
        self, x: npt.ArrayLike, y: npt.ArrayLike
    ) -> npt.NDArray[np.int64]:
        """Find the cells containing the given points.

        Points on shared edges resolve to the lower-left square and, inside
        a square, to the triangle below the diagonal.

        Parameters
        ----------
        x : npt.ArrayLike
            Abscissae.
        y : npt.ArrayLike
            Ordinates.

        Returns
        -------
        npt.NDArray[np.int64]
            Cell indices.

        Raises
        ------
        ValueError
            If a point lies outside the closed unit square.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any((x < 0) | (x > 1) | (y < 0) | (y > 1)):
            raise ValueError("Point outside the unit square")
        n = self.n_cells_per_side
        i = np.minimum((x * n).astype(np.int64), n - 1)
        j = np.minimum((y * n).astype(np.int64), n - 1)
        upper = (y * n - j) > (x * n - i)
        return 2 * (j * n + i) + upper.astype(np.int64)


def build_structured_unit_square(n: int) -> TriMesh:
    """Build a uniform n x n triangulation of the unit square.

    Every square is split along its lower-left to upper-right diagonal.

    Parameters
    ----------
    n : int
        Number of cells per side; the mesh parameter is h = 1/n.

    Returns
    -------
    TriMesh
        The triangulation.

    Raises
    ------
    ValueError
        If n is not a positive integer.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"Invalid number of cells per side: {n}")
    n = int(n)
    coords = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(coords, coords, indexing="xy")
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    v00 = (j * (n + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + n + 1
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.stack([lower, upper], axis=1).reshape(-1, 3)

    local = np.stack(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]], axis=1
    )
    pairs = np.sort(local.reshape(-1, 2), axis=1)
    edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
    cell_edges = inverse.reshape(-1, 3)

    edge_cells = np.full((len(edges), 2), -1, dtype=np.int64)
    for cell, local_edges in enumerate(cell_edges):
        for edge in local_edges:
            slot = 0 if edge_cells[edge, 0] < 0 else 1
            edge_cells[edge, slot] = cell

    boundary_edges = np.flatnonzero(edge_cells[:, 1] < 0)
    boundary_sides = tuple(
        _boundary_side(vertices[edges[edge]]) for edge in boundary_edges
    )
    return TriMesh(
        vertices=vertices,
        triangles=triangles.astype(np.int64),
        edges=edges.astype(np.int64),
        cell_edges=cell_edges.astype(np.int64),
        edge_cells=edge_cells,
        boundary_edges=boundary_edges.astype(np.int64),
        boundary_sides=boundary_sides,
        n_cells_per_side=n,
    )


def _boundary_side(ends: npt.NDArray[np.float64]) -> BoundarySide:
    if np.all(ends[:, 1] == 0.0):
        return BoundarySide.BOTTOM
    if np.all(ends[:, 0] == 1.0):
        return BoundarySide.RIGHT
    if np.all(ends[:, 1] == 1.0):
        return BoundarySide.TOP
    if np.all(ends[:, 0] == 0.0):
        return BoundarySide.LEFT
    raise ValueError(f"Edge is not on the boundary: {ends.tolist()}")
