"""Smooth divergence-free solution with a closed-form forcing.

u1 = 10 a(x) b(y) cos t, u2 = -10 a(y) b(x) cos t, p = (40 x y - 10) cos t
with a(s) = s^2 (s - 1)^2 and b(s) = s (s - 1)(2 s - 1). Since a' = 2 b the
velocity is solenoidal; it vanishes on the boundary of the unit square and
the pressure has zero mean.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from problems import Array, ProblemDefinition, ProblemHints

if TYPE_CHECKING:
    from fem.timestepper import ModelParams


def _a(s):
    return s**2 * (s - 1) ** 2


def _da(s):
    return 2 * s * (s - 1) * (2 * s - 1)


def _d2a(s):
    return 2 * (6 * s**2 - 6 * s + 1)


def _b(s):
    return s * (s - 1) * (2 * s - 1)


def _db(s):
    return 6 * s**2 - 6 * s + 1


def _d2b(s):
    return 12 * s - 6


def velocity_shape(x: Array, y: Array) -> tuple[Array, Array]:
    """Spatial factor of the velocity; also the initial velocity of the decay problem."""
    return 10 * _a(x) * _b(y), -10 * _a(y) * _b(x)


def _shape_gradient(x, y):
    return (
        (10 * _da(x) * _b(y), 10 * _a(x) * _db(y)),
        (-10 * _a(y) * _db(x), -10 * _da(y) * _b(x)),
    )


def _shape_laplacian(x, y):
    return (
        10 * (_d2a(x) * _b(y) + _a(x) * _d2b(y)),
        -10 * (_a(y) * _d2b(x) + _d2a(y) * _b(x)),
    )


def exact_velocity(x: Array, y: Array, t: float) -> tuple[Array, Array]:
    s1, s2 = velocity_shape(x, y)
    return s1 * np.cos(t), s2 * np.cos(t)


def exact_velocity_gradient(x: Array, y: Array, t: float):
    (g11, g12), (g21, g22) = _shape_gradient(x, y)
    c = np.cos(t)
    return (g11 * c, g12 * c), (g21 * c, g22 * c)


def exact_pressure(x: Array, y: Array, t: float) -> Array:
    return (40 * x * y - 10) * np.cos(t)


def forcing(x: Array, y: Array, t: float, params: ModelParams) -> tuple[Array, Array]:
    """f = u_t + (u . grad) u - kappa lap u_t - nu lap u + grad p."""
    c, s = np.cos(t), np.sin(t)
    s1, s2 = velocity_shape(x, y)
    (g11, g12), (g21, g22) = _shape_gradient(x, y)
    l1, l2 = _shape_laplacian(x, y)
    kappa, nu = params.kappa, params.nu
    f1 = (
        -s1 * s
        + c**2 * (s1 * g11 + s2 * g12)
        + kappa * l1 * s
        - nu * l1 * c
        + 40 * y * c
    )
    f2 = (
        -s2 * s
        + c**2 * (s1 * g21 + s2 * g22)
        + kappa * l2 * s
        - nu * l2 * c
        + 40 * x * c
    )
    return f1, f2


def manufactured_problem() -> ProblemDefinition:
    return ProblemDefinition(
        name="manufactured",
        initial_velocity=lambda x, y: exact_velocity(x, y, 0.0),
        boundary_values=exact_velocity,
        hints=ProblemHints(kappa=1.0, nu=1.0, T=1.0, n=16),
        forcing=forcing,
        exact_velocity=exact_velocity,
        exact_velocity_gradient=exact_velocity_gradient,
        exact_pressure=exact_pressure,
    )
