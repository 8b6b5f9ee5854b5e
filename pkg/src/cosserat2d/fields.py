"""Periodic uniform-grid fields and second-order central-difference operators.

Scalar fields are arrays of shape ``(nx, ny)``; vector and matrix fields put
their component axes FIRST (``(2, nx, ny)`` / ``(2, 2, nx, ny)``) so the
:mod:`cosserat2d.algebra` kernels broadcast over the grid. All derivative
operators act on the two trailing axes and wrap periodically, which makes the
discrete summation-by-parts identity

    sum(<M, grad w>) * cell_area == -sum(div(M) . w) * cell_area

exact to rounding — the variational checks in :mod:`cosserat2d.energy` and
:mod:`cosserat2d.dynamics` rely on that exactness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, IoError, NonFiniteState

_FMT = "%.17g"


@dataclass(frozen=True)
class Grid:
    """Uniform periodic rectangle with ``nx * ny`` nodes."""

    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise ConfigError(f"grid must be at least 4x4, got {self.nx}x{self.ny}")
        if not (self.lx > 0 and self.ly > 0):
            raise ConfigError("grid lengths must be positive")

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def coords(self):
        """Node coordinate arrays ``x[i, j], y[i, j]``."""
        x = np.arange(self.nx) * self.hx
        y = np.arange(self.ny) * self.hy
        return np.meshgrid(x, y, indexing="ij")

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)


def ddx(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Central x-derivative on the second-to-last axis, periodic wrap."""
    return (np.roll(f, -1, axis=-2) - np.roll(f, 1, axis=-2)) / (2.0 * grid.hx)


def ddy(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Central y-derivative on the last axis, periodic wrap."""
    return (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1)) / (2.0 * grid.hy)


def ddxx(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Three-point second x-derivative, periodic wrap."""
    return (np.roll(f, -1, axis=-2) - 2.0 * f + np.roll(f, 1, axis=-2)) / grid.hx**2


def ddyy(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Three-point second y-derivative, periodic wrap."""
    return (np.roll(f, -1, axis=-1) - 2.0 * f + np.roll(f, 1, axis=-1)) / grid.hy**2


def grad_scalar(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Gradient of a scalar field, shape ``(2, nx, ny)``."""
    return np.stack([ddx(f, grid), ddy(f, grid)])


def div_vector(v: np.ndarray, grid: Grid) -> np.ndarray:
    """Divergence of a vector field, shape ``(nx, ny)``."""
    return ddx(v[0], grid) + ddy(v[1], grid)


def div_matrix(m: np.ndarray, grid: Grid) -> np.ndarray:
    """Row-wise matrix divergence ``(div M)_i = d_x M_i0 + d_y M_i1``."""
    return ddx(m[:, 0], grid) + ddy(m[:, 1], grid)


def curl2_matrix(m: np.ndarray, grid: Grid) -> np.ndarray:
    """Planar matrix curl ``(curl M)_i = d_x M_i1 - d_y M_i0``.

    The orientation matches ``EPS2`` (``eps_01 = +1``). A consequence used by
    the tests: for a rotation field built from an angle ``t``,
    ``rot2(t)^T @ curl2_matrix(rot2(t))`` equals ``-grad t`` (the norms of the
    two sides always agree).
    """
    return ddx(m[:, 1], grid) - ddy(m[:, 0], grid)


@dataclass
class FieldState:
    """Displacements, microrotation angle, and their time derivatives."""

    grid: Grid
    u1: np.ndarray
    u2: np.ndarray
    theta: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    omega: np.ndarray

    @classmethod
    def zero(cls, grid: Grid) -> "FieldState":
        return cls(grid, *(grid.zeros() for _ in range(6)))

    def copy(self) -> "FieldState":
        return FieldState(
            self.grid,
            self.u1.copy(), self.u2.copy(), self.theta.copy(),
            self.v1.copy(), self.v2.copy(), self.omega.copy(),
        )

    def field_arrays(self):
        return (self.u1, self.u2, self.theta, self.v1, self.v2, self.omega)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.field_arrays())

    def require_finite(self):
        if not self.is_finite():
            raise NonFiniteState("field state contains non-finite values")


def deformation_gradients(state: FieldState):
    """Deformation gradients ``F = I + grad u`` and ``F* = I + grad u*``.

    ``u* = (u2, -u1)`` is the quarter-turned displacement, so the rows of
    ``grad u*`` are (row 2 of ``grad u``, minus row 1 of ``grad u``).
    """
    grid = state.grid
    g1 = grad_scalar(state.u1, grid)
    g2 = grad_scalar(state.u2, grid)
    f = np.stack([g1, g2])
    f[0, 0] += 1.0
    f[1, 1] += 1.0
    fstar = np.stack([g2, -g1])
    fstar[0, 0] += 1.0
    fstar[1, 1] += 1.0
    return f, fstar


def save_snapshot(state: FieldState, path) -> None:
    """Write one CSV row per node: ``i,j,x,y,u1,u2,theta,v1,v2,omega``."""
    grid = state.grid
    x, y = grid.coords()
    try:
        with open(path, "w", newline="") as fh:
            fh.write("i,j,x,y,u1,u2,theta,v1,v2,omega\n")
            for i in range(grid.nx):
                for j in range(grid.ny):
                    row = (x[i, j], y[i, j], state.u1[i, j], state.u2[i, j],
                           state.theta[i, j], state.v1[i, j], state.v2[i, j],
                           state.omega[i, j])
                    fh.write(f"{i},{j}," + ",".join(_FMT % v for v in row)
                             + "\n")
    except OSError as exc:
        raise IoError(f"cannot write snapshot to {path}: {exc}") from exc
