"""Periodic grid calculus and field-state plumbing.

Derivative stencils are checked against analytic derivatives of smooth
periodic functions (with a second-order convergence assertion) and against
exact discrete identities: summation-by-parts adjointness, translation
equivariance, and commutation of the shifts.
"""

import numpy as np
import numpy.testing as npt
import pytest

from cosserat2d.algebra import mat_mul, rot2, transpose2
from cosserat2d.errors import ConfigError, NonFiniteState
from cosserat2d.fields import (
    FieldState,
    Grid,
    curl2_matrix,
    ddx,
    ddxx,
    ddy,
    ddyy,
    deformation_gradients,
    div_matrix,
    div_vector,
    grad_scalar,
    save_snapshot,
)
from cosserat2d.rng import random_smooth_state


def smooth_field(grid):
    x, y = grid.coords()
    kx = 2.0 * np.pi / grid.lx
    ky = 2.0 * np.pi / grid.ly
    f = np.sin(2 * kx * x) * np.cos(ky * y)
    fx = 2 * kx * np.cos(2 * kx * x) * np.cos(ky * y)
    fy = -ky * np.sin(2 * kx * x) * np.sin(ky * y)
    fxx = -(2 * kx) ** 2 * f
    fyy = -(ky ** 2) * f
    return f, fx, fy, fxx, fyy


def max_err(a, b):
    return float(np.max(np.abs(a - b)))


def test_grid_validation_and_geometry():
    with pytest.raises(ConfigError):
        Grid(nx=3, ny=8)
    with pytest.raises(ConfigError):
        Grid(nx=8, ny=8, lx=-1.0)
    g = Grid(nx=8, ny=16, lx=2.0, ly=4.0)
    assert g.hx == 0.25 and g.hy == 0.25
    assert g.shape == (8, 16)
    npt.assert_allclose(g.cell_area, 0.0625)
    x, y = g.coords()
    assert x.shape == (8, 16)
    npt.assert_allclose(x[:, 0], np.arange(8) * 0.25)
    npt.assert_allclose(y[0, :], np.arange(16) * 0.25)


@pytest.mark.parametrize("n", [32, 64])
def test_stencils_converge_to_analytic_derivatives(n):
    grid = Grid(nx=n, ny=n, lx=2.0 * np.pi, ly=2.0 * np.pi)
    f, fx, fy, fxx, fyy = smooth_field(grid)
    # Second-order stencils: error ~ h^2 with an O(1) constant here.
    bound = 60.0 / n**2
    assert max_err(ddx(f, grid), fx) < bound
    assert max_err(ddy(f, grid), fy) < bound
    assert max_err(ddxx(f, grid), fxx) < 4.0 * bound
    assert max_err(ddyy(f, grid), fyy) < 4.0 * bound


def test_stencils_are_second_order():
    errors = []
    for n in (32, 64, 128):
        grid = Grid(nx=n, ny=n, lx=2.0 * np.pi, ly=2.0 * np.pi)
        f, fx, *_ = smooth_field(grid)
        errors.append(max_err(ddx(f, grid), fx))
    assert 3.5 < errors[0] / errors[1] < 4.5
    assert 3.5 < errors[1] / errors[2] < 4.5


def test_summation_by_parts_adjointness():
    rng = np.random.default_rng(21)
    grid = Grid(nx=12, ny=10, lx=1.7, ly=0.9)
    for _ in range(5):
        f = rng.standard_normal(grid.shape)
        g = rng.standard_normal(grid.shape)
        for op in (ddx, ddy):
            lhs = float(np.sum(f * op(g, grid)))
            rhs = -float(np.sum(op(f, grid) * g))
            assert abs(lhs - rhs) < 1e-12 * np.sum(np.abs(f) * np.abs(g))


def test_translation_equivariance_is_exact():
    rng = np.random.default_rng(22)
    grid = Grid(nx=9, ny=7, lx=1.0, ly=1.0)
    f = rng.standard_normal(grid.shape)
    for op in (ddx, ddy, ddxx, ddyy):
        shifted = op(np.roll(f, (2, 3), axis=(0, 1)), grid)
        npt.assert_array_equal(shifted, np.roll(op(f, grid), (2, 3), axis=(0, 1)))


def test_mixed_derivatives_commute():
    # The shifts commute exactly; the two division orders differ only by
    # round-off of the 1/(2h) factors.
    rng = np.random.default_rng(23)
    grid = Grid(nx=9, ny=7, lx=1.3, ly=2.1)
    f = rng.standard_normal(grid.shape)
    npt.assert_allclose(ddx(ddy(f, grid), grid), ddy(ddx(f, grid), grid),
                        rtol=0, atol=1e-13)


def test_vector_and_matrix_operators_reduce_to_stencils():
    rng = np.random.default_rng(24)
    grid = Grid(nx=10, ny=8, lx=1.0, ly=2.0)
    f = rng.standard_normal(grid.shape)
    g = grad_scalar(f, grid)
    npt.assert_array_equal(g[0], ddx(f, grid))
    npt.assert_array_equal(g[1], ddy(f, grid))

    v = rng.standard_normal((2,) + grid.shape)
    npt.assert_array_equal(div_vector(v, grid),
                           ddx(v[0], grid) + ddy(v[1], grid))

    m = rng.standard_normal((2, 2) + grid.shape)
    d = div_matrix(m, grid)
    for i in range(2):
        npt.assert_array_equal(d[i], ddx(m[i, 0], grid) + ddy(m[i, 1], grid))

    c = curl2_matrix(m, grid)
    for i in range(2):
        npt.assert_array_equal(c[i], ddx(m[i, 1], grid) - ddy(m[i, 0], grid))


def test_rotation_curl_identity():
    # Continuum identity: R^T curl2(R) = -grad(theta); discretely it holds
    # to stencil accuracy for smooth angle fields.
    for n, bound in ((64, 2e-3), (128, 5e-4)):
        grid = Grid(nx=n, ny=n, lx=2.0 * np.pi, ly=2.0 * np.pi)
        x, y = grid.coords()
        theta = 0.3 * np.sin(x) * np.cos(y) + 0.1 * np.cos(2 * y)
        r = rot2(theta)
        lhs = np.einsum("ij...,i...->j...", r, curl2_matrix(r, grid))
        rhs = -grad_scalar(theta, grid)
        assert max_err(lhs, rhs) < bound


def test_deformation_gradients_componentwise():
    grid = Grid(nx=12, ny=12, lx=2.0 * np.pi, ly=2.0 * np.pi)
    state = random_smooth_state(grid, seed=5, amplitude=0.05, modes=2)
    f, fstar = deformation_gradients(state)

    npt.assert_array_equal(f[0, 0], 1.0 + ddx(state.u1, grid))
    npt.assert_array_equal(f[0, 1], ddy(state.u1, grid))
    npt.assert_array_equal(f[1, 0], ddx(state.u2, grid))
    npt.assert_array_equal(f[1, 1], 1.0 + ddy(state.u2, grid))

    # F* is the gradient of the quarter-turned displacement (u2, -u1).
    npt.assert_array_equal(fstar[0, 0], 1.0 + ddx(state.u2, grid))
    npt.assert_array_equal(fstar[0, 1], ddy(state.u2, grid))
    npt.assert_array_equal(fstar[1, 0], -ddx(state.u1, grid))
    npt.assert_array_equal(fstar[1, 1], 1.0 - ddy(state.u1, grid))


def test_field_state_copy_is_deep_and_finiteness_is_checked():
    grid = Grid(nx=6, ny=6)
    state = random_smooth_state(grid, seed=1, amplitude=0.1, modes=1)
    clone = state.copy()
    clone.u1[0, 0] += 1.0
    assert state.u1[0, 0] != clone.u1[0, 0]

    state.v2[3, 3] = np.nan
    assert not state.is_finite()
    with pytest.raises(NonFiniteState):
        state.require_finite()


def test_snapshot_round_trip(tmp_path):
    grid = Grid(nx=4, ny=5, lx=1.0, ly=1.0)
    state = random_smooth_state(grid, seed=9, amplitude=0.3, modes=1)
    path = tmp_path / "snap.csv"
    save_snapshot(state, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "i,j,x,y,u1,u2,theta,v1,v2,omega"
    assert len(lines) == 1 + grid.nx * grid.ny

    # Row order is i-major, j-minor; values restore exactly from %.17g.
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "0"
    second = lines[2].split(",")
    assert second[0] == "0" and second[1] == "1"
    i, j = 2, 3
    row = lines[1 + i * grid.ny + j].split(",")
    assert float(row[4]) == state.u1[i, j]
    assert float(row[9]) == state.omega[i, j]


def test_rotation_matrix_transpose_convention():
    # transpose2 really swaps the two leading matrix axes on stacked fields.
    rng = np.random.default_rng(30)
    m = rng.standard_normal((2, 2, 3, 4))
    t = transpose2(m)
    npt.assert_array_equal(t[0, 1], m[1, 0])
    npt.assert_array_equal(mat_mul(m, t)[0, 0],
                           m[0, 0] * t[0, 0] + m[0, 1] * t[1, 0])
