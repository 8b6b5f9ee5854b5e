"""Energy densities: closed-form oracles, invariances, and exact gradients.

Oracles used here are independent of the implementation route: expanded
algebraic forms, uniform-state closed forms derived by hand, objectivity
under superposed rotations, and nodal finite differences of the totals.
"""

import numpy as np
import numpy.testing as npt

from cosserat2d.algebra import EPS2, mat_mul, rot2
from cosserat2d.energy import (
    DEFAULT_EPS_REG,
    analytic_variations,
    chiral_elastic_density,
    coupling2_density,
    coupling_density,
    coupling_density_expanded,
    curvature_density,
    elastic_density,
    elastic_density_expanded,
    interaction_density,
    mixing_density,
    potential_total,
    total_energy,
)
from cosserat2d.fields import FieldState, Grid, deformation_gradients
from cosserat2d.materials import MaterialParams, ModelSelector
from cosserat2d.rng import random_smooth_state

from conftest import random_f_stack, random_material


def random_inputs(seed, n=40):
    rng = np.random.default_rng(seed)
    f = random_f_stack(rng, n=n, spread=0.6)
    theta = rng.uniform(-3.0, 3.0, size=n)
    grad_theta = rng.standard_normal((2, n))
    return rng, f, theta, grad_theta


def test_elastic_density_matches_expanded_form():
    for seed in range(5):
        rng, f, theta, _ = random_inputs(seed)
        p = random_material(rng)
        direct = elastic_density(f, theta, p)
        expanded = elastic_density_expanded(f, theta, p)
        npt.assert_allclose(direct, expanded, rtol=1e-12, atol=1e-13)


def test_coupling_density_matches_expanded_form():
    for seed in range(5):
        rng, f, theta, _ = random_inputs(seed)
        p = random_material(rng)
        npt.assert_allclose(coupling_density(f, theta, p),
                            coupling_density_expanded(f, theta, p),
                            rtol=1e-11, atol=1e-12)


def test_coupling_at_half_turn_without_deformation():
    # Undeformed body, microrotation a half turn away from the continuum
    # rotation: the penalty saturates at 8 mu_c.
    p = MaterialParams(mu_c=0.75)
    f = np.eye(2)
    value = coupling_density(f, np.pi, p)
    npt.assert_allclose(value, 8.0 * p.mu_c, rtol=1e-14)
    # and the skew variant vanishes there (skew of a symmetric matrix).
    npt.assert_allclose(coupling2_density(f, np.pi, p), 0.0, atol=1e-15)


def test_uniform_rotation_closed_forms():
    # u = 0, constant angle: every density reduces to a trig polynomial.
    rng = np.random.default_rng(77)
    for _ in range(10):
        p = random_material(rng, chiral=True)
        theta = rng.uniform(-3.1, 3.1)
        f = np.eye(2)
        fstar = np.eye(2)
        c = np.cos(theta) - 1.0

        npt.assert_allclose(elastic_density(f, theta, p),
                            2.0 * (p.mu + p.lam) * c * c, rtol=1e-12, atol=1e-14)
        npt.assert_allclose(
            chiral_elastic_density(fstar, theta, p),
            2.0 * (p.mu_s + p.lam_s) * c * c
            + p.mu_c_s * (2.0 * np.sin(theta) ** 2), rtol=1e-11, atol=1e-13)
        npt.assert_allclose(
            mixing_density(f, fstar, theta, p),
            2.0 * (p.m1 + 2.0 * p.m2) * c * c
            + 2.0 * p.m3 * np.sin(theta) ** 2, rtol=1e-11, atol=1e-13)
        npt.assert_allclose(coupling2_density(f, theta, p),
                            2.0 * p.mu_c * np.sin(theta) ** 2,
                            rtol=1e-12, atol=1e-14)
        npt.assert_allclose(coupling_density(f, theta, p),
                            4.0 * p.mu_c * (1.0 - np.cos(theta)),
                            rtol=1e-12, atol=1e-14)


def test_objectivity_of_nonchiral_densities():
    # Superposed rotation: F -> rot(a) F, theta -> theta + a leaves the
    # non-chiral densities unchanged (the angle gradient is unaffected by
    # a constant shift).
    for seed in range(4):
        rng, f, theta, grad_theta = random_inputs(seed)
        p = random_material(rng, chi=0.7)
        alpha = rng.uniform(-3, 3)
        f_rot = mat_mul(rot2(np.full(theta.shape, alpha)), f)
        theta_rot = theta + alpha

        for density in (elastic_density, coupling_density, coupling2_density):
            npt.assert_allclose(density(f_rot, theta_rot, p),
                                density(f, theta, p), rtol=1e-10, atol=1e-12)
        npt.assert_allclose(
            interaction_density(f_rot, theta_rot, grad_theta, p, 1e-8),
            interaction_density(f, theta, grad_theta, p, 1e-8),
            rtol=1e-10, atol=1e-12)


def test_nonnegative_densities():
    for seed in range(3):
        rng, f, theta, grad_theta = random_inputs(seed)
        p = random_material(rng)
        assert np.all(elastic_density(f, theta, p) > -1e-14)
        assert np.all(curvature_density(grad_theta, p) >= 0.0)
        assert np.all(coupling_density(f, theta, p) > -1e-12)
        assert np.all(coupling2_density(f, theta, p) > -1e-14)


def test_curvature_density_value():
    p = MaterialParams(mu=2.0, L_c=0.3)
    g = np.array([[3.0], [4.0]])
    npt.assert_allclose(curvature_density(g, p), 2.0 * 0.09 * 25.0)


def test_interaction_density_scaling_and_regularization():
    rng, f, theta, grad_theta = random_inputs(123)
    p1 = random_material(rng, chi=0.5)
    p2 = p1.replace(chi=1.0)
    v1 = interaction_density(f, theta, grad_theta, p1, 0.0)
    v2 = interaction_density(f, theta, grad_theta, p2, 0.0)
    npt.assert_allclose(v2, 2.0 * v1, rtol=1e-13)

    # eps_reg = 0 uses the exact norm; small eps_reg stays within eps_reg
    # of it in the norm factor.
    v_reg = interaction_density(f, theta, grad_theta, p1, 1e-6)
    norm = np.sqrt(grad_theta[0] ** 2 + grad_theta[1] ** 2)
    trace_factor = np.abs(v1 / (p1.mu * p1.L_c * p1.chi * norm))
    assert np.max(np.abs(v_reg - v1)) <= 1.1e-6 * p1.mu * p1.L_c * abs(p1.chi) * np.max(trace_factor)


def test_interaction_zero_at_zero_gradient():
    rng = np.random.default_rng(9)
    f = random_f_stack(rng, n=5)
    theta = rng.standard_normal(5)
    p = random_material(rng, chi=0.9)
    g = np.zeros((2, 5))
    npt.assert_array_equal(interaction_density(f, theta, g, p, 0.0), 0.0)
    npt.assert_allclose(interaction_density(f, theta, g, p, 1e-8), 0.0,
                        atol=1e-20)


def test_total_energy_breakdown_consistency():
    grid = Grid(nx=12, ny=10, lx=2.0, ly=1.5)
    rng = np.random.default_rng(31)
    p = random_material(rng, chiral=True, chi=0.4)
    state = random_smooth_state(grid, seed=3, amplitude=0.08, modes=2)
    state.v1 += 0.3
    state.omega += 0.2

    for sel in (ModelSelector.nonchiral("polar"),
                ModelSelector.nonchiral("skew"), ModelSelector.chiral()):
        bd = total_energy(state, p, sel)
        # potential equals the sum over active terms computed independently
        pot = potential_total(state, p, sel.active_terms(), DEFAULT_EPS_REG)
        npt.assert_allclose(bd.potential, pot, rtol=1e-12)
        npt.assert_allclose(bd.total,
                            bd.potential + bd.kinetic_translational
                            + bd.kinetic_rotational, rtol=1e-14)
        # kinetic closed forms
        area = grid.cell_area
        npt.assert_allclose(bd.kinetic_translational,
                            0.5 * p.rho * float(np.sum(state.v1**2 + state.v2**2)) * area,
                            rtol=1e-13)
        npt.assert_allclose(bd.kinetic_rotational,
                            p.rho_rot * float(np.sum(state.omega**2)) * area,
                            rtol=1e-13)
        row = bd.csv_row()
        assert row[-1] == bd.total and len(row) == 9

    # inactive terms are zero in the breakdown
    bd_nc = total_energy(state, p, ModelSelector.nonchiral("polar"))
    assert bd_nc.chiral_elastic == 0.0 and bd_nc.mixing == 0.0
    bd_ch = total_energy(state, p, ModelSelector.chiral())
    assert bd_ch.interaction == 0.0


def test_zero_state_has_zero_energy():
    grid = Grid(nx=8, ny=8)
    state = FieldState.zero(grid)
    p = MaterialParams(chi=0.5, mu_s=0.3, lam_s=0.1, mu_c_s=0.2, m1=0.1,
                       m2=0.1, m3=0.1)
    for sel in (ModelSelector.nonchiral(), ModelSelector.chiral()):
        assert total_energy(state, p, sel).total == 0.0


def variation_fd_error(state, p, terms, nodes, step=1e-6,
                       eps_reg=DEFAULT_EPS_REG):
    """Max relative error of the analytic nodal gradient vs central FD."""
    dv_du, dv_dth = analytic_variations(state, p, None, eps_reg=eps_reg,
                                        terms=terms)
    area = state.grid.cell_area
    worst = 0.0
    arrays = {"u1": (state.u1, dv_du[0]), "u2": (state.u2, dv_du[1]),
              "theta": (state.theta, dv_dth)}
    for field, (values, gradient) in arrays.items():
        for (i, j) in nodes:
            base = values[i, j]
            values[i, j] = base + step
            e_plus = potential_total(state, p, terms, eps_reg)
            values[i, j] = base - step
            e_minus = potential_total(state, p, terms, eps_reg)
            values[i, j] = base
            fd = (e_plus - e_minus) / (2.0 * step)
            analytic = gradient[i, j] * area
            scale = max(abs(fd), abs(analytic), 1e-9)
            worst = max(worst, abs(fd - analytic) / scale)
    return worst


def test_each_term_gradient_matches_finite_differences():
    grid = Grid(nx=10, ny=9, lx=1.9, ly=1.3)
    rng = np.random.default_rng(55)
    p = random_material(rng, chiral=True, chi=0.6)
    state = random_smooth_state(grid, seed=12, amplitude=0.07, modes=2)
    nodes = [(0, 0), (4, 5), (9, 2)]
    for term in ("elastic", "curvature", "interaction", "coupling",
                 "coupling2", "chiral_elastic", "mixing"):
        err = variation_fd_error(state, p, (term,), nodes)
        assert err < 1e-6, f"{term}: {err}"
