"""Equations of motion, homogeneous equilibria, time integration, verifier.

The right-hand sides here are assembled from *grouped closed forms* of the
stress-like conjugates (expanded matrix products and ``tr(EPS2 @ M)`` traces),
deliberately not by calling :func:`cosserat2d.energy.analytic_variations`.
The two implementations must agree to round-off because both are exact
gradients of the same discrete energy; :func:`verify_variational_consistency`
checks exactly that.

Normalization of the angle equation: the rotational kinetic density is
``rho_rot * theta_t**2`` (no 1/2, coming from the rotation-matrix rate norm),
so the Euler-Lagrange equation reads ``2*rho_rot*theta_tt = -dV/dtheta``.
The assembled forms below compute ``rho_rot*theta_tt = -dV/dtheta / 2``
and divide by ``rho_rot``; the factor 2 is recorded as an explicit check in
the verification report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import mat_mul, polar2, rot2, trace2, transpose2
from .energy import (
    DEFAULT_EPS_REG,
    analytic_variations,
    potential_total,
)
from .errors import NonFiniteState, ZeroDenominator
from .fields import (
    FieldState,
    ddx,
    ddxx,
    ddy,
    ddyy,
    deformation_gradients,
    div_matrix,
    div_vector,
    grad_scalar,
)
from .materials import ModelSelector, MaterialParams
from .report import VerificationReport


@dataclass(frozen=True)
class RhsFields:
    """Accelerations: ``acc_u`` shape (2, nx, ny), ``acc_theta`` (nx, ny)."""

    acc_u: np.ndarray
    acc_theta: np.ndarray


def _eps_trace(m: np.ndarray) -> np.ndarray:
    """tr(EPS2 @ M) = M[1,0] - M[0,1]; equals 2 sin(phi) for rot2(phi)."""
    return m[1, 0] - m[0, 1]


def _smoothed_norm(g: np.ndarray, eps_reg: float):
    """Same convention as the energy module: the divisor is inf at the
    eps_reg = 0 kink, making the direction factor g/s the symmetric
    subgradient choice 0 there."""
    s = np.sqrt(g[0] ** 2 + g[1] ** 2 + eps_reg**2)
    return s - eps_reg, np.where(s > 0.0, s, np.inf)


def _eps_t_left(m: np.ndarray) -> np.ndarray:
    """EPS2^T @ M for component-first arrays."""
    return np.stack([-m[1], m[0]])


def rhs_nonlinear(state: FieldState, p: MaterialParams, coupling: str = "polar",
                  eps_reg: float = DEFAULT_EPS_REG) -> RhsFields:
    """Accelerations of the non-chiral model (elastic + curvature +
    rotation/strain coupling + optional chiral-interaction term).

    ``coupling='polar'`` penalizes microrotation vs. the continuum rotation
    ``polar(F)`` (this path needs ``det F > 0`` and raises
    ``DegenerateDeformation`` otherwise); ``coupling='skew'`` penalizes the
    skew part of ``R^T F``.
    """
    grid = state.grid
    f, _ = deformation_gradients(state)
    r = rot2(state.theta)
    rt = transpose2(r)
    x = mat_mul(rt, f)
    trx = trace2(x)
    rftr = mat_mul(r, mat_mul(transpose2(f), r))  # R F^T R

    # --- displacement equation: rho u_tt = div(P_total) ---
    p_total = p.mu * (rftr + f) + (p.lam * trx - 2.0 * (p.mu + p.lam)) * r

    # --- angle equation accumulator: rho_rot theta_tt = torque ---
    tx = _eps_trace(x)
    txx = _eps_trace(mat_mul(x, x))
    g = grad_scalar(state.theta, grid)
    torque = p.mu * p.L_c**2 * div_vector(g, grid)
    torque = torque + (p.mu + p.lam) * tx - 0.5 * p.mu * txx - 0.5 * p.lam * trx * tx

    if coupling == "polar":
        q, stretch = polar2(f)
        tru = trace2(stretch)  # trace of sqrt(F^T F)
        p_total = p_total + (2.0 * p.mu_c / tru) * (mat_mul(q, mat_mul(rt, q)) - r)
        torque = torque + p.mu_c * _eps_trace(mat_mul(rt, q))
    elif coupling == "skew":
        p_total = p_total + p.mu_c * (f - rftr)
        torque = torque + 0.5 * p.mu_c * txx
    else:
        raise ValueError(f"unknown coupling kind: {coupling!r}")

    if p.chi != 0.0:
        n, s = _smoothed_norm(g, eps_reg)
        c = p.mu * p.L_c * p.chi
        p_total = p_total + (c * n) * r
        torque = torque + 0.5 * c * (div_vector(trx * g / s, grid) - n * tx)

    return RhsFields(acc_u=div_matrix(p_total, grid) / p.rho,
                     acc_theta=torque / p.rho_rot)


def rhs_chiral(state: FieldState, p: MaterialParams) -> RhsFields:
    """Accelerations of the chiral model (elastic + curvature + skew coupling
    + starred elastic on the 90-degree-rotated displacement + mixing)."""
    grid = state.grid
    f, fstar = deformation_gradients(state)
    r = rot2(state.theta)
    rt = transpose2(r)
    x = mat_mul(rt, f)
    xs = mat_mul(rt, fstar)
    trx = trace2(x)
    trxs = trace2(xs)
    rftr = mat_mul(r, mat_mul(transpose2(f), r))
    rfstr = mat_mul(r, mat_mul(transpose2(fstar), r))

    # --- displacement equation ---
    p_total = p.mu * (rftr + f) + (p.lam * trx - 2.0 * (p.mu + p.lam)) * r
    p_total = p_total + p.mu_c * (f - rftr)
    p_star = (p.mu_s * (rfstr + fstar)
              + (p.lam_s * trxs - 2.0 * (p.mu_s + p.lam_s)) * r
              + p.mu_c_s * (fstar - rfstr))
    p_mix_direct = (p.m1 * (0.5 * (fstar + rfstr) - r)
                    + p.m2 * (trxs - 2.0) * r
                    + 0.5 * p.m3 * (fstar - rfstr))
    p_mix_star = (p.m1 * (0.5 * (f + rftr) - r)
                  + p.m2 * (trx - 2.0) * r
                  + 0.5 * p.m3 * (f - rftr))
    p_total = p_total + p_mix_direct + _eps_t_left(p_star + p_mix_star)

    # --- angle equation ---
    tx = _eps_trace(x)
    txs = _eps_trace(xs)
    txx = _eps_trace(mat_mul(x, x))
    txsxs = _eps_trace(mat_mul(xs, xs))
    txxs = _eps_trace(mat_mul(x, xs))
    txsx = _eps_trace(mat_mul(xs, x))

    torque = p.mu * p.L_c**2 * div_vector(grad_scalar(state.theta, grid), grid)
    torque = torque + (p.mu + p.lam) * tx - 0.5 * p.mu * txx - 0.5 * p.lam * trx * tx
    torque = torque + 0.5 * p.mu_c * txx
    torque = (torque + (p.mu_s + p.lam_s) * txs - 0.5 * p.mu_s * txsxs
              - 0.5 * p.lam_s * trxs * txs + 0.5 * p.mu_c_s * txsxs)
    torque = (torque
              - 0.5 * p.m1 * (0.5 * (txxs + txsx) - tx - txs)
              - 0.5 * p.m2 * ((trxs - 2.0) * tx + (trx - 2.0) * txs)
              + 0.25 * p.m3 * (txxs + txsx))

    return RhsFields(acc_u=div_matrix(p_total, grid) / p.rho,
                     acc_theta=torque / p.rho_rot)


@dataclass(frozen=True)
class LinearDerivatives:
    """Analytic or stencil derivative bundle for the linearized model.

    ``phi`` is the linear-model rotation variable (opposite sign of theta).
    """

    u1x: np.ndarray
    u1y: np.ndarray
    u2x: np.ndarray
    u2y: np.ndarray
    u1xx: np.ndarray
    u1yy: np.ndarray
    u1xy: np.ndarray
    u2xx: np.ndarray
    u2yy: np.ndarray
    u2xy: np.ndarray
    phi: np.ndarray
    phi_x: np.ndarray
    phi_y: np.ndarray
    phi_xx: np.ndarray
    phi_yy: np.ndarray


def linear_chiral_forces(d: LinearDerivatives, p: MaterialParams):
    """Force densities (f1, f2, f3) of the linearized chiral model.

    The equations are ``rho*u1_tt = f1``, ``rho*u2_tt = f2`` and
    ``4*rho_rot*phi_tt = f3`` in the ``phi = -theta`` convention.
    """
    c_uxx = p.lam + 2.0 * p.mu + p.mu_s + p.mu_c_s
    c_uyy = p.mu + p.mu_c + p.lam_s + 2.0 * p.mu_s
    c_cross = p.lam + p.mu - p.mu_c - p.lam_s - p.mu_s + p.mu_c_s
    c_m = 0.5 * p.m1 + p.m2
    c_phi_grad = 2.0 * (2.0 * p.lam_s + 2.0 * p.mu_s - p.mu_c_s)
    c_phi_rot = 2.0 * p.mu_c
    d1 = p.mu * p.L_c**2

    f1 = (c_uxx * d.u1xx + c_uyy * d.u1yy + c_cross * d.u2xy
          + c_m * (-2.0 * d.u1xy + d.u2xx - d.u2yy)
          - c_phi_grad * d.phi_x + c_phi_rot * d.phi_y)
    f2 = (c_uyy * d.u2xx + c_uxx * d.u2yy + c_cross * d.u1xy
          + c_m * (d.u1xx - d.u1yy + 2.0 * d.u2xy)
          - c_phi_rot * d.phi_x - c_phi_grad * d.phi_y)
    f3 = (2.0 * d1 * (d.phi_xx + d.phi_yy)
          + 4.0 * (2.0 * p.lam_s + 2.0 * p.mu_s - p.mu_c_s - p.mu_c) * d.phi
          + 2.0 * p.mu_c * (d.u2x - d.u1y)
          - 2.0 * (p.mu_c_s - 2.0 * p.lam_s - 2.0 * p.mu_s) * (d.u1x + d.u2y))
    return f1, f2, f3


def grid_linear_derivatives(state: FieldState) -> LinearDerivatives:
    """Stencil derivative bundle of a grid state (phi = -theta)."""
    g = state.grid
    u1, u2 = state.u1, state.u2
    phi = -state.theta
    return LinearDerivatives(
        u1x=ddx(u1, g), u1y=ddy(u1, g), u2x=ddx(u2, g), u2y=ddy(u2, g),
        u1xx=ddxx(u1, g), u1yy=ddyy(u1, g), u1xy=ddy(ddx(u1, g), g),
        u2xx=ddxx(u2, g), u2yy=ddyy(u2, g), u2xy=ddy(ddx(u2, g), g),
        phi=phi, phi_x=ddx(phi, g), phi_y=ddy(phi, g),
        phi_xx=ddxx(phi, g), phi_yy=ddyy(phi, g))


def rhs_linear_chiral(state: FieldState, p: MaterialParams) -> RhsFields:
    """Accelerations of the linearized chiral model on the grid.

    The rotational inertia of the linear equations is ``4*rho_rot`` and their
    rotation variable is ``phi = -theta``; both conversions happen here so the
    returned accelerations live in the same (u, theta) variables as the
    nonlinear right-hand sides.
    """
    f1, f2, f3 = linear_chiral_forces(grid_linear_derivatives(state), p)
    return RhsFields(acc_u=np.stack([f1, f2]) / p.rho,
                     acc_theta=-f3 / (4.0 * p.rho_rot))


@dataclass(frozen=True)
class HomogeneousRoots:
    """Spatially constant equilibrium angles of the selected model."""

    trivial_roots: tuple[float, ...]
    nontrivial_cos: float | None
    feasible: bool

    def all_roots(self) -> list[float]:
        roots = list(self.trivial_roots)
        if self.feasible and self.nontrivial_cos is not None:
            c = min(1.0, max(-1.0, self.nontrivial_cos))
            t = math.acos(c)
            for candidate in (t, -t):
                if all(abs(candidate - r) > 1e-15 for r in roots):
                    roots.append(candidate)
        return roots


def _chiral_stiffness_sums(p: MaterialParams) -> tuple[float, float]:
    """(B, C) with homogeneous chiral energy 2B(cos t - 1)^2 + 2C sin^2 t."""
    b = p.mu + p.lam + p.mu_s + p.lam_s + p.m1 + 2.0 * p.m2
    c = p.mu_c + p.mu_c_s + p.m3
    return b, c


def homogeneous_residual(theta0, p: MaterialParams, sel: ModelSelector):
    """Stationarity residual for a spatially constant angle, zero displacement.

    Non-chiral: ``((lam + mu)(1 - cos t) + mu_c) sin t``; chiral:
    ``(-B + (B - C) cos t) sin t`` with B, C the grouped stiffness sums.
    Roots of the residual are the homogeneous equilibria (overall sign is a
    convention). The non-chiral form is the rotation-coupling variant.
    """
    t = np.asarray(theta0, dtype=float)
    if sel.is_chiral:
        b, c = _chiral_stiffness_sums(p)
        res = (-b + (b - c) * np.cos(t)) * np.sin(t)
    else:
        res = ((p.lam + p.mu) * (1.0 - np.cos(t)) + p.mu_c) * np.sin(t)
    return float(res) if np.isscalar(theta0) else res


def homogeneous_roots(p: MaterialParams, sel: ModelSelector) -> HomogeneousRoots:
    """All homogeneous equilibrium angles: {0, pi} always; a nontrivial
    ``+-arccos`` pair when ``cos t0 = 1 + fraction`` lands in [-1, 1]
    (fraction in [-2, 0])."""
    if sel.is_chiral:
        b, c = _chiral_stiffness_sums(p)
        denom = b - c
        if denom == 0.0:
            raise ZeroDenominator(
                "chiral homogeneous branch undefined: B - C = 0")
        fraction = c / denom
    else:
        denom = p.lam + p.mu
        if denom == 0.0:
            raise ZeroDenominator(
                "non-chiral homogeneous branch undefined: lam + mu = 0")
        fraction = p.mu_c / denom
    return HomogeneousRoots(trivial_roots=(0.0, math.pi),
                            nontrivial_cos=1.0 + fraction,
                            feasible=-2.0 <= fraction <= 0.0)


def step_leapfrog(state: FieldState, dt: float, rhs, p: MaterialParams) -> FieldState:
    """One velocity-Verlet step: half-kick, drift, re-evaluate, half-kick.

    ``rhs`` is any callable ``(state, p) -> RhsFields``. Time-reversible:
    stepping ``+dt`` then ``-dt`` returns the initial state to round-off.
    """
    g = state.grid
    a0 = rhs(state, p)
    v1h = state.v1 + 0.5 * dt * a0.acc_u[0]
    v2h = state.v2 + 0.5 * dt * a0.acc_u[1]
    omh = state.omega + 0.5 * dt * a0.acc_theta
    drifted = FieldState(grid=g,
                         u1=state.u1 + dt * v1h,
                         u2=state.u2 + dt * v2h,
                         theta=state.theta + dt * omh,
                         v1=v1h, v2=v2h, omega=omh)
    a1 = rhs(drifted, p)
    out = FieldState(grid=g, u1=drifted.u1, u2=drifted.u2, theta=drifted.theta,
                     v1=v1h + 0.5 * dt * a1.acc_u[0],
                     v2=v2h + 0.5 * dt * a1.acc_u[1],
                     omega=omh + 0.5 * dt * a1.acc_theta)
    if not out.is_finite():
        raise NonFiniteState("state became non-finite during leapfrog step")
    return out


def _relative_max_error(diff: np.ndarray, reference: np.ndarray) -> float:
    num = float(np.max(np.abs(diff))) if np.size(diff) else 0.0
    den = float(np.max(np.abs(reference))) if np.size(reference) else 0.0
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


def _fd_nodes(grid) -> list[tuple[int, int]]:
    nx, ny = grid.nx, grid.ny
    return [(1, 2), (nx // 2, ny // 3), (nx - 3, ny - 2), (nx // 4, 2 * ny // 3)]


def _fd_term_error(state: FieldState, p: MaterialParams, term: str,
                   eps_reg: float, step: float = 1e-6) -> float:
    """Max relative error of the analytic gradient of one energy term vs a
    central finite difference of its discrete total, over a few nodes."""
    terms = (term,)
    dv_du, dv_dth = analytic_variations(state, p, None, eps_reg, terms=terms)
    area = state.grid.cell_area
    worst = 0.0
    entries = []
    for (i, j) in _fd_nodes(state.grid):
        entries.append(("u1", i, j, dv_du[0, i, j]))
        entries.append(("u2", i, j, dv_du[1, i, j]))
        entries.append(("theta", i, j, dv_dth[i, j]))
    scale = max((abs(e[3]) * area for e in entries), default=0.0)
    vmax = 0.0
    for name, i, j, analytic in entries:
        plus = state.copy()
        minus = state.copy()
        getattr(plus, name)[i, j] += step
        getattr(minus, name)[i, j] -= step
        vp = potential_total(plus, p, terms, eps_reg)
        vm = potential_total(minus, p, terms, eps_reg)
        vmax = max(vmax, abs(vp), abs(vm))
        fd = (vp - vm) / (2.0 * step)
        scale = max(scale, abs(fd))
        worst = max(worst, abs(analytic * area - fd))
    # The central difference cancels to rounding when the state sits at a
    # stationary point of the term; below that noise floor there is no signal
    # to compare (a wrong analytic gradient would still raise `scale` far
    # above the floor and be caught).
    noise = 64.0 * np.finfo(float).eps * vmax / (2.0 * step)
    if scale <= noise:
        return 0.0
    return worst / scale


def verify_variational_consistency(state: FieldState, p: MaterialParams,
                                   sel: ModelSelector,
                                   eps_reg: float = DEFAULT_EPS_REG,
                                   tolerance_scale: float = 1.0) -> VerificationReport:
    """Check that the assembled accelerations are the exact negative discrete
    energy gradient (with inertia rho for u and 2*rho_rot for theta), and that
    the analytic gradient matches nodal finite differences term by term."""
    report = VerificationReport()
    base_tol = (1e-10 if p.chi == 0.0 else 1e-8) * tolerance_scale
    fd_tol = 1e-6 * tolerance_scale

    if sel.is_chiral:
        acc = rhs_chiral(state, p)
    else:
        acc = rhs_nonlinear(state, p, coupling=sel.coupling, eps_reg=eps_reg)
    dv_du, dv_dth = analytic_variations(state, p, sel, eps_reg)

    report.add("acc_u_vs_energy_gradient",
               _relative_max_error(p.rho * acc.acc_u + dv_du, dv_du), base_tol)
    report.add("acc_theta_vs_energy_gradient",
               _relative_max_error(2.0 * p.rho_rot * acc.acc_theta + dv_dth, dv_dth),
               base_tol)

    # Record the inertia normalization of the angle equation explicitly:
    # the least-squares factor m in (-dV/dtheta) = m * rho_rot * acc_theta.
    denom = float(np.sum(acc.acc_theta**2)) * p.rho_rot
    if denom > 0.0:
        factor = float(np.sum(-dv_dth * acc.acc_theta)) / denom
        report.add("theta_inertia_factor_is_two", abs(factor - 2.0), base_tol)
    else:
        report.add("theta_inertia_factor_is_two", 0.0, base_tol)

    g = grad_scalar(state.theta, state.grid)
    gnorm_min = float(np.min(np.sqrt(g[0] ** 2 + g[1] ** 2)))
    for term in sel.active_terms():
        if term == "interaction" and p.chi == 0.0:
            continue
        if term == "interaction" and eps_reg == 0.0 and gnorm_min == 0.0:
            report.add(
                "fd_gradient_interaction:skipped_not_differentiable_at_zero_angle_gradient",
                0.0, fd_tol)
            continue
        report.add(f"fd_gradient_{term}",
                   _fd_term_error(state, p, term, eps_reg), fd_tol)
    return report
