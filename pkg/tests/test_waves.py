"""Plane-wave layer: cubic-vs-determinant, branch residuals, amplitude laws,
velocity asymptotes, and the transverse-free special wave."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from cosserat2d.errors import (
    ImaginarySpeed,
    InfeasibleDensity,
    NoRealBranch,
    ZeroDenominator,
)
from cosserat2d.waves import (
    WaveParams,
    amplitude_ratio,
    dispersion_branches,
    dispersion_cubic,
    liu_material,
    phase_velocity,
    transverse_free_residual,
    transverse_free_solution,
    velocity_curve,
    vl,
    vt,
    wave_matrix,
)


def random_wave_params(rng, chiral_fraction=0.6):
    """Random parameters with the longitudinal branch kept real
    (a^2 < mu_c (lam + 2 mu), with margin)."""
    mu = rng.uniform(0.3, 2.0)
    lam = rng.uniform(0.3, 2.0)
    mu_c = rng.uniform(0.3, 2.0)
    bound = math.sqrt(mu_c * (lam + 2.0 * mu))
    a = rng.uniform(-chiral_fraction, chiral_fraction) * bound
    return WaveParams(a=a, gamma=rng.uniform(0.01, 0.5), mu=mu, lam=lam,
                      mu_c=mu_c, rho=rng.uniform(0.5, 2.0),
                      varrho_rot=rng.uniform(1.0, 4.0))


def _poly(coeffs, x):
    c3, c2, c1, c0 = coeffs
    return ((c3 * x + c2) * x + c1) * x + c0


def test_cubic_matches_numerical_determinant():
    rng = np.random.default_rng(50)
    for _ in range(40):
        wp = random_wave_params(rng)
        k = rng.uniform(0.2, 3.0)
        x = rng.uniform(0.0, 10.0)
        m = wave_matrix(k, math.sqrt(x), wp)
        det = np.linalg.det(m)
        scale = max(np.max(np.abs(m)) ** 3, 1e-30)
        assert abs(det.imag) < 1e-12 * scale
        coeffs = dispersion_cubic(k, wp)
        assert abs(det.real - _poly(coeffs, x)) < 1e-12 * scale


def test_wave_matrix_is_exactly_hermitian():
    rng = np.random.default_rng(51)
    for _ in range(20):
        wp = random_wave_params(rng)
        m = wave_matrix(rng.uniform(0.1, 3.0), rng.uniform(0.0, 3.0), wp)
        npt.assert_array_equal(m, m.conj().T)


def test_cubic_leading_coefficient_is_negative():
    rng = np.random.default_rng(52)
    for _ in range(10):
        wp = random_wave_params(rng)
        c3, _, _, _ = dispersion_cubic(rng.uniform(0.1, 3.0), wp)
        assert c3 == -(wp.rho**2) * wp.varrho_rot
        assert c3 < 0.0


def test_branches_annihilate_the_matrix():
    rng = np.random.default_rng(53)
    for _ in range(25):
        wp = random_wave_params(rng)
        k = rng.uniform(0.3, 3.0)
        branches = dispersion_branches(k, wp)
        assert branches, "expected at least one branch"
        omegas = [b.omega for b in branches]
        assert omegas == sorted(omegas)
        for b in branches:
            assert b.omega >= 0.0
            m = wave_matrix(k, b.omega, wp)
            scale = max(np.max(np.abs(m)) ** 3, 1e-30)
            assert abs(np.linalg.det(m).real) < 1e-10 * scale
            z = b.amplitudes()
            npt.assert_allclose(np.linalg.norm(z), 1.0, rtol=1e-12)
            residual = np.linalg.norm(m @ z)
            assert residual < 1e-10 * max(np.max(np.abs(m)), 1e-30)


def test_branch_phase_normalization():
    rng = np.random.default_rng(54)
    for _ in range(15):
        wp = random_wave_params(rng)
        for b in dispersion_branches(rng.uniform(0.3, 3.0), wp):
            assert abs(b.u_hat.imag) < 1e-12
            assert abs(b.v_hat.imag) < 1e-12
            assert abs(b.phi_hat.real) < 1e-12
            for lead in (b.u_hat.real, b.v_hat.real, b.phi_hat.imag):
                if abs(lead) > 1e-12:
                    assert lead > 0.0
                    break


def test_branches_even_in_wavenumber():
    rng = np.random.default_rng(55)
    for _ in range(10):
        wp = random_wave_params(rng)
        k = rng.uniform(0.3, 3.0)
        fwd = [b.omega for b in dispersion_branches(k, wp)]
        bwd = [b.omega for b in dispersion_branches(-k, wp)]
        npt.assert_allclose(fwd, bwd, rtol=1e-12, atol=1e-14)


def test_ratio_velocity_loop_closes_on_every_branch():
    rng = np.random.default_rng(56)
    for _ in range(20):
        wp = random_wave_params(rng)
        k = rng.uniform(0.3, 3.0)
        for b in dispersion_branches(k, wp):
            if b.omega < 1e-12:
                continue
            r = amplitude_ratio(k, b.omega, wp)
            v = phase_velocity(r, wp)
            npt.assert_allclose(v, b.omega / k, rtol=1e-8)
            # the nullspace amplitudes realize the same ratio
            if abs(b.v_hat) > 1e-8:
                npt.assert_allclose(b.u_hat.real / b.v_hat.real, r,
                                    rtol=1e-7, atol=1e-9)


def test_zero_chiral_modulus_decouples_longitudinal_branch():
    wp = WaveParams(a=0.0, gamma=0.02, mu=1.0, lam=1.0, mu_c=1.0,
                    rho=1.0, varrho_rot=4.0)
    assert amplitude_ratio(1.3, 0.9, wp) == 0.0
    assert vt(wp) == 1.0
    npt.assert_allclose(vl(wp), math.sqrt(3.0), rtol=1e-15)
    k = 1.7
    branches = dispersion_branches(k, wp)
    longitudinal = [b for b in branches
                    if abs(b.u_hat) > 0.99 and abs(b.v_hat) < 1e-10
                    and abs(b.phi_hat) < 1e-10]
    assert len(longitudinal) == 1
    npt.assert_allclose(longitudinal[0].omega, k * math.sqrt(3.0), rtol=1e-12)


def test_velocity_curve_runs_between_the_two_asymptotes():
    wp = WaveParams()  # defaults: a=0.5, mu=lam=mu_c=rho=1
    rows = velocity_curve(wp, samples=60)
    assert rows[0] == (0.0, vt(wp))
    assert rows[-1][0] == math.inf
    npt.assert_allclose(rows[-1][1], vl(wp), rtol=1e-15)
    velocities = [v for _, v in rows]
    diffs = np.diff(velocities)
    assert np.all(diffs > 0.0), "curve should rise from vt to vl here"
    assert min(velocities) == velocities[0]
    assert max(velocities) == velocities[-1]


def test_realizability_inequality_is_strict():
    assert WaveParams(a=1.0, mu=1.0, lam=1.0, mu_c=1.0).realizable()
    exact = WaveParams(a=math.sqrt(3.0), mu=1.0, lam=1.0, mu_c=1.0)
    assert not exact.realizable() or exact.a**2 < 3.0  # sqrt rounding aside
    assert not WaveParams(a=2.0, mu=1.0, lam=1.0, mu_c=1.0).realizable()
    with pytest.raises(ImaginarySpeed):
        vl(WaveParams(a=2.0, mu=1.0, lam=1.0, mu_c=1.0))
    with pytest.raises(ZeroDenominator):
        vl(WaveParams(a=0.0, mu_c=0.0))


def test_transverse_free_wave_solves_the_equations():
    rng = np.random.default_rng(57)
    for _ in range(20):
        wp = random_wave_params(rng)
        # keep both implied densities positive: a > 0 suffices here
        wp = WaveParams(a=abs(wp.a) + 0.05, gamma=wp.gamma, mu=wp.mu,
                        lam=wp.lam, mu_c=wp.mu_c, rho=wp.rho,
                        varrho_rot=wp.varrho_rot)
        if not wp.realizable():
            continue
        k = rng.uniform(0.3, 3.0)
        omega = rng.uniform(0.3, 3.0)
        assert transverse_free_residual(k, omega, wp) < 1e-10


def test_transverse_free_solution_values():
    wp = WaveParams(a=0.5, gamma=0.02, mu=1.0, lam=1.0, mu_c=1.0,
                    rho=1.0, varrho_rot=4.0)
    k, omega = 2.0, 1.5
    u_over_phi, rho_i, varrho_i = transverse_free_solution(k, omega, wp)
    npt.assert_allclose(u_over_phi, -2.0 * 1.0 / (0.5 * 2.0), rtol=1e-15)
    npt.assert_allclose(rho_i, 4.0 * (3.0 - 0.25) / (1.0 * 2.25), rtol=1e-15)
    npt.assert_allclose(varrho_i, (0.02 * 4.0 + 2.0) / 2.25, rtol=1e-15)


def test_transverse_free_error_paths():
    base = dict(gamma=0.02, mu=1.0, lam=1.0, rho=1.0, varrho_rot=4.0)
    with pytest.raises(ZeroDenominator,
                       match="only the trivial solution exists when mu_c = 0"):
        transverse_free_solution(1.0, 1.0, WaveParams(a=0.5, mu_c=0.0, **base))
    with pytest.raises(ZeroDenominator, match="chiral modulus"):
        transverse_free_solution(1.0, 1.0, WaveParams(a=0.0, mu_c=1.0, **base))
    with pytest.raises(ZeroDenominator):
        transverse_free_solution(-1.0, 1.0, WaveParams(a=0.5, mu_c=1.0, **base))
    with pytest.raises(ZeroDenominator):
        transverse_free_solution(1.0, 0.0, WaveParams(a=0.5, mu_c=1.0, **base))
    # gamma k^2 + 4a <= 0 makes the implied rotational density non-positive
    with pytest.raises(InfeasibleDensity):
        transverse_free_solution(
            1.0, 1.0, WaveParams(a=-0.5, mu_c=1.0, **base))


def test_no_real_branch_is_reported():
    # An unstable (negative definite) modulus set: every squared frequency
    # is negative, so no propagating branch exists.  Unreachable for mu > 0,
    # where the longitudinal diagonal entry forces a positive eigenvalue.
    wp = WaveParams(a=-1.0, gamma=0.1, mu=-1.0, lam=-2.0, mu_c=-3.0,
                    rho=1.0, varrho_rot=4.0)
    with pytest.raises(NoRealBranch):
        dispersion_branches(1.0, wp)


def test_material_round_trip_preserves_wave_parameters():
    rng = np.random.default_rng(58)
    for _ in range(10):
        wp = random_wave_params(rng)
        p = liu_material(wp)
        assert p.mu_s == wp.a
        assert p.lam_s == -2.0 * wp.a
        assert p.mu_c_s == -wp.a
        npt.assert_allclose(0.5 * p.m1 + p.m2, -wp.a, rtol=0, atol=1e-15)
        back = WaveParams.from_material(p)
        npt.assert_allclose(back.gamma, wp.gamma, rtol=1e-14)
        for name in ("a", "mu", "lam", "mu_c", "rho", "varrho_rot"):
            npt.assert_allclose(getattr(back, name), getattr(wp, name),
                                rtol=1e-15)


def test_wave_params_validation():
    with pytest.raises(Exception):
        WaveParams(rho=0.0)
    with pytest.raises(Exception):
        WaveParams(varrho_rot=-1.0)
