"""Sphere flow on the blow-up fiber and its linear Lorentz lift."""

import numpy as np
import pytest
from scipy.linalg import expm

from extremals import (
    LorentzState,
    cone_directions,
    integrate_lorentz,
    integrate_sphere,
    jump_controls,
    lorentz_form,
    lorentz_matrix,
    solve_d,
    sphere_limits,
    sphere_rhs,
)

from conftest import condnotin_instance, scenario_instance

H0I = np.array([5.0, 0.0])
HIJ = np.array([[0.0, 3.0], [-3.0, 0.0]])
U_PLUS = np.array([0.8, 0.6])
U_MINUS = np.array([-0.8, 0.6])


def test_rhs_tangency(rng):
    for k in (2, 3, 4):
        h0i, hij = condnotin_instance(rng, k)
        for _ in range(10):
            u = rng.normal(size=k)
            u /= np.linalg.norm(u)
            assert abs(sphere_rhs(u, h0i, hij) @ u) < 1e-12


def test_rhs_vanishes_at_jump_controls():
    assert np.linalg.norm(sphere_rhs(U_PLUS, H0I, HIJ)) < 1e-12
    assert np.linalg.norm(sphere_rhs(U_MINUS, H0I, HIJ)) < 1e-12


def test_rhs_scalar_case():
    c = 0.7
    assert sphere_rhs(np.array([1.0]), np.array([c]), np.zeros((1, 1)))[0] == 0.0


def test_sphere_flow_limits_match_example():
    states = integrate_sphere(np.array([0.0, 1.0]), H0I, HIJ, (-40.0, 40.0))
    assert np.linalg.norm(states[-1].u - U_PLUS) < 1e-6
    assert np.linalg.norm(states[0].u - U_MINUS) < 1e-6


def test_sphere_flow_stays_at_equilibrium():
    states = integrate_sphere(U_PLUS, H0I, HIJ, (0.0, 10.0))
    for st in states:
        assert np.linalg.norm(st.u - U_PLUS) < 1e-9


def test_sphere_flow_trivial_zero_sphere():
    c = np.array([0.9])
    z = np.zeros((1, 1))
    for u0 in (1.0, -1.0):
        states = integrate_sphere(np.array([u0]), c, z, (-5.0, 5.0))
        assert all(st.u[0] == pytest.approx(u0) for st in states)


def test_sphere_drift_stays_small():
    _, drift = integrate_sphere(np.array([0.0, 1.0]), H0I, HIJ, (0.0, 10.0),
                                return_drift=True)
    assert drift < 1e-9


def test_lorentz_eigenvector_solution():
    z0 = LorentzState(1.0, U_PLUS)
    states = integrate_lorentz(z0, H0I, HIJ, (0.0, 1.0), n_samples=5)
    for st in states:
        factor = np.exp(4.0 * st.s)
        assert st.x_scalar == pytest.approx(factor, rel=1e-12)
        assert np.allclose(st.y, factor * U_PLUS, rtol=1e-12)


def test_lorentz_form_conserved(rng):
    # spans scaled by the spectral gap: at amplitudes e^{|s| d} >> 1 the form
    # is a difference of huge squares and absolute conservation is not
    # representable in double precision
    for k in (2, 3, 4):
        h0i, hij = condnotin_instance(rng, k)
        d = solve_d(h0i, hij)
        span = 5.0 / d
        z0 = LorentzState(rng.normal(), rng.normal(size=k))
        q0 = lorentz_form(z0)
        states = integrate_lorentz(z0, h0i, hij, (-span, span), n_samples=201)
        for st in states:
            assert abs(lorentz_form(st) - q0) < 1e-9 * (1.0 + abs(q0)) * max(abs(st.s), 1.0)


def test_lorentz_spectrum():
    for rng_seed in (0, 1):
        rng = np.random.default_rng(rng_seed)
        for k in (2, 3, 4):
            h0i, hij = condnotin_instance(rng, k)
            d = solve_d(h0i, hij)
            sol = jump_controls(h0i, hij, d)
            b = lorentz_matrix(h0i, hij)
            # (1, u_pm) are eigenvectors with eigenvalues +-d
            assert np.allclose(b @ np.concatenate([[1.0], sol.u_plus]),
                               d * np.concatenate([[1.0], sol.u_plus]), atol=1e-9)
            assert np.allclose(b @ np.concatenate([[1.0], sol.u_minus]),
                               -d * np.concatenate([[1.0], sol.u_minus]), atol=1e-9)
            eig = np.linalg.eigvals(b)
            real = np.sort(eig.real)
            assert real[0] == pytest.approx(-d, abs=1e-8)
            assert real[-1] == pytest.approx(d, abs=1e-8)
            assert np.abs(real[1:-1]).max(initial=0.0) < 1e-8


def test_cone_route_matches_sphere_route():
    d = 4.0
    s_max = 40.0 / d
    grid = np.linspace(-s_max, s_max, 401)
    u0 = np.array([0.0, 1.0])
    cone = cone_directions(u0, H0I, HIJ, grid)
    states = integrate_sphere(u0, H0I, HIJ, (-s_max, s_max), s_eval=grid)
    by_s = {st.s: st.u for st in states}
    worst = max(np.linalg.norm(by_s[s] - cone[i]) for i, s in enumerate(grid))
    assert worst < 1e-6


def test_cone_route_is_exact_linear_solution():
    # one exponential step against the direct matrix exponential
    grid = np.array([0.0, 0.25])
    u0 = np.array([0.6, -0.8])
    cone = cone_directions(u0, H0I, HIJ, grid)
    z = expm(lorentz_matrix(H0I, HIJ) * 0.25) @ np.concatenate([[1.0], u0])
    assert np.allclose(cone[1], z[1:] / z[0], atol=1e-13)


def test_sphere_limits_random_starts(rng):
    for k, scen in ((3, "A"), (2, "Cprime"), (4, "B")):
        h0i, hij = scenario_instance(rng, k, scen)
        d = solve_d(h0i, hij)
        sol = jump_controls(h0i, hij, d)
        for _ in range(5):
            u0 = rng.normal(size=k)
            u0 /= np.linalg.norm(u0)
            fwd, bwd = sphere_limits(u0, h0i, hij, d)
            assert np.linalg.norm(fwd - sol.u_plus) < 1e-6
            assert np.linalg.norm(bwd - sol.u_minus) < 1e-6
