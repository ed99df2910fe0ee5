"""Membership, scenario classification, switch parameter, jump controls."""

import numpy as np
import pytest

from extremals import (
    DimensionError,
    NonSkewError,
    Scenario,
    ScenarioError,
    SingularArcVerdict,
    SwitchSolveError,
    classify,
    codim1_condition,
    complete_frame,
    equilibrium_jacobian,
    jump_controls,
    membership,
    parse_field,
    singular_arc_check,
    solve_d,
    sphere_rhs,
    tangent_eigenvalues,
)

from conftest import cbc_system, condnotin_instance, scenario_instance

ROT3 = np.array([[0.0, 3.0], [-3.0, 0.0]])


def test_membership_zero_matrix():
    v = membership(np.array([0.5]), np.array([[0.0]]))
    assert not v.in_sphere_image
    assert not v.in_open_ball_image
    assert not v.in_closed_ball_image
    assert v.min_norm_solution is None


def test_membership_inside_ball():
    v = membership(np.array([2.0, 0.0]), ROT3)
    assert np.allclose(v.min_norm_solution, [0.0, 2.0 / 3.0])
    assert v.in_open_ball_image
    assert v.in_closed_ball_image
    assert not v.in_sphere_image


def test_membership_outside_ball():
    v = membership(np.array([5.0, 0.0]), ROT3)
    assert np.linalg.norm(v.min_norm_solution) == pytest.approx(5.0 / 3.0)
    assert not v.in_sphere_image
    assert not v.in_open_ball_image
    assert not v.in_closed_ball_image


def test_membership_degenerate_kernel_padding():
    # rank-2 skew on R^3: a solution of norm < 1 can be padded with a kernel
    # component to land on the sphere, so the sphere image contains H0I
    hij = np.zeros((3, 3))
    hij[0, 1], hij[1, 0] = 2.0, -2.0
    h0i = np.array([1.0, 0.0, 0.0])
    v = membership(h0i, hij)
    assert v.in_sphere_image
    assert v.in_closed_ball_image
    assert not v.in_open_ball_image


def test_membership_implications(rng):
    for k in (1, 2, 3, 4, 5):
        for _ in range(20):
            from conftest import random_rotation_skew
            hij = random_rotation_skew(rng, k, 2 * (rng.integers(0, k // 2 + 1)))
            h0i = rng.normal(size=k)
            v = membership(h0i, hij)
            if v.in_open_ball_image:
                assert v.in_closed_ball_image
            if v.in_sphere_image:
                assert v.in_closed_ball_image


def test_membership_rejects_non_skew():
    with pytest.raises(NonSkewError):
        membership(np.array([1.0, 0.0]), np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_classify_examples():
    assert classify(np.array([0.7]), np.array([[0.0]])) is Scenario.A
    assert classify(np.array([1.0, 2.0]), np.zeros((2, 2))) is Scenario.B
    assert classify(np.array([5.0, 0.0]), ROT3) is Scenario.C_PRIME
    assert classify(np.array([2.0, 0.0]), ROT3) is Scenario.C_DOUBLE_PRIME
    assert classify(np.array([3.0, 0.0]), ROT3) is Scenario.COND_EQQ_FAILS
    assert classify(np.zeros(2), np.zeros((2, 2))) is Scenario.COND_EQQ_FAILS


def test_solve_d_scalar():
    for c in (0.7, -2.5):
        assert solve_d(np.array([c]), np.array([[0.0]])) == pytest.approx(abs(c))


def test_solve_d_rotation_block():
    assert solve_d(np.array([5.0, 0.0]), ROT3) == pytest.approx(4.0, abs=1e-12)


def test_solve_d_zero_matrix():
    d = solve_d(np.array([3.0, 4.0]), np.zeros((2, 2)))
    assert d == pytest.approx(5.0, abs=1e-12)


def test_solve_d_rejects_inside_ball():
    with pytest.raises(SwitchSolveError):
        solve_d(np.array([2.0, 0.0]), ROT3)


def test_phi_monotone_decreasing():
    h0i = np.array([5.0, 0.0])

    def phi(z):
        a = z * z * np.eye(2) - ROT3 @ ROT3
        return float(np.linalg.solve(a, h0i) @ h0i)

    zs = [0.3, 0.9, 2.0, 4.0, 9.0]
    vals = [phi(z) for z in zs]
    assert all(v1 > v2 for v1, v2 in zip(vals, vals[1:]))


def test_jump_controls_scalar():
    sol = jump_controls(np.array([0.7]), np.array([[0.0]]), 0.7)
    assert sol.u_plus[0] == pytest.approx(1.0)
    assert sol.u_minus[0] == pytest.approx(-1.0)


def test_jump_controls_rotation_block():
    sol = jump_controls(np.array([5.0, 0.0]), ROT3, 4.0)
    assert np.allclose(sol.u_plus, [0.8, 0.6], atol=1e-12)
    assert np.allclose(sol.u_minus, [-0.8, 0.6], atol=1e-12)
    assert np.array([5.0, 0.0]) @ sol.u_plus == pytest.approx(4.0)
    assert np.array([5.0, 0.0]) @ sol.u_minus == pytest.approx(-4.0)


def test_jump_controls_zero_matrix():
    h0i = np.array([3.0, 4.0])
    sol = jump_controls(h0i, np.zeros((2, 2)), 5.0)
    assert np.allclose(sol.u_plus, h0i / 5.0)
    assert np.allclose(sol.u_minus, -h0i / 5.0)


def test_jump_controls_are_sphere_field_zeros(rng):
    for k in (1, 2, 3, 4, 5):
        h0i, hij = condnotin_instance(rng, k)
        d = solve_d(h0i, hij)
        sol = jump_controls(h0i, hij, d)
        for u in (sol.u_plus, sol.u_minus):
            assert np.linalg.norm(sphere_rhs(u, h0i, hij)) < 1e-8


def test_d_scaling_covariance(rng):
    h0i, hij = condnotin_instance(rng, 3)
    d = solve_d(h0i, hij)
    sol = jump_controls(h0i, hij, d)
    for s in (0.5, 2.0, 7.3):
        ds = solve_d(s * h0i, s * hij)
        assert ds == pytest.approx(s * d, rel=1e-10)
        sols = jump_controls(s * h0i, s * hij, ds)
        assert np.allclose(sols.u_plus, sol.u_plus, atol=1e-9)
        assert np.allclose(sols.u_minus, sol.u_minus, atol=1e-9)


def test_equilibrium_jacobian_scalar():
    m = equilibrium_jacobian(np.array([0.7]), np.array([[0.0]]), np.array([1.0]))
    assert m[0, 0] == pytest.approx(-1.4)
    # tangent space of the 0-sphere is trivial
    assert tangent_eigenvalues(m, np.array([1.0])).size == 0


def test_equilibrium_jacobian_rotation_block():
    h0i = np.array([5.0, 0.0])
    sol = jump_controls(h0i, ROT3, 4.0)
    eig = tangent_eigenvalues(equilibrium_jacobian(h0i, ROT3, sol.u_plus),
                              sol.u_plus)
    assert np.allclose(eig.real, -4.0, atol=1e-8)


def test_equilibrium_spectrum_random(rng):
    for _ in range(10):
        h0i, hij = condnotin_instance(rng, 3)
        d = solve_d(h0i, hij)
        sol = jump_controls(h0i, hij, d)
        for sign, u in ((1.0, sol.u_plus), (-1.0, sol.u_minus)):
            eig = tangent_eigenvalues(equilibrium_jacobian(h0i, hij, u), u)
            assert np.abs(eig.real + sign * d).max() < 1e-7


def test_sphere_field_positive_in_cdoubleprime(rng):
    h0i, hij = scenario_instance(rng, 2, "Cdoubleprime")
    us = rng.normal(size=(500, 2))
    us /= np.linalg.norm(us, axis=1)[:, None]
    assert min(np.linalg.norm(sphere_rhs(u, h0i, hij)) for u in us) > 1e-3


def test_codim1_abelian_fails():
    f0 = parse_field("1; 0; 0", 3)
    f1 = parse_field("0; 1; 0", 3)
    f2 = parse_field("0; 0; 1", 3)
    system = complete_frame(f0, [f1, f2], np.zeros(3))
    res = codim1_condition(system, np.zeros(3))
    assert np.allclose(res.a, 0.0, atol=1e-10)
    assert np.allclose(res.A, 0.0, atol=1e-10)
    assert not res.holds


def test_codim1_constructed_instance():
    system = cbc_system(5.0, 3.0)
    res = codim1_condition(system, np.zeros(3))
    assert res.a[0] == pytest.approx(5.0, abs=1e-8)
    assert res.a[1] == pytest.approx(0.0, abs=1e-8)
    assert res.A[0, 1] == pytest.approx(3.0, abs=1e-8)
    assert res.holds
    # both C' and C'' instances satisfy the sphere exclusion; only the
    # boundary |a| = |A block| violates it
    assert codim1_condition(cbc_system(2.0, 3.0), np.zeros(3)).holds
    assert not codim1_condition(cbc_system(3.0, 3.0), np.zeros(3)).holds


def test_codim1_requires_corank_one():
    f0 = parse_field("0; 0; 1", 3)
    f1 = parse_field("1; 0; 0", 3)
    system = complete_frame(f0, [f1], np.zeros(3))
    with pytest.raises(DimensionError):
        codim1_condition(system, np.zeros(3))


def test_codim1_reduces_to_determinant_inequality():
    # for n = 3, k = 2 the condition is
    # det^2(f1,f2,[f0,f1]) + det^2(f1,f2,[f0,f2]) != det^2(f1,f2,[f1,f2])
    for c, b in ((5.0, 3.0), (2.0, 3.0), (1.0, 4.0), (6.0, 1.0)):
        system = cbc_system(c, b)
        res = codim1_condition(system, np.zeros(3))
        lhs = res.a[0] ** 2 + res.a[1] ** 2
        rhs = res.A[0, 1] ** 2
        assert res.holds == (abs(lhs - rhs) > 1e-6 * max(lhs, rhs))


def test_singular_arc_verdicts():
    assert singular_arc_check(np.array([5.0, 0.0]), ROT3) is \
        SingularArcVerdict.CONTRADICTION_NORM
    assert singular_arc_check(np.array([2.0, 0.0]), ROT3) is \
        SingularArcVerdict.GOH_EXCLUDED
    assert singular_arc_check(np.array([0.7]), np.array([[0.0]])) is \
        SingularArcVerdict.CONTRADICTION_NORM
    with pytest.raises(ScenarioError):
        singular_arc_check(np.array([3.0, 0.0]), ROT3)
