from __future__ import annotations

import numpy as np
import pytest

from vanvleck import (
    SingularShootingJacobian,
    free_particle,
    harmonic_oscillator,
    integrate_ivp,
    magnetic_field,
    path_energy,
    solve_bvp,
    state_at,
)
from vanvleck.dynamics import Trajectory, simpson_action

from conftest import make_quartic


def test_free_ivp_is_exact():
    model = free_particle(mass=1.0, dim=1)
    traj = integrate_ivp(model, [0.0], [1.0], 0.0, 1.0, n_steps=100)
    assert traj.positions[-1, 0] == pytest.approx(1.0, abs=1e-14)
    assert traj.velocities[-1, 0] == pytest.approx(1.0, abs=1e-14)


def test_harmonic_ivp_quarter_period():
    model = harmonic_oscillator(mass=1.0, omega2=1.0, dim=1)
    traj = integrate_ivp(model, [1.0], [0.0], 0.0, np.pi / 2, n_steps=1000)
    assert abs(traj.positions[-1, 0]) < 1e-8
    assert traj.velocities[-1, 0] == pytest.approx(-1.0, abs=1e-8)


def test_cyclotron_orbit_closes():
    model = magnetic_field(mass=1.0, omega=1.0, dim=2)
    traj = integrate_ivp(model, [1.0, 0.0], [0.0, 1.0], 0.0, 2 * np.pi,
                         n_steps=4000)
    np.testing.assert_allclose(traj.positions[-1], [1.0, 0.0], atol=1e-6)
    np.testing.assert_allclose(traj.velocities[-1], [0.0, 1.0], atol=1e-6)


def test_free_bvp_velocity_and_action():
    model = free_particle(mass=1.0, dim=1)
    path = solve_bvp(model, [0.0], [3.0], 0.0, 2.0)
    assert path.v_a[0] == pytest.approx(1.5, abs=1e-12)
    # A = M (x_b - x_a)^2 / (2 T)
    assert path.action == pytest.approx(2.25, abs=1e-10)
    assert path.bvp_residual < 1e-10


def test_harmonic_bvp_action_quarter_period():
    # x(t) = sin(t), so the kinetic and potential contributions cancel:
    # A = (w/2) [(x_a^2 + x_b^2) cos(wT) - 2 x_a x_b] / sin(wT) = 0.
    model = harmonic_oscillator(mass=1.0, omega2=1.0, dim=1)
    path = solve_bvp(model, [0.0], [1.0], 0.0, np.pi / 2)
    assert path.v_a[0] == pytest.approx(1.0, abs=1e-9)
    assert abs(path.action) < 1e-10
    assert path.p_b[0] == pytest.approx(0.0, abs=1e-9)


def test_harmonic_bvp_generic_action_matches_closed_form():
    w, t_tot, xa, xb = 1.3, 1.1, 0.4, -0.2
    model = harmonic_oscillator(mass=1.0, omega2=w * w, dim=1)
    path = solve_bvp(model, [xa], [xb], 0.0, t_tot)
    s, c = np.sin(w * t_tot), np.cos(w * t_tot)
    expected = 0.5 * w * ((xa * xa + xb * xb) * c - 2 * xa * xb) / s
    assert path.action == pytest.approx(expected, abs=1e-10)


def test_harmonic_bvp_at_focal_time_raises():
    model = harmonic_oscillator(mass=1.0, omega2=1.0, dim=1)
    with pytest.raises(SingularShootingJacobian):
        solve_bvp(model, [0.0], [1.0], 0.0, np.pi)


def test_path_energy_free_is_constant():
    model = free_particle(mass=1.0, dim=1)
    path = solve_bvp(model, [0.0], [1.0], 0.0, 1.0)
    for t in (0.0, 0.25, 0.9):
        assert path_energy(path, t) == pytest.approx(0.5, abs=1e-10)


def test_path_energy_harmonic_conserved():
    model = harmonic_oscillator(mass=1.0, omega2=1.0, dim=1)
    path = solve_bvp(model, [0.0], [1.0], 0.0, np.pi / 2)
    # E = v^2/2 + x^2/2 = 1/2 along sin(t); off-grid lookups interpolate
    # (x, v) linearly, so the tolerance is O(h^2) not machine precision
    samples = [path_energy(path, t) for t in np.linspace(0.0, np.pi / 2, 7)]
    np.testing.assert_allclose(samples, 0.5, atol=1e-6)


def test_energy_conservation_quartic(quartic):
    path = solve_bvp(quartic, [0.0], [1.0], 0.0, 0.5)
    e0 = path_energy(path, 0.0)
    drift = max(abs(path_energy(path, t) - e0)
                for t in np.linspace(0.0, 0.5, 11))
    assert drift < 1e-9 * (1.0 + abs(e0))


def test_state_at_interpolates_endpoints(quartic):
    path = solve_bvp(quartic, [0.0], [1.0], 0.0, 0.5)
    x0, v0 = state_at(path, 0.0)
    xb, vb = state_at(path, 0.5)
    assert x0[0] == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(xb, [1.0], atol=1e-10)
    np.testing.assert_allclose(v0, path.v_a, atol=1e-12)


def test_rk4_fourth_order_convergence(quartic):
    # halving the step must shrink the endpoint error by about 2^4
    exact = integrate_ivp(quartic, [0.0], [1.0], 0.0, 1.0, n_steps=4096)
    errs = []
    for n in (64, 128):
        traj = integrate_ivp(quartic, [0.0], [1.0], 0.0, 1.0, n_steps=n)
        errs.append(abs(traj.positions[-1, 0] - exact.positions[-1, 0]))
    ratio = errs[0] / errs[1]
    assert 10.0 < ratio < 22.0, ratio


def test_action_stationarity_second_order(quartic, rng):
    # A[x + eps h] - A[x] scales as eps^2 for h vanishing at both ends
    path = solve_bvp(quartic, [0.0], [1.0], 0.0, 0.5, n_steps=400)
    bump = np.sin(np.pi * (path.times - path.times[0]) / 0.5)
    h = bump[:, None] * rng.normal(size=(1, 1))
    base = path.action
    deltas = []
    for eps in (1e-3, 1e-4):
        pos = path.positions + eps * h
        vel = path.velocities + eps * np.gradient(h[:, 0], path.times)[:, None]
        perturbed = Trajectory(times=path.times, positions=pos, velocities=vel)
        deltas.append(abs(simpson_action(quartic, perturbed) - base))
    ratio = deltas[0] / deltas[1]
    assert 50.0 < ratio < 200.0, ratio


def test_boundary_momenta_are_action_gradients(quartic):
    # p_b = dA/dx_b and p_a = -dA/dx_a via centered differences
    xa, xb, t_tot = 0.1, 1.0, 0.5
    h = 1e-5
    path = solve_bvp(quartic, [xa], [xb], 0.0, t_tot)

    def act(a, b):
        return solve_bvp(quartic, [a], [b], 0.0, t_tot).action

    dadb = (act(xa, xb + h) - act(xa, xb - h)) / (2 * h)
    dada = (act(xa + h, xb) - act(xa - h, xb)) / (2 * h)
    assert path.p_b[0] == pytest.approx(dadb, abs=1e-6)
    assert path.p_a[0] == pytest.approx(-dada, abs=1e-6)


def test_bvp_requires_even_step_count(quartic):
    with pytest.raises(ValueError):
        solve_bvp(quartic, [0.0], [1.0], 0.0, 0.5, n_steps=333)


def test_magnetic_bvp_circles_the_orbit_center():
    from vanvleck import magnetic_orbit_center

    model = magnetic_field(mass=1.0, omega=1.0, dim=2)
    path = solve_bvp(model, [0.0, 0.0], [1.0, 0.0], 0.0, np.pi / 2)
    center = magnetic_orbit_center([0.0, 0.0], [1.0, 0.0], 1.0, np.pi / 2)
    np.testing.assert_allclose(center, [0.5, 0.5], atol=1e-12)
    # every sample keeps the same distance from the center
    radii = np.linalg.norm(path.positions - center, axis=1)
    np.testing.assert_allclose(radii, np.sqrt(0.5), atol=1e-9)
    assert path.bvp_residual < 1e-10
