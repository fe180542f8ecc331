from __future__ import annotations

import numpy as np
import pytest

from vanvleck import (
    CausticRegion,
    NotQuadraticModel,
    energy_hessian_factor,
    free_particle,
    general_factor,
    harmonic_oscillator,
    magnetic_field,
    action_hessian_jacobi,
    short_time_factor,
    solve_bvp,
    vvpm_factor,
)
from vanvleck.hessian import ActionHessian

from conftest import make_quartic


def _plain_hessian(mixed):
    mixed = np.atleast_2d(np.asarray(mixed, dtype=float))
    return ActionHessian(mixed=mixed, aa=mixed, bb=mixed,
                         method="JacobiField", grid_info={})


def test_vvpm_unit_mixed():
    f = vvpm_factor(_plain_hessian(1.0))
    assert abs(f.value) == pytest.approx(0.3989422804014327, abs=1e-15)
    assert np.angle(f.value) == pytest.approx(-np.pi / 4, abs=1e-15)


def test_vvpm_harmonic_quarter_period_magnitude():
    mixed = 1.0 / np.sin(np.pi / 2)
    f = vvpm_factor(_plain_hessian(mixed))
    assert abs(f.value) == pytest.approx(1.0 / np.sqrt(2 * np.pi), abs=1e-15)
    assert np.angle(f.value) == pytest.approx(-np.pi / 4, abs=1e-15)


def test_vvpm_free_two_dim_matrix_mass():
    # det(M/T) = 4/4 = 1 -> |F| = sqrt(det M)/(2 pi T) = 2/(4 pi)
    f = vvpm_factor(_plain_hessian(np.diag([0.5, 2.0])))
    assert abs(f.value) == pytest.approx(0.15915494309189535, abs=1e-15)
    assert np.angle(f.value) == pytest.approx(-np.pi / 2, abs=1e-15)
    assert f.dim == 2


def test_vvpm_caustic_region_on_nonpositive_determinant():
    with pytest.raises(CausticRegion):
        vvpm_factor(_plain_hessian(-2.0))
    with pytest.raises(CausticRegion):
        vvpm_factor(_plain_hessian(np.diag([1.0, -1.0])))


def test_short_time_scalar_metric():
    model = free_particle(mass=1.0, dim=1)
    f = short_time_factor(model, [0.0], 0.0, 0.01)
    assert abs(f.value) == pytest.approx(10.0 / np.sqrt(2 * np.pi), rel=1e-14)
    assert np.angle(f.value) == pytest.approx(-np.pi / 4, abs=1e-14)


def test_short_time_matrix_metric():
    model = free_particle(mass=np.diag([1.0, 2.0]))
    f = short_time_factor(model, [0.0, 0.0], 0.0, 0.1)
    assert abs(f.value) == pytest.approx(np.sqrt(2.0) * 10.0 / (2 * np.pi),
                                         rel=1e-14)


def test_short_time_approaches_vvpm(quartic):
    dt = 1e-3
    path = solve_bvp(quartic, [0.2], [0.2005], 0.0, dt, n_steps=64)
    full = vvpm_factor(action_hessian_jacobi(path))
    st = short_time_factor(quartic, [0.2], 0.0, dt)
    assert abs(st.value - full.value) / abs(full.value) < 1e-3


def test_energy_hessian_free_particle():
    m = np.diag([1.0, 3.0])
    model = free_particle(mass=m)
    path = solve_bvp(model, [0.0, 0.0], [1.0, 0.5], 0.0, 2.0, n_steps=200)
    f = energy_hessian_factor(model, path)
    expected = np.sqrt(np.linalg.det(m)) / (2 * np.pi * 2.0)
    assert abs(f.value) == pytest.approx(expected, rel=1e-10)
    assert np.angle(f.value) == pytest.approx(-np.pi / 2, abs=1e-9)


def test_energy_hessian_matches_vvpm_on_harmonic():
    model = harmonic_oscillator(mass=1.0, omega2=2.25, dim=1)
    path = solve_bvp(model, [0.1], [0.9], 0.0, 1.0)
    eh = energy_hessian_factor(model, path)
    vv = vvpm_factor(action_hessian_jacobi(path))
    assert abs(eh.value - vv.value) / abs(vv.value) < 1e-6


def test_energy_hessian_matches_vvpm_on_magnetic():
    model = magnetic_field(mass=1.0, omega=1.2, dim=2)
    path = solve_bvp(model, [0.0, 0.0], [0.8, -0.1], 0.0, 1.0)
    eh = energy_hessian_factor(model, path)
    vv = vvpm_factor(action_hessian_jacobi(path))
    assert abs(eh.value - vv.value) / abs(vv.value) < 1e-6


def test_energy_hessian_rejects_anharmonic(quartic):
    path = solve_bvp(quartic, [0.0], [1.0], 0.0, 0.5)
    with pytest.raises(NotQuadraticModel):
        energy_hessian_factor(quartic, path)


def test_general_factor_free_particle():
    model = free_particle(mass=1.0, dim=1)
    path = solve_bvp(model, [0.0], [1.0], 0.0, 2.0, n_steps=100)
    f = general_factor(path)
    assert abs(f.value) == pytest.approx(1.0 / np.sqrt(4 * np.pi), rel=1e-12)
    assert f.method == "GeneralVelocityGradient"


def test_general_equals_vvpm_harmonic():
    model = harmonic_oscillator(mass=1.0, omega2=1.0, dim=1)
    path = solve_bvp(model, [0.0], [1.0], 0.0, 0.7)
    g = general_factor(path)
    v = vvpm_factor(action_hessian_jacobi(path))
    assert abs(g.value - v.value) / abs(v.value) < 1e-12


def test_general_equals_vvpm_quartic(quartic):
    path = solve_bvp(quartic, [0.0], [1.0], 0.0, 0.4)
    g = general_factor(path)
    v = vvpm_factor(action_hessian_jacobi(path))
    assert abs(g.value - v.value) / abs(v.value) < 1e-10


def test_hbar_scaling_is_exact():
    mags = []
    for hbar in (0.5, 1.0, 2.0):
        f = vvpm_factor(_plain_hessian(np.diag([1.0, 2.0, 0.7])), hbar=hbar)
        mags.append(abs(f.value) * hbar ** 1.5)
    np.testing.assert_allclose(mags, mags[0], rtol=1e-14)


def test_phase_window_before_caustic():
    model = harmonic_oscillator(mass=1.0, omega2=1.0, dim=1)
    for t_tot in (0.4, 1.5, 2.8):
        path = solve_bvp(model, [0.0], [0.3], 0.0, t_tot)
        f = vvpm_factor(action_hessian_jacobi(path))
        lo = -np.pi / 4 - np.pi / 2
        hi = -np.pi / 4 + np.pi / 2
        assert lo < np.angle(f.value) <= hi


def test_branch_note_present():
    f = vvpm_factor(_plain_hessian(1.0))
    assert "principal" in f.branch_note
    d = f.as_dict()
    assert set(d) >= {"re", "im", "magnitude", "phase", "method"}
