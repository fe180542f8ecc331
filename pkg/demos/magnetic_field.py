"""Charged particle in a uniform magnetic field.

The in-plane motion circles a center fixed by the endpoints and the
rotation angle; the factor picks up (wT/2)/sin(wT/2) per transverse pair
and hits a focal point at a full turn.
"""
import numpy as np

from vanvleck import (
    FocalPoint,
    magnetic_field,
    magnetic_factor,
    magnetic_orbit_center,
    solve_bvp,
    state_at,
    action_hessian_jacobi,
    vvpm_factor,
)

mass = 1.0
omega = 1.0
duration = 0.5 * np.pi  # quarter turn
model = magnetic_field(mass=mass, omega=omega, dim=2)

x_a = np.array([0.0, 0.0])
x_b = np.array([1.0, 0.0])
path = solve_bvp(model, x_a, x_b, 0.0, duration, n_steps=2000)

center = magnetic_orbit_center(x_a, x_b, omega, duration)
print(f"predicted orbit center: {center}")
radii = np.linalg.norm(path.positions - center, axis=1)
print(f"radius along the path : {radii.min():.12f} .. {radii.max():.12f}")

x_mid, v_mid = state_at(path, 0.5 * duration)
print(f"midpoint state        : x = {x_mid}, v = {v_mid}")

numeric = vvpm_factor(action_hessian_jacobi(path))
closed = magnetic_factor(mass, omega, 2, duration, x_a=x_a, x_b=x_b)
print(f"\nfactor, numeric     : {numeric.value:.12g}")
print(f"factor, closed form : {closed.factor.value:.12g}")
print(f"enhancement over free flow: "
      f"{(0.5 * omega * duration) / np.sin(0.5 * omega * duration):.12f}")
print(f"action along the arc: {path.action:.12f} "
      f"(closed form {closed.action:.12f})")

print("\na full turn returns every start point, so the factor diverges:")
try:
    magnetic_factor(mass, omega, 2, 2.0 * np.pi / omega)
except FocalPoint as exc:
    print(f"  FocalPoint: {exc}")
